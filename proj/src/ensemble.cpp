// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#include "portlink/ensemble.hpp"
#include "portlink/error.hpp"
#include "portlink/parallel.hpp"
#include "portlink/text.hpp"

#include <json.hpp>

#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

namespace portlink::propagation
{
    std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index)
    {
        // splitmix64 finalizer over the combined key
        std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::vector<Vec3> sample_ring(const RingSampler &sampler, const Vec3 &center)
    {
        if (sampler.count == 0)
            throw PropagationError("ring sampler needs at least one user");
        if (!(sampler.r_min >= 0.0) || !(sampler.r_max > sampler.r_min))
            throw PropagationError("ring sampler needs 0 <= r_min < r_max");
        if (!(sampler.sector_max_deg > sampler.sector_min_deg))
            throw PropagationError("ring sampler sector is empty");
        std::vector<Vec3> out;
        out.reserve(sampler.count);
        const double deg = std::numbers::pi / 180.0;
        for (std::size_t i = 0; i < sampler.count; ++i)
        {
            std::mt19937_64 rng(stream_seed(sampler.seed, i));
            std::uniform_real_distribution<double> area(sampler.r_min * sampler.r_min, sampler.r_max * sampler.r_max);
            std::uniform_real_distribution<double> az(sampler.sector_min_deg * deg, sampler.sector_max_deg * deg);
            const double r = std::sqrt(area(rng));
            const double a = az(rng);
            out.emplace_back(center.x() + r * std::cos(a), center.y() + r * std::sin(a), sampler.height);
        }
        return out;
    }

    CMatrix psd_sqrt(const CMatrix &m)
    {
        if (m.rows() != m.cols() || m.rows() == 0)
            throw PropagationError("matrix square root needs a square matrix");
        const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
            throw PropagationError("correlation matrix is not Hermitian");
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(m);
        const auto &ev = eig.eigenvalues();
        if (ev.minCoeff() < -1e-12 * scale)
            throw PropagationError("correlation matrix is not positive semidefinite (eigenvalue " +
                                   format_number(ev.minCoeff()) + ")");
        const Eigen::VectorXd root = ev.cwiseMax(0.0).cwiseSqrt();
        return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().adjoint();
    }

    CMatrix radiation_factor(const ScatteringMatrix &s)
    {
        const auto n = static_cast<Eigen::Index>(s.dim());
        CMatrix power = CMatrix::Identity(n, n) - s.entries().adjoint() * s.entries();
        power = 0.5 * (power + power.adjoint()).eval();
        try
        {
            return psd_sqrt(power);
        }
        catch (const PropagationError &)
        {
            throw PropagationError("antenna network is not passive; radiation factor undefined");
        }
    }

    ChannelEnsemble generate_ensemble(const Scene &scene, const ArrayPlacement &bs, const ArrayPlacement &ue_template,
                                      const std::vector<Vec3> &placements, const EnsembleOptions &options,
                                      std::uint64_t seed)
    {
        if (placements.empty())
            throw PropagationError("ensemble needs at least one placement");
        const double f = options.frequency_hz.value_or(scene.carrier_hz);

        const ScatteringMatrix s_t = options.s_t.value_or(ScatteringMatrix::zero(bs.size()));
        const ScatteringMatrix s_r = options.s_r.value_or(ScatteringMatrix::zero(ue_template.size()));
        if (s_t.dim() != bs.size() || s_r.dim() != ue_template.size())
            throw PropagationError("antenna network port counts do not match the arrays");
        const auto term = options.terminations.value_or(multiport::TerminationSet::matched(bs.size(), ue_template.size()));

        // Lossless-antenna embedding. For a reciprocal receive network the
        // receive-side factor is the transpose of its transmit-side factor.
        const std::optional<CMatrix> tx_embed = options.s_t ? std::optional(radiation_factor(s_t)) : std::nullopt;
        const std::optional<CMatrix> rx_embed =
            options.s_r ? std::optional<CMatrix>(radiation_factor(s_r).transpose()) : std::nullopt;

        Scene at_f = scene;
        at_f.carrier_hz = f;

        ChannelEnsemble out;
        out.carrier_hz = f;
        out.seed = seed;
        out.scene_hash = scene_hash(scene);
        out.users.resize(placements.size());
        parallel_for(placements.size(), options.threads, [&](std::size_t i)
                     {
                         const ArrayPlacement ue = ue_template.moved_to(placements[i]);
                         const PathSet paths = trace_paths(at_f, bs, ue, options.max_bounces);
                         ChannelMatrix srt = assemble_srt(paths, bs, ue, f);
                         if (tx_embed || rx_embed)
                         {
                             CMatrix m = srt.entries();
                             if (rx_embed)
                                 m = (*rx_embed * m).eval();
                             if (tx_embed)
                                 m = (m * *tx_embed).eval();
                             srt = ChannelMatrix(std::move(m), f);
                         }
                         out.users[i] = UserChannel{placements[i], multiport::cascade_channel(s_t, s_r, srt, term)}; });
        return out;
    }

    ChannelEnsemble generate_ensemble(const Scene &scene, const ArrayPlacement &bs, const ArrayPlacement &ue_template,
                                      const RingSampler &sampler, const EnsembleOptions &options)
    {
        return generate_ensemble(scene, bs, ue_template, sample_ring(sampler, bs.origin), options, sampler.seed);
    }

    ChannelEnsemble generate_stochastic_ensemble(std::size_t n_users, std::size_t n_rx, std::size_t n_tx,
                                                 const CMatrix &rx_correlation, std::uint64_t seed, double carrier_hz)
    {
        if (n_users == 0 || n_rx == 0 || n_tx == 0)
            throw PropagationError("stochastic ensemble needs positive user and port counts");
        if (static_cast<std::size_t>(rx_correlation.rows()) != n_rx)
            throw PropagationError("receive correlation must be " + std::to_string(n_rx) + "x" + std::to_string(n_rx));
        const CMatrix root = psd_sqrt(rx_correlation);

        ChannelEnsemble out;
        out.carrier_hz = carrier_hz;
        out.seed = seed;
        out.scene_hash = "stochastic";
        out.users.reserve(n_users);
        const auto rx = static_cast<Eigen::Index>(n_rx), tx = static_cast<Eigen::Index>(n_tx);
        for (std::size_t u = 0; u < n_users; ++u)
        {
            std::mt19937_64 rng(stream_seed(seed, u));
            std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
            CMatrix iid(rx, tx);
            for (Eigen::Index j = 0; j < tx; ++j)
                for (Eigen::Index i = 0; i < rx; ++i)
                {
                    const double re = gauss(rng);
                    const double im = gauss(rng);
                    iid(i, j) = {re, im};
                }
            out.users.push_back(UserChannel{Vec3::Zero(), ChannelMatrix(root * iid, carrier_hz)});
        }
        return out;
    }

    void write_ensemble(std::ostream &out, const ChannelEnsemble &ensemble)
    {
        if (ensemble.users.empty())
            throw PropagationError("cannot write an empty ensemble");
        nlohmann::ordered_json header;
        header["format"] = "portlink-ensemble";
        header["version"] = 1;
        header["n_users"] = ensemble.users.size();
        header["n_rx"] = ensemble.n_rx();
        header["n_tx"] = ensemble.n_tx();
        header["carrier_hz"] = ensemble.carrier_hz;
        header["seed"] = ensemble.seed;
        header["scene_hash"] = ensemble.scene_hash;
        out << header.dump() << '\n';
        for (const auto &u : ensemble.users)
        {
            out << format_number(u.position.x()) << ' ' << format_number(u.position.y()) << ' '
                << format_number(u.position.z());
            const CMatrix &h = u.h.entries();
            for (Eigen::Index i = 0; i < h.rows(); ++i)
                for (Eigen::Index j = 0; j < h.cols(); ++j)
                    out << ' ' << format_number(h(i, j).real()) << ' ' << format_number(h(i, j).imag());
            out << '\n';
        }
    }

    ChannelEnsemble read_ensemble(std::istream &in)
    {
        std::string line;
        if (!std::getline(in, line))
            throw PropagationError("ensemble file is empty");
        nlohmann::json header;
        try
        {
            header = nlohmann::json::parse(line);
        }
        catch (const nlohmann::json::exception &e)
        {
            throw PropagationError(std::string("bad ensemble header: ") + e.what());
        }
        if (header.value("format", "") != "portlink-ensemble" || header.value("version", 0) != 1)
            throw PropagationError("not a version 1 portlink ensemble");

        ChannelEnsemble ens;
        const auto n_users = header.at("n_users").get<std::size_t>();
        const auto n_rx = header.at("n_rx").get<Eigen::Index>();
        const auto n_tx = header.at("n_tx").get<Eigen::Index>();
        ens.carrier_hz = header.at("carrier_hz").get<double>();
        ens.seed = header.at("seed").get<std::uint64_t>();
        ens.scene_hash = header.at("scene_hash").get<std::string>();
        for (std::size_t u = 0; u < n_users; ++u)
        {
            if (!std::getline(in, line))
                throw PropagationError("ensemble file truncated at user " + std::to_string(u));
            std::istringstream row(line);
            double x, y, z;
            if (!(row >> x >> y >> z))
                throw PropagationError("bad position for user " + std::to_string(u));
            CMatrix h(n_rx, n_tx);
            for (Eigen::Index i = 0; i < n_rx; ++i)
                for (Eigen::Index j = 0; j < n_tx; ++j)
                {
                    double re, im;
                    if (!(row >> re >> im))
                        throw PropagationError("bad channel entry for user " + std::to_string(u));
                    h(i, j) = {re, im};
                }
            ens.users.push_back(UserChannel{Vec3(x, y, z), ChannelMatrix(std::move(h), ens.carrier_hz)});
        }
        return ens;
    }
}
