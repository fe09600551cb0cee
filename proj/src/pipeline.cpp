// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#include "portlink/config.hpp"
#include "portlink/error.hpp"
#include "portlink/multiport.hpp"
#include "portlink/parallel.hpp"
#include "portlink/text.hpp"
#include "portlink/touchstone.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;

namespace portlink::cli
{
    namespace
    {
        std::size_t target_row(const RunConfig &c, std::size_t n_rx)
        {
            const std::size_t row = c.beam_target == linkproc::BeamTarget::Row1 ? 0 : 1;
            return row < n_rx ? row : 0;
        }

        propagation::ChannelEnsemble build_ensemble(const RunConfig &c)
        {
            if (c.stochastic)
                return propagation::generate_stochastic_ensemble(c.users, c.stochastic->n_rx, c.stochastic->n_tx,
                                                                 c.stochastic->correlation_matrix(), c.seed,
                                                                 c.frequency_hz);
            const SceneSpec spec = load_scene(*c.scene);
            const auto bs_net = touchstone::load_touchstone(c.bs_touchstone->string());
            const auto ue_net = touchstone::load_touchstone(c.ue_touchstone->string());

            propagation::EnsembleOptions opt;
            opt.max_bounces = c.max_bounces;
            opt.frequency_hz = c.frequency_hz;
            opt.s_t = multiport::interpolate_network(bs_net, c.frequency_hz);
            opt.s_r = multiport::interpolate_network(ue_net, c.frequency_hz);
            opt.threads = c.threads;

            propagation::RingSampler ring = c.ring;
            ring.count = c.users;
            ring.seed = c.seed;
            return propagation::generate_ensemble(spec.scene, spec.base_station, spec.user_equipment, ring, opt);
        }

        double mean_target_gain(const propagation::ChannelEnsemble &ens, std::size_t row)
        {
            double sum = 0.0;
            for (const auto &u : ens.users)
                sum += u.h.entries().row(static_cast<Eigen::Index>(row)).squaredNorm();
            return sum / static_cast<double>(ens.users.size());
        }

        std::string csv_name(linkproc::Scheme s, double noise_dbm)
        {
            return linkproc::to_string(s) + "_noise" + format_number(noise_dbm) + "dBm.csv";
        }

        nlohmann::ordered_json vec_json(const Vec3 &v) { return {v.x(), v.y(), v.z()}; }
    }

    RunSummary run(const RunConfig &c)
    {
        const auto diagnostics = validate(c);
        if (has_errors(diagnostics))
        {
            std::string msg = "invalid configuration:";
            for (const auto &d : diagnostics)
                if (d.severity == Diagnostic::Severity::error)
                    msg += "\n  " + d.message;
            throw ConfigError(msg);
        }

        const propagation::ChannelEnsemble ens = build_ensemble(c);
        const std::size_t row = target_row(c, ens.n_rx());
        const double gain = mean_target_gain(ens, row);
        if (!(gain > 0.0))
            throw ConfigError("ensemble has zero mean channel gain; nothing reaches the receiver");

        RunSummary summary;
        double px = c.signal_power_dbm ? dbm_to_watt(*c.signal_power_dbm) : 0.0;
        if (c.calibrate)
            px = dbm_to_watt(c.calibrate->noise_power_dbm) * std::pow(10.0, c.calibrate->receive_snr_db / 10.0) / gain;
        summary.signal_power_watt = px;

        // Stage 1: rates for every (noise power, scheme, user).
        std::map<std::string, std::string> files; // name -> content, written at the end
        std::vector<std::map<linkproc::Scheme, analysis::OutageCurve>> curves(c.noise_power_dbm.size());
        std::vector<double> snr_db;
        for (std::size_t k = 0; k < c.noise_power_dbm.size(); ++k)
        {
            const linkproc::LinkBudget lb{c.bandwidth_hz, px, dbm_to_watt(c.noise_power_dbm[k])};
            snr_db.push_back(10.0 * std::log10(px * gain / lb.noise_power));
            for (auto scheme : c.schemes)
            {
                std::vector<double> rates(ens.users.size());
                parallel_for(ens.users.size(), c.threads, [&](std::size_t u)
                             { rates[u] = linkproc::evaluate(scheme, ens.users[u].h, lb, c.beam_target).rate; });
                auto curve = analysis::outage_cdf(rates, scheme, lb);
                std::ostringstream csv;
                analysis::write_curve_csv(csv, curve, snr_db.back());
                files[csv_name(scheme, c.noise_power_dbm[k])] = csv.str();
                curves[k].emplace(scheme, std::move(curve));
            }
        }

        // Stage 2: gains.
        auto &report = summary.report;
        report.snr_points = snr_db;
        const auto has = [&](linkproc::Scheme s)
        { return std::find(c.schemes.begin(), c.schemes.end(), s) != c.schemes.end(); };
        if (has(linkproc::Scheme::Miso1x1) && has(linkproc::Scheme::Mrc2x1))
        {
            for (std::size_t k = 0; k < curves.size(); ++k)
            {
                const auto &c1 = curves[k].at(linkproc::Scheme::Miso1x1);
                const auto &c2 = curves[k].at(linkproc::Scheme::Mrc2x1);
                const double threshold = c1.rate_at(c.diversity_threshold_quantile);
                try
                {
                    const double d = analysis::diversity_gain(c2, c1, threshold);
                    if (!report.diversity_gain)
                    {
                        report.diversity_gain = d;
                        report.threshold_rate = threshold;
                    }
                    report.notes.push_back("diversity gain " + format_number(d) + " at noise power " +
                                           format_number(c.noise_power_dbm[k]) + " dBm");
                }
                catch (const ThresholdRangeError &e)
                {
                    report.notes.push_back("noise power " + format_number(c.noise_power_dbm[k]) + " dBm: " + e.what());
                }
            }
        }
        else
            report.notes.push_back("diversity gain needs miso_1x1 and mrc_2x1");

        if (has(linkproc::Scheme::Optimal))
        {
            std::vector<analysis::SnrPoint> pts;
            for (std::size_t k = 0; k < curves.size(); ++k)
                pts.push_back({snr_db[k], curves[k].at(linkproc::Scheme::Optimal).median()});
            try
            {
                report.multiplexing_gain = analysis::multiplexing_gain(pts, c.bandwidth_hz);
            }
            catch (const AnalysisError &e)
            {
                report.notes.push_back(std::string("multiplexing gain not computed: ") + e.what());
            }
        }

        if (c.ue_touchstone)
        {
            const auto s = multiport::interpolate_network(touchstone::load_touchstone(c.ue_touchstone->string()),
                                                          c.frequency_hz);
            if (s.dim() == 2)
            {
                report.ecc = analysis::ecc_from_sparams(s);
                report.isolation_db = analysis::isolation_db(s);
            }
        }
        files["gain_report.json"] = analysis::gain_report_json(report);

        std::ostringstream ens_text;
        propagation::write_ensemble(ens_text, ens);
        files["ensemble.txt"] = ens_text.str();

        // Manifest: everything needed to re-run, no timestamps.
        const std::string cfg = config_to_json(c);
        nlohmann::ordered_json manifest;
        manifest["manifest_version"] = 1;
        manifest["tool"] = "portlink";
        manifest["version"] = version;
        manifest["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                    "." + std::to_string(EIGEN_MINOR_VERSION);
        manifest["config_hash"] = to_hex(fnv1a(cfg));
        manifest["seed"] = c.seed;
        manifest["scene_hash"] = ens.scene_hash;
        manifest["signal_power_dbm"] = watt_to_dbm(px);
        auto artifacts = nlohmann::ordered_json::array();
        for (const auto &[name, _] : files)
            artifacts.push_back(name);
        manifest["artifacts"] = artifacts;
        manifest["config"] = nlohmann::ordered_json::parse(cfg);
        files["manifest.json"] = manifest.dump(2) + "\n";

        // Stage 3: single writer.
        fs::create_directories(c.output_dir);
        for (const auto &[name, content] : files)
        {
            const fs::path p = c.output_dir / name;
            std::ofstream out(p, std::ios::binary);
            out << content;
            if (!out)
                throw ConfigError("cannot write '" + p.string() + "'");
            summary.files.push_back(p);
        }
        return summary;
    }

    std::string trace_json(const RunConfig &c, const Vec3 &user_position)
    {
        if (!c.scene)
            throw ConfigError("trace needs a scene configuration");
        SceneSpec spec = load_scene(*c.scene);
        spec.scene.carrier_hz = c.frequency_hz;
        const ArrayPlacement ue = spec.user_equipment.moved_to(user_position);
        const auto ps = propagation::trace_paths(spec.scene, spec.base_station, ue, c.max_bounces);

        nlohmann::ordered_json j;
        j["frequency_hz"] = ps.frequency_hz;
        j["tx_origin_m"] = vec_json(ps.tx_origin);
        j["rx_origin_m"] = vec_json(ps.rx_origin);
        auto paths = nlohmann::ordered_json::array();
        for (const auto &p : ps.paths)
        {
            nlohmann::ordered_json jp;
            jp["bounces"] = p.bounces;
            jp["length_m"] = p.length;
            jp["delay_s"] = p.delay;
            jp["departure"] = vec_json(p.departure);
            jp["arrival"] = vec_json(p.arrival);
            auto g = nlohmann::ordered_json::array();
            for (int r = 0; r < 2; ++r)
                for (int t = 0; t < 2; ++t)
                    g.push_back({p.gain(r, t).real(), p.gain(r, t).imag()});
            jp["gain_theta_phi"] = g;
            auto refl = nlohmann::ordered_json::array();
            for (const auto &r : p.reflections)
                refl.push_back({{"facet", r.facet},
                                {"point_m", vec_json(r.point)},
                                {"perpendicular", {r.coefficients.perpendicular.real(), r.coefficients.perpendicular.imag()}},
                                {"parallel", {r.coefficients.parallel.real(), r.coefficients.parallel.imag()}}});
            jp["reflections"] = refl;
            paths.push_back(jp);
        }
        j["paths"] = paths;
        return j.dump(2) + "\n";
    }
}
