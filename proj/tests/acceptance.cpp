// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "oracles.hpp"
#include "scenarios.hpp"

#include "portlink/analysis.hpp"
#include "portlink/config.hpp"
#include "portlink/error.hpp"
#include "portlink/multiport.hpp"
#include "portlink/propagation.hpp"
#include "portlink/touchstone.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

using namespace portlink;
namespace fs = std::filesystem;

namespace
{
    // Pinned tolerances and budgets.
    constexpr double cascade_tol = 1e-10;
    constexpr double roundtrip_tol = 1e-12;
    constexpr double sinr_tol = 1e-10;
    constexpr double chain_rule_tol = 1e-10;
    constexpr double fresnel_tol = 1e-12;
    constexpr double ecc_target = 0.04, ecc_tol = 0.005;
    constexpr double isolation_target = -22.0, isolation_tol = 0.1;
    constexpr double iid_d_lo = 1.7, iid_d_hi = 2.3;
    constexpr double corr_d_lo = 0.9, corr_d_hi = 1.1;
    constexpr double iid_slope_lo = 1.8, iid_slope_hi = 2.05;
    constexpr double rank1_slope_lo = 0.9, rank1_slope_hi = 1.1;
    constexpr double mux_advantage = 1.25;
    constexpr double budget_10s = 10.0, budget_60s = 60.0, budget_5min = 300.0;

    const fs::path data_dir = PORTLINK_DATA_DIR;

    struct Outcome
    {
        bool pass;
        std::string detail;
    };

    using Clock = std::chrono::steady_clock;

    double seconds_since(Clock::time_point t0)
    {
        return std::chrono::duration<double>(Clock::now() - t0).count();
    }

    std::string fmt(const char *f, auto... args)
    {
        char buf[512];
        std::snprintf(buf, sizeof buf, f, args...);
        return buf;
    }

    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    fs::path scratch(const std::string &name)
    {
        const fs::path p = fs::temp_directory_path() / ("portlink_acceptance_" + name);
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }

    Outcome cascade_oracle()
    {
        const auto t0 = Clock::now();
        oracle::Rng rng(1001);
        double worst = 0.0;
        bool identity_exact = true;
        for (int trial = 0; trial < 1000; ++trial)
        {
            const auto nt = rng.integer(1, 16), nr = rng.integer(1, 4);
            const CMatrix s_t = oracle::random_passive(nt, rng), s_r = oracle::random_passive(nr, rng);
            const CMatrix s_s = oracle::random_passive(nt, rng), s_l = oracle::random_passive(nr, rng);
            const CMatrix srt = oracle::random_complex(nr, nt, rng);
            const ScatteringMatrix st(s_t), sr(s_r);
            const ChannelMatrix ch(srt, 3.16e9);
            const auto h = multiport::cascade_channel(st, sr, ch,
                                                      {ScatteringMatrix(s_s), ScatteringMatrix(s_l)});
            worst = std::max(worst,
                             oracle::relative_error(h.entries(), oracle::block_system_channel(s_t, s_r, srt, s_s, s_l)));
            identity_exact = identity_exact &&
                             multiport::cascade_channel(st, sr, ch, multiport::TerminationSet::matched(nt, nr)).entries() ==
                                 srt;
        }
        const double t = seconds_since(t0);
        return {worst < cascade_tol && identity_exact && t < budget_10s,
                fmt("1000 instances, max rel err %.2e, zero-termination identity %s, %.2f s", worst,
                    identity_exact ? "exact" : "BROKEN", t)};
    }

    double network_diff(const touchstone::TouchstoneNetwork &a, const touchstone::TouchstoneNetwork &b)
    {
        if (a.points().size() != b.points().size() || a.n_ports() != b.n_ports())
            return INFINITY;
        double worst = 0.0;
        for (std::size_t k = 0; k < a.points().size(); ++k)
        {
            const auto &x = a.points()[k], &y = b.points()[k];
            worst = std::max(worst, std::abs(x.frequency_hz - y.frequency_hz) / y.frequency_hz);
            const CMatrix &mx = x.matrix.entries(), &my = y.matrix.entries();
            for (Eigen::Index i = 0; i < mx.rows(); ++i)
                for (Eigen::Index j = 0; j < mx.cols(); ++j)
                    if (mx(i, j) != my(i, j))
                        worst = std::max(worst, std::abs(mx(i, j) - my(i, j)) / std::abs(my(i, j)));
        }
        return worst;
    }

    Outcome touchstone_roundtrip()
    {
        using touchstone::DataFormat;
        const auto t0 = Clock::now();
        oracle::Rng rng(2002);
        double worst = 0.0;
        int accepted_mutants = 0, files = 0;
        std::map<int, int> port_hist;
        for (int trial = 0; trial < 500; ++trial)
        {
            const auto f = oracle::random_touchstone(rng);
            ++port_hist[static_cast<int>(f.ports)];
            const auto net = touchstone::parse_touchstone(f.text, f.ports);
            for (auto format : {DataFormat::RI, DataFormat::MA, DataFormat::DB})
            {
                const auto once = touchstone::parse_touchstone(touchstone::serialize_touchstone(net, format), f.ports);
                const auto twice = touchstone::parse_touchstone(touchstone::serialize_touchstone(once, format), f.ports);
                worst = std::max({worst, network_diff(once, net), network_diff(twice, once)});
            }
            ++files;
            try
            {
                touchstone::parse_touchstone(oracle::mutate_token_count(f, rng), f.ports);
                ++accepted_mutants;
            }
            catch (const TouchstoneError &)
            {
            }
        }
        const double t = seconds_since(t0);
        return {worst < roundtrip_tol && accepted_mutants == 0 && t < budget_10s && port_hist.size() == 16,
                fmt("%d files over %zu port counts, max rel err %.2e, %d mutants accepted, %.2f s", files,
                    port_hist.size(), worst, accepted_mutants, t)};
    }

    Outcome rate_oracles()
    {
        using namespace linkproc;
        const auto t0 = Clock::now();
        oracle::Rng rng(3003);
        const LinkBudget lb{10e6, 10.0, 1.0}; // 10 dB
        double sinr_err = 0.0, chain_err = 0.0;
        int order_violations = 0;
        for (int trial = 0; trial < 10000; ++trial)
        {
            CMatrix h(2, 16);
            for (Eigen::Index i = 0; i < 2; ++i)
                for (Eigen::Index j = 0; j < 16; ++j)
                    h(i, j) = rng.cn();
            const ChannelMatrix ch(h, 3.16e9);
            const auto eq = lmmse_equalize(ch, lb);
            const auto want = oracle::lmmse_sinr(h * precoder(h), lb.snr());
            for (std::size_t i = 0; i < 2; ++i)
                sinr_err = std::max(sinr_err, std::abs(eq.sinr(i, lb.signal_power) - want[i]) / want[i]);
            const auto opt = rate_optimal(ch, lb);
            chain_err = std::max(chain_err, std::abs(opt.per_layer[0] + opt.per_layer[1] - log_det_rate(ch, lb)) /
                                                log_det_rate(ch, lb));
            for (auto target : {BeamTarget::Row1, BeamTarget::Row2})
            {
                const double one = evaluate(Scheme::Miso1x1, ch, lb, target).rate;
                const double mrc = rate_mrc_2x1(ch, target, lb).rate;
                order_violations += !(one <= mrc && mrc <= opt.rate);
            }
            order_violations += !(rate_lmmse_two_layer(ch, lb).rate <= opt.rate);
        }
        return {sinr_err < sinr_tol && chain_err < chain_rule_tol && order_violations == 0,
                fmt("1e4 2x16 at 10 dB, SINR rel err %.2e, chain-rule rel err %.2e, %d ordering violations, %.2f s",
                    sinr_err, chain_err, order_violations, seconds_since(t0))};
    }

    Outcome diversity_sanity()
    {
        const auto t0 = Clock::now();
        const auto iid = scenario::diversity(100000, 1, 0.0, 4004);
        const auto full = scenario::diversity(100000, 1, 1.0, 4005);
        const double t = seconds_since(t0);
        return {iid.gain >= iid_d_lo && iid.gain <= iid_d_hi && full.gain >= corr_d_lo && full.gain <= corr_d_hi &&
                    t < budget_60s,
                fmt("1e5 users, i.i.d. d = %.4f (want [%.1f, %.1f]), |rho| = 1 d = %.4f (want [%.1f, %.1f]), %.2f s",
                    iid.gain, iid_d_lo, iid_d_hi, full.gain, corr_d_lo, corr_d_hi, t)};
    }

    Outcome multiplexing_sanity()
    {
        const auto t0 = Clock::now();
        const std::vector<double> snr{20.0, 30.0, 40.0};
        const double iid = scenario::optimal_slope(5000, 16, 0.0, 5005, snr);
        const double rank1 = scenario::optimal_slope(5000, 16, 1.0, 5006, snr);
        const double t = seconds_since(t0);
        return {iid >= iid_slope_lo && iid <= iid_slope_hi && rank1 >= rank1_slope_lo && rank1 <= rank1_slope_hi &&
                    t < budget_60s,
                fmt("5000 users, i.i.d. slope %.4f (want [%.2f, %.2f]), rank-1 slope %.4f (want [%.1f, %.1f]), %.2f s",
                    iid, iid_slope_lo, iid_slope_hi, rank1, rank1_slope_lo, rank1_slope_hi, t)};
    }

    Outcome ecc_fixture()
    {
        const auto net = touchstone::load_touchstone(data_dir / "ue_dualband.s2p");
        const auto s = multiport::interpolate_network(net, 3.16e9);
        const double ecc = analysis::ecc_from_sparams(s);
        const double iso = analysis::isolation_db(s);
        return {std::abs(ecc - ecc_target) <= ecc_tol && std::abs(iso - isolation_target) <= isolation_tol,
                fmt("ue_dualband.s2p at 3.16 GHz: ECC %.5f, isolation %.3f dB", ecc, iso)};
    }

    double median_of(const fs::path &csv)
    {
        std::ifstream in(csv);
        std::string line;
        std::getline(in, line);
        std::vector<double> rates;
        while (std::getline(in, line))
        {
            std::stringstream ss(line);
            std::string field;
            for (int k = 0; k < 3; ++k)
                std::getline(ss, field, ',');
            rates.push_back(std::stod(field));
        }
        const auto c = analysis::outage_cdf(rates, linkproc::Scheme::Optimal, {1, 1, 1});
        return c.median();
    }

    Outcome regime_reproduction()
    {
        const auto t0 = Clock::now();
        auto cfg = cli::load_config(data_dir / "example_run.yaml");
        cfg.output_dir = scratch("regime");
        cli::run(cfg);
        const double t = seconds_since(t0);
        // -60 dBm noise is the -10 dB point, -100 dBm the 30 dB point.
        auto med = [&](const char *scheme, int dbm) {
            return median_of(cfg.output_dir / (std::string(scheme) + "_noise" + std::to_string(dbm) + "dBm.csv"));
        };
        const double mrc_lo = med("mrc_2x1", -60), two_lo = med("lmmse_two_layer", -60), opt_lo = med("optimal", -60);
        const double mrc_hi = med("mrc_2x1", -100), opt_hi = med("optimal", -100);
        fs::remove_all(cfg.output_dir);
        const bool low = two_lo <= mrc_lo && opt_lo <= mrc_lo;
        const bool high = opt_hi >= mux_advantage * mrc_hi;
        return {low && high && t < budget_5min,
                fmt("-10 dB medians: MRC %.4g, LMMSE two-layer %.4g, optimal %.4g bit/s; 30 dB: optimal/MRC = %.3f; "
                    "%.2f s",
                    mrc_lo, two_lo, opt_lo, opt_hi / mrc_hi, t)};
    }

    Outcome fresnel_oracle()
    {
        const auto concrete = propagation::Material::concrete();
        double worst = 0.0;
        for (int deg = 0; deg <= 89; ++deg)
        {
            const double th = deg * std::numbers::pi / 180.0;
            const auto got = propagation::fresnel_reflection(concrete, std::cos(th), 3.16e9);
            const auto want = oracle::scalar_fresnel(10.0, 1.7e-5, 3.16e9, th);
            worst = std::max({worst, std::abs(got.perpendicular - want.s), std::abs(got.parallel - want.p)});
        }
        const bool material = concrete.relative_permittivity == 10.0 && concrete.conductivity == 1.7e-5;
        return {worst <= fresnel_tol && material, fmt("concrete, 0-89 deg, max abs err %.2e", worst)};
    }

    Outcome cli_determinism()
    {
        const fs::path a = scratch("det_a"), b = scratch("det_b");
        const std::string cli = PORTLINK_CLI;
        const std::string cfg = (data_dir / "example_run.yaml").string();
        const int ra = std::system((cli + " run --config " + cfg + " --out " + a.string() + " > /dev/null").c_str());
        const int rb = std::system((cli + " run --config " + cfg + " --out " + b.string() + " > /dev/null").c_str());
        int files = 0, differing = 0;
        for (const auto &e : fs::directory_iterator(a))
        {
            if (e.path().extension() != ".csv")
                continue;
            ++files;
            differing += !fs::exists(b / e.path().filename()) || slurp(e.path()) != slurp(b / e.path().filename());
        }
        fs::remove_all(a);
        fs::remove_all(b);
        return {ra == 0 && rb == 0 && files == 15 && differing == 0,
                fmt("exit codes %d/%d, %d CSV files, %d differing", ra, rb, files, differing)};
    }
}

int main()
{
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
        {"cascade oracle", cascade_oracle},
        {"touchstone round-trip", touchstone_roundtrip},
        {"rate-formula oracles", rate_oracles},
        {"diversity sanity", diversity_sanity},
        {"multiplexing sanity", multiplexing_sanity},
        {"ECC fixture", ecc_fixture},
        {"regime reproduction", regime_reproduction},
        {"Fresnel oracle", fresnel_oracle},
        {"CLI determinism", cli_determinism},
    };
    int failures = 0;
    int k = 0;
    for (const auto &[name, fn] : criteria)
    {
        ++k;
        Outcome o;
        try
        {
            o = fn();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << k << " (" << name << "): " << o.detail << std::endl;
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
