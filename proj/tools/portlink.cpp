// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

// portlink command-line driver.
//
// Exit codes: 0 success, 1 validation failure, 2 runtime error.

#include "portlink/config.hpp"
#include "portlink/error.hpp"
#include "portlink/text.hpp"
#include "portlink/touchstone.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace
{
    using namespace portlink;

    constexpr int exit_ok = 0;
    constexpr int exit_invalid = 1;
    constexpr int exit_runtime = 2;

    void report(const Error &e)
    {
        std::cerr << "portlink: [" << e.module() << "] " << e.detail() << '\n';
    }

    int cmd_validate(const std::string &config_path)
    {
        const auto diags = cli::validate_file(config_path);
        for (const auto &d : diags)
            std::cout << cli::to_string(d) << '\n';
        if (cli::has_errors(diags))
            return exit_invalid;
        std::cout << "ok\n";
        return exit_ok;
    }

    int cmd_run(const std::string &config_path, std::optional<std::uint64_t> seed, std::optional<std::string> out,
                std::optional<unsigned> threads)
    {
        cli::RunConfig cfg;
        try
        {
            cfg = cli::load_config(config_path);
        }
        catch (const Error &e)
        {
            report(e);
            return exit_invalid;
        }
        if (seed)
            cfg.seed = *seed;
        if (out)
            cfg.output_dir = std::filesystem::absolute(*out).lexically_normal();
        if (threads)
            cfg.threads = *threads;

        const auto diags = cli::validate(cfg);
        for (const auto &d : diags)
            std::cerr << cli::to_string(d) << '\n';
        if (cli::has_errors(diags))
            return exit_invalid;

        const auto summary = cli::run(cfg);
        std::cout << "signal power " << format_number(cli::watt_to_dbm(summary.signal_power_watt)) << " dBm\n";
        for (const auto &f : summary.files)
            std::cout << "wrote " << f.string() << '\n';
        const auto &r = summary.report;
        if (r.diversity_gain)
            std::cout << "diversity gain " << format_number(*r.diversity_gain) << '\n';
        if (r.multiplexing_gain)
            std::cout << "multiplexing gain " << format_number(*r.multiplexing_gain) << '\n';
        if (r.ecc)
            std::cout << "ecc " << format_number(*r.ecc) << ", isolation " << format_number(*r.isolation_db) << " dB\n";
        return exit_ok;
    }

    int cmd_parse_touchstone(const std::string &file, const std::optional<std::string> &convert,
                             const std::optional<std::string> &output)
    {
        std::vector<std::string> warnings;
        const auto net = touchstone::load_touchstone(file, &warnings);
        for (const auto &w : warnings)
            std::cerr << "warning: " << w << '\n';
        if (!convert)
        {
            std::cout << "ports " << net.n_ports() << '\n'
                      << "points " << net.points().size() << '\n'
                      << "reference_impedance " << format_number(net.reference_impedance()) << '\n'
                      << "frequency_hz " << format_number(net.min_frequency()) << ' '
                      << format_number(net.max_frequency()) << '\n';
            if (net.source_comment())
            {
                std::istringstream lines(*net.source_comment());
                for (std::string line; std::getline(lines, line);)
                    std::cout << "comment " << line.substr(std::min(line.find_first_not_of(' '), line.size())) << '\n';
            }
            return exit_ok;
        }
        const std::string text = touchstone::serialize_touchstone(net, touchstone::data_format_from_string(*convert));
        if (output)
        {
            std::ofstream out(*output, std::ios::binary);
            out << text;
            if (!out)
                throw ConfigError("cannot write '" + *output + "'");
        }
        else
            std::cout << text;
        return exit_ok;
    }

    int cmd_trace(const std::string &config_path, const std::vector<double> &at)
    {
        cli::RunConfig cfg;
        try
        {
            cfg = cli::load_config(config_path);
        }
        catch (const Error &e)
        {
            report(e);
            return exit_invalid;
        }
        std::cout << cli::trace_json(cfg, {at[0], at[1], at[2]});
        return exit_ok;
    }
}

int main(int argc, char **argv)
{
    CLI::App app{"portlink: multiport MIMO link analysis"};
    app.require_subcommand(1);

    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> threads;
    std::string format = "csv";

    auto *run = app.add_subcommand("run", "evaluate every scheme over the configured ensemble");
    run->add_option("--config", config, "run configuration (YAML) or manifest.json")->required();
    run->add_option("--seed", seed, "override the configured seed");
    run->add_option("--out", out, "override the output directory");
    run->add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    run->add_option("--format", format, "curve output format")->check(CLI::IsMember({"csv"}));

    auto *validate = app.add_subcommand("validate", "check a configuration and list every violation");
    validate->add_option("--config", config, "run configuration")->required();

    std::string ts_file;
    std::optional<std::string> convert, ts_out;
    auto *parse = app.add_subcommand("parse-touchstone", "inspect or convert a Touchstone file");
    parse->add_option("file", ts_file, "Touchstone .sNp file")->required();
    parse->add_option("--convert", convert, "rewrite in RI, MA or DB format")->check(CLI::IsMember({"RI", "MA", "DB"}));
    parse->add_option("--output", ts_out, "destination for --convert (default stdout)");

    std::vector<double> at;
    auto *trace = app.add_subcommand("trace", "dump the propagation paths for one user position as JSON");
    trace->add_option("--config", config, "run configuration with a scene")->required();
    trace->add_option("--at", at, "user position x y z in metres")->expected(3)->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_invalid;
    }

    try
    {
        if (*run)
            return cmd_run(config, seed, out, threads);
        if (*validate)
            return cmd_validate(config);
        if (*parse)
            return cmd_parse_touchstone(ts_file, convert, ts_out);
        if (*trace)
            return cmd_trace(config, at);
    }
    catch (const portlink::Error &e)
    {
        report(e);
        return exit_runtime;
    }
    catch (const std::exception &e)
    {
        std::cerr << "portlink: " << e.what() << '\n';
        return exit_runtime;
    }
    return exit_runtime;
}
