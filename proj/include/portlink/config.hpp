// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#pragma once

#include "portlink/analysis.hpp"
#include "portlink/antenna.hpp"
#include "portlink/ensemble.hpp"
#include "portlink/linkproc.hpp"
#include "portlink/propagation.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace portlink::cli
{
    using propagation::ArrayPlacement;
    using propagation::Vec3;

    inline constexpr const char *version = "1.0.0";

    double dbm_to_watt(double dbm);
    double watt_to_dbm(double watt);

    // Scene file content: geometry plus the two antenna arrays.
    struct SceneSpec
    {
        propagation::Scene scene;
        ArrayPlacement base_station;
        ArrayPlacement user_equipment; // port offsets about the user position
    };

    // Throws ConfigError with the file name on any schema violation.
    SceneSpec load_scene(const std::filesystem::path &path);
    SceneSpec parse_scene(const std::string &yaml_text, const std::string &name = "<scene>");

    // i.i.d. Rayleigh rows coloured by an exponential receive correlation
    // R_ij = rho^|i - j|.
    struct StochasticSpec
    {
        std::size_t n_rx = 2;
        std::size_t n_tx = 16;
        double rx_correlation = 0.0;

        CMatrix correlation_matrix() const;
    };

    // Sets the transmit power so the mean target-row receive SNR equals
    // `receive_snr_db` at `noise_power_dbm`.
    struct Calibration
    {
        double noise_power_dbm;
        double receive_snr_db;
    };

    struct RunConfig
    {
        std::optional<std::filesystem::path> bs_touchstone;
        std::optional<std::filesystem::path> ue_touchstone;
        std::optional<std::filesystem::path> scene;
        std::optional<StochasticSpec> stochastic;
        double frequency_hz = 3.16e9;
        double bandwidth_hz = 10e6;
        std::optional<double> signal_power_dbm;
        std::optional<Calibration> calibrate;
        std::vector<double> noise_power_dbm;
        std::vector<linkproc::Scheme> schemes;
        std::uint64_t seed = 1;
        std::filesystem::path output_dir = "out";
        double diversity_threshold_quantile = 0.1;
        std::size_t users = 140;
        propagation::RingSampler ring; // count and seed come from users / seed
        int max_bounces = 2;
        linkproc::BeamTarget beam_target = linkproc::BeamTarget::Row2;
        unsigned threads = 1;
    };

    // Reads a YAML run configuration. Relative paths resolve against the file's
    // directory. A manifest written by run() is accepted as well and yields its
    // embedded configuration. Throws ConfigError.
    RunConfig load_config(const std::filesystem::path &path);
    RunConfig parse_config(const std::string &yaml_text, const std::filesystem::path &base_dir);

    // Canonical JSON form with absolute paths; parse_config accepts it back.
    std::string config_to_json(const RunConfig &config);

    struct Diagnostic
    {
        enum class Severity
        {
            error,
            warning
        };
        Severity severity;
        std::string message;
    };

    std::string to_string(const Diagnostic &d);
    bool has_errors(const std::vector<Diagnostic> &diagnostics);

    // Every rule violation of a loaded configuration. Opens the referenced files
    // but never writes.
    std::vector<Diagnostic> validate(const RunConfig &config);
    // Load failures become a single error diagnostic.
    std::vector<Diagnostic> validate_file(const std::filesystem::path &path);

    struct RunSummary
    {
        std::vector<std::filesystem::path> files;
        analysis::GainReport report;
        double signal_power_watt = 0.0;
    };

    // Full pipeline. Throws ConfigError if validate() reports errors; other module
    // errors propagate unchanged.
    RunSummary run(const RunConfig &config);

    // PathSet for one user position of the configured scene, as JSON.
    std::string trace_json(const RunConfig &config, const Vec3 &user_position);
}
