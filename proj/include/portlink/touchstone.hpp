// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#pragma once

#include "portlink/types.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace portlink::touchstone
{
    enum class DataFormat
    {
        RI, // real / imaginary
        MA, // linear magnitude / angle in degrees
        DB  // 20 log10 magnitude / angle in degrees
    };

    enum class FrequencyUnit
    {
        Hz,
        kHz,
        MHz,
        GHz
    };

    struct NetworkPoint
    {
        double frequency_hz;
        ScatteringMatrix matrix;
    };

    // Swept S-parameter description of an N-port. Frequencies are always stored
    // in Hz, whatever unit the source file used.
    class TouchstoneNetwork
    {
    public:
        // Validates the invariants: strictly increasing frequencies, matching
        // square matrices, positive reference impedance. Throws TouchstoneError.
        TouchstoneNetwork(std::size_t n_ports, double reference_impedance,
                          std::vector<NetworkPoint> points,
                          std::optional<std::string> source_comment = std::nullopt);

        std::size_t n_ports() const noexcept { return n_ports_; }
        double reference_impedance() const noexcept { return reference_impedance_; }
        const std::vector<NetworkPoint> &points() const noexcept { return points_; }
        const std::optional<std::string> &source_comment() const noexcept { return source_comment_; }

        double min_frequency() const { return points_.front().frequency_hz; }
        double max_frequency() const { return points_.back().frequency_hz; }

    private:
        std::size_t n_ports_;
        double reference_impedance_;
        std::vector<NetworkPoint> points_;
        std::optional<std::string> source_comment_;
    };

    // Parses a Touchstone v1 document. When `declared_ports` is empty the port
    // count is inferred from the first data record. Non-fatal findings (skipped
    // noise-parameter block, ignored repeated option lines) are appended to
    // `warnings` when provided.
    TouchstoneNetwork parse_touchstone(std::string_view text,
                                       std::optional<std::size_t> declared_ports = std::nullopt,
                                       std::vector<std::string> *warnings = nullptr);

    // Reads a file and takes the port count from an `.sNp` extension if present.
    TouchstoneNetwork load_touchstone(const std::string &path,
                                      std::vector<std::string> *warnings = nullptr);

    // Port count encoded in an `.sNp` file name, if any.
    std::optional<std::size_t> ports_from_extension(std::string_view path);

    std::string serialize_touchstone(const TouchstoneNetwork &net, DataFormat format,
                                     FrequencyUnit unit = FrequencyUnit::Hz);

    std::string to_string(DataFormat format);
    DataFormat data_format_from_string(std::string_view name);
}
