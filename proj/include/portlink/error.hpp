// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#pragma once

#include <stdexcept>
#include <string>

namespace portlink
{
    // Base for every error raised by the library. Carries the name of the module
    // that raised it so the CLI can report provenance.
    class Error : public std::runtime_error
    {
    public:
        Error(std::string module, const std::string &what)
            : std::runtime_error(module + ": " + what), module_(std::move(module)), detail_(what) {}

        const std::string &module() const noexcept { return module_; }
        // Message without the module prefix.
        const std::string &detail() const noexcept { return detail_; }

    private:
        std::string module_;
        std::string detail_;
    };

    class TouchstoneError : public Error
    {
    public:
        TouchstoneError(const std::string &what, std::size_t line = 0)
            : Error("touchstone", line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

        // 1-based line number in the source text, 0 when not tied to a line.
        std::size_t line() const noexcept { return line_; }

    private:
        std::size_t line_;
    };

    class MultiportError : public Error
    {
    public:
        explicit MultiportError(const std::string &what) : Error("multiport", what) {}
    };

    // Raised when one of the inverted cascade factors is numerically singular.
    class ResonanceError : public MultiportError
    {
    public:
        ResonanceError(const std::string &factor, double condition_number)
            : MultiportError("matching network resonance: factor " + factor +
                             " has condition number " + std::to_string(condition_number)),
              condition_number_(condition_number) {}

        double condition_number() const noexcept { return condition_number_; }

    private:
        double condition_number_;
    };

    class PropagationError : public Error
    {
    public:
        explicit PropagationError(const std::string &what) : Error("propagation", what) {}
    };

    class LinkError : public Error
    {
    public:
        explicit LinkError(const std::string &what) : Error("linkproc", what) {}
    };

    class AnalysisError : public Error
    {
    public:
        explicit AnalysisError(const std::string &what) : Error("analysis", what) {}
    };

    // Diversity threshold lies where one of the curves has outage 0 or 1.
    class ThresholdRangeError : public AnalysisError
    {
    public:
        ThresholdRangeError(double threshold, double suggested)
            : AnalysisError("threshold outside measurable range: " + std::to_string(threshold) +
                            " bit/s, nearest usable threshold " + std::to_string(suggested) + " bit/s"),
              suggested_(suggested) {}

        double suggested_threshold() const noexcept { return suggested_; }

    private:
        double suggested_;
    };

    class ConfigError : public Error
    {
    public:
        explicit ConfigError(const std::string &what) : Error("cli", what) {}
    };
}
