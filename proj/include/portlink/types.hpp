// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>

namespace portlink
{
    using cdouble = std::complex<double>;
    using CMatrix = Eigen::MatrixXcd;
    using CVector = Eigen::VectorXcd;

    inline constexpr double speed_of_light = 299792458.0;
    inline constexpr double passivity_tolerance = 1e-9;

    // True when every entry is finite.
    bool all_finite(const CMatrix &m);

    // Largest singular value.
    double spectral_norm(const CMatrix &m);

    // Square complex port-coupling matrix at a single frequency.
    class ScatteringMatrix
    {
    public:
        ScatteringMatrix() = default;

        // Throws std::invalid_argument for non-square, empty or non-finite input.
        explicit ScatteringMatrix(CMatrix entries);

        static ScatteringMatrix zero(std::size_t dim);

        std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
        const CMatrix &entries() const noexcept { return entries_; }
        cdouble operator()(std::size_t row, std::size_t col) const { return entries_(row, col); }

        // Spectral norm <= 1 + tolerance.
        bool is_passive(double tolerance = passivity_tolerance) const;

    private:
        CMatrix entries_;
    };

    // n_rx x n_tx voltage transfer matrix at one frequency. Also used for the
    // propagation coupling block and for single-row MISO channels.
    class ChannelMatrix
    {
    public:
        ChannelMatrix() = default;

        // Throws std::invalid_argument for empty or non-finite input.
        ChannelMatrix(CMatrix entries, double frequency_hz);

        std::size_t n_rx() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
        std::size_t n_tx() const noexcept { return static_cast<std::size_t>(entries_.cols()); }
        double frequency() const noexcept { return frequency_hz_; }
        const CMatrix &entries() const noexcept { return entries_; }
        cdouble operator()(std::size_t row, std::size_t col) const { return entries_(row, col); }

        // Single-row channel holding receive port `row`.
        ChannelMatrix row(std::size_t row) const;

    private:
        CMatrix entries_;
        double frequency_hz_ = 0.0;
    };
}
