// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#include "portlink/types.hpp"

#include <stdexcept>

namespace portlink
{
    bool all_finite(const CMatrix &m)
    {
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            for (Eigen::Index i = 0; i < m.rows(); ++i)
                if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
                    return false;
        return true;
    }

    double spectral_norm(const CMatrix &m)
    {
        if (m.size() == 0)
            return 0.0;
        Eigen::JacobiSVD<CMatrix> svd(m);
        return svd.singularValues()(0);
    }

    ScatteringMatrix::ScatteringMatrix(CMatrix entries) : entries_(std::move(entries))
    {
        if (entries_.rows() == 0 || entries_.rows() != entries_.cols())
            throw std::invalid_argument("scattering matrix must be square and non-empty");
        if (!all_finite(entries_))
            throw std::invalid_argument("scattering matrix has non-finite entries");
    }

    ScatteringMatrix ScatteringMatrix::zero(std::size_t dim)
    {
        const auto n = static_cast<Eigen::Index>(dim);
        return ScatteringMatrix(CMatrix::Zero(n, n));
    }

    bool ScatteringMatrix::is_passive(double tolerance) const
    {
        return spectral_norm(entries_) <= 1.0 + tolerance;
    }

    ChannelMatrix::ChannelMatrix(CMatrix entries, double frequency_hz)
        : entries_(std::move(entries)), frequency_hz_(frequency_hz)
    {
        if (entries_.size() == 0)
            throw std::invalid_argument("channel matrix must be non-empty");
        if (!all_finite(entries_))
            throw std::invalid_argument("channel matrix has non-finite entries");
    }

    ChannelMatrix ChannelMatrix::row(std::size_t row) const
    {
        if (row >= n_rx())
            throw std::out_of_range("channel row index out of range");
        return ChannelMatrix(entries_.row(static_cast<Eigen::Index>(row)), frequency_hz_);
    }
}
