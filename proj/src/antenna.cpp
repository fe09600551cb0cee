// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#include "portlink/antenna.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace portlink::propagation
{
    Vec3 theta_hat(const Vec3 &dir)
    {
        const double theta = std::acos(std::clamp(dir.z(), -1.0, 1.0));
        const double phi = std::atan2(dir.y(), dir.x());
        return {std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), -std::sin(theta)};
    }

    Vec3 phi_hat(const Vec3 &dir)
    {
        const double phi = std::atan2(dir.y(), dir.x());
        return {-std::sin(phi), std::cos(phi), 0.0};
    }

    TabulatedPattern::TabulatedPattern(std::size_t n_theta, std::size_t n_phi, std::vector<cdouble> e_theta,
                                       std::vector<cdouble> e_phi)
        : n_theta_(n_theta), n_phi_(n_phi), e_theta_(std::move(e_theta)), e_phi_(std::move(e_phi))
    {
        if (n_theta_ < 2 || n_phi_ < 2)
            throw std::invalid_argument("tabulated pattern needs at least a 2x2 grid");
        if (e_theta_.size() != n_theta_ * n_phi_ || e_phi_.size() != n_theta_ * n_phi_)
            throw std::invalid_argument("tabulated pattern sample count does not match the grid");
        double peak = 0.0;
        for (std::size_t i = 0; i < e_theta_.size(); ++i)
            peak = std::max(peak, std::sqrt(std::norm(e_theta_[i]) + std::norm(e_phi_[i])));
        if (!(peak > 0.0) || !std::isfinite(peak))
            throw std::invalid_argument("tabulated pattern must have a finite, non-zero peak");
        for (std::size_t i = 0; i < e_theta_.size(); ++i)
        {
            e_theta_[i] /= peak;
            e_phi_[i] /= peak;
        }
    }

    std::pair<cdouble, cdouble> TabulatedPattern::sample(double theta_rad, double phi_rad) const
    {
        const double dt = std::numbers::pi / static_cast<double>(n_theta_ - 1);
        const double dp = 2.0 * std::numbers::pi / static_cast<double>(n_phi_ - 1);
        const double ut = std::clamp(theta_rad / dt, 0.0, static_cast<double>(n_theta_ - 1));
        const double up = std::clamp((phi_rad + std::numbers::pi) / dp, 0.0, static_cast<double>(n_phi_ - 1));
        const auto it = std::min(static_cast<std::size_t>(ut), n_theta_ - 2);
        const auto ip = std::min(static_cast<std::size_t>(up), n_phi_ - 2);
        const double ft = ut - static_cast<double>(it);
        const double fp = up - static_cast<double>(ip);

        auto bilinear = [&](const std::vector<cdouble> &v)
        {
            const cdouble a = v[it * n_phi_ + ip], b = v[it * n_phi_ + ip + 1];
            const cdouble c = v[(it + 1) * n_phi_ + ip], d = v[(it + 1) * n_phi_ + ip + 1];
            return (1.0 - ft) * ((1.0 - fp) * a + fp * b) + ft * ((1.0 - fp) * c + fp * d);
        };
        return {bilinear(e_theta_), bilinear(e_phi_)};
    }

    CVec3 radiated_field(const ElementPattern &pattern, const Vec3 &dir)
    {
        struct Visitor
        {
            const Vec3 &dir;
            CVec3 operator()(const ShortDipole &d) const
            {
                const Vec3 transverse = d.axis - d.axis.dot(dir) * dir;
                return transverse.cast<cdouble>();
            }
            CVec3 operator()(const Isotropic &) const { return theta_hat(dir).cast<cdouble>(); }
            CVec3 operator()(const TabulatedPattern &t) const
            {
                const double theta = std::acos(std::clamp(dir.z(), -1.0, 1.0));
                const double phi = std::atan2(dir.y(), dir.x());
                auto [et, ep] = t.sample(theta, phi);
                return et * theta_hat(dir).cast<cdouble>() + ep * phi_hat(dir).cast<cdouble>();
            }
        };
        return std::visit(Visitor{dir}, pattern);
    }

    ArrayPlacement ArrayPlacement::moved_to(const Vec3 &new_origin) const
    {
        ArrayPlacement out = *this;
        out.origin = new_origin;
        return out;
    }

    std::vector<AntennaPort> dual_polarized_element(const Vec3 &offset, const Vec3 &pol_a, const Vec3 &pol_b)
    {
        constexpr double tol = 1e-9;
        if (std::abs(pol_a.norm() - 1.0) > tol || std::abs(pol_b.norm() - 1.0) > tol ||
            std::abs(pol_a.dot(pol_b)) > tol)
            throw std::invalid_argument("polarization basis must be orthonormal");
        return {AntennaPort{offset, ShortDipole{pol_a}}, AntennaPort{offset, ShortDipole{pol_b}}};
    }

    ArrayPlacement planar_dual_pol_array(const Vec3 &origin, std::size_t rows, std::size_t columns, double spacing,
                                         const Vec3 &normal)
    {
        if (rows == 0 || columns == 0 || !(spacing > 0.0))
            throw std::invalid_argument("planar array needs positive size and spacing");
        const Vec3 n = normal.normalized();
        // Vertical-like axis: global z projected into the array plane.
        Vec3 up = Vec3::UnitZ() - Vec3::UnitZ().dot(n) * n;
        if (up.norm() < 1e-9)
            up = Vec3::UnitX() - Vec3::UnitX().dot(n) * n;
        up.normalize();
        const Vec3 side = up.cross(n).normalized();

        ArrayPlacement array;
        array.origin = origin;
        const double r0 = 0.5 * static_cast<double>(rows - 1);
        const double c0 = 0.5 * static_cast<double>(columns - 1);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < columns; ++c)
            {
                const Vec3 offset = spacing * ((static_cast<double>(r) - r0) * up + (static_cast<double>(c) - c0) * side);
                for (auto &port : dual_polarized_element(offset, up, side))
                    array.ports.push_back(std::move(port));
            }
        return array;
    }

    ArrayPlacement single_port(const Vec3 &position, ElementPattern pattern)
    {
        ArrayPlacement a;
        a.origin = position;
        a.ports.push_back(AntennaPort{Vec3::Zero(), std::move(pattern)});
        return a;
    }
}
