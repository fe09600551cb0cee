// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#pragma once

#include "portlink/types.hpp"

#include <Eigen/Dense>

#include <variant>
#include <vector>

namespace portlink::propagation
{
    using Vec3 = Eigen::Vector3d;
    using CVec3 = Eigen::Vector3cd;

    // Unit vectors of the spherical basis at direction `dir` (unit length).
    Vec3 theta_hat(const Vec3 &dir);
    Vec3 phi_hat(const Vec3 &dir);

    // Short dipole along `axis`: far field is the part of the axis transverse to
    // the direction, so the broadside magnitude is 1.
    struct ShortDipole
    {
        Vec3 axis;
    };

    // Unit-magnitude, theta-polarized in every direction. Not physical, but the
    // natural scalar stand-in: over a line-of-sight path it reproduces the scalar
    // path gain exactly.
    struct Isotropic
    {
    };

    // Complex E_theta / E_phi samples on a regular (theta, phi) grid in degrees.
    // Theta spans [0, 180], phi spans [-180, 180]. Samples are row-major in theta
    // (index = i_theta * n_phi + i_phi). Normalized at construction so the peak
    // magnitude is 1.
    class TabulatedPattern
    {
    public:
        TabulatedPattern(std::size_t n_theta, std::size_t n_phi, std::vector<cdouble> e_theta,
                         std::vector<cdouble> e_phi);

        // Bilinear interpolation of both components.
        std::pair<cdouble, cdouble> sample(double theta_rad, double phi_rad) const;

        std::size_t n_theta() const noexcept { return n_theta_; }
        std::size_t n_phi() const noexcept { return n_phi_; }

    private:
        std::size_t n_theta_, n_phi_;
        std::vector<cdouble> e_theta_, e_phi_;
    };

    using ElementPattern = std::variant<ShortDipole, Isotropic, TabulatedPattern>;

    // Complex far-field polarization vector of the pattern toward `dir`, expressed
    // in global coordinates. Always transverse to `dir`.
    CVec3 radiated_field(const ElementPattern &pattern, const Vec3 &dir);

    struct AntennaPort
    {
        Vec3 offset; // relative to the placement origin [m]
        ElementPattern pattern;
    };

    // An antenna array at a location. Every port is one row/column of the channel.
    struct ArrayPlacement
    {
        Vec3 origin = Vec3::Zero();
        std::vector<AntennaPort> ports;

        std::size_t size() const noexcept { return ports.size(); }
        Vec3 port_position(std::size_t i) const { return origin + ports[i].offset; }
        ArrayPlacement moved_to(const Vec3 &new_origin) const;
    };

    // Two co-located ports fed by short dipoles along an orthonormal polarization
    // basis. Throws std::invalid_argument if the basis is not orthonormal to 1e-9.
    std::vector<AntennaPort> dual_polarized_element(const Vec3 &offset, const Vec3 &pol_a, const Vec3 &pol_b);

    // rows x columns grid of dual-polarized elements in the plane orthogonal to
    // `normal`, spaced by `spacing` metres and centred on the origin. Port order is
    // element-major, vertical-like polarization first.
    ArrayPlacement planar_dual_pol_array(const Vec3 &origin, std::size_t rows, std::size_t columns,
                                         double spacing, const Vec3 &normal);

    ArrayPlacement single_port(const Vec3 &position, ElementPattern pattern);
}
