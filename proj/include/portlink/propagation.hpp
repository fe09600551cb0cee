// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#pragma once

#include "portlink/antenna.hpp"
#include "portlink/types.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace portlink::propagation
{
    inline constexpr double vacuum_permittivity = 8.8541878128e-12;

    struct Material
    {
        double relative_permittivity = 1.0;
        double conductivity = 0.0; // S/m, +inf for a perfect conductor

        // Throws std::invalid_argument unless eps_r >= 1 and sigma >= 0.
        void validate() const;
        bool is_pec() const noexcept { return std::isinf(conductivity); }

        // eps_r = 10, sigma = 1.7e-5 S/m
        static Material concrete() { return {10.0, 1.7e-5}; }
        static Material pec() { return {1.0, std::numeric_limits<double>::infinity()}; }
    };

    // eps_r - j sigma / (omega eps_0)
    cdouble complex_permittivity(const Material &m, double frequency_hz);

    struct FresnelCoefficients
    {
        cdouble perpendicular; // TE, E normal to the plane of incidence
        cdouble parallel;      // TM, E in the plane of incidence
    };

    // Reflection from air onto a half-space of `m`. `cos_incidence` is the cosine
    // of the angle to the surface normal. The parallel coefficient refers the
    // incident and reflected fields to s x k, so a perfect conductor gives
    // {-1, +1}.
    FresnelCoefficients fresnel_reflection(const Material &m, double cos_incidence, double frequency_hz);

    enum class FacetKind
    {
        building,
        road,
        terrain
    };

    std::string to_string(FacetKind kind);
    FacetKind facet_kind_from_string(const std::string &name);

    // Planar polygon with a material. Opaque: it blocks any segment crossing it.
    class Facet
    {
    public:
        // Throws PropagationError for fewer than three vertices, collinear
        // vertices, or vertices off the common plane by more than 1e-9 m.
        Facet(std::vector<Vec3> vertices, Material material, FacetKind kind);

        const std::vector<Vec3> &vertices() const noexcept { return vertices_; }
        const Material &material() const noexcept { return material_; }
        FacetKind kind() const noexcept { return kind_; }
        const Vec3 &normal() const noexcept { return normal_; }
        double plane_offset() const noexcept { return offset_; } // normal . x = offset

        double signed_distance(const Vec3 &p) const { return normal_.dot(p) - offset_; }
        // For points on the plane.
        bool contains(const Vec3 &p) const;

    private:
        std::vector<Vec3> vertices_;
        Material material_;
        FacetKind kind_;
        Vec3 normal_;
        double offset_;
    };

    struct Scene
    {
        std::vector<Facet> facets;
        double carrier_hz = 3.16e9;
    };

    // Stable 64-bit FNV-1a digest of the scene content, as 16 hex digits.
    std::string scene_hash(const Scene &scene);

    // A specular reflection on one facet.
    struct Reflection
    {
        std::size_t facet;
        Vec3 point;
        Vec3 normal;
        double plane_offset;
        Material material;
        FresnelCoefficients coefficients;
    };

    struct Path
    {
        double delay;      // s
        double length;     // m
        // gain(r, t): transfer from transmit polarization t to receive
        // polarization r, with index 0 = theta and 1 = phi in the spherical
        // basis at the departure / arrival direction. Includes 1/(4 pi d), the
        // Fresnel coefficients and exp(-j 2 pi f d / c).
        Eigen::Matrix2cd gain;
        Vec3 departure; // unit vector leaving the transmitter
        Vec3 arrival;   // unit vector from the receiver toward the last interaction
        int bounces;
        std::vector<Reflection> reflections;
    };

    struct PathSet
    {
        std::vector<Path> paths;
        Vec3 tx_origin;
        Vec3 rx_origin;
        double frequency_hz;
    };

    // Line of sight plus every image-method specular path with up to
    // `max_bounces` reflections between the two array origins, evaluated at the
    // scene carrier. Throws PropagationError if max_bounces is outside {0, 1, 2}
    // or any antenna port lies on a facet.
    PathSet trace_paths(const Scene &scene, const ArrayPlacement &tx, const ArrayPlacement &rx, int max_bounces);

    // Coupling from every transmit port to every receive port. Each path is
    // re-unfolded between the individual port positions through its reflection
    // planes (exact spherical wavefronts, per-port directions and Fresnel
    // angles), weighted by both element patterns and summed. Returns the
    // n_rx x n_tx transmission block at `frequency_hz`.
    ChannelMatrix assemble_srt(const PathSet &paths, const ArrayPlacement &tx, const ArrayPlacement &rx,
                               double frequency_hz);
}
