// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#include "portlink/propagation.hpp"
#include "portlink/error.hpp"
#include "portlink/text.hpp"

#include <algorithm>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace portlink::propagation
{
    void Material::validate() const
    {
        if (!(relative_permittivity >= 1.0) || !std::isfinite(relative_permittivity))
            throw std::invalid_argument("relative permittivity must be >= 1");
        if (!(conductivity >= 0.0))
            throw std::invalid_argument("conductivity must be >= 0");
    }

    cdouble complex_permittivity(const Material &m, double frequency_hz)
    {
        const double omega = 2.0 * std::numbers::pi * frequency_hz;
        return {m.relative_permittivity, -m.conductivity / (omega * vacuum_permittivity)};
    }

    FresnelCoefficients fresnel_reflection(const Material &m, double cos_incidence, double frequency_hz)
    {
        if (m.is_pec())
            return {-1.0, 1.0};
        const double c = std::clamp(cos_incidence, 0.0, 1.0);
        const cdouble eps = complex_permittivity(m, frequency_hz);
        const cdouble root = std::sqrt(eps - (1.0 - c * c));
        return {(c - root) / (c + root), (eps * c - root) / (eps * c + root)};
    }

    std::string to_string(FacetKind kind)
    {
        switch (kind)
        {
        case FacetKind::building:
            return "building";
        case FacetKind::road:
            return "road";
        case FacetKind::terrain:
            return "terrain";
        }
        return "building";
    }

    FacetKind facet_kind_from_string(const std::string &name)
    {
        if (name == "building")
            return FacetKind::building;
        if (name == "road")
            return FacetKind::road;
        if (name == "terrain")
            return FacetKind::terrain;
        throw PropagationError("unknown facet kind '" + name + "'");
    }

    Facet::Facet(std::vector<Vec3> vertices, Material material, FacetKind kind)
        : vertices_(std::move(vertices)), material_(material), kind_(kind)
    {
        if (vertices_.size() < 3)
            throw PropagationError("facet needs at least three vertices");
        try
        {
            material_.validate();
        }
        catch (const std::invalid_argument &e)
        {
            throw PropagationError(e.what());
        }
        // Newell's method is robust for non-convex polygons.
        Vec3 n = Vec3::Zero();
        for (std::size_t i = 0; i < vertices_.size(); ++i)
            n += vertices_[i].cross(vertices_[(i + 1) % vertices_.size()]);
        if (n.norm() < 1e-12)
            throw PropagationError("facet vertices are collinear");
        normal_ = n.normalized();
        offset_ = normal_.dot(vertices_.front());
        for (const auto &v : vertices_)
            if (std::abs(signed_distance(v)) > 1e-9)
                throw PropagationError("facet vertices are not coplanar within 1e-9 m");
    }

    bool Facet::contains(const Vec3 &p) const
    {
        // Drop the dominant normal axis and run a crossing-number test.
        int drop = 0;
        normal_.cwiseAbs().maxCoeff(&drop);
        const int u = (drop + 1) % 3, v = (drop + 2) % 3;
        bool inside = false;
        for (std::size_t i = 0, j = vertices_.size() - 1; i < vertices_.size(); j = i++)
        {
            const Vec3 &a = vertices_[i], &b = vertices_[j];
            if ((a[v] > p[v]) != (b[v] > p[v]))
            {
                const double x = a[u] + (p[v] - a[v]) * (b[u] - a[u]) / (b[v] - a[v]);
                if (p[u] < x)
                    inside = !inside;
            }
        }
        return inside;
    }

    std::string scene_hash(const Scene &scene)
    {
        std::string canon = "carrier=" + format_number(scene.carrier_hz) + ";";
        for (const auto &f : scene.facets)
        {
            canon += to_string(f.kind()) + ":" + format_number(f.material().relative_permittivity) + "," +
                     format_number(f.material().conductivity) + ":";
            for (const auto &v : f.vertices())
                canon += format_number(v.x()) + "," + format_number(v.y()) + "," + format_number(v.z()) + ";";
        }
        return to_hex(fnv1a(canon));
    }

    namespace
    {
        struct Plane
        {
            Vec3 normal;
            double offset;
            double distance(const Vec3 &p) const { return normal.dot(p) - offset; }
            Vec3 mirror(const Vec3 &p) const { return p - 2.0 * distance(p) * normal; }
        };

        // Geometry of one specular path between two points through an ordered list
        // of reflection planes.
        struct Unfolded
        {
            std::vector<Vec3> points;
            double length;
            Vec3 departure;
            Vec3 arrival;
        };

        std::optional<Unfolded> unfold(const Vec3 &p, const Vec3 &q, const std::vector<Plane> &planes)
        {
            const std::size_t k = planes.size();
            std::vector<Vec3> images(k);
            Vec3 src = p;
            for (std::size_t i = 0; i < k; ++i)
                images[i] = src = planes[i].mirror(src);

            Unfolded u;
            u.points.resize(k);
            Vec3 target = q;
            for (std::size_t i = k; i-- > 0;)
            {
                const double da = planes[i].distance(images[i]);
                const double db = planes[i].distance(target);
                if (!(da * db < 0.0))
                    return std::nullopt;
                const double t = da / (da - db);
                target = u.points[i] = images[i] + t * (target - images[i]);
            }
            // Each reflection must happen on the side both neighbours are on.
            for (std::size_t i = 0; i < k; ++i)
            {
                const Vec3 &prev = i == 0 ? p : u.points[i - 1];
                const Vec3 &next = i + 1 == k ? q : u.points[i + 1];
                if (!(planes[i].distance(prev) * planes[i].distance(next) > 0.0))
                    return std::nullopt;
            }

            u.length = 0.0;
            Vec3 prev = p;
            for (std::size_t i = 0; i <= k; ++i)
            {
                const Vec3 &next = i == k ? q : u.points[i];
                const double seg = (next - prev).norm();
                if (!(seg > 1e-12))
                    return std::nullopt;
                u.length += seg;
                prev = next;
            }
            u.departure = ((k ? u.points.front() : q) - p).normalized();
            u.arrival = ((k ? u.points.back() : p) - q).normalized();
            return u;
        }

        // Applies every reflection operator along the path to a transverse field.
        CVec3 transport(CVec3 field, const Vec3 &p, const Vec3 &q, const Unfolded &u,
                        const std::vector<Plane> &planes, const std::vector<Material> &materials, double frequency_hz,
                        std::vector<FresnelCoefficients> *coefficients = nullptr)
        {
            const std::size_t k = planes.size();
            for (std::size_t i = 0; i < k; ++i)
            {
                const Vec3 &prev = i == 0 ? p : u.points[i - 1];
                const Vec3 &next = i + 1 == k ? q : u.points[i + 1];
                const Vec3 k_in = (u.points[i] - prev).normalized();
                const Vec3 k_out = (next - u.points[i]).normalized();
                const Vec3 &n = planes[i].normal;
                const auto gamma = fresnel_reflection(materials[i], std::abs(k_in.dot(n)), frequency_hz);
                if (coefficients)
                    coefficients->push_back(gamma);

                Vec3 s = k_in.cross(n);
                if (s.norm() < 1e-12)
                {
                    // Normal incidence: any direction in the surface will do.
                    s = n.unitOrthogonal();
                }
                s.normalize();
                const Vec3 p_in = s.cross(k_in);
                const Vec3 p_out = s.cross(k_out);
                const CVec3 sc = s.cast<cdouble>();
                const cdouble e_s = sc.dot(field); // real basis vector, dot() conjugates the left side
                const cdouble e_p = p_in.cast<cdouble>().dot(field);
                field = gamma.perpendicular * e_s * sc + gamma.parallel * e_p * p_out.cast<cdouble>();
            }
            return field;
        }

        cdouble spreading(double length, double frequency_hz)
        {
            const double phase = -2.0 * std::numbers::pi * frequency_hz * length / speed_of_light;
            return std::polar(1.0 / (4.0 * std::numbers::pi * length), phase);
        }

        bool segment_clear(const Scene &scene, const Vec3 &a, const Vec3 &b)
        {
            for (const auto &f : scene.facets)
            {
                const double da = f.signed_distance(a), db = f.signed_distance(b);
                if (!(da * db < 0.0))
                    continue;
                const double t = da / (da - db);
                if (t <= 1e-9 || t >= 1.0 - 1e-9)
                    continue;
                if (f.contains(a + t * (b - a)))
                    return false;
            }
            return true;
        }

        void check_not_on_facet(const Scene &scene, const Vec3 &p)
        {
            for (std::size_t i = 0; i < scene.facets.size(); ++i)
            {
                const auto &f = scene.facets[i];
                const double d = f.signed_distance(p);
                if (std::abs(d) < 1e-9 && f.contains(p - d * f.normal()))
                    throw PropagationError("degenerate geometry: antenna at (" + format_number(p.x()) + ", " +
                                           format_number(p.y()) + ", " + format_number(p.z()) + ") lies on facet " +
                                           std::to_string(i));
            }
        }

        std::optional<Path> try_sequence(const Scene &scene, const Vec3 &p, const Vec3 &q,
                                         const std::vector<std::size_t> &sequence)
        {
            std::vector<Plane> planes;
            std::vector<Material> materials;
            for (auto idx : sequence)
            {
                planes.push_back({scene.facets[idx].normal(), scene.facets[idx].plane_offset()});
                materials.push_back(scene.facets[idx].material());
            }
            auto u = unfold(p, q, planes);
            if (!u)
                return std::nullopt;
            for (std::size_t i = 0; i < sequence.size(); ++i)
                if (!scene.facets[sequence[i]].contains(u->points[i]))
                    return std::nullopt;
            Vec3 prev = p;
            for (std::size_t i = 0; i <= sequence.size(); ++i)
            {
                const Vec3 &next = i == sequence.size() ? q : u->points[i];
                if (!segment_clear(scene, prev, next))
                    return std::nullopt;
                prev = next;
            }

            Path path;
            path.length = u->length;
            path.delay = u->length / speed_of_light;
            path.departure = u->departure;
            path.arrival = u->arrival;
            path.bounces = static_cast<int>(sequence.size());

            const double f = scene.carrier_hz;
            const Vec3 tx_basis[2] = {theta_hat(u->departure), phi_hat(u->departure)};
            const Vec3 rx_basis[2] = {theta_hat(u->arrival), phi_hat(u->arrival)};
            std::vector<FresnelCoefficients> coeffs;
            const cdouble g = spreading(u->length, f);
            for (int t = 0; t < 2; ++t)
            {
                coeffs.clear();
                const CVec3 out = transport(tx_basis[t].cast<cdouble>(), p, q, *u, planes, materials, f, &coeffs);
                for (int r = 0; r < 2; ++r)
                    path.gain(r, t) = g * rx_basis[r].cast<cdouble>().dot(out);
            }
            for (std::size_t i = 0; i < sequence.size(); ++i)
                path.reflections.push_back(Reflection{sequence[i], u->points[i], planes[i].normal, planes[i].offset,
                                                      materials[i], coeffs[i]});
            return path;
        }
    }

    PathSet trace_paths(const Scene &scene, const ArrayPlacement &tx, const ArrayPlacement &rx, int max_bounces)
    {
        if (max_bounces < 0 || max_bounces > 2)
            throw PropagationError("max_bounces must be 0, 1 or 2 (got " + std::to_string(max_bounces) + ")");
        check_not_on_facet(scene, tx.origin);
        check_not_on_facet(scene, rx.origin);
        for (std::size_t i = 0; i < tx.size(); ++i)
            check_not_on_facet(scene, tx.port_position(i));
        for (std::size_t i = 0; i < rx.size(); ++i)
            check_not_on_facet(scene, rx.port_position(i));
        if ((tx.origin - rx.origin).norm() < 1e-12)
            throw PropagationError("degenerate geometry: transmitter and receiver coincide");

        PathSet set{{}, tx.origin, rx.origin, scene.carrier_hz};
        auto consider = [&](const std::vector<std::size_t> &seq)
        {
            if (auto path = try_sequence(scene, tx.origin, rx.origin, seq))
                set.paths.push_back(std::move(*path));
        };
        consider({});
        const std::size_t n = scene.facets.size();
        if (max_bounces >= 1)
            for (std::size_t i = 0; i < n; ++i)
                consider({i});
        if (max_bounces >= 2)
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (i != j)
                        consider({i, j});
        return set;
    }

    ChannelMatrix assemble_srt(const PathSet &paths, const ArrayPlacement &tx, const ArrayPlacement &rx,
                               double frequency_hz)
    {
        if (paths.paths.empty())
            throw PropagationError("no propagation paths between transmitter at (" + format_number(paths.tx_origin.x()) +
                                   ", " + format_number(paths.tx_origin.y()) + ", " +
                                   format_number(paths.tx_origin.z()) + ") and receiver at (" +
                                   format_number(paths.rx_origin.x()) + ", " + format_number(paths.rx_origin.y()) +
                                   ", " + format_number(paths.rx_origin.z()) + ")");
        if (tx.size() == 0 || rx.size() == 0)
            throw PropagationError("arrays must have at least one port");

        const auto n_tx = static_cast<Eigen::Index>(tx.size());
        const auto n_rx = static_cast<Eigen::Index>(rx.size());
        CMatrix srt = CMatrix::Zero(n_rx, n_tx);
        for (const auto &path : paths.paths)
        {
            std::vector<Plane> planes;
            std::vector<Material> materials;
            for (const auto &r : path.reflections)
            {
                planes.push_back({r.normal, r.plane_offset});
                materials.push_back(r.material);
            }
            for (Eigen::Index t = 0; t < n_tx; ++t)
            {
                const Vec3 p = tx.port_position(static_cast<std::size_t>(t));
                for (Eigen::Index r = 0; r < n_rx; ++r)
                {
                    const Vec3 q = rx.port_position(static_cast<std::size_t>(r));
                    auto u = unfold(p, q, planes);
                    if (!u)
                        continue;
                    const CVec3 emitted = radiated_field(tx.ports[static_cast<std::size_t>(t)].pattern, u->departure);
                    const CVec3 incident = transport(emitted, p, q, *u, planes, materials, frequency_hz);
                    const CVec3 receive = radiated_field(rx.ports[static_cast<std::size_t>(r)].pattern, u->arrival);
                    // Reciprocal coupling: plain (unconjugated) dot product.
                    srt(r, t) += spreading(u->length, frequency_hz) * receive.cwiseProduct(incident).sum();
                }
            }
        }
        return ChannelMatrix(std::move(srt), frequency_hz);
    }
}
