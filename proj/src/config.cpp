// SPDX-License-Identifier: Apache-2.0
// portlink - multiport MIMO link analysis toolkit
// Copyright (C) 2026 The portlink authors

#include "portlink/config.hpp"
#include "portlink/error.hpp"
#include "portlink/multiport.hpp"
#include "portlink/text.hpp"
#include "portlink/touchstone.hpp"

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace fs = std::filesystem;

namespace portlink::cli
{
    using namespace propagation;

    double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
    double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }

    CMatrix StochasticSpec::correlation_matrix() const
    {
        const auto n = static_cast<Eigen::Index>(n_rx);
        CMatrix r(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                r(i, j) = std::pow(rx_correlation, static_cast<double>(std::abs(i - j)));
        return r;
    }

    namespace
    {
        // Typed access to YAML nodes with errors that name the file and key.
        class Reader
        {
        public:
            explicit Reader(std::string source) : source_(std::move(source)) {}

            [[noreturn]] void fail(const std::string &key, const std::string &what) const
            {
                throw ConfigError(source_ + ": '" + key + "': " + what);
            }

            void check_keys(const YAML::Node &node, const std::string &where, std::set<std::string> allowed) const
            {
                if (!node.IsMap())
                    fail(where, "expected a mapping");
                std::set<std::string> seen;
                for (const auto &kv : node)
                {
                    const auto key = kv.first.as<std::string>();
                    const auto path = where.empty() ? key : where + "." + key;
                    if (!allowed.count(key))
                        fail(path, "unknown key");
                    if (!seen.insert(key).second)
                        fail(path, "duplicate key");
                }
            }

            template <class T>
            T get(const YAML::Node &node, const std::string &key) const
            {
                try
                {
                    return node.as<T>();
                }
                catch (const YAML::Exception &)
                {
                    fail(key, std::is_same_v<T, std::string> ? "expected a string" : "expected a number");
                }
            }

            template <class T>
            T required(const YAML::Node &map, const std::string &key) const
            {
                const YAML::Node n = map[key];
                if (!n || n.IsNull())
                    fail(key, "missing required key");
                return get<T>(n, key);
            }

            template <class T>
            std::optional<T> optional(const YAML::Node &map, const std::string &key) const
            {
                const YAML::Node n = map[key];
                if (!n || n.IsNull())
                    return std::nullopt;
                return get<T>(n, key);
            }

            Vec3 vec3(const YAML::Node &node, const std::string &key) const
            {
                if (!node || !node.IsSequence() || node.size() != 3)
                    fail(key, "expected [x, y, z]");
                return {get<double>(node[0], key), get<double>(node[1], key), get<double>(node[2], key)};
            }

        private:
            std::string source_;
        };

        YAML::Node parse_yaml(const std::string &text, const std::string &name)
        {
            try
            {
                return YAML::Load(text);
            }
            catch (const YAML::Exception &e)
            {
                throw ConfigError(name + ": malformed YAML: " + e.what());
            }
        }

        std::string read_file(const fs::path &path)
        {
            std::ifstream in(path, std::ios::binary);
            if (!in)
                throw ConfigError("cannot open '" + path.string() + "'");
            std::ostringstream ss;
            ss << in.rdbuf();
            return ss.str();
        }

        ElementPattern parse_pattern(const Reader &r, const YAML::Node &node, const std::string &key)
        {
            if (!node)
                return ElementPattern{Isotropic{}};
            r.check_keys(node, key, {"type", "axis"});
            const auto type = r.required<std::string>(node, "type");
            if (type == "isotropic")
                return ElementPattern{Isotropic{}};
            if (type == "dipole")
            {
                const Vec3 axis = r.vec3(node["axis"], key + ".axis");
                if (!(axis.norm() > 0.0))
                    r.fail(key + ".axis", "zero dipole axis");
                return ElementPattern{ShortDipole{axis.normalized()}};
            }
            r.fail(key + ".type", "unknown pattern '" + type + "' (expected dipole or isotropic)");
        }

        ArrayPlacement parse_array(const Reader &r, const YAML::Node &node, const std::string &key, bool with_origin)
        {
            if (!node || !node.IsMap())
                r.fail(key, "missing array description");
            if (node["ports"])
            {
                r.check_keys(node, key, {"origin_m", "ports"});
                ArrayPlacement a;
                if (with_origin)
                    a.origin = r.vec3(node["origin_m"], key + ".origin_m");
                const auto &ports = node["ports"];
                if (!ports.IsSequence() || ports.size() == 0)
                    r.fail(key + ".ports", "expected a non-empty list");
                for (std::size_t i = 0; i < ports.size(); ++i)
                {
                    const std::string k = key + ".ports[" + std::to_string(i) + "]";
                    r.check_keys(ports[i], k, {"offset_m", "pattern"});
                    const Vec3 offset = ports[i]["offset_m"] ? r.vec3(ports[i]["offset_m"], k + ".offset_m") : Vec3::Zero();
                    a.ports.push_back(AntennaPort{offset, parse_pattern(r, ports[i]["pattern"], k + ".pattern")});
                }
                return a;
            }
            r.check_keys(node, key, {"origin_m", "rows", "columns", "spacing_m", "normal"});
            const Vec3 origin = with_origin ? r.vec3(node["origin_m"], key + ".origin_m") : Vec3::Zero();
            const auto rows = r.required<std::size_t>(node, "rows");
            const auto cols = r.required<std::size_t>(node, "columns");
            const auto spacing = r.required<double>(node, "spacing_m");
            const Vec3 normal = r.vec3(node["normal"], key + ".normal");
            try
            {
                return planar_dual_pol_array(origin, rows, cols, spacing, normal);
            }
            catch (const std::exception &e)
            {
                r.fail(key, e.what());
            }
        }

        propagation::Material parse_material(const Reader &r, const YAML::Node &node, const std::string &key)
        {
            if (node.IsScalar() && node.as<std::string>() == "pec")
                return propagation::Material::pec();
            r.check_keys(node, key, {"relative_permittivity", "conductivity_s_per_m"});
            propagation::Material m{r.required<double>(node, "relative_permittivity"),
                                    r.required<double>(node, "conductivity_s_per_m")};
            try
            {
                m.validate();
            }
            catch (const std::exception &e)
            {
                r.fail(key, e.what());
            }
            return m;
        }

        fs::path resolve(const fs::path &base, const std::string &p)
        {
            fs::path path(p);
            if (path.is_relative())
                path = base / path;
            return fs::absolute(path).lexically_normal();
        }

        linkproc::BeamTarget parse_target(const Reader &r, const std::string &s)
        {
            if (s == "row1")
                return linkproc::BeamTarget::Row1;
            if (s == "row2")
                return linkproc::BeamTarget::Row2;
            r.fail("beam_target", "expected row1 or row2");
        }
    }

    SceneSpec parse_scene(const std::string &yaml_text, const std::string &name)
    {
        const Reader r(name);
        const YAML::Node root = parse_yaml(yaml_text, name);
        r.check_keys(root, "", {"carrier_hz", "materials", "facets", "base_station", "user_equipment"});

        std::map<std::string, propagation::Material> materials{{"concrete", propagation::Material::concrete()},
                                                               {"pec", propagation::Material::pec()}};
        if (const auto &mats = root["materials"])
        {
            if (!mats.IsMap())
                r.fail("materials", "expected a mapping of name to material");
            for (const auto &kv : mats)
            {
                const auto mname = kv.first.as<std::string>();
                materials[mname] = parse_material(r, kv.second, "materials." + mname);
            }
        }

        SceneSpec spec;
        spec.scene.carrier_hz = r.optional<double>(root, "carrier_hz").value_or(3.16e9);
        const auto &facets = root["facets"];
        if (!facets || !facets.IsSequence())
            r.fail("facets", "expected a list of facets");
        for (std::size_t i = 0; i < facets.size(); ++i)
        {
            const std::string k = "facets[" + std::to_string(i) + "]";
            const auto &f = facets[i];
            r.check_keys(f, k, {"name", "kind", "material", "vertices_m"});
            const auto mname = r.required<std::string>(f, "material");
            if (!materials.count(mname))
                r.fail(k + ".material", "unknown material '" + mname + "'");
            const auto &vs = f["vertices_m"];
            if (!vs || !vs.IsSequence())
                r.fail(k + ".vertices_m", "expected a list of [x, y, z]");
            std::vector<Vec3> verts;
            for (std::size_t v = 0; v < vs.size(); ++v)
                verts.push_back(r.vec3(vs[v], k + ".vertices_m"));
            try
            {
                const auto kind = propagation::facet_kind_from_string(r.optional<std::string>(f, "kind").value_or("building"));
                spec.scene.facets.emplace_back(std::move(verts), materials.at(mname), kind);
            }
            catch (const std::exception &e)
            {
                r.fail(k, e.what());
            }
        }
        spec.base_station = parse_array(r, root["base_station"], "base_station", true);
        spec.user_equipment = parse_array(r, root["user_equipment"], "user_equipment", false);
        return spec;
    }

    SceneSpec load_scene(const fs::path &path)
    {
        return parse_scene(read_file(path), path.string());
    }

    RunConfig parse_config(const std::string &yaml_text, const fs::path &base_dir)
    {
        const std::string name = "config";
        const Reader r(name);
        YAML::Node root = parse_yaml(yaml_text, name);
        if (root.IsMap() && root["manifest_version"])
        {
            root = root["config"];
            if (!root)
                r.fail("config", "manifest has no embedded configuration");
        }
        r.check_keys(root, "",
                     {"bs_touchstone", "ue_touchstone", "scene", "stochastic", "frequency_hz", "bandwidth_hz",
                      "signal_power_dbm", "calibrate", "noise_power_dbm", "schemes", "seed", "output_dir",
                      "diversity_threshold_quantile", "users", "ring", "max_bounces", "beam_target", "threads"});

        RunConfig c;
        if (auto p = r.optional<std::string>(root, "bs_touchstone"))
            c.bs_touchstone = resolve(base_dir, *p);
        if (auto p = r.optional<std::string>(root, "ue_touchstone"))
            c.ue_touchstone = resolve(base_dir, *p);
        if (auto p = r.optional<std::string>(root, "scene"))
            c.scene = resolve(base_dir, *p);
        if (const auto &s = root["stochastic"]; s && !s.IsNull())
        {
            r.check_keys(s, "stochastic", {"n_rx", "n_tx", "rx_correlation"});
            StochasticSpec st;
            st.n_rx = r.optional<std::size_t>(s, "n_rx").value_or(st.n_rx);
            st.n_tx = r.optional<std::size_t>(s, "n_tx").value_or(st.n_tx);
            st.rx_correlation = r.optional<double>(s, "rx_correlation").value_or(0.0);
            c.stochastic = st;
        }
        c.frequency_hz = r.required<double>(root, "frequency_hz");
        c.bandwidth_hz = r.required<double>(root, "bandwidth_hz");
        c.signal_power_dbm = r.optional<double>(root, "signal_power_dbm");
        if (const auto &cal = root["calibrate"]; cal && !cal.IsNull())
        {
            r.check_keys(cal, "calibrate", {"noise_power_dbm", "receive_snr_db"});
            c.calibrate = Calibration{r.required<double>(cal, "noise_power_dbm"), r.required<double>(cal, "receive_snr_db")};
        }
        const auto &noise = root["noise_power_dbm"];
        if (!noise)
            r.fail("noise_power_dbm", "missing required key");
        if (noise.IsScalar())
            c.noise_power_dbm.push_back(r.get<double>(noise, "noise_power_dbm"));
        else if (noise.IsSequence())
            for (const auto &n : noise)
                c.noise_power_dbm.push_back(r.get<double>(n, "noise_power_dbm"));
        else if (!noise.IsNull())
            r.fail("noise_power_dbm", "expected a number or a list of numbers");

        if (const auto &schemes = root["schemes"]; schemes && !schemes.IsNull())
        {
            if (!schemes.IsSequence())
                r.fail("schemes", "expected a list");
            for (const auto &s : schemes)
            {
                const auto sname = r.get<std::string>(s, "schemes");
                try
                {
                    c.schemes.push_back(linkproc::scheme_from_string(sname));
                }
                catch (const LinkError &)
                {
                    r.fail("schemes", "unknown scheme '" + sname + "'");
                }
            }
        }
        else
            c.schemes.assign(std::begin(linkproc::all_schemes), std::end(linkproc::all_schemes));

        c.seed = r.optional<std::uint64_t>(root, "seed").value_or(c.seed);
        c.output_dir = resolve(base_dir, r.optional<std::string>(root, "output_dir").value_or("out"));
        c.diversity_threshold_quantile =
            r.optional<double>(root, "diversity_threshold_quantile").value_or(c.diversity_threshold_quantile);
        c.users = r.optional<std::size_t>(root, "users").value_or(c.users);
        if (const auto &ring = root["ring"]; ring && !ring.IsNull())
        {
            r.check_keys(ring, "ring", {"r_min_m", "r_max_m", "height_m", "sector_min_deg", "sector_max_deg"});
            c.ring.r_min = r.optional<double>(ring, "r_min_m").value_or(c.ring.r_min);
            c.ring.r_max = r.optional<double>(ring, "r_max_m").value_or(c.ring.r_max);
            c.ring.height = r.optional<double>(ring, "height_m").value_or(c.ring.height);
            c.ring.sector_min_deg = r.optional<double>(ring, "sector_min_deg").value_or(c.ring.sector_min_deg);
            c.ring.sector_max_deg = r.optional<double>(ring, "sector_max_deg").value_or(c.ring.sector_max_deg);
        }
        c.max_bounces = r.optional<int>(root, "max_bounces").value_or(c.max_bounces);
        if (auto t = r.optional<std::string>(root, "beam_target"))
            c.beam_target = parse_target(r, *t);
        c.threads = r.optional<unsigned>(root, "threads").value_or(c.threads);
        return c;
    }

    RunConfig load_config(const fs::path &path)
    {
        const std::string text = read_file(path);
        try
        {
            return parse_config(text, fs::absolute(path).parent_path());
        }
        catch (const ConfigError &e)
        {
            // Replace the generic source name with the file.
            std::string msg = e.detail();
            if (msg.rfind("config", 0) == 0)
                msg = path.string() + msg.substr(6);
            throw ConfigError(msg);
        }
    }

    std::string config_to_json(const RunConfig &c)
    {
        nlohmann::ordered_json j;
        auto path_or_null = [](const std::optional<fs::path> &p)
        { return p ? nlohmann::ordered_json(fs::absolute(*p).lexically_normal().string()) : nlohmann::ordered_json(); };
        j["bs_touchstone"] = path_or_null(c.bs_touchstone);
        j["ue_touchstone"] = path_or_null(c.ue_touchstone);
        j["scene"] = path_or_null(c.scene);
        if (c.stochastic)
            j["stochastic"] = {{"n_rx", c.stochastic->n_rx},
                               {"n_tx", c.stochastic->n_tx},
                               {"rx_correlation", c.stochastic->rx_correlation}};
        else
            j["stochastic"] = nullptr;
        j["frequency_hz"] = c.frequency_hz;
        j["bandwidth_hz"] = c.bandwidth_hz;
        j["signal_power_dbm"] = c.signal_power_dbm ? nlohmann::ordered_json(*c.signal_power_dbm) : nlohmann::ordered_json();
        if (c.calibrate)
            j["calibrate"] = {{"noise_power_dbm", c.calibrate->noise_power_dbm},
                              {"receive_snr_db", c.calibrate->receive_snr_db}};
        else
            j["calibrate"] = nullptr;
        j["noise_power_dbm"] = c.noise_power_dbm;
        auto schemes = nlohmann::ordered_json::array();
        for (auto s : c.schemes)
            schemes.push_back(linkproc::to_string(s));
        j["schemes"] = schemes;
        j["seed"] = c.seed;
        j["output_dir"] = fs::absolute(c.output_dir).lexically_normal().string();
        j["diversity_threshold_quantile"] = c.diversity_threshold_quantile;
        j["users"] = c.users;
        j["ring"] = {{"r_min_m", c.ring.r_min},
                     {"r_max_m", c.ring.r_max},
                     {"height_m", c.ring.height},
                     {"sector_min_deg", c.ring.sector_min_deg},
                     {"sector_max_deg", c.ring.sector_max_deg}};
        j["max_bounces"] = c.max_bounces;
        j["beam_target"] = c.beam_target == linkproc::BeamTarget::Row1 ? "row1" : "row2";
        j["threads"] = c.threads;
        return j.dump(2);
    }

    std::string to_string(const Diagnostic &d)
    {
        return std::string(d.severity == Diagnostic::Severity::error ? "error: " : "warning: ") + d.message;
    }

    bool has_errors(const std::vector<Diagnostic> &diagnostics)
    {
        for (const auto &d : diagnostics)
            if (d.severity == Diagnostic::Severity::error)
                return true;
        return false;
    }

    std::vector<Diagnostic> validate(const RunConfig &c)
    {
        std::vector<Diagnostic> out;
        auto error = [&](std::string m) { out.push_back({Diagnostic::Severity::error, std::move(m)}); };
        auto warning = [&](std::string m) { out.push_back({Diagnostic::Severity::warning, std::move(m)}); };

        // Touchstone files: existence, parse, frequency coverage.
        auto check_network = [&](const std::optional<fs::path> &p, const char *key) -> std::optional<std::size_t>
        {
            if (!p)
                return std::nullopt;
            if (!fs::exists(*p))
            {
                error(std::string(key) + ": file not found: " + p->string());
                return std::nullopt;
            }
            try
            {
                const auto net = touchstone::load_touchstone(p->string());
                if (c.frequency_hz < net.min_frequency() || c.frequency_hz > net.max_frequency())
                    error(std::string(key) + ": frequency " + format_number(c.frequency_hz) + " Hz outside the sweep [" +
                          format_number(net.min_frequency()) + ", " + format_number(net.max_frequency()) + "] Hz of " +
                          p->string());
                return net.n_ports();
            }
            catch (const Error &e)
            {
                error(std::string(key) + ": " + p->string() + ": " + e.what());
                return std::nullopt;
            }
        };
        const auto bs_ports = check_network(c.bs_touchstone, "bs_touchstone");
        const auto ue_ports = check_network(c.ue_touchstone, "ue_touchstone");

        std::optional<std::size_t> n_rx, n_tx;
        if (c.scene && c.stochastic)
            error("scene and stochastic are mutually exclusive");
        else if (!c.scene && !c.stochastic)
            error("one of scene or stochastic is required");
        else if (c.scene)
        {
            if (!c.bs_touchstone)
                error("bs_touchstone: required with a scene");
            if (!c.ue_touchstone)
                error("ue_touchstone: required with a scene");
            if (!fs::exists(*c.scene))
                error("scene: file not found: " + c.scene->string());
            else
            {
                try
                {
                    const auto spec = load_scene(*c.scene);
                    n_tx = spec.base_station.size();
                    n_rx = spec.user_equipment.size();
                }
                catch (const Error &e)
                {
                    error(std::string("scene: ") + e.what());
                }
            }
        }
        else
        {
            const auto &s = *c.stochastic;
            if (s.n_rx == 0 || s.n_tx == 0)
                error("stochastic: n_rx and n_tx must be positive");
            if (!(std::abs(s.rx_correlation) <= 1.0))
                error("stochastic.rx_correlation: must lie in [-1, 1]");
            n_rx = s.n_rx;
            n_tx = s.n_tx;
        }
        if (bs_ports && n_tx && *bs_ports != *n_tx)
            error("bs_touchstone: " + std::to_string(*bs_ports) + " ports but the transmit array has " +
                  std::to_string(*n_tx));
        if (ue_ports && n_rx && *ue_ports != *n_rx)
            error("ue_touchstone: " + std::to_string(*ue_ports) + " ports but the receive array has " +
                  std::to_string(*n_rx));

        if (!(c.frequency_hz > 0.0))
            error("frequency_hz: must be positive");
        if (!(c.bandwidth_hz > 0.0))
            error("bandwidth_hz: must be positive");
        else if (c.bandwidth_hz >= c.frequency_hz)
            error("bandwidth_hz: " + format_number(c.bandwidth_hz) + " Hz is not below frequency_hz " +
                  format_number(c.frequency_hz) + " Hz (unit mix-up?)");

        if (!c.signal_power_dbm && !c.calibrate)
            error("one of signal_power_dbm or calibrate is required");
        if (c.signal_power_dbm && c.calibrate)
            warning("calibrate overrides signal_power_dbm");
        if (c.signal_power_dbm && dbm_to_watt(*c.signal_power_dbm) > 100.0)
            warning("signal_power_dbm: " + format_number(*c.signal_power_dbm) +
                    " dBm exceeds 100 W (value given in W instead of dBm?)");
        if (c.noise_power_dbm.empty())
            error("noise_power_dbm: at least one noise power is required");
        for (double n : c.noise_power_dbm)
            if (dbm_to_watt(n) > 1.0)
                warning("noise_power_dbm: " + format_number(n) + " dBm exceeds 1 W (value given in W instead of dBm?)");

        if (c.schemes.empty())
            error("schemes: at least one scheme is required");
        if (!(c.diversity_threshold_quantile > 0.0 && c.diversity_threshold_quantile < 1.0))
            error("diversity_threshold_quantile: must lie in (0, 1)");
        if (c.users == 0)
            error("users: must be positive");
        if (c.max_bounces < 0 || c.max_bounces > 2)
            error("max_bounces: must be 0, 1 or 2");
        if (c.threads == 0)
            error("threads: must be positive");
        if (c.scene && !(c.ring.r_min >= 0.0 && c.ring.r_max > c.ring.r_min))
            error("ring: need 0 <= r_min_m < r_max_m");
        if (c.scene && !(c.ring.sector_max_deg > c.ring.sector_min_deg))
            error("ring: empty sector");

        const std::size_t target = c.beam_target == linkproc::BeamTarget::Row1 ? 0 : 1;
        if (n_rx && target >= *n_rx)
            for (auto s : c.schemes)
                if (s == linkproc::Scheme::Mrc2x1 || (s == linkproc::Scheme::Miso1x1 && *n_rx > 1))
                {
                    error("beam_target: receive array has only " + std::to_string(*n_rx) + " port(s)");
                    break;
                }
        return out;
    }

    std::vector<Diagnostic> validate_file(const fs::path &path)
    {
        try
        {
            return validate(load_config(path));
        }
        catch (const Error &e)
        {
            return {{Diagnostic::Severity::error, e.detail()}};
        }
    }
}
