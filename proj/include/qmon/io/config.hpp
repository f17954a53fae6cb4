// config.hpp
// YAML scenario files. Every dimensional value carries its unit; unknown keys
// are rejected with their position in the file.
//
//   name: double-well-1d
//   grid:
//     x: {min: -300 um, max: 300 um, points: 512}
//   potential: {kind: quartic-double-well, half_separation: 94.5 um, barrier_height: 1e-13 eV}
//   initial_state: {center: [-135 um], width: 10 um}
//   initial_estimate: {center: [94.5 um], width: 15 um}
//   monitor: {gamma: 9.9856 1/(um^2 s)}
//   time: {dt: 0.1 ms, duration: 100 ms, trace_interval: 1 ms}

#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "qmon/builtins.hpp"
#include "qmon/error.hpp"
#include "qmon/io/quantity.hpp"
#include "qmon/io/snapshot.hpp"
#include "qmon/scenario.hpp"

namespace qmon::io {

namespace detail {

inline const char* axis_name(std::size_t a) { return a == 0 ? "x" : "y"; }

[[noreturn]] inline void fail(const YAML::Node& n, const std::string& what) {
    const auto m = n.Mark();
    throw ConfigError(what, m.is_null() ? -1 : m.line, m.is_null() ? -1 : m.column);
}

// A mapping whose keys must all be consumed.
class Section {
public:
    Section(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.IsMap()) fail(node_, "'" + path_ + "' must be a mapping");
    }

    bool has(const std::string& key) const { return bool(node_[key]); }

    YAML::Node get(const std::string& key) {
        seen_.insert(key);
        return node_[key];
    }
    YAML::Node require(const std::string& key) {
        auto n = get(key);
        if (!n) fail(node_, "missing '" + key + "' in " + where());
        return n;
    }
    Section section(const std::string& key) { return Section(require(key), qualified(key)); }

    std::string scalar(const YAML::Node& n, const std::string& key) const {
        if (!n.IsScalar()) fail(n, "'" + qualified(key) + "' must be a scalar");
        return n.Scalar();
    }
    double quantity(const std::string& key, const char* unit) { return to_quantity(require(key), key, unit); }
    std::optional<double> optional_quantity(const std::string& key, const char* unit) {
        auto n = get(key);
        if (!n) return std::nullopt;
        return to_quantity(n, key, unit);
    }
    double to_quantity(const YAML::Node& n, const std::string& key, const char* unit) const {
        try {
            return parse_quantity(scalar(n, key), unit);
        } catch (const UnitError& e) {
            fail(n, qualified(key) + ": " + e.what());
        }
    }
    std::vector<double> quantity_list(const std::string& key, const char* unit) {
        auto n = require(key);
        if (!n.IsSequence()) fail(n, "'" + qualified(key) + "' must be a list");
        std::vector<double> out;
        for (const auto& item : n) out.push_back(to_quantity(item, key, unit));
        return out;
    }
    template <class T>
    T value(const std::string& key, const T& fallback) {
        auto n = get(key);
        if (!n) return fallback;
        try {
            return n.as<T>();
        } catch (const YAML::Exception&) {
            fail(n, "'" + qualified(key) + "' has the wrong type");
        }
    }
    std::string text(const std::string& key, const std::string& fallback) { return value<std::string>(key, fallback); }

    // Rejects every key that was not read.
    void finish() const {
        for (const auto& kv : node_) {
            const auto key = kv.first.as<std::string>();
            if (!seen_.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where());
        }
    }

    const YAML::Node& node() const { return node_; }
    std::string where() const { return path_.empty() ? "the top level" : "'" + path_ + "'"; }
    std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    YAML::Node node_;
    std::string path_;
    std::set<std::string> seen_;
};

inline std::size_t parse_axis(const YAML::Node& n, std::size_t dims) {
    const std::string s = n.IsScalar() ? n.Scalar() : "";
    if (s == "x" && dims >= 1) return 0;
    if (s == "y" && dims >= 2) return 1;
    fail(n, "axis must be " + std::string(dims == 2 ? "x or y" : "x"));
}

inline GaussianPacketSpec parse_packet(Section s, std::size_t dims) {
    GaussianPacketSpec p;
    p.center = s.quantity_list("center", "um");
    if (p.center.size() != dims) fail(s.node(), s.where() + " center needs " + std::to_string(dims) + " components");
    p.width = s.quantity("width", "um");
    if (s.has("momentum")) {
        p.momentum = s.quantity_list("momentum", "1/um");
        if (p.momentum.size() != dims) fail(s.node(), s.where() + " momentum needs " + std::to_string(dims) + " components");
    }
    s.finish();
    return p;
}

inline Potential parse_potential(Section s, const Grid& grid, const std::filesystem::path& base) {
    const auto kind_node = s.require("kind");
    const std::string kind = s.scalar(kind_node, "kind");
    Potential pot;
    if (kind == "flat") {
        pot = Flat{};
    } else if (kind == "quartic-double-well" || kind == "double-well") {
        pot = QuarticDoubleWell{s.quantity("half_separation", "um"), s.quantity("barrier_height", "eV")};
    } else if (kind == "mexican-hat") {
        pot = MexicanHat{s.quantity("well_radius", "um"), s.quantity("peak_height", "eV")};
    } else if (kind == "henon-heiles") {
        pot = HenonHeiles{s.quantity("amplitude", "eV/um^4"), s.quantity("quadratic", "um^2"),
                          s.quantity("cubic", "um")};
    } else if (kind == "harmonic") {
        Harmonic h;
        h.stiffness = s.quantity_list("stiffness", "eV/um^2");
        if (s.has("center")) h.center = s.quantity_list("center", "um");
        pot = h;
    } else if (kind == "tabulated") {
        const auto file_node = s.require("file");
        const std::string file = s.scalar(file_node, "file");
        const auto path = std::filesystem::path(file).is_absolute() ? std::filesystem::path(file) : base / file;
        SnapshotFile snap;
        try {
            snap = read_snapshot(path);
        } catch (const std::exception& e) {
            fail(file_node, "cannot load tabulated potential: " + std::string(e.what()));
        }
        if (snap.complex_valued) fail(file_node, "tabulated potential must be a real-valued snapshot");
        if (!(snap.grid == grid)) fail(file_node, "tabulated potential grid differs from the scenario grid");
        // stored absolute so a config echoed into an output directory still resolves
        pot = Tabulated{snap.grid, snap.values, std::filesystem::absolute(path).lexically_normal().string()};
    } else {
        fail(kind_node, "unknown potential kind '" + kind + "'");
    }
    s.finish();
    try {
        validate_potential(pot);
    } catch (const std::invalid_argument& e) {
        fail(s.node(), e.what());
    }
    return pot;
}

// Mass in kg whose conversion back to internal units is exact.
inline std::string format_mass(double internal) {
    double kg = internal * units::mass_si;
    for (int i = 0; i < 64 && kg / units::mass_si != internal; ++i)
        kg = std::nextafter(kg, kg / units::mass_si < internal ? INFINITY : -INFINITY);
    return format_quantity(kg, "kg");
}

}  // namespace detail

inline ScenarioConfig parse_config_node(const YAML::Node& root, const std::filesystem::path& base = ".") {
    using detail::fail;
    using detail::Section;
    if (!root || root.IsNull()) throw ConfigError("empty configuration");
    Section top(root, "");
    ScenarioConfig c;
    c.name = top.text("name", "custom");
    c.variant = top.text("variant", "custom");

    {
        Section g = top.section("grid");
        std::vector<Axis> axes;
        for (const char* name : {"x", "y"}) {
            if (!g.has(name)) continue;
            Section a = g.section(name);
            Axis ax{a.quantity("min", "um"), a.quantity("max", "um"), 0};
            const auto pts = a.require("points");
            long long n = 0;
            try {
                n = pts.as<long long>();
            } catch (const YAML::Exception&) {
                fail(pts, "points must be an integer");
            }
            if (n <= 8) fail(pts, "grid axis needs more than 8 points");
            ax.points = static_cast<std::size_t>(n);
            a.finish();
            axes.push_back(ax);
        }
        if (axes.empty() || (g.has("y") && !g.has("x"))) fail(g.node(), "grid needs an x axis (and optionally y)");
        g.finish();
        try {
            c.grid = Grid(axes);
        } catch (const std::invalid_argument& e) {
            fail(g.node(), e.what());
        }
    }
    const std::size_t dims = c.grid.dims();

    c.potential = detail::parse_potential(top.section("potential"), c.grid, base);
    if (auto m = top.get("mass")) c.mass = top.to_quantity(m, "mass", "kg") / units::mass_si;
    if (!(c.mass > 0.0)) fail(root, "mass must be positive");
    c.self_dynamics = top.value<bool>("self_dynamics", true);
    c.initial_state = detail::parse_packet(top.section("initial_state"), dims);
    c.initial_estimate = detail::parse_packet(top.section("initial_estimate"), dims);

    try {
        c.mode = parse_mode(top.text("mode", "continuous"));
        c.scheme = parse_scheme(top.text("scheme", "weak2"));
    } catch (const std::invalid_argument& e) {
        fail(root, e.what());
    }

    std::optional<double> tau;
    {
        Section m = top.section("monitor");
        const auto gamma = m.optional_quantity("gamma", "1/(um^2 ms)");
        const auto sigma = m.optional_quantity("sigma", "um");
        tau = m.optional_quantity("tau", "ms");
        if (gamma && sigma && tau) {
            try {
                MonitorConfig{*sigma, *tau, *gamma}.validate();
            } catch (const std::invalid_argument& e) {
                fail(m.node(), e.what());
            }
            c.gamma = *gamma;
        } else if (gamma) {
            c.gamma = *gamma;
            if (sigma && !tau) fail(m.node(), "monitor.sigma needs monitor.tau");
        } else if (sigma && tau) {
            if (!(*sigma > 0.0) || !(*tau > 0.0)) fail(m.node(), "sigma and tau must be positive");
            c.gamma = 1.0 / (*sigma * *sigma * *tau);
        } else {
            fail(m.node(), "monitor needs gamma or both sigma and tau");
        }
        if (m.has("axes")) {
            const auto list = m.get("axes");
            if (!list.IsSequence()) fail(list, "monitor.axes must be a list");
            for (const auto& a : list) c.measured_axes.push_back(detail::parse_axis(a, dims));
        }
        m.finish();
    }

    {
        Section t = top.section("time");
        const auto dt = t.optional_quantity("dt", "ms");
        if (dt) c.dt = *dt;
        else if (c.mode == MonitorMode::Discrete && tau) c.dt = *tau;
        else fail(t.node(), "missing 'dt' in 'time'");
        if (c.mode == MonitorMode::Discrete && tau && dt && *tau != *dt)
            fail(t.node(), "discrete mode measures once per step: time.dt must equal monitor.tau");
        c.duration = t.quantity("duration", "ms");
        c.trace_interval = t.optional_quantity("trace_interval", "ms").value_or(0.0);
        t.finish();
    }

    if (auto s = top.get("seed")) {
        try {
            c.seed = s.as<std::uint64_t>();
        } catch (const YAML::Exception&) {
            fail(s, "seed must be a non-negative integer");
        }
    }
    if (auto s = top.get("snapshots")) {
        if (!s.IsSequence()) fail(s, "snapshots must be a list of times");
        for (const auto& item : s) c.snapshots.push_back(top.to_quantity(item, "snapshots", "ms"));
    }
    if (auto list = top.get("perturbations")) {
        if (!list.IsSequence()) fail(list, "perturbations must be a list");
        for (const auto& item : list) {
            Section p(item, "perturbations[]");
            PerturbationEvent ev;
            ev.time = p.quantity("time", "ms");
            const auto kind = p.text("kind", "momentum-kick");
            if (kind != "momentum-kick") fail(item, "unknown perturbation kind '" + kind + "'");
            if (p.has("momentum") == p.has("temperature"))
                fail(item, "a perturbation needs exactly one of momentum or temperature");
            if (p.has("momentum")) {
                ev.momentum = p.quantity_list("momentum", "1/um");
                if (ev.momentum.size() != dims) fail(item, "kick momentum needs one component per axis");
            } else {
                ev.temperature = p.quantity("temperature", "K");
                ev.axis = p.has("axis") ? detail::parse_axis(p.get("axis"), dims) : 0;
            }
            if (p.has("fidelity_trigger")) ev.fidelity_trigger = p.value<double>("fidelity_trigger", 0.0);
            p.finish();
            c.perturbations.push_back(ev);
        }
    }
    top.finish();

    try {
        validate_scenario(c);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

inline ScenarioConfig parse_config_text(const std::string& text, const std::filesystem::path& base = ".") {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError("YAML syntax error: " + e.msg, e.mark.line, e.mark.column);
    }
    return parse_config_node(root, base);
}

inline ScenarioConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.parent_path().empty() ? "." : path.parent_path());
}

// Accepts a file path or a built-in name, optionally suffixed "@desk" or
// "@paper".
inline ScenarioConfig load_config(const std::string& spec) {
    if (!std::filesystem::exists(spec)) {
        const auto at = spec.find('@');
        const std::string name = spec.substr(0, at);
        const std::string variant = at == std::string::npos ? "desk" : spec.substr(at + 1);
        if (is_builtin(name)) {
            try {
                return builtin_scenario(name, variant);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
    }
    return parse_config(spec);
}

inline std::string serialize_config(const ScenarioConfig& c) {
    using detail::axis_name;
    YAML::Emitter out;
    auto q = [](double v, const char* unit) { return format_quantity(v, unit); };
    auto list = [&](const Vec& v, const char* unit) {
        out << YAML::Flow << YAML::BeginSeq;
        for (double x : v) out << q(x, unit);
        out << YAML::EndSeq;
    };
    auto packet = [&](const GaussianPacketSpec& p) {
        out << YAML::BeginMap;
        out << YAML::Key << "center" << YAML::Value;
        list(p.center, "um");
        out << YAML::Key << "width" << YAML::Value << q(p.width, "um");
        if (!p.momentum.empty()) {
            out << YAML::Key << "momentum" << YAML::Value;
            list(p.momentum, "1/um");
        }
        out << YAML::EndMap;
    };

    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << c.name;
    out << YAML::Key << "variant" << YAML::Value << c.variant;
    out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap;
    for (std::size_t a = 0; a < c.grid.dims(); ++a) {
        const Axis& ax = c.grid.axis(a);
        out << YAML::Key << axis_name(a) << YAML::Value << YAML::Flow << YAML::BeginMap;
        out << YAML::Key << "min" << YAML::Value << q(ax.min, "um");
        out << YAML::Key << "max" << YAML::Value << q(ax.max, "um");
        out << YAML::Key << "points" << YAML::Value << ax.points;
        out << YAML::EndMap;
    }
    out << YAML::EndMap;

    out << YAML::Key << "potential" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "kind" << YAML::Value << potential_kind(c.potential);
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, QuarticDoubleWell>) {
                out << YAML::Key << "half_separation" << YAML::Value << q(p.half_separation, "um");
                out << YAML::Key << "barrier_height" << YAML::Value << q(p.barrier_height, "eV");
            } else if constexpr (std::is_same_v<T, MexicanHat>) {
                out << YAML::Key << "well_radius" << YAML::Value << q(p.well_radius, "um");
                out << YAML::Key << "peak_height" << YAML::Value << q(p.peak_height, "eV");
            } else if constexpr (std::is_same_v<T, HenonHeiles>) {
                out << YAML::Key << "amplitude" << YAML::Value << q(p.amplitude, "eV/um^4");
                out << YAML::Key << "quadratic" << YAML::Value << q(p.quadratic, "um^2");
                out << YAML::Key << "cubic" << YAML::Value << q(p.cubic, "um");
            } else if constexpr (std::is_same_v<T, Harmonic>) {
                out << YAML::Key << "stiffness" << YAML::Value;
                list(p.stiffness, "eV/um^2");
                if (!p.center.empty()) {
                    out << YAML::Key << "center" << YAML::Value;
                    list(p.center, "um");
                }
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                if (p.source.empty()) throw ConfigError("tabulated potential has no source file to reference");
                out << YAML::Key << "file" << YAML::Value << p.source;
            }
        },
        c.potential);
    out << YAML::EndMap;

    if (c.mass != units::hydrogen_mass) out << YAML::Key << "mass" << YAML::Value << detail::format_mass(c.mass);
    if (!c.self_dynamics) out << YAML::Key << "self_dynamics" << YAML::Value << false;
    out << YAML::Key << "initial_state" << YAML::Value;
    packet(c.initial_state);
    out << YAML::Key << "initial_estimate" << YAML::Value;
    packet(c.initial_estimate);
    out << YAML::Key << "mode" << YAML::Value << to_string(c.mode);
    out << YAML::Key << "scheme" << YAML::Value << to_string(c.scheme);

    out << YAML::Key << "monitor" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "gamma" << YAML::Value << q(c.gamma, "1/(um^2 ms)");
    if (!c.measured_axes.empty()) {
        out << YAML::Key << "axes" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (std::size_t a : c.measured_axes) out << axis_name(a);
        out << YAML::EndSeq;
    }
    out << YAML::EndMap;

    out << YAML::Key << "time" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "dt" << YAML::Value << q(c.dt, "ms");
    out << YAML::Key << "duration" << YAML::Value << q(c.duration, "ms");
    if (c.trace_interval > 0.0) out << YAML::Key << "trace_interval" << YAML::Value << q(c.trace_interval, "ms");
    out << YAML::EndMap;

    out << YAML::Key << "seed" << YAML::Value << c.seed;
    if (!c.snapshots.empty()) {
        out << YAML::Key << "snapshots" << YAML::Value;
        list(c.snapshots, "ms");
    }
    if (!c.perturbations.empty()) {
        out << YAML::Key << "perturbations" << YAML::Value << YAML::BeginSeq;
        for (const auto& ev : c.perturbations) {
            out << YAML::BeginMap;
            out << YAML::Key << "time" << YAML::Value << q(ev.time, "ms");
            if (ev.temperature) {
                out << YAML::Key << "temperature" << YAML::Value << q(*ev.temperature, "K");
                out << YAML::Key << "axis" << YAML::Value << axis_name(ev.axis);
            } else {
                out << YAML::Key << "momentum" << YAML::Value;
                list(ev.momentum, "1/um");
            }
            if (ev.fidelity_trigger)
                out << YAML::Key << "fidelity_trigger" << YAML::Value << format_number(*ev.fidelity_trigger);
            out << YAML::EndMap;
        }
        out << YAML::EndSeq;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

}  // namespace qmon::io
