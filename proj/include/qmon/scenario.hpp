// scenario.hpp
// Scenario configuration, perturbations and the built-in experiment set.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmon/dynamics.hpp"
#include "qmon/measurement.hpp"
#include "qmon/sde.hpp"
#include "qmon/units.hpp"
#include "qmon/wave_function.hpp"

namespace qmon {

enum class MonitorMode { Discrete, Continuous };

inline std::string to_string(MonitorMode m) { return m == MonitorMode::Discrete ? "discrete" : "continuous"; }

inline MonitorMode parse_mode(const std::string& s) {
    if (s == "discrete") return MonitorMode::Discrete;
    if (s == "continuous") return MonitorMode::Continuous;
    throw std::invalid_argument("unknown mode '" + s + "' (expected discrete or continuous)");
}

// Momentum kick applied to the true state only. Either an explicit wavenumber
// vector or a temperature converted through k_B T = p^2 / m along one axis.
// A fidelity trigger delays the kick until the fidelity first reaches the
// threshold at or after `time` (checked at trace samples).
struct PerturbationEvent {
    double time = 0.0;  // ms
    Vec momentum;       // 1/um (hbar = 1)
    std::optional<double> temperature;  // K
    std::size_t axis = 0;
    std::optional<double> fidelity_trigger;

    bool operator==(const PerturbationEvent&) const = default;
};

struct ScenarioConfig {
    std::string name = "custom";
    std::string variant = "custom";
    Grid grid;
    Potential potential = Flat{};
    double mass = units::hydrogen_mass;  // internal units
    bool self_dynamics = true;
    GaussianPacketSpec initial_state;
    GaussianPacketSpec initial_estimate;
    double gamma = 0.0;  // 1/(um^2 ms)
    MonitorMode mode = MonitorMode::Continuous;
    SdeScheme scheme = SdeScheme::WeakOrder2;
    MeasuredAxes measured_axes;  // empty: all axes
    double dt = 0.0;              // integration step; the period tau in discrete mode
    double duration = 0.0;
    double trace_interval = 0.0;  // 0: every step
    std::uint64_t seed = default_seed;
    std::vector<double> snapshots;
    std::vector<PerturbationEvent> perturbations;

    Hamiltonian hamiltonian() const { return Hamiltonian{grid, mass, potential, self_dynamics}; }

    MeasuredAxes axes() const { return resolve_axes(grid, measured_axes); }

    // Single-measurement resolution implied by gamma and the period.
    MonitorConfig monitor() const { return MonitorConfig::from_gamma_tau(gamma, dt); }

    std::size_t total_steps() const { return static_cast<std::size_t>(std::llround(duration / dt)); }
    std::size_t trace_every() const {
        if (trace_interval <= 0.0) return 1;
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(trace_interval / dt)));
    }
    std::size_t step_of(double t) const { return static_cast<std::size_t>(std::llround(t / dt)); }

    bool operator==(const ScenarioConfig&) const = default;
};

inline bool is_gaussian_spec_valid(const Grid& grid, const GaussianPacketSpec& s) {
    return s.center.size() == grid.dims() && grid.contains(s.center) && s.width > 0.0;
}

// k = sqrt(m k_B T)/hbar, internal wavenumber for a temperature in K and a
// mass in internal units.
inline double temperature_to_wavenumber(double temperature, double mass) {
    if (temperature < 0.0) throw std::invalid_argument("temperature must be non-negative");
    return std::sqrt(mass * units::mass_si * units::boltzmann_si * temperature) / units::momentum_si;
}

// p = sqrt(m k_B T) in kg m/s for a temperature in K and a mass in kg.
inline double temperature_to_kick(double temperature, double mass_kg) {
    if (temperature < 0.0) throw std::invalid_argument("temperature must be non-negative");
    return std::sqrt(mass_kg * units::boltzmann_si * temperature);
}

// Wavenumber vector of an event on a grid of the given dimension.
inline Vec kick_wavenumber(const PerturbationEvent& ev, std::size_t dims, double mass) {
    Vec k(dims, 0.0);
    if (ev.temperature) {
        if (ev.axis >= dims) throw std::invalid_argument("kick axis outside the grid");
        k[ev.axis] = temperature_to_wavenumber(*ev.temperature, mass);
    } else if (!ev.momentum.empty()) {
        if (ev.momentum.size() != dims) throw std::invalid_argument("kick momentum has the wrong dimension");
        k = ev.momentum;
    }
    return k;
}

// psi(q) -> exp(i p.q / hbar) psi(q).
inline WaveFunction momentum_kick(WaveFunction psi, std::span<const double> p) {
    const Grid& g = psi.grid();
    if (p.size() != g.dims()) throw std::invalid_argument("kick has the wrong dimension");
    bool zero = true;
    for (double c : p) zero = zero && c == 0.0;
    if (zero) return psi;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        double phase = 0.0;
        for (std::size_t a = 0; a < g.dims(); ++a) phase += p[a] * g.coordinate(i, a);
        psi[i] *= std::polar(1.0, phase);
    }
    return psi;
}

// Throws std::invalid_argument describing the first violated constraint.
inline void validate_scenario(const ScenarioConfig& c) {
    validate_hamiltonian(c.hamiltonian());
    if (!(c.dt > 0.0)) throw std::invalid_argument("dt must be positive");
    if (!(c.duration >= c.dt)) throw std::invalid_argument("duration must be at least dt");
    if (c.gamma < 0.0) throw std::invalid_argument("gamma must be non-negative");
    if (c.mode == MonitorMode::Discrete && !(c.gamma > 0.0))
        throw std::invalid_argument("discrete monitoring needs gamma > 0");
    if (!is_gaussian_spec_valid(c.grid, c.initial_state))
        throw std::invalid_argument("initial state packet lies outside the grid");
    if (!is_gaussian_spec_valid(c.grid, c.initial_estimate))
        throw std::invalid_argument("initial estimate packet lies outside the grid");
    if (c.gamma > 0.0 && c.axes().empty()) throw std::invalid_argument("no measured axes");
    {
        std::set<std::size_t> seen;
        for (std::size_t a : c.measured_axes)
            if (a >= c.grid.dims() || !seen.insert(a).second)
                throw std::invalid_argument("measured axes must be distinct grid axes");
    }
    if (c.trace_interval < 0.0) throw std::invalid_argument("trace interval must be non-negative");
    for (double t : c.snapshots)
        if (t < 0.0 || t > c.duration) throw std::invalid_argument("snapshot time outside [0, duration]");
    for (const auto& ev : c.perturbations) {
        if (ev.time < 0.0 || ev.time > c.duration) throw std::invalid_argument("perturbation time outside [0, duration]");
        const Vec k = kick_wavenumber(ev, c.grid.dims(), c.mass);
        for (std::size_t a = 0; a < k.size(); ++a)
            if (std::abs(k[a]) > 0.5 * c.grid.axis(a).nyquist())
                throw std::invalid_argument("momentum kick of " + std::to_string(k[a]) +
                                            " 1/um exceeds half the grid band limit " +
                                            std::to_string(0.5 * c.grid.axis(a).nyquist()) + " 1/um");
    }
}

// Steps at which both states are settled to position space: trace samples,
// snapshots and timed perturbations. The live run and any replay of its
// record must use the same set.
inline std::vector<std::size_t> observation_steps(const ScenarioConfig& c) {
    std::set<std::size_t> s;
    const std::size_t n = c.total_steps();
    const std::size_t every = c.trace_every();
    for (std::size_t k = 0; k <= n; k += every) s.insert(k);
    s.insert(n);
    for (double t : c.snapshots) s.insert(std::min(n, c.step_of(t)));
    for (const auto& ev : c.perturbations) s.insert(std::min(n, c.step_of(ev.time)));
    return {s.begin(), s.end()};
}

}  // namespace qmon
