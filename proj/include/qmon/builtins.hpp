// builtins.hpp
// The built-in scenario set. Each name has a "desk" variant sized for quick
// statistical runs and a "paper" variant with the published parameters at
// full resolution.

#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qmon/scenario.hpp"

namespace qmon {

inline constexpr std::array<std::string_view, 6> builtin_names = {
    "double-well-1d",          "mexican-hat-2d",      "henon-heiles-2d",
    "henon-heiles-kick",       "separable-degenerate-2d", "free-localization-1d",
};

inline bool is_builtin(std::string_view name) {
    for (auto n : builtin_names)
        if (n == name) return true;
    return false;
}

inline std::string builtin_description(std::string_view name) {
    if (name == "double-well-1d") return "hydrogen in a 1D quartic double well, estimate starts in the other well";
    if (name == "mexican-hat-2d") return "hydrogen in a 2D Mexican hat, both axes monitored";
    if (name == "henon-heiles-2d") return "hydrogen in the chaotic Henon-Heiles potential";
    if (name == "henon-heiles-kick") return "Henon-Heiles run with an unobserved momentum kick on the true state";
    if (name == "separable-degenerate-2d") return "separable 2D harmonic well with only x monitored";
    if (name == "free-localization-1d") return "monitoring without self-dynamics: localization of a free packet";
    throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

namespace detail {

inline ScenarioConfig double_well(bool paper) {
    ScenarioConfig c;
    // wide enough that measurement heating never carries the state to the edge
    c.grid = paper ? Grid::line(-600.0, 600.0, 2048) : Grid::line(-600.0, 600.0, 1024);
    c.potential = QuarticDoubleWell{94.5, 1e-13};
    // starts just above the barrier on the left, the estimate sits in the right well
    c.initial_state = {{-135.0}, 10.0, {}};
    c.initial_estimate = {{94.5}, 15.0, {}};
    c.gamma = units::gamma_per_um2_s(9.9856);
    c.dt = paper ? 0.02 : 0.1;
    c.duration = 100.0;
    c.trace_interval = 1.0;
    c.snapshots = {0.0, 5.0, 10.0, 20.0, 50.0, 100.0};
    return c;
}

inline ScenarioConfig mexican_hat(bool paper) {
    ScenarioConfig c;
    // The estimate starts high on the rim with momenta the 128-point grid
    // cannot resolve; the desk variant compensates with a stronger monitor.
    c.grid = paper ? Grid::square(-150.0, 150.0, 256) : Grid::square(-150.0, 150.0, 128);
    c.potential = MexicanHat{40.0, 1.07e-12};
    c.initial_state = {{-55.0, -14.8}, 10.0, {}};
    c.initial_estimate = {{-103.6, -103.6}, 5.0, {}};
    c.gamma = units::gamma_per_um2_s(paper ? 10.0 : 80.0);
    c.dt = paper ? 0.01 : 0.02;
    c.duration = 10.0;
    c.trace_interval = 0.1;
    c.snapshots = {0.0, 1.0, 2.5, 5.0, 10.0};
    return c;
}

inline ScenarioConfig henon_heiles(bool paper) {
    ScenarioConfig c;
    c.grid = paper ? Grid::square(-100.0, 100.0, 512) : Grid::square(-80.0, 80.0, 256);
    c.potential = HenonHeiles{5.44e-17, 13.09, 36.18};
    c.initial_state = {{-14.8, -29.6}, 10.0, {}};
    c.initial_estimate = {{-29.6, -29.6}, 10.0, {}};
    c.gamma = units::gamma_per_um2_s(paper ? 12.351 : 4.0 * 12.351);
    c.dt = paper ? 0.001 : 0.004;
    c.duration = paper ? 10.0 : 6.0;
    c.trace_interval = paper ? 0.01 : 0.02;
    c.snapshots = {0.0, paper ? 3.15 : 1.0, c.duration};
    return c;
}

inline ScenarioConfig henon_heiles_kick(bool paper) {
    ScenarioConfig c = henon_heiles(paper);
    PerturbationEvent kick;
    // 100 nK: kicks from kelvin-scale temperatures are far outside any grid band
    kick.temperature = 1e-7;
    kick.axis = 0;
    if (paper) {
        kick.time = 3.15;
    } else {
        kick.time = 0.0;
        kick.fidelity_trigger = 0.9;
    }
    c.perturbations = {kick};
    return c;
}

inline ScenarioConfig separable_degenerate(bool paper) {
    ScenarioConfig c;
    c.grid = paper ? Grid::square(-200.0, 200.0, 256) : Grid::square(-150.0, 150.0, 128);
    // omega = 2 pi / 8 ms on both axes
    c.potential = Harmonic{{6.45e-15, 6.45e-15}, {0.0, 0.0}};
    c.initial_state = {{-40.0, 0.0}, 10.0, {}};
    c.initial_estimate = {{20.0, 10.0}, 10.0, {}};
    c.measured_axes = {0};
    c.gamma = units::gamma_per_um2_s(paper ? 10.0 : 80.0);
    c.dt = paper ? 0.01 : 0.02;
    c.duration = 10.0;
    c.trace_interval = 0.1;
    c.snapshots = {0.0, 10.0};
    return c;
}

inline ScenarioConfig free_localization(bool paper) {
    ScenarioConfig c;
    c.grid = paper ? Grid::line(-64.0, 64.0, 1024) : Grid::line(-64.0, 64.0, 512);
    c.self_dynamics = false;
    c.initial_state = {{0.0}, 10.0, {}};
    c.initial_estimate = {{3.0}, 8.0, {}};
    c.gamma = units::gamma_per_um2_s(9.9856);
    c.dt = paper ? 0.1 : 0.5;
    // just past 100 / (gamma sigma_psi^2) = 100.1 ms
    c.duration = 101.0;
    c.trace_interval = 1.0;
    c.snapshots = {0.0, 101.0};
    return c;
}

}  // namespace detail

// variant: "desk" or "paper".
inline ScenarioConfig builtin_scenario(std::string_view name, std::string_view variant = "desk") {
    if (variant != "desk" && variant != "paper")
        throw std::invalid_argument("unknown variant '" + std::string(variant) + "' (expected desk or paper)");
    const bool paper = variant == "paper";
    ScenarioConfig c;
    if (name == "double-well-1d") c = detail::double_well(paper);
    else if (name == "mexican-hat-2d") c = detail::mexican_hat(paper);
    else if (name == "henon-heiles-2d") c = detail::henon_heiles(paper);
    else if (name == "henon-heiles-kick") c = detail::henon_heiles_kick(paper);
    else if (name == "separable-degenerate-2d") c = detail::separable_degenerate(paper);
    else if (name == "free-localization-1d") c = detail::free_localization(paper);
    else throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
    c.name = std::string(name);
    c.variant = std::string(variant);
    return c;
}

}  // namespace qmon
