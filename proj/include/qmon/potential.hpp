// potential.hpp
// Closed-form and tabulated potentials. Parameters and values are in eV with
// lengths in um; the Hamiltonian converts to internal energy units.

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "qmon/grid.hpp"
#include "qmon/units.hpp"

namespace qmon {

// h((x/x0)^2 - 1)^2 along the first axis; minima at +-x0, barrier h at 0.
struct QuarticDoubleWell {
    double half_separation = 94.5;
    double barrier_height = 1e-13;

    bool operator==(const QuarticDoubleWell&) const = default;
};

// h((r/r0)^2 - 1)^2: rotationally symmetric double well.
struct MexicanHat {
    double well_radius = 40.0;
    double peak_height = 1.07e-12;

    bool operator==(const MexicanHat&) const = default;
};

// A[r^4 + a r^2 + b r^3 cos(3 phi)].
struct HenonHeiles {
    double amplitude = 5.44e-17;  // eV/um^4
    double quadratic = 13.09;     // um^2
    double cubic = 36.18;         // um

    bool operator==(const HenonHeiles&) const = default;
};

// sum_a k_a (x_a - c_a)^2 / 2, with stiffness k_a in eV/um^2.
struct Harmonic {
    Vec stiffness;
    Vec center;

    bool operator==(const Harmonic&) const = default;
};

struct Flat {
    bool operator==(const Flat&) const = default;
};

// Samples on a specific grid, row-major, in eV. `source` names the file the
// samples came from, if any.
struct Tabulated {
    Grid grid;
    std::vector<double> samples;
    std::string source;

    bool operator==(const Tabulated&) const = default;
};

using Potential = std::variant<Flat, QuarticDoubleWell, MexicanHat, HenonHeiles, Harmonic, Tabulated>;

inline std::string potential_kind(const Potential& pot) {
    return std::visit(
        [](const auto& p) -> std::string {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Flat>) return "flat";
            else if constexpr (std::is_same_v<T, QuarticDoubleWell>) return "quartic-double-well";
            else if constexpr (std::is_same_v<T, MexicanHat>) return "mexican-hat";
            else if constexpr (std::is_same_v<T, HenonHeiles>) return "henon-heiles";
            else if constexpr (std::is_same_v<T, Harmonic>) return "harmonic";
            else return "tabulated";
        },
        pot);
}

inline void validate_potential(const Potential& pot) {
    auto positive = [](double v, const char* what) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument(std::string(what) + " must be strictly positive");
    };
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, QuarticDoubleWell>) {
                positive(p.half_separation, "double-well half separation");
                positive(p.barrier_height, "double-well barrier height");
            } else if constexpr (std::is_same_v<T, MexicanHat>) {
                positive(p.well_radius, "mexican-hat well radius");
                positive(p.peak_height, "mexican-hat peak height");
            } else if constexpr (std::is_same_v<T, HenonHeiles>) {
                positive(p.amplitude, "Henon-Heiles amplitude");
                positive(p.quadratic, "Henon-Heiles quadratic coefficient");
                positive(p.cubic, "Henon-Heiles cubic coefficient");
            } else if constexpr (std::is_same_v<T, Harmonic>) {
                if (p.stiffness.empty() || p.stiffness.size() > 2)
                    throw std::invalid_argument("harmonic stiffness needs one entry per axis");
                for (double k : p.stiffness) positive(k, "harmonic stiffness");
                if (!p.center.empty() && p.center.size() != p.stiffness.size())
                    throw std::invalid_argument("harmonic center has the wrong dimension");
            } else if constexpr (std::is_same_v<T, Tabulated>) {
                if (p.samples.size() != p.grid.size())
                    throw std::invalid_argument("tabulated potential does not match its grid");
                for (double v : p.samples)
                    if (!std::isfinite(v)) throw std::invalid_argument("tabulated potential has non-finite samples");
            }
        },
        pot);
}

// Potential at a point, eV. Tabulated potentials are looked up at the nearest
// grid point.
inline double eval_potential(const Potential& pot, std::span<const double> q) {
    auto coord = [&](std::size_t a) { return a < q.size() ? q[a] : 0.0; };
    return std::visit(
        [&](const auto& p) -> double {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Flat>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, QuarticDoubleWell>) {
                const double u = coord(0) / p.half_separation;
                const double w = u * u - 1.0;
                return p.barrier_height * w * w;
            } else if constexpr (std::is_same_v<T, MexicanHat>) {
                const double r2 = coord(0) * coord(0) + coord(1) * coord(1);
                const double w = r2 / (p.well_radius * p.well_radius) - 1.0;
                return p.peak_height * w * w;
            } else if constexpr (std::is_same_v<T, HenonHeiles>) {
                // r^3 cos(3 phi) = x^3 - 3 x y^2
                const double x = coord(0), y = coord(1);
                const double r2 = x * x + y * y;
                return p.amplitude * (r2 * r2 + p.quadratic * r2 + p.cubic * (x * x * x - 3.0 * x * y * y));
            } else if constexpr (std::is_same_v<T, Harmonic>) {
                double v = 0.0;
                for (std::size_t a = 0; a < p.stiffness.size(); ++a) {
                    const double d = coord(a) - (p.center.empty() ? 0.0 : p.center[a]);
                    v += 0.5 * p.stiffness[a] * d * d;
                }
                return v;
            } else {
                std::size_t flat = 0;
                for (std::size_t a = 0; a < p.grid.dims(); ++a) {
                    const Axis& ax = p.grid.axis(a);
                    auto i = static_cast<long>(std::lround((coord(a) - ax.min) / ax.spacing()));
                    const auto n = static_cast<long>(ax.points);
                    i = ((i % n) + n) % n;
                    flat += static_cast<std::size_t>(i) * p.grid.stride(a);
                }
                return p.samples[flat];
            }
        },
        pot);
}

// Potential sampled on every grid point, in internal energy units (hbar/ms).
inline std::vector<double> sample_potential(const Potential& pot, const Grid& grid) {
    if (const auto* t = std::get_if<Tabulated>(&pot)) {
        if (!(t->grid == grid)) throw std::invalid_argument("tabulated potential is not grid-conformal");
    }
    std::vector<double> out(grid.size());
    Vec q(grid.dims());
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (std::size_t a = 0; a < grid.dims(); ++a) q[a] = grid.coordinate(i, a);
        out[i] = units::ev_to_internal(eval_potential(pot, q));
    }
    return out;
}

}  // namespace qmon
