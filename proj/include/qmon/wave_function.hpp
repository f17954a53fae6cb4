// wave_function.hpp
// Wave functions on a uniform grid and the observables computed from them.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qmon/error.hpp"
#include "qmon/fft.hpp"
#include "qmon/grid.hpp"

namespace qmon {

class WaveFunction {
public:
    WaveFunction() = default;
    explicit WaveFunction(Grid grid) : grid_(std::move(grid)), amplitudes_(grid_.size()) {}
    WaveFunction(Grid grid, ComplexField amplitudes)
        : grid_(std::move(grid)), amplitudes_(std::move(amplitudes)) {
        if (amplitudes_.size() != grid_.size())
            throw std::invalid_argument("amplitude count does not match the grid");
    }

    const Grid& grid() const { return grid_; }
    std::size_t size() const { return amplitudes_.size(); }

    std::span<complex> amplitudes() { return amplitudes_; }
    std::span<const complex> amplitudes() const { return amplitudes_; }
    complex& operator[](std::size_t i) { return amplitudes_[i]; }
    const complex& operator[](std::size_t i) const { return amplitudes_[i]; }

    bool all_finite() const {
        return std::all_of(amplitudes_.begin(), amplitudes_.end(), [](const complex& c) {
            return std::isfinite(c.real()) && std::isfinite(c.imag());
        });
    }

    WaveFunction& operator*=(complex s) {
        for (auto& c : amplitudes_) c *= s;
        return *this;
    }
    friend WaveFunction operator*(complex s, WaveFunction psi) { return psi *= s; }

private:
    Grid grid_;
    ComplexField amplitudes_;
};

// Initial Gaussian packet. `width` is the standard deviation of |psi|^2 on each
// axis; `momentum` is the mean wavenumber (hbar = 1).
struct GaussianPacketSpec {
    Vec center;
    double width = 10.0;
    Vec momentum;  // empty means at rest

    bool operator==(const GaussianPacketSpec&) const = default;
};

inline double norm_squared(const WaveFunction& psi) {
    double s = 0.0;
    for (const auto& c : psi.amplitudes()) s += std::norm(c);
    return s * psi.grid().cell_volume();
}

inline double norm(const WaveFunction& psi) { return std::sqrt(norm_squared(psi)); }

inline WaveFunction& normalize_in_place(WaveFunction& psi) {
    const double n = norm(psi);
    if (!(n > 0.0) || !std::isfinite(n))
        throw ZeroPosteriorNorm("cannot normalize a wave function with zero or non-finite norm");
    psi *= 1.0 / n;
    return psi;
}

inline WaveFunction normalize(WaveFunction psi) {
    normalize_in_place(psi);
    return psi;
}

inline std::vector<double> density(const WaveFunction& psi) {
    std::vector<double> rho(psi.size());
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(psi[i]);
    return rho;
}

// <psi|phi> with the cell-volume quadrature weight.
inline complex inner_product(const WaveFunction& psi, const WaveFunction& phi) {
    if (!(psi.grid() == phi.grid())) throw GridMismatch();
    complex s = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) s += std::conj(psi[i]) * phi[i];
    return s * psi.grid().cell_volume();
}

inline double fidelity(const WaveFunction& psi, const WaveFunction& psi_e) {
    return std::abs(inner_product(psi, psi_e));
}

inline Vec expectation_position(const WaveFunction& psi) {
    const Grid& g = psi.grid();
    Vec mean(g.dims(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double p = std::norm(psi[i]);
        total += p;
        for (std::size_t a = 0; a < g.dims(); ++a) mean[a] += p * g.coordinate(i, a);
    }
    // dividing by the total keeps this exact for slightly unnormalized input
    for (auto& m : mean) m /= total;
    return mean;
}

inline Vec position_variance(const WaveFunction& psi) {
    const Grid& g = psi.grid();
    const Vec mean = expectation_position(psi);
    Vec var(g.dims(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double p = std::norm(psi[i]);
        total += p;
        for (std::size_t a = 0; a < g.dims(); ++a) {
            const double d = g.coordinate(i, a) - mean[a];
            var[a] += p * d * d;
        }
    }
    for (auto& v : var) v /= total;
    return var;
}

// Largest per-axis position standard deviation; the characteristic extension
// of the state.
inline double spatial_extent(const WaveFunction& psi) {
    const Vec var = position_variance(psi);
    return std::sqrt(*std::max_element(var.begin(), var.end()));
}

inline Vec expectation_momentum(const WaveFunction& psi) {
    const Grid& g = psi.grid();
    WaveFunction phi = psi;
    Fft(g).forward(phi.amplitudes());
    Vec mean(g.dims(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double p = std::norm(phi[i]);
        total += p;
        for (std::size_t a = 0; a < g.dims(); ++a)
            mean[a] += p * g.axis(a).wavenumber(g.index_along(i, a));
    }
    for (auto& m : mean) m /= total;
    return mean;
}

// Probability mass within `cells` grid cells of any boundary; used to warn when
// a state feels the periodic wrap-around.
inline double boundary_density(const WaveFunction& psi, std::size_t cells = 2) {
    const Grid& g = psi.grid();
    double edge = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        for (std::size_t a = 0; a < g.dims(); ++a) {
            const std::size_t k = g.index_along(i, a);
            if (k < cells || k + cells >= g.axis(a).points) {
                edge = std::max(edge, std::norm(psi[i]));
                break;
            }
        }
    }
    return edge;
}

inline WaveFunction make_gaussian_packet(const Grid& grid, const GaussianPacketSpec& spec) {
    if (spec.center.size() != grid.dims())
        throw std::invalid_argument("packet center has the wrong dimension");
    if (!spec.momentum.empty() && spec.momentum.size() != grid.dims())
        throw std::invalid_argument("packet momentum has the wrong dimension");
    if (!(spec.width > 0.0)) throw std::invalid_argument("packet width must be positive");
    if (!grid.contains(spec.center)) throw std::invalid_argument("packet center lies outside the grid");
    for (std::size_t a = 0; a < grid.dims(); ++a)
        if (spec.width < 2.0 * grid.axis(a).spacing())
            throw std::invalid_argument("packet narrower than two grid cells");

    WaveFunction psi(grid);
    for (std::size_t i = 0; i < psi.size(); ++i) {
        double exponent = 0.0;
        double phase = 0.0;
        for (std::size_t a = 0; a < grid.dims(); ++a) {
            const double d = grid.coordinate(i, a) - spec.center[a];
            exponent -= d * d / (4.0 * spec.width * spec.width);
            if (!spec.momentum.empty()) phase += spec.momentum[a] * d;
        }
        psi[i] = std::polar(std::exp(exponent), phase);
    }
    return normalize(std::move(psi));
}

}  // namespace qmon
