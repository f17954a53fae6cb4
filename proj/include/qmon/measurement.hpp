// measurement.hpp
// Discrete unsharp position measurements: outcome statistics, collapse of the
// monitored state, and the matching update of the estimate.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "qmon/dynamics.hpp"
#include "qmon/error.hpp"
#include "qmon/random.hpp"
#include "qmon/wave_function.hpp"

namespace qmon {

// Grid axes that are measured; an empty list means every axis.
using MeasuredAxes = std::vector<std::size_t>;

inline MeasuredAxes resolve_axes(const Grid& grid, std::span<const std::size_t> axes) {
    MeasuredAxes out;
    if (axes.empty()) {
        for (std::size_t a = 0; a < grid.dims(); ++a) out.push_back(a);
        return out;
    }
    for (std::size_t a : axes) {
        if (a >= grid.dims()) throw std::invalid_argument("measured axis outside the grid");
        out.push_back(a);
    }
    return out;
}

// Single-measurement resolution sigma (um), period tau (ms) and strength
// gamma = 1/(sigma^2 tau) in 1/(um^2 ms).
struct MonitorConfig {
    double sigma = 0.0;
    double tau = 0.0;
    double gamma = 0.0;

    static MonitorConfig from_sigma_tau(double sigma, double tau) {
        MonitorConfig c{sigma, tau, 1.0 / (sigma * sigma * tau)};
        c.validate();
        return c;
    }
    static MonitorConfig from_gamma_tau(double gamma, double tau) {
        MonitorConfig c{1.0 / std::sqrt(gamma * tau), tau, gamma};
        c.validate();
        return c;
    }

    void validate() const {
        if (!(sigma > 0.0) || !(tau > 0.0) || !(gamma > 0.0))
            throw std::invalid_argument("sigma, tau and gamma must be positive");
        const double implied = 1.0 / (sigma * sigma * tau);
        if (std::abs(implied - gamma) > 1e-9 * gamma)
            throw std::invalid_argument("gamma ≠ 1/(sigma²·tau)");
    }
};

struct MeasurementOutcome {
    Vec qbar;  // one component per measured axis
    double time = 0.0;
};

// Normalized Gaussian G_sigma(d).
inline double gaussian(double d, double sigma) {
    return std::exp(-d * d / (2.0 * sigma * sigma)) / std::sqrt(2.0 * units::pi * sigma * sigma);
}

// p(qbar) = integral of prod_a G_sigma(q_a - qbar_a) |psi(q)|^2.
inline double outcome_density(const WaveFunction& psi, double sigma, std::span<const double> qbar,
                              std::span<const std::size_t> axes = {}) {
    const Grid& g = psi.grid();
    const MeasuredAxes ax = resolve_axes(g, axes);
    if (qbar.size() != ax.size()) throw std::invalid_argument("outcome has the wrong number of components");
    double p = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        double w = std::norm(psi[i]);
        for (std::size_t k = 0; k < ax.size(); ++k) w *= gaussian(g.coordinate(i, ax[k]) - qbar[k], sigma);
        p += w;
    }
    return p * g.cell_volume();
}

// Draws qbar from p(qbar): a grid position from |psi|^2 by inverse CDF plus
// independent N(0, sigma^2) noise on each measured axis.
inline MeasurementOutcome sample_outcome(const WaveFunction& psi, double sigma, Rng& rng,
                                         std::span<const std::size_t> axes = {}) {
    const Grid& g = psi.grid();
    const MeasuredAxes ax = resolve_axes(g, axes);
    std::vector<double> cdf(psi.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        acc += std::norm(psi[i]);
        cdf[i] = acc;
    }
    if (!(acc > 0.0) || !std::isfinite(acc)) throw ZeroPosteriorNorm("cannot sample from a zero-norm state");
    const double u = rng.uniform() * acc;
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto flat = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1));
    MeasurementOutcome out;
    for (std::size_t a : ax) out.qbar.push_back(g.coordinate(flat, a) + sigma * rng.normal());
    return out;
}

// sqrt(G_sigma(q - qbar)) psi(q) without renormalization; its squared norm is
// p(qbar).
inline WaveFunction measurement_operator(const WaveFunction& psi, std::span<const double> qbar, double sigma,
                                         std::span<const std::size_t> axes = {}) {
    const Grid& g = psi.grid();
    const MeasuredAxes ax = resolve_axes(g, axes);
    if (qbar.size() != ax.size()) throw std::invalid_argument("outcome has the wrong number of components");
    WaveFunction out = psi;
    for (std::size_t i = 0; i < out.size(); ++i) {
        double w = 1.0;
        for (std::size_t k = 0; k < ax.size(); ++k) w *= std::sqrt(gaussian(g.coordinate(i, ax[k]) - qbar[k], sigma));
        out[i] *= w;
    }
    return out;
}

// Support: points carrying at least this fraction of the peak density.
inline constexpr double support_threshold = 1e-20;
// Beyond this many sigma from all support the posterior is treated as empty.
inline constexpr double max_window_distance = 8.0;

namespace detail {

// Multiplies psi by exp(-|q - qbar|^2 / (4 sigma^2)) over the measured axes,
// rescaled so the window is 1 at the support point nearest to qbar. The window
// factorizes over axes, so it is built from one table per axis.
inline void apply_window(WaveFunction& psi, std::span<const double> qbar, double sigma, const MeasuredAxes& ax) {
    const Grid& g = psi.grid();
    const std::size_t n = psi.size();
    const double c = 1.0 / (4.0 * sigma * sigma);
    std::vector<std::vector<double>> dist2(ax.size()), window(ax.size());
    for (std::size_t k = 0; k < ax.size(); ++k) {
        const Axis& axis = g.axis(ax[k]);
        dist2[k].resize(axis.points);
        window[k].resize(axis.points);
        for (std::size_t j = 0; j < axis.points; ++j) {
            const double d = axis.coordinate(j) - qbar[k];
            dist2[k][j] = d * d;
            window[k][j] = std::exp(-d * d * c);
        }
    }
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, std::norm(psi[i]));
    if (!(peak > 0.0) || !std::isfinite(peak)) throw ZeroPosteriorNorm("measurement applied to a zero or non-finite state");
    double nearest = std::numeric_limits<double>::infinity();
    const double cut = support_threshold * peak;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::norm(psi[i]) < cut) continue;
        double d2 = 0.0;
        for (std::size_t k = 0; k < ax.size(); ++k) d2 += dist2[k][g.index_along(i, ax[k])];
        nearest = std::min(nearest, d2);
    }
    if (std::sqrt(nearest) > max_window_distance * sigma) {
        std::ostringstream msg;
        msg << "measurement outcome lies " << std::sqrt(nearest) / sigma << " sigma from the support of the state";
        throw ZeroPosteriorNorm(msg.str());
    }
    const double rescale = std::exp(nearest * c);
    for (std::size_t i = 0; i < n; ++i) {
        double w = rescale;
        for (std::size_t k = 0; k < ax.size(); ++k) w *= window[k][g.index_along(i, ax[k])];
        psi[i] *= w;
    }
}

}  // namespace detail

inline WaveFunction collapse(WaveFunction psi, std::span<const double> qbar, double sigma,
                             std::span<const std::size_t> axes = {}) {
    const MeasuredAxes ax = resolve_axes(psi.grid(), axes);
    if (qbar.size() != ax.size()) throw std::invalid_argument("outcome has the wrong number of components");
    detail::apply_window(psi, qbar, sigma, ax);
    normalize_in_place(psi);
    return psi;
}

// The estimate receives exactly the collapse the true state received, with the
// true outcome imposed rather than sampled.
inline WaveFunction update_estimate(WaveFunction psi_e, std::span<const double> qbar, double sigma,
                                    std::span<const std::size_t> axes = {}) {
    return collapse(std::move(psi_e), qbar, sigma, axes);
}

// Recovery when the estimate has no support near the outcome: replace it by a
// Gaussian of its own previous extension, centred at the outcome on measured
// axes and at its previous mean elsewhere. Returns true if the estimate was
// re-seeded.
inline bool update_estimate_or_reseed(WaveFunction& psi_e, std::span<const double> qbar, double sigma,
                                      std::span<const std::size_t> axes = {}) {
    const Grid& g = psi_e.grid();
    const MeasuredAxes ax = resolve_axes(g, axes);
    if (qbar.size() != ax.size()) throw std::invalid_argument("outcome has the wrong number of components");
    try {
        // the window check throws before psi_e is touched
        detail::apply_window(psi_e, qbar, sigma, ax);
        normalize_in_place(psi_e);
        return false;
    } catch (const ZeroPosteriorNorm&) {
        GaussianPacketSpec spec;
        spec.center = expectation_position(psi_e);
        double width = spatial_extent(psi_e);
        for (std::size_t k = 0; k < ax.size(); ++k) spec.center[ax[k]] = qbar[k];
        for (std::size_t a = 0; a < g.dims(); ++a) {
            const Axis& axis = g.axis(a);
            spec.center[a] = std::clamp(spec.center[a], axis.min, axis.max - axis.spacing());
            width = std::max(width, 2.0 * axis.spacing());
        }
        spec.width = width;
        psi_e = make_gaussian_packet(g, spec);
        return true;
    }
}

struct DiscreteStepResult {
    MeasurementOutcome outcome;
    bool estimate_reseeded = false;
};

// Advances both states by tau of self-dynamics, samples an outcome from the
// true state, collapses it and applies the same outcome to the estimate.
inline DiscreteStepResult discrete_monitor_step(Propagator& prop, WaveFunction& psi, WaveFunction& psi_e,
                                                const MonitorConfig& cfg, Rng& rng,
                                                std::span<const std::size_t> axes = {}) {
    if (!(psi.grid() == psi_e.grid())) throw GridMismatch();
    prop.strang(psi, cfg.tau);
    prop.strang(psi_e, cfg.tau);
    DiscreteStepResult r;
    r.outcome = sample_outcome(psi, cfg.sigma, rng, axes);
    psi = collapse(std::move(psi), r.outcome.qbar, cfg.sigma, axes);
    r.estimate_reseeded = update_estimate_or_reseed(psi_e, r.outcome.qbar, cfg.sigma, axes);
    return r;
}

struct DiscreteStep {
    WaveFunction psi;
    WaveFunction psi_e;
    MeasurementOutcome outcome;
};

inline DiscreteStep discrete_monitor_step(const Hamiltonian& h, WaveFunction psi, WaveFunction psi_e,
                                          const MonitorConfig& cfg, Rng& rng,
                                          std::span<const std::size_t> axes = {}) {
    Propagator prop(h);
    auto r = discrete_monitor_step(prop, psi, psi_e, cfg, rng, axes);
    return {std::move(psi), std::move(psi_e), std::move(r.outcome)};
}

// Shortest self-dynamics timescale of the state: the lesser of the free
// spreading time 2 m sigma_psi^2 and the local classical period from the
// density-weighted potential curvature. Infinite when H = 0.
inline double self_dynamics_time(const Hamiltonian& h, const WaveFunction& psi) {
    if (!h.self_dynamics) return std::numeric_limits<double>::infinity();
    const Grid& g = psi.grid();
    const double ext = spatial_extent(psi);
    double t = 2.0 * h.mass * ext * ext;
    const std::vector<double> v = sample_potential(h.potential, g);
    for (std::size_t a = 0; a < g.dims(); ++a) {
        const std::size_t n = g.axis(a).points;
        const std::size_t s = g.stride(a);
        const double dx = g.axis(a).spacing();
        double curv = 0.0;
        for (std::size_t i = 0; i < psi.size(); ++i) {
            const std::size_t k = g.index_along(i, a);
            if (k == 0 || k + 1 == n) continue;
            curv += std::norm(psi[i]) * (v[i + s] - 2.0 * v[i] + v[i - s]) / (dx * dx);
        }
        curv = std::abs(curv * g.cell_volume());
        if (curv > 0.0) t = std::min(t, 2.0 * units::pi * std::sqrt(h.mass / curv));
    }
    return t;
}

struct RegimeReport {
    std::vector<std::string> warnings;
    double decoherence_rate = 0.0;    // gamma sigma_psi^2, 1/ms
    double extension = 0.0;           // sigma_psi, um
    double self_dynamics_time = 0.0;  // ms
};

// Checks the two validity conditions of the continuous limit: sigma well above
// the extension of the state and tau well below the self-dynamics timescale.
inline RegimeReport validate_config(const MonitorConfig& cfg, const WaveFunction& psi0, const Hamiltonian& h) {
    RegimeReport r;
    r.extension = spatial_extent(psi0);
    r.decoherence_rate = cfg.gamma * r.extension * r.extension;
    r.self_dynamics_time = self_dynamics_time(h, psi0);
    if (cfg.sigma > 0.0 && cfg.sigma < 10.0 * r.extension) {
        std::ostringstream msg;
        msg << "condition (i): sigma = " << cfg.sigma << " um is below 10 sigma_psi = " << 10.0 * r.extension
            << " um; single measurements resolve the state";
        r.warnings.push_back(msg.str());
    }
    if (cfg.tau > 0.0 && cfg.tau > r.self_dynamics_time / 20.0) {
        std::ostringstream msg;
        msg << "condition (ii): tau = " << cfg.tau << " ms exceeds 1/20 of the self-dynamics time "
            << r.self_dynamics_time << " ms";
        r.warnings.push_back(msg.str());
    }
    return r;
}

}  // namespace qmon
