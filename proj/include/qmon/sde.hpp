// sde.hpp
// Continuous-limit monitoring: coupled Ito stochastic Schroedinger equations
// for the true state and the estimate, driven by one measurement signal dQ.
//
//   dpsi = (-iH - gamma/8 sum_a (q_a - <q_a>)^2) psi dt
//          + gamma/2 sum_a (q_a - <q_a>)(dQ_a - <q_a> dt) psi
//   dQ   = <q>_psi dt + gamma^(-1/2) dW
//
// The innovation term equals sqrt(gamma)/2 (q - <q>) dW for the true state; the
// factor gamma/2 on dQ is what the tau -> 0 limit of the Gaussian collapse
// gives. Both states are renormalized after every step.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmon/dynamics.hpp"
#include "qmon/error.hpp"
#include "qmon/measurement.hpp"
#include "qmon/random.hpp"
#include "qmon/wave_function.hpp"

namespace qmon {

enum class SdeScheme { EulerMaruyama, WeakOrder2 };

inline std::string to_string(SdeScheme s) { return s == SdeScheme::EulerMaruyama ? "em" : "weak2"; }

inline SdeScheme parse_scheme(const std::string& s) {
    if (s == "em" || s == "euler-maruyama") return SdeScheme::EulerMaruyama;
    if (s == "weak2" || s == "weak-order-2") return SdeScheme::WeakOrder2;
    throw std::invalid_argument("unknown scheme '" + s + "' (expected em or weak2)");
}

// Which stepping rule produced a record; replay must use the same one.
enum class RecordModel : std::uint8_t { Discrete = 0, EulerMaruyama = 1, WeakOrder2 = 2 };

inline RecordModel record_model(SdeScheme s) {
    return s == SdeScheme::EulerMaruyama ? RecordModel::EulerMaruyama : RecordModel::WeakOrder2;
}

// Wiener increments, one per measured axis, each N(0, dt).
struct NoiseIncrement {
    Vec dW;

    static NoiseIncrement draw(Rng& rng, std::size_t axes, double dt) {
        NoiseIncrement n;
        const double s = std::sqrt(dt);
        for (std::size_t k = 0; k < axes; ++k) n.dW.push_back(s * rng.normal());
        return n;
    }
};

// Per-step signal increments dQ (um ms), stored as increments rather than the
// running integral Q_t.
struct MeasurementRecord {
    double dt = 0.0;
    double gamma = 0.0;
    MeasuredAxes axes;
    std::uint64_t seed = 0;
    double start_time = 0.0;
    RecordModel model = RecordModel::WeakOrder2;
    std::string scenario;
    std::vector<double> increments;  // steps() x axes.size(), row-major

    std::size_t axis_count() const { return axes.size(); }
    std::size_t steps() const { return axes.empty() ? 0 : increments.size() / axes.size(); }
    double duration() const { return static_cast<double>(steps()) * dt; }

    std::span<const double> dQ(std::size_t step) const {
        return std::span<const double>(increments).subspan(step * axes.size(), axes.size());
    }
    void append(std::span<const double> dq) {
        if (dq.size() != axes.size()) throw std::invalid_argument("increment has the wrong number of axes");
        increments.insert(increments.end(), dq.begin(), dq.end());
    }

    MeasurementRecord truncated(std::size_t steps_kept) const {
        MeasurementRecord r = *this;
        r.increments.resize(std::min(steps_kept, steps()) * axes.size());
        return r;
    }

    bool operator==(const MeasurementRecord&) const = default;
};

// dQ = <q> dt + gamma^(-1/2) dW on each measured axis.
inline Vec generate_dQ(const WaveFunction& psi, double dt, double gamma, const NoiseIncrement& noise,
                       std::span<const std::size_t> axes = {}) {
    const MeasuredAxes ax = resolve_axes(psi.grid(), axes);
    if (noise.dW.size() != ax.size()) throw std::invalid_argument("noise has the wrong number of axes");
    const Vec m = expectation_position(psi);
    Vec dq(ax.size());
    const double s = gamma > 0.0 ? 1.0 / std::sqrt(gamma) : 0.0;
    for (std::size_t k = 0; k < ax.size(); ++k) dq[k] = m[ax[k]] * dt + s * noise.dW[k];
    return dq;
}

inline Vec generate_dQ(const WaveFunction& psi, double dt, double gamma, Rng& rng,
                       std::span<const std::size_t> axes = {}) {
    const MeasuredAxes ax = resolve_axes(psi.grid(), axes);
    return generate_dQ(psi, dt, gamma, NoiseIncrement::draw(rng, ax.size(), dt), axes);
}

// Increment for the second-order scheme. Over a finite step the signal is
// <q> dt plus white noise plus the spread of the state itself, so its
// covariance is I dt/gamma + Cov(q) dt^2; matching it keeps the local weak
// error at O(dt^3). The same Wiener increments drive it, so runs at different
// dt share a Brownian path.
inline Vec generate_dQ_weak2(const WaveFunction& psi, double dt, double gamma, const NoiseIncrement& noise,
                             std::span<const std::size_t> axes = {}) {
    const Grid& g = psi.grid();
    const MeasuredAxes ax = resolve_axes(g, axes);
    if (noise.dW.size() != ax.size()) throw std::invalid_argument("noise has the wrong number of axes");
    const Vec m = expectation_position(psi);
    Vec dq(ax.size());
    for (std::size_t k = 0; k < ax.size(); ++k) dq[k] = m[ax[k]] * dt;
    if (!(gamma > 0.0)) return dq;

    // covariance of the measured coordinates under |psi|^2
    double cov[2][2] = {{0, 0}, {0, 0}};
    double total = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
        const double p = std::norm(psi[i]);
        total += p;
        for (std::size_t k = 0; k < ax.size(); ++k)
            for (std::size_t l = 0; l <= k; ++l)
                cov[k][l] += p * (g.coordinate(i, ax[k]) - m[ax[k]]) * (g.coordinate(i, ax[l]) - m[ax[l]]);
    }
    const double white = dt / gamma;
    double c[2][2];
    for (std::size_t k = 0; k < ax.size(); ++k)
        for (std::size_t l = 0; l <= k; ++l) c[k][l] = cov[k][l] / total * dt * dt + (k == l ? white : 0.0);

    // Cholesky of the 1x1 or 2x2 covariance, applied to standard normals
    const double inv_sqrt_dt = 1.0 / std::sqrt(dt);
    const double l00 = std::sqrt(c[0][0]);
    dq[0] += l00 * noise.dW[0] * inv_sqrt_dt;
    if (ax.size() == 2) {
        const double l10 = c[1][0] / l00;
        const double l11 = std::sqrt(c[1][1] - l10 * l10);
        dq[1] += (l10 * noise.dW[0] + l11 * noise.dW[1]) * inv_sqrt_dt;
    }
    return dq;
}

// A state being integrated. With the second-order scheme the trailing kinetic
// half-step of one step is merged into the leading half-step of the next;
// `pending_kinetic` holds the time still owed. flush() settles it.
struct MonitoredState {
    WaveFunction psi;
    double pending_kinetic = 0.0;
};

inline void flush(Propagator& prop, MonitoredState& s) {
    if (s.pending_kinetic != 0.0) {
        prop.kinetic_phase(s.psi, s.pending_kinetic);
        s.pending_kinetic = 0.0;
    }
}

namespace detail {

inline void check_finite(const WaveFunction& psi, const char* where) {
    if (!psi.all_finite()) throw NumericalFailure(std::string("non-finite amplitude in ") + where);
}

// Euler-Maruyama measurement increment with the state's own <q>, followed by
// renormalization.
inline void em_increment(WaveFunction& psi, std::span<const double> dq, double dt, double gamma,
                         const MeasuredAxes& ax) {
    const Grid& g = psi.grid();
    const Vec m = expectation_position(psi);
    const double gain = gamma / 2.0;
    std::vector<std::vector<double>> factor(ax.size());
    for (std::size_t k = 0; k < ax.size(); ++k) {
        const Axis& axis = g.axis(ax[k]);
        const double innovation = dq[k] - m[ax[k]] * dt;
        factor[k].resize(axis.points);
        for (std::size_t j = 0; j < axis.points; ++j) {
            const double d = axis.coordinate(j) - m[ax[k]];
            factor[k][j] = -gamma / 8.0 * d * d * dt + gain * d * innovation;
        }
    }
    for (std::size_t i = 0; i < psi.size(); ++i) {
        double f = 1.0;
        for (std::size_t k = 0; k < ax.size(); ++k) f += factor[k][g.index_along(i, ax[k])];
        psi[i] *= f;
    }
    normalize_in_place(psi);
}

}  // namespace detail

// Effective single-step resolution of the integrated signal over dt.
inline double step_resolution(double gamma, double dt) { return 1.0 / std::sqrt(gamma * dt); }

// Fixed-step integrator for one monitored configuration. Owns nothing but the
// propagator reference; all state lives in MonitoredState values.
class SdeStepper {
public:
    SdeStepper(Propagator& prop, double dt, double gamma, SdeScheme scheme, MeasuredAxes axes)
        : prop_(prop), dt_(dt), gamma_(gamma), scheme_(scheme), axes_(resolve_axes(prop.grid(), axes)) {
        if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
        if (gamma < 0.0) throw std::invalid_argument("gamma must be non-negative");
    }

    double dt() const { return dt_; }
    double gamma() const { return gamma_; }
    SdeScheme scheme() const { return scheme_; }
    const MeasuredAxes& axes() const { return axes_; }

    // One step of both states; returns the shared increment dQ.
    Vec coupled(MonitoredState& psi, MonitoredState& psi_e, const NoiseIncrement& noise,
                bool* estimate_reseeded = nullptr) {
        Vec dq;
        if (scheme_ == SdeScheme::EulerMaruyama) {
            dq = generate_dQ(psi.psi, dt_, gamma_, noise, axes_);
            measure_em(psi, dq);
            measure_em(psi_e, dq);
            prop_.lie(psi.psi, dt_);
            prop_.lie(psi_e.psi, dt_);
        } else {
            lead(psi);
            lead(psi_e);
            dq = generate_dQ_weak2(psi.psi, dt_, gamma_, noise, axes_);
            measure_weak2(psi, dq, false);
            const bool reseeded = measure_weak2(psi_e, dq, true);
            if (estimate_reseeded) *estimate_reseeded = reseeded;
        }
        detail::check_finite(psi.psi, "true state");
        detail::check_finite(psi_e.psi, "estimate");
        return dq;
    }

    // Advances the true state alone, generating its own increment.
    Vec single(MonitoredState& psi, const NoiseIncrement& noise) {
        Vec dq;
        if (scheme_ == SdeScheme::EulerMaruyama) {
            dq = generate_dQ(psi.psi, dt_, gamma_, noise, axes_);
            measure_em(psi, dq);
            prop_.lie(psi.psi, dt_);
        } else {
            lead(psi);
            dq = generate_dQ_weak2(psi.psi, dt_, gamma_, noise, axes_);
            measure_weak2(psi, dq, false);
        }
        detail::check_finite(psi.psi, "true state");
        return dq;
    }

    // Advances one state with a given increment: the estimator's view, used
    // for replay. Returns true if the estimate had to be re-seeded.
    bool driven(MonitoredState& s, std::span<const double> dq) {
        bool reseeded = false;
        if (scheme_ == SdeScheme::EulerMaruyama) {
            measure_em(s, dq);
            prop_.lie(s.psi, dt_);
        } else {
            lead(s);
            reseeded = measure_weak2(s, dq, true);
        }
        detail::check_finite(s.psi, "driven state");
        return reseeded;
    }

    void flush(MonitoredState& s) { qmon::flush(prop_, s); }

private:
    void lead(MonitoredState& s) {
        const double h = s.pending_kinetic + 0.5 * dt_;
        s.pending_kinetic = 0.0;
        prop_.kinetic_phase(s.psi, h);
        prop_.potential_phase(s.psi, dt_);
    }

    void measure_em(MonitoredState& s, std::span<const double> dq) {
        if (gamma_ > 0.0) detail::em_increment(s.psi, dq, dt_, gamma_, axes_);
    }

    // Exact solution of the measurement part over dt for a given dQ: a
    // Gaussian window of resolution 1/sqrt(gamma dt) centred at dQ/dt.
    bool measure_weak2(MonitoredState& s, std::span<const double> dq, bool allow_reseed) {
        bool reseeded = false;
        if (gamma_ > 0.0) {
            Vec qbar(dq.size());
            for (std::size_t k = 0; k < dq.size(); ++k) qbar[k] = dq[k] / dt_;
            const double sigma = step_resolution(gamma_, dt_);
            if (allow_reseed)
                reseeded = update_estimate_or_reseed(s.psi, qbar, sigma, axes_);
            else {
                // in place, so a rejected outcome leaves the state intact
                detail::apply_window(s.psi, qbar, sigma, axes_);
                normalize_in_place(s.psi);
            }
        }
        s.pending_kinetic = 0.5 * dt_;
        return reseeded;
    }

    Propagator& prop_;
    double dt_;
    double gamma_;
    SdeScheme scheme_;
    MeasuredAxes axes_;
};

// One step of a single state under a given increment, ending in position
// space. Euler-Maruyama: measurement increment then a Lie-Trotter unitary step.
// WeakOrder2: unitary half-step, exact Gaussian measurement window, unitary
// half-step.
inline WaveFunction sse_step(const Hamiltonian& h, WaveFunction psi, std::span<const double> dq, double dt,
                             double gamma, SdeScheme scheme, std::span<const std::size_t> axes = {}) {
    if (!(psi.grid() == h.grid)) throw GridMismatch();
    Propagator prop(h);
    SdeStepper stepper(prop, dt, gamma, scheme, resolve_axes(h.grid, axes));
    MonitoredState s{std::move(psi)};
    if (scheme == SdeScheme::EulerMaruyama) {
        if (gamma > 0.0) detail::em_increment(s.psi, dq, dt, gamma, stepper.axes());
        prop.lie(s.psi, dt);
    } else {
        prop.kinetic_phase(s.psi, 0.5 * dt);
        prop.potential_phase(s.psi, dt);
        if (gamma > 0.0) {
            Vec qbar(dq.size());
            for (std::size_t k = 0; k < dq.size(); ++k) qbar[k] = dq[k] / dt;
            s.psi = collapse(std::move(s.psi), qbar, step_resolution(gamma, dt), stepper.axes());
        }
        prop.kinetic_phase(s.psi, 0.5 * dt);
    }
    detail::check_finite(s.psi, "sse_step");
    return std::move(s.psi);
}

struct CoupledStep {
    WaveFunction psi;
    WaveFunction psi_e;
    Vec dQ;
};

inline CoupledStep coupled_step(const Hamiltonian& h, WaveFunction psi, WaveFunction psi_e, double dt, double gamma,
                                SdeScheme scheme, Rng& rng, std::span<const std::size_t> axes = {}) {
    if (!(psi.grid() == psi_e.grid()) || !(psi.grid() == h.grid)) throw GridMismatch();
    Propagator prop(h);
    SdeStepper stepper(prop, dt, gamma, scheme, resolve_axes(h.grid, axes));
    MonitoredState a{std::move(psi)}, b{std::move(psi_e)};
    const auto noise = NoiseIncrement::draw(rng, stepper.axes().size(), dt);
    Vec dq = stepper.coupled(a, b, noise);
    stepper.flush(a);
    stepper.flush(b);
    return {std::move(a.psi), std::move(b.psi), std::move(dq)};
}

// Callback invoked with (step count completed, time, estimate).
using EstimateObserver = std::function<void(std::size_t, double, const WaveFunction&)>;

// Deterministic estimator pass driven only by the stored increments. The
// estimate is settled to position space after every step listed in
// `observe_steps` (sorted; empty means every step) and handed to the observer.
inline WaveFunction replay_estimate(const MeasurementRecord& record, WaveFunction psi_e0, const Hamiltonian& h,
                                    SdeScheme scheme, const EstimateObserver& observer = {},
                                    std::span<const std::size_t> observe_steps = {}) {
    if (!(psi_e0.grid() == h.grid)) throw GridMismatch("initial estimate does not live on the Hamiltonian grid");
    for (std::size_t a : record.axes)
        if (a >= h.grid.dims()) throw std::invalid_argument("record measures an axis the grid does not have");
    if (record.model != RecordModel::Discrete && record.model != record_model(scheme))
        throw std::invalid_argument("record was produced by a different scheme");
    Propagator prop(h);
    MonitoredState s{std::move(psi_e0)};
    std::size_t next_obs = 0;
    auto observe = [&](std::size_t done) {
        bool hit = observe_steps.empty();
        while (next_obs < observe_steps.size() && observe_steps[next_obs] <= done) {
            hit = hit || observe_steps[next_obs] == done;
            ++next_obs;
        }
        if (!hit) return;
        flush(prop, s);
        if (observer) observer(done, record.start_time + static_cast<double>(done) * record.dt, s.psi);
    };

    if (record.model == RecordModel::Discrete) {
        const double sigma = step_resolution(record.gamma, record.dt);
        Vec qbar(record.axis_count());
        for (std::size_t n = 0; n < record.steps(); ++n) {
            prop.strang(s.psi, record.dt);
            const auto dq = record.dQ(n);
            for (std::size_t k = 0; k < qbar.size(); ++k) qbar[k] = dq[k] / record.dt;
            update_estimate_or_reseed(s.psi, qbar, sigma, record.axes);
            observe(n + 1);
        }
    } else {
        SdeStepper stepper(prop, record.dt, record.gamma, scheme, record.axes);
        for (std::size_t n = 0; n < record.steps(); ++n) {
            stepper.driven(s, record.dQ(n));
            observe(n + 1);
        }
    }
    flush(prop, s);
    return std::move(s.psi);
}

struct WeakOrderRow {
    double dt = 0.0;
    double error = 0.0;           // |E[<q>(T)]_dt - E[<q>(T)]_ref|
    double standard_error = 0.0;  // of the paired difference
};

struct WeakOrderTable {
    SdeScheme scheme = SdeScheme::WeakOrder2;
    double reference_dt = 0.0;
    double reference_mean = 0.0;
    std::vector<WeakOrderRow> rows;
    double slope = 0.0;  // least-squares slope of log(error) against log(dt)
};

// Weak error of E[<q>(T)] against a run at the smallest dt divided by
// `refinement`. Every resolution is driven by the same Brownian path (coarse
// increments are sums of fine ones), so the paired differences isolate the
// discretization bias from the sampling noise.
inline WeakOrderTable weak_order_probe(const Hamiltonian& h, const WaveFunction& psi0, double gamma,
                                       std::vector<double> dts, std::size_t n_traj, double horizon,
                                       SdeScheme scheme, std::uint64_t seed = default_seed,
                                       std::size_t refinement = 16) {
    if (dts.empty() || n_traj < 2) throw std::invalid_argument("probe needs step sizes and at least two trajectories");
    std::sort(dts.begin(), dts.end(), std::greater<>());
    WeakOrderTable table;
    table.scheme = scheme;
    table.reference_dt = dts.back() / static_cast<double>(refinement);
    const auto fine_steps = static_cast<std::size_t>(std::llround(horizon / table.reference_dt));
    std::vector<std::size_t> block;
    for (double dt : dts) {
        const auto b = static_cast<std::size_t>(std::llround(dt / table.reference_dt));
        if (b == 0 || std::abs(static_cast<double>(b) * table.reference_dt - dt) > 1e-9 * dt || fine_steps % b != 0)
            throw std::invalid_argument("probe step sizes must be multiples of the reference step dividing the horizon");
        block.push_back(b);
    }

    Propagator prop(h);
    const auto run = [&](std::span<const double> xi, std::size_t b) {
        const double dt = static_cast<double>(b) * table.reference_dt;
        SdeStepper stepper(prop, dt, gamma, scheme, {});
        MonitoredState s{psi0};
        NoiseIncrement noise{Vec(1)};
        const double scale = std::sqrt(table.reference_dt);
        for (std::size_t n = 0; n < xi.size() / b; ++n) {
            double w = 0.0;
            for (std::size_t j = 0; j < b; ++j) w += xi[n * b + j];
            noise.dW[0] = scale * w;
            stepper.single(s, noise);
        }
        stepper.flush(s);
        return expectation_position(s.psi)[0];
    };

    std::vector<double> sum(dts.size(), 0.0), sum2(dts.size(), 0.0);
    double ref_sum = 0.0;
    std::vector<double> xi(fine_steps);
    for (std::size_t j = 0; j < n_traj; ++j) {
        Rng rng(trajectory_seed(seed, j));
        for (auto& x : xi) x = rng.normal();
        const double ref = run(xi, 1);
        ref_sum += ref;
        for (std::size_t d = 0; d < dts.size(); ++d) {
            const double diff = run(xi, block[d]) - ref;
            sum[d] += diff;
            sum2[d] += diff * diff;
        }
    }
    const auto n = static_cast<double>(n_traj);
    table.reference_mean = ref_sum / n;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t d = 0; d < dts.size(); ++d) {
        const double mean = sum[d] / n;
        const double var = std::max(0.0, (sum2[d] / n - mean * mean) * n / (n - 1.0));
        table.rows.push_back({dts[d], std::abs(mean), std::sqrt(var / n)});
        const double x = std::log(dts[d]), y = std::log(std::abs(mean));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const auto m = static_cast<double>(dts.size());
    table.slope = m > 1 ? (m * sxy - sx * sy) / (m * sxx - sx * sx) : 0.0;
    return table;
}

}  // namespace qmon
