// trajectory.hpp
// Single trajectories and ensembles of the coupled truth/estimate evolution.

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qmon/scenario.hpp"

namespace qmon {

struct Snapshot {
    double time = 0.0;
    WaveFunction psi;
    WaveFunction psi_e;
};

struct TrajectoryEvent {
    double time = 0.0;
    std::string message;
};

struct TrajectoryResult {
    std::vector<double> times;
    std::vector<double> fidelity;
    std::vector<Vec> mean_true, mean_estimate;
    std::vector<Vec> variance_true, variance_estimate;
    std::vector<Snapshot> snapshots;
    MeasurementRecord record;
    std::vector<TrajectoryEvent> events;
    RegimeReport regime;

    std::uint64_t seed = 0;
    std::string scheme;
    std::string mode;
    std::string scenario;

    bool failed = false;
    std::string failure;
    std::optional<Snapshot> last_valid;

    // First trace time at which the fidelity reaches `threshold`; negative if
    // it never does.
    double first_passage(double threshold, double from = 0.0) const {
        for (std::size_t i = 0; i < times.size(); ++i)
            if (times[i] >= from && fidelity[i] >= threshold) return times[i];
        return -1.0;
    }
};

struct RunOptions {
    bool keep_record = true;
    bool keep_snapshots = true;
    bool keep_observables = true;
};

// Regime checks for a scenario. The single-measurement resolution condition
// only concerns the discrete model.
inline RegimeReport scenario_regime(const ScenarioConfig& c) {
    if (!(c.gamma > 0.0)) return {};
    const auto psi0 = make_gaussian_packet(c.grid, c.initial_state);
    RegimeReport r = validate_config(c.monitor(), psi0, c.hamiltonian());
    if (c.mode == MonitorMode::Continuous)
        std::erase_if(r.warnings, [](const std::string& w) { return w.rfind("condition (i)", 0) == 0; });
    return r;
}

// Stateful co-evolution of truth and estimate. Copying a runner branches the
// trajectory: the copy continues with the same states and random stream.
class TrajectoryRunner {
public:
    explicit TrajectoryRunner(ScenarioConfig config, RunOptions options = {})
        : config_(std::move(config)), options_(options), rng_(config_.seed) {
        validate_scenario(config_);
        init();
    }

    TrajectoryRunner(const TrajectoryRunner& other)
        : config_(other.config_),
          options_(other.options_),
          rng_(other.rng_),
          prop_(std::make_unique<Propagator>(other.config_.hamiltonian())),
          psi_(other.psi_),
          psi_e_(other.psi_e_),
          step_(other.step_),
          observe_(other.observe_),
          next_observe_(other.next_observe_),
          fired_(other.fired_),
          result_(other.result_) {}

    TrajectoryRunner& operator=(const TrajectoryRunner&) = delete;

    const ScenarioConfig& config() const { return config_; }
    std::size_t step_index() const { return step_; }
    double time() const { return static_cast<double>(step_) * config_.dt; }
    bool done() const { return step_ >= config_.total_steps() || result_.failed; }
    bool failed() const { return result_.failed; }

    // States in position space (settles any pending kinetic half-step).
    const WaveFunction& state() {
        settle();
        return psi_.psi;
    }
    const WaveFunction& estimate() {
        settle();
        return psi_e_.psi;
    }
    double fidelity() {
        settle();
        return qmon::fidelity(psi_.psi, psi_e_.psi);
    }

    // Applies a kick to the true state right now.
    void kick(std::span<const double> k) {
        settle();
        psi_.psi = momentum_kick(std::move(psi_.psi), k);
        std::ostringstream msg;
        msg << "momentum kick";
        for (double c : k) msg << ' ' << c;
        msg << " 1/um";
        log(msg.str());
    }

    // One integration step followed by the bookkeeping due at the new step.
    void step() {
        if (done()) return;
        try {
            advance();
            ++step_;
            at_boundary();
        } catch (const NumericalFailure& e) {
            fail(e.what());
        } catch (const ZeroPosteriorNorm& e) {
            fail(e.what());
        }
    }

    void run_until(double t) {
        const auto target = std::min(config_.total_steps(), config_.step_of(t));
        while (!done() && step_ < target) step();
    }

    TrajectoryResult finish() {
        while (!done()) step();
        return result_;
    }

    const TrajectoryResult& result() const { return result_; }

private:
    void init() {
        prop_ = std::make_unique<Propagator>(config_.hamiltonian());
        psi_.psi = make_gaussian_packet(config_.grid, config_.initial_state);
        psi_e_.psi = make_gaussian_packet(config_.grid, config_.initial_estimate);
        observe_ = observation_steps(config_);
        fired_.assign(config_.perturbations.size(), false);

        result_.seed = config_.seed;
        result_.scheme = config_.mode == MonitorMode::Discrete ? "discrete" : to_string(config_.scheme);
        result_.mode = to_string(config_.mode);
        result_.scenario = config_.name;
        auto& rec = result_.record;
        rec.dt = config_.dt;
        rec.gamma = config_.gamma;
        rec.axes = config_.axes();
        rec.seed = config_.seed;
        rec.start_time = 0.0;
        rec.model = config_.mode == MonitorMode::Discrete ? RecordModel::Discrete : record_model(config_.scheme);
        rec.scenario = config_.name;

        result_.regime = scenario_regime(config_);
        for (const auto& w : result_.regime.warnings) log(w);
        for (const auto* p : {&psi_.psi, &psi_e_.psi})
            if (boundary_density(*p) > 1e-8) log("initial density exceeds 1e-8 at the periodic boundary");

        next_observe_ = 0;
        if (config_.mode == MonitorMode::Continuous)
            stepper_.emplace(*prop_, config_.dt, config_.gamma, config_.scheme, config_.axes());
        at_boundary();
    }

    void log(std::string message) { result_.events.push_back({time(), std::move(message)}); }

    void fail(const std::string& why) {
        result_.failed = true;
        result_.failure = why;
        log("trajectory failed: " + why);
    }

    void settle() {
        flush(*prop_, psi_);
        flush(*prop_, psi_e_);
    }

    void advance() {
        if (!stepper_ && config_.mode == MonitorMode::Continuous)
            stepper_.emplace(*prop_, config_.dt, config_.gamma, config_.scheme, config_.axes());
        const MeasuredAxes& axes = result_.record.axes;
        if (config_.mode == MonitorMode::Discrete) {
            const double tau = config_.dt;
            const double sigma = step_resolution(config_.gamma, tau);
            prop_->strang(psi_.psi, tau);
            prop_->strang(psi_e_.psi, tau);
            const MeasurementOutcome out = sample_outcome(psi_.psi, sigma, rng_, axes);
            Vec dq(out.qbar.size()), qbar(out.qbar.size());
            for (std::size_t k = 0; k < dq.size(); ++k) {
                dq[k] = out.qbar[k] * tau;
                qbar[k] = dq[k] / tau;  // what a replay recovers from the record
            }
            psi_.psi = collapse(std::move(psi_.psi), out.qbar, sigma, axes);
            if (update_estimate_or_reseed(psi_e_.psi, qbar, sigma, axes))
                log("estimate re-seeded at the measured position");
            if (options_.keep_record) result_.record.append(dq);
            detail::check_finite(psi_.psi, "true state");
        } else {
            const auto noise = NoiseIncrement::draw(rng_, axes.size(), config_.dt);
            bool reseeded = false;
            const Vec dq = stepper_->coupled(psi_, psi_e_, noise, &reseeded);
            if (reseeded) log("estimate re-seeded at the measured position");
            if (options_.keep_record) result_.record.append(dq);
        }
    }

    // Observation, perturbations and snapshots due at the current step.
    void at_boundary() {
        bool observe = false;
        while (next_observe_ < observe_.size() && observe_[next_observe_] <= step_) {
            observe = observe || observe_[next_observe_] == step_;
            ++next_observe_;
        }
        if (!observe) return;
        settle();
        if (!psi_.psi.all_finite() || !psi_e_.psi.all_finite()) {
            fail("non-finite amplitude");
            return;
        }
        const double t = time();
        const double f = qmon::fidelity(psi_.psi, psi_e_.psi);

        // perturbations fire after the pre-kick state has been recorded
        const bool trace_step = step_ % config_.trace_every() == 0 || step_ == config_.total_steps();
        if (trace_step) record_trace(t, f);
        for (std::size_t p = 0; p < config_.perturbations.size(); ++p) {
            if (fired_[p]) continue;
            const auto& ev = config_.perturbations[p];
            if (step_ < config_.step_of(ev.time)) continue;
            if (ev.fidelity_trigger && f < *ev.fidelity_trigger) continue;
            fired_[p] = true;
            kick(kick_wavenumber(ev, config_.grid.dims(), config_.mass));
            if (trace_step) record_trace(t, qmon::fidelity(psi_.psi, psi_e_.psi));
        }
        if (options_.keep_snapshots)
            for (double ts : config_.snapshots)
                if (config_.step_of(ts) == step_) result_.snapshots.push_back({t, psi_.psi, psi_e_.psi});
        result_.last_valid = Snapshot{t, psi_.psi, psi_e_.psi};
    }

    void record_trace(double t, double f) {
        result_.times.push_back(t);
        result_.fidelity.push_back(std::min(f, 1.0));
        if (options_.keep_observables) {
            result_.mean_true.push_back(expectation_position(psi_.psi));
            result_.mean_estimate.push_back(expectation_position(psi_e_.psi));
            result_.variance_true.push_back(position_variance(psi_.psi));
            result_.variance_estimate.push_back(position_variance(psi_e_.psi));
        }
    }

    ScenarioConfig config_;
    RunOptions options_;
    Rng rng_;
    std::unique_ptr<Propagator> prop_;
    std::optional<SdeStepper> stepper_;
    MonitoredState psi_, psi_e_;
    std::size_t step_ = 0;
    std::vector<std::size_t> observe_;
    std::size_t next_observe_ = 0;
    std::vector<bool> fired_;
    TrajectoryResult result_;
};

inline TrajectoryResult run_trajectory(const ScenarioConfig& config, RunOptions options = {}) {
    return TrajectoryRunner(config, options).finish();
}

struct TrajectorySummary {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string failure;
    double final_fidelity = 0.0;
    double first_passage_95 = -1.0;
};

struct EnsembleResult {
    std::vector<double> times;
    std::vector<double> mean_fidelity;
    std::vector<double> standard_error;
    std::vector<TrajectorySummary> summaries;
    std::vector<TrajectoryResult> trajectories;  // successful and failed, by index
    std::size_t failed = 0;
};

// Runs n trajectories with seeds derived from the master seed and averages
// their fidelity traces on the shared time axis. Trajectories run on a worker
// pool; aggregation happens afterwards in index order, so the result does not
// depend on scheduling.
inline EnsembleResult run_ensemble(const ScenarioConfig& config, std::size_t n, RunOptions options = {},
                                   unsigned workers = 0) {
    if (n < 1) throw std::invalid_argument("ensemble needs at least one trajectory");
    validate_scenario(config);
    EnsembleResult out;
    out.trajectories.resize(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            ScenarioConfig c = config;
            c.seed = trajectory_seed(config.seed, i);
            out.trajectories[i] = run_trajectory(c, options);
        }
    };
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    }

    std::size_t length = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& t = out.trajectories[i];
        TrajectorySummary s;
        s.index = i;
        s.seed = t.seed;
        s.failed = t.failed;
        s.failure = t.failure;
        s.final_fidelity = t.fidelity.empty() ? 0.0 : t.fidelity.back();
        s.first_passage_95 = t.first_passage(0.95);
        out.summaries.push_back(s);
        if (t.failed) {
            ++out.failed;
        } else if (length == 0) {
            length = t.times.size();
            out.times = t.times;
        }
    }
    out.mean_fidelity.assign(length, 0.0);
    out.standard_error.assign(length, 0.0);
    std::vector<double> sum2(length, 0.0);
    std::size_t used = 0;
    for (const auto& t : out.trajectories) {
        if (t.failed || t.times.size() != length) continue;
        ++used;
        for (std::size_t k = 0; k < length; ++k) {
            out.mean_fidelity[k] += t.fidelity[k];
            sum2[k] += t.fidelity[k] * t.fidelity[k];
        }
    }
    for (std::size_t k = 0; k < length && used > 0; ++k) {
        const auto m = static_cast<double>(used);
        out.mean_fidelity[k] /= m;
        if (used > 1) {
            const double var = std::max(0.0, (sum2[k] - m * out.mean_fidelity[k] * out.mean_fidelity[k]) / (m - 1.0));
            out.standard_error[k] = std::sqrt(var / m);
        }
    }
    return out;
}

}  // namespace qmon
