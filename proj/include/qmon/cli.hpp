// cli.hpp
// Command-line front end. Exit codes: 0 success, 1 usage, 2 bad input
// (config, record or file format), 3 numerical failure.

#pragma once

#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmon/builtins.hpp"
#include "qmon/io/config.hpp"
#include "qmon/io/output.hpp"
#include "qmon/io/snapshot.hpp"
#include "qmon/sde.hpp"
#include "qmon/trajectory.hpp"

namespace qmon {

enum ExitCode { exit_ok = 0, exit_usage = 1, exit_config = 2, exit_numerical = 3 };

namespace detail {

struct CommonOptions {
    std::string config;
    std::string mode;
    std::string scheme;
    std::string seed;
    std::string out;
};

inline std::uint64_t parse_seed(const std::string& s) {
    if (s == "random") {
        std::random_device rd;
        return (std::uint64_t{rd()} << 32) ^ rd();
    }
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(s, &used, 0);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty() || s.front() == '-')
        throw ConfigError("--seed expects a non-negative integer or 'random', got '" + s + "'");
    return v;
}

inline ScenarioConfig resolve(const CommonOptions& o) {
    ScenarioConfig c = io::load_config(o.config);
    try {
        if (!o.mode.empty()) c.mode = parse_mode(o.mode);
        if (!o.scheme.empty()) c.scheme = parse_scheme(o.scheme);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (!o.seed.empty()) c.seed = parse_seed(o.seed);
    try {
        validate_scenario(c);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

inline std::string default_out(const ScenarioConfig& c, const char* what) {
    return "qmon-" + std::string(what) + "-" + c.name;
}

inline void add_config_files(io::ManifestBuilder& m, const ScenarioConfig& c) {
    io::detail::dump(m.path("config.yaml"), io::serialize_config(c));
    m.add("config.yaml");
}

inline int cmd_run(const CommonOptions& o, std::ostream& out) {
    const ScenarioConfig c = resolve(o);
    io::ManifestBuilder m(o.out.empty() ? default_out(c, "run") : o.out, c, "run");
    const auto r = run_trajectory(c);
    add_config_files(m, c);
    io::write_trajectory_files(m, r);
    for (const auto& w : r.regime.warnings) m.warning(w);
    for (const auto& e : r.events) m.event(e.time, e.message);
    m.extra()["failed"] = r.failed;
    if (r.failed) m.extra()["failure"] = r.failure;
    if (!r.fidelity.empty()) m.extra()["final_fidelity"] = r.fidelity.back();
    m.write();

    for (const auto& w : r.regime.warnings) out << "warning: " << w << "\n";
    if (r.failed) {
        out << "trajectory failed at t=" << (r.last_valid ? r.last_valid->time : 0.0) << " ms: " << r.failure << "\n";
        return exit_numerical;
    }
    out << "scenario " << c.name << " (" << c.variant << "), " << to_string(c.mode) << ", seed " << c.seed << "\n"
        << "final fidelity " << r.fidelity.back() << " at t=" << r.times.back() << " ms\n"
        << "wrote " << m.dir().string() << "\n";
    return exit_ok;
}

inline int cmd_ensemble(const CommonOptions& o, std::size_t n, unsigned threads, std::ostream& out) {
    if (n < 1) throw CLI::ValidationError("--n", "must be at least 1");
    const ScenarioConfig c = resolve(o);
    io::ManifestBuilder m(o.out.empty() ? default_out(c, "ensemble") : o.out, c, "ensemble");
    const auto e = run_ensemble(c, n, RunOptions{true, false, false}, threads);
    add_config_files(m, c);

    io::Table mean{{"time_ms", "mean_fidelity", "standard_error"}, {}};
    for (std::size_t k = 0; k < e.times.size(); ++k)
        mean.rows.push_back({e.times[k], e.mean_fidelity[k], e.standard_error[k]});
    io::write_table(mean, m.path("ensemble.csv"));
    m.add("ensemble.csv");

    io::Table sum{{"index", "seed", "failed", "final_fidelity", "first_passage_095_ms"}, {}};
    for (const auto& s : e.summaries)
        sum.rows.push_back({double(s.index), double(s.seed), s.failed ? 1.0 : 0.0, s.final_fidelity,
                            s.first_passage_95});
    io::write_table(sum, m.path("trajectories.csv"));
    m.add("trajectories.csv");

    for (std::size_t i = 0; i < e.trajectories.size(); ++i) {
        char dir[32];
        std::snprintf(dir, sizeof dir, "trajectory_%04zu/", i);
        io::write_trajectory_files(m, e.trajectories[i], dir);
        if (e.trajectories[i].failed) m.warning("trajectory " + std::to_string(i) + " failed: " + e.trajectories[i].failure);
    }
    m.extra()["trajectories"] = n;
    m.extra()["failed_trajectories"] = e.failed;
    m.write();

    out << "ensemble of " << n << " (" << e.failed << " failed), seed " << c.seed << "\n";
    if (!e.mean_fidelity.empty())
        out << "mean fidelity " << e.mean_fidelity.back() << " +- " << e.standard_error.back() << " at t="
            << e.times.back() << " ms\n";
    out << "wrote " << m.dir().string() << "\n";
    return e.failed == n ? exit_numerical : exit_ok;
}

inline int cmd_replay(const std::string& record_path, const CommonOptions& o, std::ostream& out) {
    const ScenarioConfig c = resolve(o);
    MeasurementRecord rec;
    try {
        rec = io::read_record(record_path);
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    if (rec.dt != c.dt)
        throw ConfigError("record dt " + io::format_number(rec.dt) + " ms does not match config dt " +
                          io::format_number(c.dt) + " ms");
    if (rec.gamma != c.gamma) throw ConfigError("record gamma does not match the config");
    if (rec.axes != c.axes()) throw ConfigError("record measures different axes than the config");
    const SdeScheme scheme = rec.model == RecordModel::EulerMaruyama ? SdeScheme::EulerMaruyama : SdeScheme::WeakOrder2;

    io::ManifestBuilder m(o.out.empty() ? default_out(c, "replay") : o.out, c, "replay");
    io::Table t{{"time_ms"}, {}};
    for (std::size_t a = 0; a < c.grid.dims(); ++a) {
        const std::string ax = a == 0 ? "x" : "y";
        t.header.push_back("mean_" + ax + "_estimate_um");
        t.header.push_back("var_" + ax + "_estimate_um2");
    }
    std::vector<std::size_t> observe;
    for (std::size_t s : observation_steps(c))
        if (s <= rec.steps()) observe.push_back(s);
    auto row = [&](double time, const WaveFunction& e) {
        std::vector<double> r{time};
        const Vec mean = expectation_position(e), var = position_variance(e);
        for (std::size_t a = 0; a < mean.size(); ++a) {
            r.push_back(mean[a]);
            r.push_back(var[a]);
        }
        t.rows.push_back(std::move(r));
    };
    const WaveFunction e0 = make_gaussian_packet(c.grid, c.initial_estimate);
    row(rec.start_time, e0);
    const std::size_t every = c.trace_every();
    const WaveFunction final = replay_estimate(
        rec, e0, c.hamiltonian(), scheme,
        [&](std::size_t step, double time, const WaveFunction& e) {
            if (step % every == 0 || step == rec.steps()) row(time, e);
        },
        observe);
    add_config_files(m, c);
    io::write_table(t, m.path("estimate_observables.csv"));
    m.add("estimate_observables.csv");
    io::write_snapshot(final, rec.start_time + rec.duration(), m.path("final_estimate.qmon"));
    m.add("final_estimate.qmon");
    m.extra()["record"] = record_path;
    m.extra()["record_steps"] = rec.steps();
    m.write();
    out << "replayed " << rec.steps() << " steps (" << rec.duration() << " ms)\nwrote " << m.dir().string() << "\n";
    return exit_ok;
}

inline std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');) {
        try {
            v.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("bad number '" + item + "' in list '" + s + "'");
        }
    }
    return v;
}

inline int cmd_probe(const CommonOptions& o, const std::string& dts_text, std::size_t n, double horizon,
                     std::size_t refinement, std::ostream& out) {
    const ScenarioConfig c = resolve(o);
    if (c.grid.dims() != 1) throw ConfigError("probe-order needs a one-dimensional scenario");
    std::vector<double> dts = dts_text.empty() ? std::vector<double>{4 * c.dt, 2 * c.dt, c.dt} : parse_list(dts_text);
    if (horizon <= 0.0) horizon = c.duration;
    const auto psi0 = make_gaussian_packet(c.grid, c.initial_state);
    std::vector<SdeScheme> schemes;
    if (o.scheme.empty()) schemes = {SdeScheme::EulerMaruyama, SdeScheme::WeakOrder2};
    else schemes = {c.scheme};
    for (SdeScheme s : schemes) {
        WeakOrderTable t;
        try {
            t = weak_order_probe(c.hamiltonian(), psi0, c.gamma, dts, n, horizon, s, c.seed, refinement);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        out << "scheme " << to_string(s) << "  reference dt " << t.reference_dt << " ms  E[<q>] " << t.reference_mean
            << " um\n";
        out << "  dt_ms            weak_error_um    standard_error\n";
        for (const auto& r : t.rows) {
            char line[128];
            std::snprintf(line, sizeof line, "  %-16.6g %-16.6g %-16.6g\n", r.dt, r.error, r.standard_error);
            out << line;
        }
        out << "  fitted slope " << t.slope << "\n";
    }
    return exit_ok;
}

inline int cmd_validate(const CommonOptions& o, std::ostream& out) {
    const ScenarioConfig c = resolve(o);
    out << io::serialize_config(c);
    if (c.gamma > 0.0) {
        const auto report = scenario_regime(c);
        out << "# decoherence rate " << report.decoherence_rate << " 1/ms, extension " << report.extension
            << " um, self-dynamics time " << report.self_dynamics_time << " ms\n";
        for (const auto& w : report.warnings) out << "# warning: " << w << "\n";
    }
    for (const auto* p : {&c.initial_state, &c.initial_estimate})
        if (boundary_density(make_gaussian_packet(c.grid, *p)) > 1e-8)
            out << "# warning: initial density exceeds 1e-8 at the periodic boundary\n";
    return exit_ok;
}

}  // namespace detail

inline int cli_main(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"qmon: monitoring a quantum particle by continuous unsharp position measurement"};
    app.require_subcommand(1);
    app.set_version_flag("--version", io::tool_version);

    detail::CommonOptions o;
    auto common = [&](CLI::App* sub, bool with_mode) {
        sub->add_option("config", o.config, "scenario file or built-in name (name@paper for the paper variant)")
            ->required();
        if (with_mode) {
            sub->add_option("--mode", o.mode, "discrete or continuous")->check(CLI::IsMember({"discrete", "continuous"}));
            sub->add_option("--scheme", o.scheme, "em or weak2")->check(CLI::IsMember({"em", "weak2"}));
        }
        sub->add_option("--seed", o.seed, "master seed (integer) or 'random'");
        sub->add_option("--out", o.out, "output directory");
    };

    auto* run = app.add_subcommand("run", "run one trajectory");
    common(run, true);

    std::size_t n = 0;
    unsigned threads = 0;
    auto* ensemble = app.add_subcommand("ensemble", "run n trajectories and average their fidelity");
    common(ensemble, true);
    ensemble->add_option("--n", n, "number of trajectories")->required()->check(CLI::PositiveNumber);
    ensemble->add_option("--threads", threads, "worker threads (default: all cores)");

    std::string record;
    auto* replay = app.add_subcommand("replay", "re-run the estimator from a stored measurement record");
    replay->add_option("record", record, "record file (.qrec)")->required()->check(CLI::ExistingFile);
    common(replay, false);

    std::string dts;
    std::size_t probe_n = 400;
    double horizon = 0.0;
    std::size_t refinement = 16;
    auto* probe = app.add_subcommand("probe-order", "measure the weak convergence order of the SDE schemes");
    common(probe, true);
    probe->add_option("--dts", dts, "comma-separated step sizes in ms (default 4dt,2dt,dt)");
    probe->add_option("--trajectories", probe_n, "paired trajectories per step size")->check(CLI::Range(2, 1000000));
    probe->add_option("--horizon", horizon, "final time in ms (default: scenario duration)");
    probe->add_option("--refinement", refinement, "reference step = smallest dt / refinement")->check(CLI::PositiveNumber);

    auto* list = app.add_subcommand("list-scenarios", "print the built-in scenario names");
    auto* validate = app.add_subcommand("validate", "parse a config, print it in canonical form and check the regime");
    common(validate, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::CallForVersion& e) {
        out << io::tool_version << "\n";
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return exit_usage;
    }

    try {
        if (*list) {
            for (auto name : builtin_names) out << name << "  " << builtin_description(name) << "\n";
            return exit_ok;
        }
        if (*run) return detail::cmd_run(o, out);
        if (*ensemble) return detail::cmd_ensemble(o, n, threads, out);
        if (*replay) return detail::cmd_replay(record, o, out);
        if (*probe) return detail::cmd_probe(o, dts, probe_n, horizon, refinement, out);
        if (*validate) return detail::cmd_validate(o, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const FormatError& e) {
        err << "format error: " << e.what() << "\n";
        return exit_config;
    } catch (const NumericalFailure& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const ZeroPosteriorNorm& e) {
        err << "numerical failure: " << e.what() << "\n";
        return exit_numerical;
    } catch (const CLI::ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_config;
    }
    return exit_usage;
}

}  // namespace qmon
