// output.hpp
// Trace tables, checksums and run manifests.

#pragma once

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "qmon/error.hpp"
#include "qmon/io/config.hpp"
#include "qmon/io/snapshot.hpp"
#include "qmon/trajectory.hpp"

namespace qmon::io {

inline constexpr const char* tool_version = "0.1.0";

// Column-oriented numeric table read back from a trace file.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::vector<double> column(const std::string& name) const {
        for (std::size_t c = 0; c < header.size(); ++c)
            if (header[c] == name) {
                std::vector<double> out;
                for (const auto& r : rows) out.push_back(r[c]);
                return out;
            }
        throw FormatError("no column '" + name + "'");
    }
};

inline std::string format_17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_table(const Table& t, const std::filesystem::path& path) {
    std::ostringstream out;
    for (std::size_t c = 0; c < t.header.size(); ++c) out << (c ? "," : "") << t.header[c];
    out << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t c = 0; c < r.size(); ++c) out << (c ? "," : "") << format_17(r[c]);
        out << '\n';
    }
    detail::dump(path, out.str());
}

inline Table read_table(const std::filesystem::path& path) {
    std::istringstream in(detail::slurp(path));
    Table t;
    std::string line;
    if (!std::getline(in, line)) throw FormatError("'" + path.string() + "' is empty");
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) {
            char* end = nullptr;
            row.push_back(std::strtod(cell.c_str(), &end));
            if (end == cell.c_str()) throw FormatError("bad number '" + cell + "' in '" + path.string() + "'");
        }
        if (row.size() != t.header.size()) throw FormatError("ragged row in '" + path.string() + "'");
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline Table fidelity_table(const TrajectoryResult& r) {
    Table t{{"time_ms", "fidelity"}, {}};
    for (std::size_t i = 0; i < r.times.size(); ++i) t.rows.push_back({r.times[i], r.fidelity[i]});
    return t;
}

inline Table observables_table(const TrajectoryResult& r) {
    Table t{{"time_ms"}, {}};
    const std::size_t dims = r.mean_true.empty() ? 0 : r.mean_true.front().size();
    for (const char* who : {"true", "estimate"})
        for (std::size_t a = 0; a < dims; ++a) {
            const std::string ax = a == 0 ? "x" : "y";
            t.header.push_back(std::string("mean_") + ax + "_" + who + "_um");
            t.header.push_back(std::string("var_") + ax + "_" + who + "_um2");
        }
    for (std::size_t i = 0; i < r.mean_true.size(); ++i) {
        std::vector<double> row{r.times[i]};
        for (const auto* m : {&r.mean_true, &r.mean_estimate}) {
            const auto& var = m == &r.mean_true ? r.variance_true : r.variance_estimate;
            for (std::size_t a = 0; a < dims; ++a) {
                row.push_back((*m)[i][a]);
                row.push_back(var[i][a]);
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline void write_fidelity_trace(const TrajectoryResult& r, const std::filesystem::path& path) {
    write_table(fidelity_table(r), path);
}
inline void write_observables(const TrajectoryResult& r, const std::filesystem::path& path) {
    write_table(observables_table(r), path);
}

inline std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr)) throw Error("SHA-256 failed");
    std::ostringstream out;
    for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return out.str();
}

inline std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(detail::slurp(path)); }

inline std::string config_hash(const ScenarioConfig& c) { return sha256_hex(serialize_config(c)); }

inline std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Collects emitted files and writes manifest.json after everything else.
class ManifestBuilder {
public:
    ManifestBuilder(std::filesystem::path dir, const ScenarioConfig& c, std::string command)
        : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
        doc_["tool"] = "qmon";
        doc_["version"] = tool_version;
        doc_["command"] = std::move(command);
        doc_["scenario"] = c.name;
        doc_["variant"] = c.variant;
        doc_["config_hash"] = config_hash(c);
        doc_["seed"] = c.seed;
        doc_["mode"] = to_string(c.mode);
        doc_["scheme"] = c.mode == MonitorMode::Discrete ? "discrete" : to_string(c.scheme);
        doc_["start_time"] = utc_now();
        doc_["files"] = nlohmann::json::array();
        doc_["warnings"] = nlohmann::json::array();
        doc_["events"] = nlohmann::json::array();
    }

    const std::filesystem::path& dir() const { return dir_; }
    std::filesystem::path path(const std::string& relative) const { return dir_ / relative; }

    // Records a file already written under the output directory.
    void add(const std::string& relative) {
        doc_["files"].push_back({{"path", relative}, {"sha256", sha256_file(dir_ / relative)},
                                 {"bytes", std::filesystem::file_size(dir_ / relative)}});
    }
    void warning(const std::string& w) { doc_["warnings"].push_back(w); }
    void event(double t, const std::string& what) { doc_["events"].push_back({{"time_ms", t}, {"message", what}}); }
    nlohmann::json& extra() { return doc_; }

    void write() {
        doc_["end_time"] = utc_now();
        detail::dump(dir_ / "manifest.json", doc_.dump(2) + "\n");
    }

private:
    std::filesystem::path dir_;
    nlohmann::json doc_;
};

struct ManifestCheck {
    std::size_t files = 0;
    std::vector<std::string> mismatches;
    bool ok() const { return mismatches.empty(); }
};

// Re-hashes every file a manifest lists.
inline ManifestCheck verify_manifest(const std::filesystem::path& dir) {
    const auto doc = nlohmann::json::parse(detail::slurp(dir / "manifest.json"));
    ManifestCheck out;
    for (const auto& f : doc.at("files")) {
        ++out.files;
        const auto rel = f.at("path").get<std::string>();
        const auto p = dir / rel;
        if (!std::filesystem::exists(p) || sha256_file(p) != f.at("sha256").get<std::string>())
            out.mismatches.push_back(rel);
    }
    return out;
}

inline std::string snapshot_name(std::size_t index, const char* which) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "snapshot_%03zu_%s.qmon", index, which);
    return buf;
}

// Writes every artifact of a single trajectory into the manifest's directory.
inline void write_trajectory_files(ManifestBuilder& m, const TrajectoryResult& r, const std::string& prefix = "") {
    if (!prefix.empty()) std::filesystem::create_directories(m.path(prefix));
    auto emit = [&](const std::string& name, auto&& writer) {
        writer(m.path(prefix + name));
        m.add(prefix + name);
    };
    emit("fidelity.csv", [&](const auto& p) { write_fidelity_trace(r, p); });
    if (!r.mean_true.empty()) emit("observables.csv", [&](const auto& p) { write_observables(r, p); });
    for (std::size_t i = 0; i < r.snapshots.size(); ++i) {
        const auto& s = r.snapshots[i];
        emit(snapshot_name(i, "true"), [&](const auto& p) { write_snapshot(s.psi, s.time, p); });
        emit(snapshot_name(i, "estimate"), [&](const auto& p) { write_snapshot(s.psi_e, s.time, p); });
    }
    if (r.record.steps() > 0) emit("record.qrec", [&](const auto& p) { write_record(r.record, p); });
    if (r.failed && r.last_valid) {
        emit("last_valid_true.qmon", [&](const auto& p) { write_snapshot(r.last_valid->psi, r.last_valid->time, p); });
        emit("last_valid_estimate.qmon",
             [&](const auto& p) { write_snapshot(r.last_valid->psi_e, r.last_valid->time, p); });
    }
}

}  // namespace qmon::io
