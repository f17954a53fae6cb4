// snapshot.hpp
// Binary containers. All integers and floats are little-endian.
//
// QMON1 field snapshot:
//   "QMON1"  u8 kind (0 real density, 1 complex amplitudes)  u32 dims  f64 time
//   dims x (f64 min, f64 max, u64 points)
//   payload: row-major f64 values, complex as interleaved (re, im)
//
// QREC1 measurement record:
//   "QREC1"  f64 dt  f64 gamma  u64 seed  f64 start_time  u8 model
//   u32 axis count, axis count x u32 axis index
//   u32 scenario length, scenario bytes
//   u64 steps, payload: steps x axis count f64 dQ

#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qmon/error.hpp"
#include "qmon/grid.hpp"
#include "qmon/sde.hpp"
#include "qmon/wave_function.hpp"

namespace qmon::io {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

inline constexpr std::string_view snapshot_magic = "QMON1";
inline constexpr std::string_view record_magic = "QREC1";

namespace detail {

class Writer {
public:
    void bytes(const void* p, std::size_t n) {
        const auto* c = static_cast<const char*>(p);
        buf_.insert(buf_.end(), c, c + n);
    }
    template <class T>
    void put(T v) {
        bytes(&v, sizeof v);
    }
    void text(std::string_view s) { bytes(s.data(), s.size()); }
    const std::string& str() const { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    Reader(std::string data, std::string what) : data_(std::move(data)), what_(std::move(what)) {}

    void bytes(void* p, std::size_t n) {
        if (n > data_.size() - pos_)
            throw FormatError(what_ + " is truncated (needed " + std::to_string(n) + " more bytes at offset " +
                              std::to_string(pos_) + ", file has " + std::to_string(data_.size()) + ")");
        std::memcpy(p, data_.data() + pos_, n);
        pos_ += n;
    }
    template <class T>
    T get() {
        T v;
        bytes(&v, sizeof v);
        return v;
    }
    void expect_magic(std::string_view magic) {
        std::string m(magic.size(), '\0');
        if (data_.size() < magic.size() || data_.compare(0, magic.size(), magic) != 0)
            throw FormatError(what_ + " does not start with " + std::string(magic));
        bytes(m.data(), m.size());
    }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    std::string data_;
    std::string what_;
    std::size_t pos_ = 0;
};

inline std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void dump(const std::filesystem::path& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace detail

// A snapshot as stored: either |psi|^2 (or any real field) or complex
// amplitudes. Complex values are interleaved in `values`.
struct SnapshotFile {
    Grid grid;
    double time = 0.0;
    bool complex_valued = false;
    std::vector<double> values;

    WaveFunction wave_function() const {
        if (!complex_valued) throw FormatError("snapshot holds a density, not amplitudes");
        ComplexField amp(grid.size());
        for (std::size_t i = 0; i < amp.size(); ++i) amp[i] = {values[2 * i], values[2 * i + 1]};
        return WaveFunction(grid, std::move(amp));
    }
};

inline SnapshotFile make_snapshot(const WaveFunction& psi, double time) {
    SnapshotFile s{psi.grid(), time, true, std::vector<double>(2 * psi.size())};
    std::memcpy(s.values.data(), psi.amplitudes().data(), s.values.size() * sizeof(double));
    return s;
}

inline SnapshotFile make_density_snapshot(const WaveFunction& psi, double time) {
    return SnapshotFile{psi.grid(), time, false, density(psi)};
}

inline std::string encode_snapshot(const SnapshotFile& s) {
    const std::size_t expected = s.grid.size() * (s.complex_valued ? 2 : 1);
    if (s.values.size() != expected) throw FormatError("snapshot payload does not match its grid");
    detail::Writer w;
    w.text(snapshot_magic);
    w.put<std::uint8_t>(s.complex_valued ? 1 : 0);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(s.grid.dims()));
    w.put<double>(s.time);
    for (const Axis& a : s.grid.axes()) {
        w.put<double>(a.min);
        w.put<double>(a.max);
        w.put<std::uint64_t>(a.points);
    }
    w.bytes(s.values.data(), s.values.size() * sizeof(double));
    return w.str();
}

inline SnapshotFile decode_snapshot(std::string data, const std::string& what = "snapshot") {
    detail::Reader r(std::move(data), what);
    r.expect_magic(snapshot_magic);
    SnapshotFile s;
    const auto kind = r.get<std::uint8_t>();
    if (kind > 1) throw FormatError(what + " has unknown payload kind " + std::to_string(kind));
    s.complex_valued = kind == 1;
    const auto dims = r.get<std::uint32_t>();
    if (dims < 1 || dims > Grid::max_dims) throw FormatError(what + " has unsupported dimension " + std::to_string(dims));
    s.time = r.get<double>();
    std::vector<Axis> axes(dims);
    for (auto& a : axes) {
        a.min = r.get<double>();
        a.max = r.get<double>();
        a.points = r.get<std::uint64_t>();
        if (a.points > (std::uint64_t{1} << 24)) throw FormatError(what + " has an implausible axis size");
    }
    try {
        s.grid = Grid(axes);
    } catch (const std::invalid_argument& e) {
        throw FormatError(what + " has an invalid grid: " + e.what());
    }
    s.values.resize(s.grid.size() * (s.complex_valued ? 2 : 1));
    r.bytes(s.values.data(), s.values.size() * sizeof(double));
    if (r.remaining() != 0) throw FormatError(what + " has " + std::to_string(r.remaining()) + " trailing bytes");
    return s;
}

inline void write_snapshot(const SnapshotFile& s, const std::filesystem::path& path) {
    detail::dump(path, encode_snapshot(s));
}
inline void write_snapshot(const WaveFunction& psi, double time, const std::filesystem::path& path) {
    write_snapshot(make_snapshot(psi, time), path);
}
inline SnapshotFile read_snapshot(const std::filesystem::path& path) {
    return decode_snapshot(detail::slurp(path), "'" + path.string() + "'");
}

inline std::string encode_record(const MeasurementRecord& rec) {
    detail::Writer w;
    w.text(record_magic);
    w.put<double>(rec.dt);
    w.put<double>(rec.gamma);
    w.put<std::uint64_t>(rec.seed);
    w.put<double>(rec.start_time);
    w.put<std::uint8_t>(static_cast<std::uint8_t>(rec.model));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(rec.axes.size()));
    for (std::size_t a : rec.axes) w.put<std::uint32_t>(static_cast<std::uint32_t>(a));
    w.put<std::uint32_t>(static_cast<std::uint32_t>(rec.scenario.size()));
    w.text(rec.scenario);
    w.put<std::uint64_t>(rec.steps());
    w.bytes(rec.increments.data(), rec.steps() * rec.axes.size() * sizeof(double));
    return w.str();
}

inline MeasurementRecord decode_record(std::string data, const std::string& what = "record") {
    detail::Reader r(std::move(data), what);
    r.expect_magic(record_magic);
    MeasurementRecord rec;
    rec.dt = r.get<double>();
    rec.gamma = r.get<double>();
    rec.seed = r.get<std::uint64_t>();
    rec.start_time = r.get<double>();
    const auto model = r.get<std::uint8_t>();
    if (model > 2) throw FormatError(what + " has unknown model " + std::to_string(model));
    rec.model = static_cast<RecordModel>(model);
    const auto naxes = r.get<std::uint32_t>();
    if (naxes < 1 || naxes > Grid::max_dims) throw FormatError(what + " has an invalid axis count");
    for (std::uint32_t k = 0; k < naxes; ++k) rec.axes.push_back(r.get<std::uint32_t>());
    const auto len = r.get<std::uint32_t>();
    if (len > r.remaining()) throw FormatError(what + " is truncated inside the scenario name");
    rec.scenario.resize(len);
    r.bytes(rec.scenario.data(), len);
    const auto steps = r.get<std::uint64_t>();
    if (steps > r.remaining() / (naxes * sizeof(double)))
        throw FormatError(what + " is truncated: header announces " + std::to_string(steps) + " steps, payload holds " +
                          std::to_string(r.remaining() / (naxes * sizeof(double))));
    rec.increments.resize(steps * naxes);
    r.bytes(rec.increments.data(), rec.increments.size() * sizeof(double));
    if (r.remaining() != 0) throw FormatError(what + " has " + std::to_string(r.remaining()) + " trailing bytes");
    if (!(rec.dt > 0.0)) throw FormatError(what + " has a non-positive dt");
    return rec;
}

inline void write_record(const MeasurementRecord& rec, const std::filesystem::path& path) {
    detail::dump(path, encode_record(rec));
}
inline MeasurementRecord read_record(const std::filesystem::path& path) {
    return decode_record(detail::slurp(path), "'" + path.string() + "'");
}

}  // namespace qmon::io
