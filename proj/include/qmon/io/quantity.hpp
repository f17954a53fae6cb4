// quantity.hpp
// Physical quantities written as "<number> <unit>", e.g. "9.9856 1/(um^2 s)",
// "1e-13 eV", "5.44e-17 eV/um^4". Units combine with '*', '/', spaces,
// parentheses and integer powers.

#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

#include "qmon/units.hpp"

namespace qmon::io {

// Exponents of length, time, mass and temperature.
using Dimension = std::array<int, 4>;

struct Unit {
    double si = 1.0;  // value of one unit in SI
    Dimension dim{0, 0, 0, 0};

    Unit& operator*=(const Unit& o) {
        si *= o.si;
        for (std::size_t i = 0; i < dim.size(); ++i) dim[i] += o.dim[i];
        return *this;
    }
    Unit pow(int n) const {
        Unit u;
        u.si = std::pow(si, n);
        for (std::size_t i = 0; i < dim.size(); ++i) u.dim[i] = dim[i] * n;
        return u;
    }
};

class UnitError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

namespace detail {

inline bool lookup_atom(std::string_view s, Unit& u) {
    constexpr Dimension L{1, 0, 0, 0}, T{0, 1, 0, 0}, M{0, 0, 1, 0}, K{0, 0, 0, 1}, E{2, -2, 1, 0};
    struct Entry {
        std::string_view name;
        double si;
        Dimension dim;
    };
    static constexpr Entry table[] = {
        {"m", 1.0, L},     {"cm", 1e-2, L},   {"mm", 1e-3, L},   {"um", 1e-6, L},
        {"μm", 1e-6, L},   {"nm", 1e-9, L},   {"s", 1.0, T},     {"ms", 1e-3, T},
        {"us", 1e-6, T},   {"μs", 1e-6, T},   {"ns", 1e-9, T},   {"kg", 1.0, M},
        {"g", 1e-3, M},    {"u", 1.66053906660e-27, M},          {"J", 1.0, E},
        {"eV", units::electron_volt_si, E},   {"meV", 1e-3 * units::electron_volt_si, E},
        {"neV", 1e-9 * units::electron_volt_si, E},              {"K", 1.0, K},
        {"mK", 1e-3, K},   {"uK", 1e-6, K},   {"μK", 1e-6, K},   {"nK", 1e-9, K},
        {"pK", 1e-12, K},
    };
    for (const auto& e : table)
        if (e.name == s) {
            u.si = e.si;
            u.dim = e.dim;
            return true;
        }
    return false;
}

class UnitParser {
public:
    explicit UnitParser(std::string_view s) : s_(s) {}

    Unit parse() {
        Unit u = product();
        skip_space();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(s_.substr(pos_, 1)) + "'");
        return u;
    }

private:
    // product := factor ((' ' | '*' | '/') factor)*
    Unit product() {
        Unit u = factor();
        for (;;) {
            skip_space();
            if (pos_ >= s_.size() || s_[pos_] == ')') return u;
            if (s_[pos_] == '/') {
                ++pos_;
                u *= factor().pow(-1);
            } else {
                if (s_[pos_] == '*') ++pos_;
                u *= factor();
            }
        }
    }

    // factor := ('(' product ')' | atom | '1') ('^' integer)?
    Unit factor() {
        skip_space();
        Unit u;
        if (pos_ >= s_.size()) fail("missing unit");
        if (s_[pos_] == '(') {
            ++pos_;
            u = product();
            skip_space();
            if (pos_ >= s_.size() || s_[pos_] != ')') fail("missing ')'");
            ++pos_;
        } else if (s_[pos_] == '1') {
            ++pos_;
        } else {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && is_atom_char(s_[pos_])) ++pos_;
            const auto name = s_.substr(start, pos_ - start);
            if (name.empty()) fail("unexpected '" + std::string(s_.substr(pos_, 1)) + "'");
            if (!lookup_atom(name, u)) fail("unknown unit '" + std::string(name) + "'");
        }
        if (pos_ < s_.size() && s_[pos_] == '^') {
            ++pos_;
            int n = 0;
            const char* b = s_.data() + pos_;
            if (pos_ < s_.size() && s_[pos_] == '+') ++b;
            auto [p, ec] = std::from_chars(b, s_.data() + s_.size(), n);
            if (ec != std::errc()) fail("bad exponent");
            pos_ = static_cast<std::size_t>(p - s_.data());
            u = u.pow(n);
        }
        return u;
    }

    static bool is_atom_char(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || (static_cast<unsigned char>(c) & 0x80);
    }
    void skip_space() {
        while (pos_ < s_.size() && s_[pos_] == ' ') ++pos_;
    }
    [[noreturn]] void fail(const std::string& why) const {
        throw UnitError("bad unit '" + std::string(s_) + "': " + why);
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

inline std::string describe(const Dimension& d) {
    static constexpr const char* names[] = {"length", "time", "mass", "temperature"};
    std::string out;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] == 0) continue;
        if (!out.empty()) out += " ";
        out += names[i];
        if (d[i] != 1) out += "^" + std::to_string(d[i]);
    }
    return out.empty() ? "dimensionless" : out;
}

}  // namespace detail

inline Unit parse_unit(std::string_view s) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    if (s.empty()) return Unit{};
    return detail::UnitParser(s).parse();
}

// Parses "<number> <unit>" and returns the number expressed in `target`,
// which must have the same dimension. The conversion factor is the ratio of
// the two SI scales, so a value written in the target unit comes back exactly.
inline double parse_quantity(std::string_view text, std::string_view target) {
    std::string_view s = text;
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    double number = 0.0;
    const char* b = s.data();
    if (!s.empty() && s.front() == '+') ++b;
    auto [p, ec] = std::from_chars(b, s.data() + s.size(), number);
    if (ec != std::errc() || !std::isfinite(number))
        throw UnitError("expected '<number> <unit>', got '" + std::string(text) + "'");
    const Unit from = parse_unit(s.substr(static_cast<std::size_t>(p - s.data())));
    const Unit to = parse_unit(target);
    if (from.dim != to.dim)
        throw UnitError("unit mismatch in '" + std::string(text) + "': expected " + detail::describe(to.dim) +
                        " (" + std::string(target) + "), got " + detail::describe(from.dim));
    if (from.si == to.si) return number;
    return number * (from.si / to.si);
}

// Shortest-exact decimal text for a double.
inline std::string format_number(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

inline std::string format_quantity(double v, std::string_view unit) {
    return format_number(v) + " " + std::string(unit);
}

}  // namespace qmon::io
