// grid.hpp
// Uniform periodic grids in one or two dimensions.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "qmon/units.hpp"

namespace qmon {

// One axis of a periodic grid: points sit at min + i*spacing for i in
// [0, points), so max itself is the periodic image of min.
struct Axis {
    double min = 0.0;
    double max = 0.0;
    std::size_t points = 0;

    double length() const { return max - min; }
    double spacing() const { return (max - min) / static_cast<double>(points); }
    double coordinate(std::size_t i) const { return min + static_cast<double>(i) * spacing(); }

    // Angular wavenumber of FFT bin i (standard FFT ordering).
    double wavenumber(std::size_t i) const {
        const auto n = static_cast<std::ptrdiff_t>(points);
        auto j = static_cast<std::ptrdiff_t>(i);
        if (j > (n - 1) / 2) j -= n;  // upper half holds the negative frequencies
        return 2.0 * units::pi * static_cast<double>(j) / length();
    }
    double nyquist() const { return units::pi / spacing(); }

    bool operator==(const Axis&) const = default;
};

class Grid {
public:
    static constexpr std::size_t max_dims = 2;

    Grid() = default;

    explicit Grid(std::vector<Axis> axes) : axes_(std::move(axes)) {
        if (axes_.empty() || axes_.size() > max_dims)
            throw std::invalid_argument("grid dimension must be 1 or 2");
        for (const auto& a : axes_) {
            if (!(std::isfinite(a.min) && std::isfinite(a.max)) || !(a.max > a.min))
                throw std::invalid_argument("grid axis needs finite min < max");
            if (a.points <= 8)
                throw std::invalid_argument("grid axis needs more than 8 points");
        }
        auto tables = std::make_shared<Tables>();
        const std::size_t n = size();
        for (std::size_t a = 0; a < axes_.size(); ++a) {
            tables->index[a].resize(n);
            tables->coord[a].resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                const auto k = static_cast<std::uint32_t>((i / stride(a)) % axes_[a].points);
                tables->index[a][i] = k;
                tables->coord[a][i] = axes_[a].coordinate(k);
            }
        }
        tables_ = std::move(tables);
    }

    static Grid line(double min, double max, std::size_t points) {
        return Grid({Axis{min, max, points}});
    }
    static Grid square(double min, double max, std::size_t points) {
        return Grid({Axis{min, max, points}, Axis{min, max, points}});
    }

    std::size_t dims() const { return axes_.size(); }
    const Axis& axis(std::size_t a) const { return axes_.at(a); }
    std::span<const Axis> axes() const { return axes_; }

    std::size_t size() const {
        std::size_t n = 1;
        for (const auto& a : axes_) n *= a.points;
        return n;
    }

    double cell_volume() const {
        double v = 1.0;
        for (const auto& a : axes_) v *= a.spacing();
        return v;
    }

    // Row-major layout: the last axis varies fastest.
    std::size_t stride(std::size_t a) const {
        std::size_t s = 1;
        for (std::size_t b = a + 1; b < axes_.size(); ++b) s *= axes_[b].points;
        return s;
    }
    std::size_t index_along(std::size_t flat, std::size_t a) const { return tables_->index[a][flat]; }
    double coordinate(std::size_t flat, std::size_t a) const { return tables_->coord[a][flat]; }

    // Coordinate of every grid point along axis a.
    std::span<const double> coordinates(std::size_t a) const { return tables_->coord[a]; }
    std::vector<double> wavenumbers(std::size_t a) const {
        std::vector<double> out(size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = axes_[a].wavenumber(index_along(i, a));
        return out;
    }

    bool contains(std::span<const double> point) const {
        if (point.size() != dims()) return false;
        for (std::size_t a = 0; a < dims(); ++a)
            if (point[a] < axes_[a].min || point[a] >= axes_[a].max) return false;
        return true;
    }

    bool operator==(const Grid& other) const { return axes_ == other.axes_; }

private:
    struct Tables {
        std::array<std::vector<std::uint32_t>, max_dims> index;
        std::array<std::vector<double>, max_dims> coord;
    };

    std::vector<Axis> axes_;
    // Shared between copies; grids are immutable once built.
    std::shared_ptr<const Tables> tables_;
};

// Position or momentum vector, one component per grid axis.
using Vec = std::vector<double>;

}  // namespace qmon
