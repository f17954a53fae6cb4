// fft.hpp
// Thin RAII wrapper over FFTW for in-place transforms of grid-shaped data.

#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <new>
#include <span>
#include <stdexcept>
#include <vector>

#include "qmon/grid.hpp"

namespace qmon {

// 64-byte aligned storage so every buffer matches the alignment the FFTW plans
// were created with.
template <class T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t alignment{64};

    AlignedAllocator() = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) {
        return static_cast<T*>(::operator new(n * sizeof(T), alignment));
    }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

    template <class U>
    bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using complex = std::complex<double>;
using ComplexField = std::vector<complex, AlignedAllocator<complex>>;
using RealField = std::vector<double>;

namespace detail {
// The FFTW planner is not re-entrant.
inline std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

// Unnormalized forward/backward transforms on the grid shape. Plans are built
// with FFTW_ESTIMATE so results are reproducible run to run.
class Fft {
public:
    explicit Fft(const Grid& grid) : size_(grid.size()) {
        int n[Grid::max_dims];
        for (std::size_t a = 0; a < grid.dims(); ++a) n[a] = static_cast<int>(grid.axis(a).points);
        ComplexField scratch(size_);
        auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
        std::lock_guard lock(detail::planner_mutex());
        forward_ = fftw_plan_dft(static_cast<int>(grid.dims()), n, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
        backward_ = fftw_plan_dft(static_cast<int>(grid.dims()), n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!forward_ || !backward_) throw std::runtime_error("FFTW planning failed");
    }

    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;

    ~Fft() {
        std::lock_guard lock(detail::planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
    }

    void forward(std::span<complex> data) const { execute(forward_, data); }
    // Unnormalized: forward then backward scales by size().
    void backward(std::span<complex> data) const { execute(backward_, data); }

    std::size_t size() const { return size_; }

private:
    void execute(fftw_plan plan, std::span<complex> data) const {
        if (data.size() != size_) throw std::invalid_argument("FFT size mismatch");
        auto* p = reinterpret_cast<fftw_complex*>(data.data());
        fftw_execute_dft(plan, p, p);
    }

    std::size_t size_;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

}  // namespace qmon
