// dynamics.hpp
// Hamiltonian action and split-step spectral propagation.

#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <stdexcept>
#include <vector>

#include "qmon/error.hpp"
#include "qmon/fft.hpp"
#include "qmon/potential.hpp"
#include "qmon/units.hpp"
#include "qmon/wave_function.hpp"

namespace qmon {

struct Hamiltonian {
    Grid grid;
    double mass = units::hydrogen_mass;  // internal mass units
    Potential potential = Flat{};
    // false switches the whole Hamiltonian off (H = 0): no kinetic term and no
    // potential.
    bool self_dynamics = true;
};

inline void validate_hamiltonian(const Hamiltonian& h) {
    if (!(h.mass > 0.0) || !std::isfinite(h.mass)) throw std::invalid_argument("mass must be positive");
    validate_potential(h.potential);
}

// Owns the per-grid tables and FFT plans; one instance per worker.
class Propagator {
public:
    explicit Propagator(const Hamiltonian& h) : grid_(h.grid), fft_(h.grid), enabled_(h.self_dynamics) {
        validate_hamiltonian(h);
        potential_ = sample_potential(h.potential, grid_);
        kinetic_.assign(grid_.size(), 0.0);
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            double k2 = 0.0;
            for (std::size_t a = 0; a < grid_.dims(); ++a) {
                const double k = grid_.axis(a).wavenumber(grid_.index_along(i, a));
                k2 += k * k;
            }
            kinetic_[i] = k2 / (2.0 * h.mass);
        }
        if (!enabled_) {
            std::fill(potential_.begin(), potential_.end(), 0.0);
            std::fill(kinetic_.begin(), kinetic_.end(), 0.0);
        }
    }

    const Grid& grid() const { return grid_; }
    const Fft& fft() const { return fft_; }
    bool enabled() const { return enabled_; }
    std::span<const double> potential() const { return potential_; }
    std::span<const double> kinetic() const { return kinetic_; }

    // exp(-i V h) in position space.
    void potential_phase(WaveFunction& psi, double h) {
        if (!enabled_ || h == 0.0) return;
        const auto& phase = cached(potential_cache_, potential_, h, 1.0);
        auto amp = psi.amplitudes();
        for (std::size_t i = 0; i < amp.size(); ++i) amp[i] *= phase[i];
    }

    // exp(-i T h) via forward FFT, spectral multiply, backward FFT.
    void kinetic_phase(WaveFunction& psi, double h) {
        if (!enabled_ || h == 0.0) return;
        const auto& phase = cached(kinetic_cache_, kinetic_, h, 1.0 / static_cast<double>(grid_.size()));
        auto amp = psi.amplitudes();
        fft_.forward(amp);
        for (std::size_t i = 0; i < amp.size(); ++i) amp[i] *= phase[i];
        fft_.backward(amp);
    }

    // Strang step exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2).
    void strang(WaveFunction& psi, double dt) {
        check(psi);
        potential_phase(psi, 0.5 * dt);
        kinetic_phase(psi, dt);
        potential_phase(psi, 0.5 * dt);
    }

    // First-order Lie-Trotter step exp(-iT dt) exp(-iV dt).
    void lie(WaveFunction& psi, double dt) {
        check(psi);
        potential_phase(psi, dt);
        kinetic_phase(psi, dt);
    }

    WaveFunction apply(const WaveFunction& psi) const {
        check(psi);
        WaveFunction out = psi;
        if (!enabled_) {
            out *= 0.0;
            return out;
        }
        auto amp = out.amplitudes();
        fft_.forward(amp);
        const double inv_n = 1.0 / static_cast<double>(grid_.size());
        for (std::size_t i = 0; i < amp.size(); ++i) amp[i] *= kinetic_[i] * inv_n;
        fft_.backward(amp);
        for (std::size_t i = 0; i < amp.size(); ++i) amp[i] += potential_[i] * psi[i];
        return out;
    }

    // <psi|H|psi> in internal energy units.
    double energy(const WaveFunction& psi) const { return inner_product(psi, apply(psi)).real(); }

private:
    using Table = std::vector<std::pair<double, ComplexField>>;

    void check(const WaveFunction& psi) const {
        if (!(psi.grid() == grid_)) throw GridMismatch();
    }

    static const ComplexField& cached(Table& table, const std::vector<double>& energies, double h, double scale) {
        for (const auto& [key, phase] : table)
            if (key == h) return phase;
        if (table.size() >= 6) table.erase(table.begin());
        ComplexField phase(energies.size());
        for (std::size_t i = 0; i < phase.size(); ++i) phase[i] = std::polar(scale, -energies[i] * h);
        table.emplace_back(h, std::move(phase));
        return table.back().second;
    }

    Grid grid_;
    Fft fft_;
    bool enabled_;
    std::vector<double> potential_;
    std::vector<double> kinetic_;
    Table potential_cache_;
    Table kinetic_cache_;
};

inline WaveFunction apply_hamiltonian(const Hamiltonian& h, const WaveFunction& psi) {
    if (!(psi.grid() == h.grid)) throw GridMismatch();
    return Propagator(h).apply(psi);
}

inline WaveFunction unitary_step(const Hamiltonian& h, WaveFunction psi, double dt) {
    if (!(psi.grid() == h.grid)) throw GridMismatch();
    Propagator(h).strang(psi, dt);
    if (!psi.all_finite()) throw NumericalFailure("non-finite amplitude after unitary step");
    return psi;
}

// Kinetic energy density route for <H>: sum |k|^2/2m |phi_k|^2 plus the
// potential quadrature. Independent of apply() apart from the FFT itself.
inline double energy_by_densities(const Hamiltonian& h, const WaveFunction& psi) {
    Propagator prop(h);
    WaveFunction phi = psi;
    prop.fft().forward(phi.amplitudes());
    double kin = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) kin += prop.kinetic()[i] * std::norm(phi[i]);
    kin *= psi.grid().cell_volume() / static_cast<double>(psi.size());
    double pot = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) pot += prop.potential()[i] * std::norm(psi[i]);
    pot *= psi.grid().cell_volume();
    return kin + pot;
}

}  // namespace qmon
