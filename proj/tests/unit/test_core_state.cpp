// Wave functions, norms, moments and fidelity.

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qmon/scenario.hpp"
#include "qmon/wave_function.hpp"

using namespace qmon;

namespace {

Grid line_grid() { return Grid::line(-200.0, 200.0, 1024); }

// Real superposition of two equal packets at +-d, normalized.
WaveFunction two_packets(const Grid& g, double d, double w) {
    WaveFunction a = make_gaussian_packet(g, {{-d}, w, {}});
    const WaveFunction b = make_gaussian_packet(g, {{d}, w, {}});
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return normalize(std::move(a));
}

WaveFunction random_state(const Grid& g, std::mt19937_64& gen) {
    std::normal_distribution<double> n;
    WaveFunction psi(g);
    for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = {n(gen), n(gen)};
    return normalize(std::move(psi));
}

}  // namespace

TEST(GaussianPacket, MexicanHatTrueStateCenterAndWidth) {
    const Grid g = Grid::square(-150.0, 150.0, 256);
    const auto psi = make_gaussian_packet(g, {{-55.0, -14.8}, 10.0, {}});
    const Vec m = expectation_position(psi);
    const Vec v = position_variance(psi);
    EXPECT_NEAR(m[0], -55.0, 0.5 * g.axis(0).spacing());
    EXPECT_NEAR(m[1], -14.8, 0.5 * g.axis(1).spacing());
    EXPECT_NEAR(std::sqrt(v[0]), 10.0, 0.2);
    EXPECT_NEAR(std::sqrt(v[1]), 10.0, 0.2);
}

TEST(GaussianPacket, NormIsOne) {
    for (double w : {3.0, 10.0, 40.0}) {
        const auto psi = make_gaussian_packet(line_grid(), {{12.0}, w, {}});
        EXPECT_NEAR(norm(psi), 1.0, 1e-9) << "width " << w;
    }
}

TEST(GaussianPacket, VarianceMatchesQuadrature) {
    const Grid g = line_grid();
    const auto psi = make_gaussian_packet(g, {{0.0}, 10.0, {}});
    // oracle: second moment of the analytic density, integrated independently
    const double var = oracle::simpson([](double x) { return x * x * oracle::normal_pdf(x, 0.0, 10.0); }, -200, 200);
    EXPECT_NEAR(var, 100.0, 1e-6);
    EXPECT_NEAR(position_variance(psi)[0], var, 0.02 * var);
}

TEST(GaussianPacket, RejectsBadSpecs) {
    const Grid g = line_grid();
    EXPECT_THROW(make_gaussian_packet(g, {{0.0, 0.0}, 10.0, {}}), std::invalid_argument);
    EXPECT_THROW(make_gaussian_packet(g, {{500.0}, 10.0, {}}), std::invalid_argument);
    EXPECT_THROW(make_gaussian_packet(g, {{0.0}, 0.1, {}}), std::invalid_argument);
    EXPECT_THROW(make_gaussian_packet(g, {{0.0}, -1.0, {}}), std::invalid_argument);
}

TEST(Norm, ScalesLinearly) {
    auto psi = make_gaussian_packet(line_grid(), {{0.0}, 10.0, {}});
    psi *= 2.0;
    EXPECT_NEAR(norm(psi), 2.0, 1e-9);
}

TEST(Norm, ZeroField) {
    const WaveFunction zero(line_grid());
    EXPECT_EQ(norm(zero), 0.0);
    EXPECT_THROW(normalize(zero), ZeroPosteriorNorm);
}

TEST(Normalize, LeavesNormalizedStateAlone) {
    const auto psi = make_gaussian_packet(line_grid(), {{5.0}, 10.0, {}});
    const auto again = normalize(psi);
    for (std::size_t i = 0; i < psi.size(); ++i) EXPECT_LT(std::abs(again[i] - psi[i]), 1e-12);
}

TEST(Normalize, UndoesScaling) {
    const auto psi = make_gaussian_packet(line_grid(), {{5.0}, 10.0, {}});
    auto half = psi;
    half *= 0.5;
    const auto back = normalize(half);
    for (std::size_t i = 0; i < psi.size(); ++i) EXPECT_LT(std::abs(back[i] - psi[i]), 1e-12);
}

TEST(Normalize, RestoresNormAfterGaussianWindow) {
    const Grid g = line_grid();
    auto psi = make_gaussian_packet(g, {{0.0}, 10.0, {}});
    // unnormalized collapse by sqrt(G_sigma(q - qbar)), written out directly
    const double sigma = 15.0, qbar = 7.0;
    for (std::size_t i = 0; i < psi.size(); ++i)
        psi[i] *= std::sqrt(oracle::normal_pdf(g.coordinate(i, 0), qbar, sigma));
    EXPECT_LT(norm(psi), 0.5);
    normalize_in_place(psi);
    double s = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) s += std::norm(psi[i]);
    EXPECT_NEAR(s * g.cell_volume(), 1.0, 1e-12);
}

TEST(ExpectationPosition, PacketCenter) {
    const Grid g = line_grid();
    for (double c : {-73.3, 0.0, 41.7}) {
        const auto psi = make_gaussian_packet(g, {{c}, 10.0, {}});
        EXPECT_NEAR(expectation_position(psi)[0], c, 0.5 * g.axis(0).spacing());
    }
}

TEST(ExpectationPosition, SymmetricSuperposition) {
    const Grid g = line_grid();
    EXPECT_NEAR(expectation_position(two_packets(g, 60.0, 10.0))[0], 0.0, 0.5 * g.axis(0).spacing());
}

TEST(ExpectationPosition, DoubleWellInitialState) {
    const Grid g = Grid::line(-300.0, 300.0, 1024);
    const auto psi = make_gaussian_packet(g, {{-135.0}, 10.0, {}});
    // oracle: first moment of the analytic density
    const double mean = oracle::simpson([](double x) { return x * oracle::normal_pdf(x, -135.0, 10.0); }, -300, 300);
    EXPECT_NEAR(expectation_position(psi)[0], mean, 0.5 * g.axis(0).spacing());
}

TEST(PositionVariance, UnchangedByKick) {
    const auto psi = make_gaussian_packet(line_grid(), {{0.0}, 10.0, {}});
    const double k[] = {0.3};
    EXPECT_NEAR(position_variance(momentum_kick(psi, k))[0], position_variance(psi)[0], 1e-10);
}

TEST(PositionVariance, BimodalDensity) {
    const Grid g = line_grid();
    const double d = 50.0, w = 10.0;
    // well-separated packets: the overlap term is exp(-d^2/(2 w^2)), negligible
    EXPECT_NEAR(position_variance(two_packets(g, d, w))[0], w * w + d * d, 0.02 * (w * w + d * d));
}

TEST(Fidelity, SelfAndGlobalPhase) {
    const auto psi = make_gaussian_packet(line_grid(), {{3.0}, 10.0, {0.1}});
    EXPECT_NEAR(fidelity(psi, psi), 1.0, 1e-9);
    for (double theta : {0.3, 1.7, -2.9}) {
        auto phased = psi;
        phased *= std::polar(1.0, theta);
        EXPECT_NEAR(fidelity(psi, phased), 1.0, 1e-9);
    }
}

TEST(Fidelity, DisplacedGaussians) {
    const Grid g = line_grid();
    const double s = 10.0;
    for (double d : {5.0, 20.0, 35.0}) {
        const auto a = make_gaussian_packet(g, {{-d / 2}, s, {}});
        const auto b = make_gaussian_packet(g, {{d / 2}, s, {}});
        const double analytic = std::exp(-d * d / (8 * s * s));
        // cross-check the analytic overlap by quadrature of the amplitudes
        const double quad = oracle::simpson(
            [&](double x) { return std::sqrt(oracle::normal_pdf(x, -d / 2, s) * oracle::normal_pdf(x, d / 2, s)); },
            -200, 200);
        EXPECT_NEAR(quad, analytic, 1e-8);
        EXPECT_NEAR(fidelity(a, b), analytic, 1e-3) << "d = " << d;
    }
    const auto a = make_gaussian_packet(g, {{-s}, s, {}});
    const auto b = make_gaussian_packet(g, {{s}, s, {}});
    EXPECT_NEAR(fidelity(a, b), 0.6065, 1e-3);
}

TEST(Fidelity, GridMismatch) {
    const auto a = make_gaussian_packet(line_grid(), {{0.0}, 10.0, {}});
    const auto b = make_gaussian_packet(Grid::line(-200.0, 200.0, 512), {{0.0}, 10.0, {}});
    EXPECT_THROW(fidelity(a, b), GridMismatch);
}

TEST(Fidelity, CauchySchwarz) {
    std::mt19937_64 gen(7);
    for (const Grid& g : {Grid::line(-10.0, 10.0, 64), Grid::square(-10.0, 10.0, 16)})
        for (int trial = 0; trial < 200; ++trial)
            EXPECT_LE(fidelity(random_state(g, gen), random_state(g, gen)), 1.0 + 1e-9);
}

TEST(ExpectationMomentum, RealPacketCarriesNone) {
    const auto psi = make_gaussian_packet(line_grid(), {{17.0}, 10.0, {}});
    EXPECT_NEAR(expectation_momentum(psi)[0], 0.0, 1e-6);
}

TEST(ExpectationMomentum, PacketMomentum) {
    const Grid g = Grid::square(-150.0, 150.0, 128);
    const auto psi = make_gaussian_packet(g, {{10.0, -20.0}, 10.0, {0.5, -0.25}});
    const Vec p = expectation_momentum(psi);
    EXPECT_NEAR(p[0], 0.5, 0.005);
    EXPECT_NEAR(p[1], -0.25, 0.0025);
}

TEST(ExpectationMomentum, ShiftedByKick) {
    const auto psi = make_gaussian_packet(line_grid(), {{0.0}, 10.0, {0.2}});
    const double before = expectation_momentum(psi)[0];
    const double k[] = {0.7};
    EXPECT_NEAR(expectation_momentum(momentum_kick(psi, k))[0], before + 0.7, 0.01 * 0.7);
}

TEST(Moments, ConvergedUnderRefinement) {
    const GaussianPacketSpec spec{{13.0}, 8.0, {0.2}};
    const auto coarse = make_gaussian_packet(Grid::line(-100.0, 100.0, 256), spec);
    const auto fine = make_gaussian_packet(Grid::line(-100.0, 100.0, 512), spec);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::abs(b); };
    EXPECT_LT(rel(expectation_position(coarse)[0], expectation_position(fine)[0]), 0.005);
    EXPECT_LT(rel(position_variance(coarse)[0], position_variance(fine)[0]), 0.005);
    EXPECT_LT(rel(expectation_momentum(coarse)[0], expectation_momentum(fine)[0]), 0.005);
}

TEST(BoundaryDensity, DetectsWrapAround) {
    const Grid g = Grid::line(-50.0, 50.0, 256);
    EXPECT_LT(boundary_density(make_gaussian_packet(g, {{0.0}, 5.0, {}})), 1e-8);
    EXPECT_GT(boundary_density(make_gaussian_packet(g, {{45.0}, 5.0, {}})), 1e-8);
}
