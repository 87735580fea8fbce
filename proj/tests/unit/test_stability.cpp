#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "entrokit/errors.hpp"
#include "entrokit/rng.hpp"
#include "entrokit/stability.hpp"
#include "oracles.hpp"

using namespace entrokit;

namespace {

MarkovModel binary(std::size_t m, std::vector<double> rows) {
    return MarkovModel::create(Alphabet::indices(2), m, std::move(rows));
}

const MarkovModel& symmetric() {
    static const auto model = binary(1, {0.9, 0.1, 0.1, 0.9});
    return model;
}

MarkovModel random_positive(Rng& rng, std::size_t l, std::size_t m) {
    const std::size_t K = static_cast<std::size_t>(std::pow(l, m));
    std::vector<double> rows;
    for (std::size_t c = 0; c < K; ++c) {
        std::vector<double> r(l);
        for (auto& v : r) v = 0.01 + rng.uniform();
        const double s = std::accumulate(r.begin(), r.end(), 0.0);
        for (auto v : r) rows.push_back(v / s);
    }
    return MarkovModel::create(Alphabet::indices(l), m, rows);
}

// Exact M by direct enumeration: every sequence of length L and every
// single-symbol substitution, probabilities from whole-path products.
double brute_m(const MarkovModel& model, std::size_t L) {
    const std::size_t l = model.alphabet_size();
    const auto pi = oracle::stationary_power(model);
    double best = 0.0;
    for (const auto& x : oracle::all_sequences(l, L)) {
        const double px = std::log2(oracle::path_probability(model, pi, x));
        for (std::size_t i = 0; i < L; ++i) {
            auto y = x;
            for (Symbol s = 0; s < l; ++s) {
                if (s == x[i]) continue;
                y[i] = s;
                best = std::max(best, std::abs(px - std::log2(oracle::path_probability(model, pi, y))));
            }
        }
    }
    return best;
}

}  // namespace

TEST(Stability, ClosedForms) {
    const auto bern = binary(0, {0.75, 0.25});
    EXPECT_NEAR(m_stability(bern).exact, std::log2(3.0), 1e-12);
    const auto s = m_stability(symmetric());
    EXPECT_NEAR(s.exact, 2 * std::log2(9.0), 1e-9);
    EXPECT_NEAR(s.bound, 2 * std::log2(10.0), 1e-9);
    EXPECT_NEAR(s.rho, 0.1, 1e-15);
}

TEST(Stability, ZeroRowNotStable) {
    const auto z = MarkovModel::create(Alphabet::indices(2), 1, {0.5, 0.5, 1.0, 0.0});
    EXPECT_THROW(m_stability(z), Error);
    try {
        m_stability(z);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::NotStable);
    }
}

TEST(Stability, BoundHoldsOnRandomModels) {
    Rng rng(30);
    for (int trial = 0; trial < 300; ++trial) {
        const auto model = random_positive(rng, 2 + rng.below(2), rng.below(3));
        const auto s = m_stability(model);
        ASSERT_LE(s.exact, s.bound + 1e-9);
    }
}

TEST(Stability, MatchesBruteForce) {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = rng.below(3);
        const auto model = random_positive(rng, 2, m);
        EXPECT_NEAR(m_stability(model).exact, brute_m(model, 2 * m + 3), 1e-9);
    }
}

TEST(Stability, DoublingLengthNeverIncreases) {
    Rng rng(32);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = rng.below(2);
        const auto model = random_positive(rng, 2, m);
        const std::size_t L = 2 * m + 3;
        EXPECT_LE(m_stability(model, 2 * L).exact, m_stability(model, L).exact + 1e-9);
    }
}

TEST(Delta, SymmetricChain) {
    const auto d0 = delta_coefficients(symmetric(), 0);
    EXPECT_NEAR(d0.sum_phi, 2.5, 1e-12);
    EXPECT_NEAR(d0.delta_thm, 61.0, 1e-10);
    EXPECT_NEAR(d0.delta_proof, 11.0, 1e-10);
    const auto d1 = delta_coefficients(symmetric(), 1);
    EXPECT_NEAR(d1.sum_phi, 2.0, 1e-12);
    EXPECT_LE(d0.tail_bound, 1e-14);
}

TEST(Delta, IidIsOne) {
    const auto fair = binary(0, {0.5, 0.5});
    EXPECT_EQ(delta_coefficients(fair, 0).delta_thm, 1.0);
    EXPECT_EQ(phi_prime_matrix(fair, 100).delta_n, 1.0);
}

TEST(Delta, BadArguments) {
    EXPECT_THROW(delta_coefficients(symmetric(), 2), Error);
    EXPECT_THROW(delta_coefficients(symmetric(), 0, 0.0), Error);
    EXPECT_THROW(phi_prime_matrix(symmetric(), 10001), Error);
}

TEST(PhiPrime, SymmetricAtFifty) {
    double expect = 1.0;
    for (int k = 1; k <= 49; ++k) expect += std::min(4 * 0.5 * std::pow(0.8, k), 2.0);
    EXPECT_NEAR(phi_prime_matrix(symmetric(), 50).delta_n, expect, 1e-9);
}

TEST(PhiPrime, MonotoneAndBelowProof) {
    const auto d = delta_coefficients(symmetric(), 0);
    double prev = 0.0;
    for (std::size_t n = 1; n <= 400; n += 7) {
        const double v = phi_prime_matrix(symmetric(), n).delta_n;
        EXPECT_GE(v + 1e-12, prev);
        EXPECT_LE(v, d.delta_proof);
        EXPECT_LE(d.delta_proof, d.delta_thm);
        prev = v;
    }
}

TEST(Constants, Invariants) {
    Rng rng(33);
    for (int trial = 0; trial < 10; ++trial) {
        const auto model = random_positive(rng, 2, rng.below(3));
        const auto c = concentration_constants(model);
        EXPECT_LE(c.M, c.M_bound + 1e-9);
        EXPECT_LE(c.delta_proof, c.delta_thm);
        EXPECT_LE(phi_prime_matrix(model, 500).delta_n, c.delta_proof + 1e-12);
        const std::size_t n = 4096;
        const double expect = c1(c, n) / n + static_cast<double>(c.m) / n * c.entropy_rate + std::pow(n, -0.5 - c.eta);
        EXPECT_DOUBLE_EQ(gamma_n(c, n), expect);
    }
    EXPECT_THROW(concentration_constants(symmetric(), 0.5), Error);
    EXPECT_THROW(concentration_constants(symmetric(), 0.0), Error);
}

TEST(Bounds, Gate) {
    const auto c = concentration_constants(symmetric());
    for (auto v : {DeltaVariant::Theorem, DeltaVariant::Proof}) {
        EXPECT_THROW(bound_concentration2(c, 1000, gamma_n(c, 1000), v), Error);
        EXPECT_THROW(bound_concentration1(c, 1000, gamma_prime(c, 1000) * 0.5, v), Error);
    }
}

TEST(Bounds, HandArithmetic) {
    // Symmetric chain, m = 1, n = 10^4, eta = 0.1, t = 1, written out from the
    // codec grammar: C' = 16 + |delta(2)| + |delta(10001)| = 16 + 4 + 20,
    // C1 = C' + log*(1) + l K + m K + l^2 ceil(log2 10000) = 40 + 0 + 2 + 1 + 56.
    const auto c = concentration_constants(symmetric());
    const double n = 1e4;
    const double h = -0.1 * std::log2(0.1) - 0.9 * std::log2(0.9);
    const double C1 = 99.0;
    const double gamma = C1 / n + h / n + std::pow(n, -0.6);
    const double M = 2 * std::log2(9.0);
    for (const double delta : {61.0, 11.0}) {
        const double K1 = 2 * M * M * delta * delta;
        const double expect = 2 * std::exp(-n * (1 - gamma) * (1 - gamma) / K1) + n * 41.0 * std::exp2(-std::pow(n, 0.4));
        const auto v = delta == 61.0 ? DeltaVariant::Theorem : DeltaVariant::Proof;
        EXPECT_NEAR(bound_concentration2(c, 10000, 1.0, v), std::min(expect, 1.0), 1e-12);
    }
    EXPECT_NEAR(gamma_n(c, 10000), gamma, 1e-15);
    // Eq. (1) constants: gamma' = (C1 + m H(X1)) / n, K1' = 2 Delta^2 (C' + log* n + K)^2.
    const double gp = (C1 + 1.0) / n;
    EXPECT_NEAR(gamma_prime(c, 10000), gp, 1e-15);
    const double K1p = 2 * 11.0 * 11.0 * (40.0 + 4.0 + 1.0) * (40.0 + 4.0 + 1.0);
    EXPECT_NEAR(K1_prime(c, 10000, DeltaVariant::Proof), K1p, 1e-6);
    EXPECT_NEAR(bound_concentration1(c, 10000, 1.0, DeltaVariant::Proof),
                std::min(1.0, 2 * std::exp(-n * (1 - gp) * (1 - gp) / K1p)), 1e-12);
}

TEST(Bounds, MonotoneInTAndN) {
    const auto c = concentration_constants(symmetric());
    for (auto v : {DeltaVariant::Theorem, DeltaVariant::Proof}) {
        double prev2 = 2.0, prev1 = 2.0;
        for (double t = 0.05; t < 50; t *= 1.3) {
            if (t > gamma_n(c, 4096)) {
                const double b = bound_concentration2(c, 4096, t, v);
                EXPECT_LE(b, prev2);
                EXPECT_GE(b, 0.0);
                prev2 = b;
            }
            if (t > gamma_prime(c, 4096)) {
                const double b = bound_concentration1(c, 4096, t, v);
                EXPECT_LE(b, prev1);
                prev1 = b;
            }
        }
        // Gaussian term at fixed t above every gamma on the grid.
        const double t = 2.0;
        double prev = 3.0;
        for (std::size_t n = 1024; n <= (std::size_t{1} << 20); n *= 2) {
            const double g = gamma_n(c, n);
            const double gauss = 2 * std::exp(-static_cast<double>(n) * (t - g) * (t - g) / c.K1(v));
            EXPECT_LE(gauss, prev);
            prev = gauss;
        }
    }
}

TEST(Bounds, LargeTFloor) {
    const auto c = concentration_constants(symmetric());
    const std::size_t n = 1u << 20;
    const double N = static_cast<double>(n);
    const double floor_term = N * zeta(c, n) * std::exp2(-std::pow(N, 0.4));
    EXPECT_NEAR(bound_concentration2(c, n, 1e6, DeltaVariant::Theorem), floor_term, 1e-15);
    EXPECT_GT(floor_term, 0.0);
}
