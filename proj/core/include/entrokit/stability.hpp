#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "entrokit/models.hpp"

namespace entrokit {

/// min over contexts and symbols of P(x | context).
double min_conditional(const MarkovModel& model);

struct StabilityResult {
    double exact = 0.0;  // max |log2 P(x) - log2 P(x')| over single substitutions
    double bound = 0.0;  // (m + 1) log2(1 / rho)
    double rho = 0.0;
    std::size_t length = 0;
};

/// Brute force over all sequences of the given length (default 2m + 3), with
/// P(x) including the stationary law of the first m symbols. Throws NotStable
/// when rho = 0, TooLarge past 2^22 sequences.
StabilityResult m_stability(const MarkovModel& model, std::size_t length = 0);

struct DeltaCoefficients {
    std::size_t k_start = 0;
    double sum_phi = 0.0;      // sum_{k >= k_start} phi(k), tail included
    double delta_thm = 1.0;    // 1 + 24 sum
    double delta_proof = 1.0;  // 1 + 4 sum
    std::size_t terms = 0;
    double tail_bound = 0.0;
};

/// Throws NoDecay when the geometric tail is not certified below tol.
DeltaCoefficients delta_coefficients(const MarkovModel& model, std::size_t k_start = 0, double tol = 1e-14);

struct PhiPrimeResult {
    std::vector<double> row_sums;  // 1 + sum_{j > i} min(4 phi(j - i), 2), i = 1..n
    double delta_n = 1.0;
};

/// Throws GuardExceeded for n > 10^4.
PhiPrimeResult phi_prime_matrix(const MarkovModel& model, std::size_t n);

enum class DeltaVariant { Theorem, Proof };

struct ConcentrationConstants {
    std::string model_id;
    std::size_t l = 2;
    std::size_t m = 0;
    double M = 0.0;
    double M_bound = 0.0;
    double rho = 0.0;
    std::size_t k_start = 0;
    double sum_phi_from0 = 0.0;
    double sum_phi_from1 = 0.0;
    double delta_thm = 1.0;
    double delta_proof = 1.0;
    double eta = 0.1;
    double entropy_rate = 0.0;      // H(X_1 | X_{0:-m+1})
    double marginal_entropy = 0.0;  // H(X_1)
    std::size_t k_sym = 0;

    double delta(DeltaVariant v) const { return v == DeltaVariant::Theorem ? delta_thm : delta_proof; }
    double K1(DeltaVariant v) const { return 2.0 * M * M * delta(v) * delta(v); }
};

inline constexpr double kDefaultEta = 0.1;

ConcentrationConstants concentration_constants(const MarkovModel& model, double eta = kDefaultEta,
                                               std::size_t k_start = 0, double tol = 1e-14);

/// Codec header arithmetic at the constants' order m.
double c1(const ConcentrationConstants& c, std::size_t n);
double c_prime(const ConcentrationConstants& c, std::size_t n);
double zeta(const ConcentrationConstants& c, std::size_t n);
/// C1(n)/n + (m/n) H + n^(-1/2 - eta).
double gamma_n(const ConcentrationConstants& c, std::size_t n);
/// (C1(n) + m H(X_1)) / n.
double gamma_prime(const ConcentrationConstants& c, std::size_t n);
/// 2 Delta^2 (C'(n) + log*(n) + K_sym)^2.
double K1_prime(const ConcentrationConstants& c, std::size_t n, DeltaVariant v);

/// 2 exp(-n (t - gamma_n)^2 / K1) + n zeta 2^(-n^(1/2 - eta)), clamped to
/// [0, 1]. Throws BelowThreshold when t <= gamma_n.
double bound_concentration2(const ConcentrationConstants& c, std::size_t n, double t, DeltaVariant v);
/// 2 exp(-n (t - gamma'(n))^2 / K1'(n)), clamped. Throws BelowThreshold.
double bound_concentration1(const ConcentrationConstants& c, std::size_t n, double t, DeltaVariant v);

}  // namespace entrokit
