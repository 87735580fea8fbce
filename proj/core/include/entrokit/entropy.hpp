#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "entrokit/models.hpp"

namespace entrokit {

/// H(X_1 | X_{0:-m+1}) in bits. Requires an irreducible context chain; a
/// periodic one is still ergodic in the time-average sense.
double entropy_rate(const MarkovModel& model);

/// Entropy of the one-symbol stationary marginal, H(X_1).
double marginal_entropy(const MarkovModel& model);

/// Stationary probability of each symbol.
std::vector<double> symbol_marginal(const MarkovModel& model);

struct VarianceReport {
    double sigma2 = 0.0;          // bits^2
    std::size_t terms = 0;        // covariance lags summed
    double last_term = 0.0;       // |cov| at the final lag
    double decay_ratio = 0.0;     // fitted geometric ratio of |cov_k|
    double tail_bound = 0.0;      // certified bound on the omitted tail
    std::optional<double> mc_estimate;
    std::optional<double> mc_std_error;
};

inline constexpr double kDefaultSigmaTol = 1e-14;

/// var(g) + 2 sum_{k>=1} cov(g_0, g_k) for g = log2 P(X_t | context). Throws
/// NonErgodic, or NoDecay when the series is not certified within 10^4 lags.
VarianceReport sigma_squared(const MarkovModel& model, double tol = kDefaultSigmaTol);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Long-run variance var(S_L)/L of the log-likelihood sum over independent
/// stationary paths of length L.
McEstimate long_run_variance_mc(const MarkovModel& model, std::size_t paths, std::size_t length,
                                std::uint64_t seed);

}  // namespace entrokit
