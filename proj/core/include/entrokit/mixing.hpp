#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "entrokit/models.hpp"

namespace entrokit {

/// phi(0..max_gap) with phi(n) = max_s TV(delta_s P^n, pi) on the context
/// chain. Conditioning on any past event reduces to conditioning on the
/// current context (Markov property), and the future from X_{j+n} is a
/// randomized function of the context at j+n, so this bounds the definitional
/// phi(n) from above and equals it for order 1.
std::vector<double> phi_profile(const MarkovModel& model, std::size_t max_gap);
double phi_mixing(const MarkovModel& model, std::size_t n);

/// Largest depth whose cylinder count l^d may be enumerated.
inline constexpr std::size_t kMaxCylinders = 12;

/// sup over contexts s and subsets B of depth-d future cylinders starting at
/// X_{j+n} of |P(B | S_j = s) - P(B)|. Throws TooLarge when l^d > 12.
double phi_bruteforce(const MarkovModel& model, std::size_t n, std::size_t depth);

struct AlphaBounds {
    double lower = 0.0;
    double upper = 0.0;
};

/// lower: max over depth-d future events B of sum_s pi(s) (P(B|s) - P(B))_+,
/// which is |P(A and B) - P(A)P(B)| at the optimal context event A.
/// upper: phi(n).
AlphaBounds alpha_mixing_bounds(const MarkovModel& model, std::size_t n, std::size_t depth);

/// Law of the depth-d block X_{j+n..j+n+d-1} given S_j = s, indexed base l
/// with the first symbol most significant. Exposed for diagnostics.
std::vector<double> future_block_law(const MarkovModel& model, std::size_t context, std::size_t n,
                                     std::size_t depth);
std::vector<double> stationary_block_law(const MarkovModel& model, std::size_t depth);

struct NuDeltaEstimate {
    double value = 0.0;
    double std_error = 0.0;
    bool exact = false;
    std::size_t window = 0;          // HMM only
    double value_double_window = 0.0;
    double std_error_double_window = 0.0;
    bool window_converged = true;    // doubling W moved the estimate by < 1 stderr
};

/// Exact for Markov models: 0 for n >= m, enumeration over contexts otherwise.
NuDeltaEstimate nu_delta(const MarkovModel& model, std::size_t n, double delta);

/// Monte Carlo over R stationary paths; the infinite past is replaced by the
/// last W observations through the forward filter. Throws BadDelta,
/// WindowTooShort.
NuDeltaEstimate nu_delta(const HmmModel& model, std::size_t n, double delta, std::size_t window,
                         std::size_t reps, std::uint64_t seed);

/// Predictive P(next symbol | observations) from the forward filter started
/// at the hidden stationary law.
std::vector<double> hmm_predictive(const HmmModel& model, std::span<const Symbol> observations);

struct DecayFit {
    double geometric_ratio = 0.0;
    double geometric_residual = 0.0;
    double power_exponent = 0.0;
    double power_residual = 0.0;
    std::size_t points = 0;
};

/// Least-squares fits of log v(n) against n and log n over the positive
/// entries with index >= 1.
DecayFit fit_decay(std::span<const double> values);

struct MixingProfile {
    std::string model_id;
    std::vector<double> phi;
    std::vector<double> alpha_lower;
    std::vector<double> alpha_upper;
    std::size_t depth = 1;
    std::vector<double> nu_delta;
    double delta = 1.0;
    DecayFit phi_fit;
};

MixingProfile mixing_profile(const MarkovModel& model, std::size_t max_gap, std::size_t depth, double delta);

struct ConditionsRow {
    double delta = 0.0;
    double exponent = 0.0;       // beta (2 + delta)(1 + delta) / delta^2
    double log2_K = 0.0;         // fitted constant, log2 of max_n phi(n) n^exponent
    bool alpha_ok = false;
    bool nu_ok = false;
    std::string note;
};

struct ConditionsReport {
    std::string status;  // "satisfied", "inconclusive", "not applicable"
    std::string note;
    double beta = 0.0;
    std::size_t horizon = 0;
    std::vector<ConditionsRow> rows;
};

ConditionsReport check_theorem2_conditions(const MarkovModel& model, std::span<const double> deltas, double beta,
                                           std::size_t horizon);
/// Report for model kinds without an exact mixing computation.
ConditionsReport conditions_not_applicable(const std::string& kind);

}  // namespace entrokit
