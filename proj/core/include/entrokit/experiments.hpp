#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "entrokit/models.hpp"
#include "entrokit/stability.hpp"
#include "entrokit/type_coder.hpp"

namespace entrokit {

/// -(1/(n-m)) sum over transitions of log2 Qhat(x | ctx), Qhat from the
/// sequence's own counts. Throws TooShort unless n > m.
double empirical_entropy(const SymbolSequence& seq, std::size_t m);

/// log2 P(x_{1:n}) under the model, initial law included. -inf when some
/// transition has probability 0.
double log2_probability(const MarkovModel& model, const SymbolSequence& seq);

/// A reference distribution for KS: F(x) and its left limit F(x-).
struct ReferenceCdf {
    std::function<double(double)> cdf;
    std::function<double(double)> left_limit;  // empty for continuous F
};

ReferenceCdf normal_reference(double mean, double sigma);

/// Step CDF of a sample, with left limits.
class EmpiricalCdf {
public:
    explicit EmpiricalCdf(std::vector<double> samples);
    double operator()(double x) const;
    double left_limit(double x) const;
    ReferenceCdf reference() const;

private:
    std::vector<double> sorted_;
};

/// sup_x |F_n(x) - F(x)|, exact over the jump points. Throws Empty.
double ks_statistic(std::span<const double> samples, const ReferenceCdf& reference);

struct Interval {
    double lower = 0.0;
    double upper = 0.0;
};

inline constexpr double kZ95 = 1.959963984540054;

Interval wilson_interval(std::size_t successes, std::size_t trials, double z = kZ95);

double median(std::vector<double> values);

struct ExperimentSample {
    std::size_t n = 0;
    std::size_t replicate = 0;
    std::size_t codelength = 0;
    double loglik = 0.0;  // -log2 P(x), bits
    double deviation = 0.0;
};

struct CltParams {
    std::vector<std::size_t> n_grid{1024, 4096, 16384};
    std::size_t reps = 1000;
    std::uint64_t seed = 1;
    bool schedule = false;  // m_n schedule instead of the model order
    double epsilon = 0.1;
};

struct CltRow {
    std::size_t n = 0;
    std::size_t order = 0;
    double ks = 0.0;            // D - median(D) against Normal(0, sigma^2)
    double mean = 0.0;
    double std = 0.0;
    double median = 0.0;
    double offset_pred = 0.0;   // C1(n) / sqrt(n)
    double header_offset = 0.0; // codec header bits / sqrt(n)
    std::size_t lower_events = 0;
};

struct CltReport {
    std::string model_id;
    double entropy = 0.0;
    double sigma2 = 0.0;
    std::size_t reps = 0;
    std::vector<CltRow> rows;
    std::vector<ExperimentSample> samples;  // D = sqrt(n)(codelength/n - H)
};

CltReport run_clt(const MarkovModel& model, const CltParams& params);

struct ConcentrationParams {
    std::size_t n = 4096;
    std::vector<double> t_grid{0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1.0};
    std::size_t reps = 1000;
    std::uint64_t seed = 1;
    double eta = kDefaultEta;
    std::size_t k_start = 0;
    double tol = 1e-14;
};

struct TailRow {
    double t = 0.0;
    std::size_t exceed = 0;
    double tail = 0.0;
    Interval wilson;
    // NaN where t is at or below the bound's threshold.
    double bound1_thm = 0.0;
    double bound1_proof = 0.0;
    double bound2_thm = 0.0;
    double bound2_proof = 0.0;
    std::string status;  // "ok", "vacuous", "not applicable", "violation"
};

struct TailReport {
    std::string model_id;
    std::size_t n = 0;
    std::size_t reps = 0;
    double entropy = 0.0;
    double gamma_n = 0.0;
    double gamma_prime = 0.0;
    ConcentrationConstants constants;
    std::vector<TailRow> rows;
    std::vector<ExperimentSample> samples;  // deviation = codelength/n - H
    std::size_t lower_events = 0;
    bool violation = false;
};

TailReport run_concentration(const MarkovModel& model, const ConcentrationParams& params);

struct Example1Params {
    double epsilon = 0.1;
    std::vector<std::size_t> n_grid{1024, 4096, 16384, 65536};
    std::size_t reps = 200;
    std::uint64_t seed = 1;
    std::uint64_t tail_cap = BlockwiseModel::kDefaultTailCap;
    bool control = true;
};

struct ScalingRow {
    std::size_t n = 0;
    std::size_t order = 0;
    double s = 0.0;         // median |codelength/n - 1/2|, or |. - H| for the control
    double scaled = 0.0;    // sqrt(n) s
};

struct Example1Report {
    double epsilon = 0.1;
    std::uint64_t tail_cap = 0;
    double truncated_mass = 0.0;
    std::uint64_t tail_cap_hits = 0;  // redrawn block lengths, all replicates
    std::size_t reps = 0;
    std::vector<ScalingRow> rows;
    std::vector<ScalingRow> control;
    double slope = 0.0;          // least squares of log s(n) on log n
    double control_slope = 0.0;
    std::vector<ExperimentSample> samples;          // deviation = codelength/n - 1/2
    std::vector<ExperimentSample> control_samples;  // deviation = codelength/n - 1
};

Example1Report run_example1(const Example1Params& params);

/// Slope of log y against log x by least squares.
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace entrokit
