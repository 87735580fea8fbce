#include "entrokit/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include "entrokit/errors.hpp"
#include "entrokit/markov_chain.hpp"
#include "entrokit/parallel.hpp"
#include "entrokit/rng.hpp"

namespace entrokit {

namespace {

const std::vector<double>& irreducible_law(const MarkovModel& model) {
    if (!model.irreducible()) fail(ErrorKind::NonErgodic, "context chain is reducible");
    return *model.unique_stationary_law();
}

constexpr std::size_t kMaxLags = 10'000;
constexpr std::size_t kRatioWindow = 20;

// Geometric decay ratio of the |cov_k| history, from the maxima of the first
// and last fifths of the trailing window.
double fitted_ratio(const std::deque<double>& history) {
    if (history.size() < 2) return 0.0;
    const std::size_t span = history.size();
    const std::size_t part = std::max<std::size_t>(1, span / 5);
    const double early = *std::max_element(history.begin(), history.begin() + static_cast<std::ptrdiff_t>(part));
    const double late = *std::max_element(history.end() - static_cast<std::ptrdiff_t>(part), history.end());
    if (early == 0.0) return 0.0;
    return std::pow(late / early, 1.0 / static_cast<double>(span - part));
}

}  // namespace

std::vector<double> symbol_marginal(const MarkovModel& model) {
    const auto& pi = irreducible_law(model);
    std::vector<double> out(model.alphabet_size(), 0.0);
    for (std::size_t c = 0; c < pi.size(); ++c) {
        for (std::size_t x = 0; x < out.size(); ++x) out[x] += pi[c] * model.prob(c, static_cast<Symbol>(x));
    }
    return out;
}

double entropy_rate(const MarkovModel& model) {
    const auto& pi = irreducible_law(model);
    double h = 0.0;
    for (std::size_t c = 0; c < pi.size(); ++c) {
        for (double p : model.row(c)) {
            if (p > 0.0) h -= pi[c] * p * std::log2(p);
        }
    }
    return std::clamp(h, 0.0, std::log2(static_cast<double>(model.alphabet_size())));
}

double marginal_entropy(const MarkovModel& model) {
    double h = 0.0;
    for (double p : symbol_marginal(model)) {
        if (p > 0.0) h -= p * std::log2(p);
    }
    return std::max(0.0, h);
}

VarianceReport sigma_squared(const MarkovModel& model, double tol) {
    if (!(tol > 0.0)) fail(ErrorKind::Validation, "tol must be positive");
    const auto pi = stationary_distribution(model);
    const auto& ctx = model.contexts();
    const std::size_t K = ctx.count();
    const std::size_t l = model.alphabet_size();

    double mu = 0.0;
    for (std::size_t c = 0; c < K; ++c) {
        for (std::size_t x = 0; x < l; ++x) {
            const double p = model.prob(c, static_cast<Symbol>(x));
            if (p > 0.0) mu += pi[c] * p * std::log2(p);
        }
    }
    // Centered g, the weights pi(s) P(x|s) gbar(s, x), and h = E[gbar | s].
    std::vector<double> gbar(K * l, 0.0);
    std::vector<double> weight(K * l, 0.0);
    std::vector<double> w(K, 0.0);
    double var = 0.0;
    double scale = 0.0;
    for (std::size_t c = 0; c < K; ++c) {
        for (std::size_t x = 0; x < l; ++x) {
            const double p = model.prob(c, static_cast<Symbol>(x));
            if (p <= 0.0) continue;
            scale = std::max(scale, std::abs(std::log2(p)));
            gbar[c * l + x] = std::log2(p) - mu;
            weight[c * l + x] = pi[c] * p * gbar[c * l + x];
            var += pi[c] * p * gbar[c * l + x] * gbar[c * l + x];
            w[c] += p * gbar[c * l + x];
        }
    }

    VarianceReport report;
    // Rounding in gbar is relative to |log2 p|, not to var, which may itself be pure rounding.
    const double noise_floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max({var, scale * scale, 1e-300});
    std::deque<double> history;
    std::vector<double> next(K);
    double sum = 0.0;
    std::size_t small_run = 0;
    for (std::size_t k = 1;; ++k) {
        if (k > kMaxLags) fail(ErrorKind::NoDecay, "covariance series not certified after 10^4 lags");
        double cov = 0.0;
        for (std::size_t c = 0; c < K; ++c) {
            for (std::size_t x = 0; x < l; ++x) {
                if (weight[c * l + x] != 0.0) cov += weight[c * l + x] * w[ctx.shift(c, static_cast<Symbol>(x))];
            }
        }
        sum += cov;
        history.push_back(std::abs(cov));
        if (history.size() > kRatioWindow) history.pop_front();
        small_run = std::abs(cov) < tol ? small_run + 1 : 0;
        if (small_run >= 3) {
            const double ratio = fitted_ratio(history);
            const double recent = *std::max_element(history.end() - 3, history.end());
            const bool at_floor = *std::max_element(history.begin(), history.end()) <= noise_floor;
            if (ratio < 1.0 || at_floor) {
                report.terms = k;
                report.last_term = std::abs(cov);
                report.decay_ratio = ratio < 1.0 ? ratio : 0.0;
                report.tail_bound = ratio < 1.0 ? 2.0 * recent * ratio / (1.0 - ratio) : 0.0;
                break;
            }
        }
        for (std::size_t c = 0; c < K; ++c) {
            double acc = 0.0;
            for (std::size_t x = 0; x < l; ++x) {
                const double p = model.prob(c, static_cast<Symbol>(x));
                if (p > 0.0) acc += p * w[ctx.shift(c, static_cast<Symbol>(x))];
            }
            next[c] = acc;
        }
        w.swap(next);
    }
    report.sigma2 = std::max(0.0, var + 2.0 * sum);
    return report;
}

McEstimate long_run_variance_mc(const MarkovModel& model, std::size_t paths, std::size_t length,
                                std::uint64_t seed) {
    if (paths < 2 || length < 1) fail(ErrorKind::Validation, "need at least 2 paths of positive length");
    const auto pi = stationary_distribution(model);
    const auto& ctx = model.contexts();
    const std::size_t K = ctx.count();
    const std::size_t l = model.alphabet_size();

    double mu = 0.0;
    std::vector<double> cumulative(K * l);
    std::vector<double> gbar(K * l, 0.0);
    for (std::size_t c = 0; c < K; ++c) {
        double acc = 0.0;
        std::size_t last = 0;
        for (std::size_t x = 0; x < l; ++x) {
            const double p = model.prob(c, static_cast<Symbol>(x));
            acc += p;
            cumulative[c * l + x] = acc;
            if (p > 0.0) {
                mu += pi[c] * p * std::log2(p);
                last = x;
            }
        }
        cumulative[c * l + last] = std::numeric_limits<double>::infinity();
    }
    for (std::size_t i = 0; i < K * l; ++i) {
        const double p = model.transitions()[i];
        if (p > 0.0) gbar[i] = std::log2(p) - mu;
    }
    std::vector<double> pi_cumulative(K);
    double acc = 0.0;
    std::size_t last_context = 0;
    for (std::size_t c = 0; c < K; ++c) {
        pi_cumulative[c] = (acc += pi[c]);
        if (pi[c] > 0.0) last_context = c;
    }
    pi_cumulative[last_context] = std::numeric_limits<double>::infinity();

    std::vector<double> sums(paths);
    parallel_for(paths, [&](std::size_t i) {
        Rng rng(derive_seed(seed, i));
        const double u0 = rng.uniform();
        std::size_t c = static_cast<std::size_t>(
            std::upper_bound(pi_cumulative.begin(), pi_cumulative.end(), u0) - pi_cumulative.begin());
        double s = 0.0;
        for (std::size_t t = 0; t < length; ++t) {
            const double u = rng.uniform();
            const double* row = &cumulative[c * l];
            std::size_t x = 0;
            while (u >= row[x]) ++x;
            s += gbar[c * l + x];
            c = ctx.shift(c, static_cast<Symbol>(x));
        }
        sums[i] = s;
    });

    const auto R = static_cast<double>(paths);
    double mean = 0.0;
    for (double s : sums) mean += s;
    mean /= R;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double s : sums) {
        const double d = (s - mean) * (s - mean);
        m2 += d;
        m4 += d * d;
    }
    const double var = m2 / (R - 1.0);
    const double central4 = m4 / R;
    const double pop_var = m2 / R;
    const double var_of_var = std::max(0.0, (central4 - pop_var * pop_var * (R - 3.0) / (R - 1.0)) / R);
    const auto L = static_cast<double>(length);
    return {var / L, std::sqrt(var_of_var) / L};
}

}  // namespace entrokit
