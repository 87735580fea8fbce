#include "entrokit/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "entrokit/entropy.hpp"
#include "entrokit/errors.hpp"
#include "entrokit/markov_chain.hpp"
#include "entrokit/mixing.hpp"
#include "entrokit/parallel.hpp"
#include "entrokit/type_coder.hpp"

namespace entrokit {

double min_conditional(const MarkovModel& model) {
    return *std::min_element(model.transitions().begin(), model.transitions().end());
}

StabilityResult m_stability(const MarkovModel& model, std::size_t length) {
    StabilityResult out;
    const std::size_t m = model.order();
    const std::size_t l = model.alphabet_size();
    out.rho = min_conditional(model);
    if (!(out.rho > 0.0)) fail(ErrorKind::NotStable, "a conditional probability is 0, so M is infinite");
    out.bound = static_cast<double>(m + 1) * std::log2(1.0 / out.rho);
    out.length = length == 0 ? 2 * m + 3 : length;
    if (out.length < m) fail(ErrorKind::Validation, "length must be at least the order");
    std::size_t total = 1;
    for (std::size_t i = 0; i < out.length; ++i) {
        total *= l;
        if (total > (std::size_t{1} << 22)) fail(ErrorKind::TooLarge, "l^L exceeds 2^22 sequences");
    }
    const auto pi = stationary_distribution(model);
    const auto& ctx = model.contexts();
    const std::size_t L = out.length;

    // log2 P for every sequence, indexed base l with x_1 most significant.
    std::vector<double> logp(total);
    std::vector<Symbol> x(L);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t v = idx;
        for (std::size_t i = L; i-- > 0;) {
            x[i] = static_cast<Symbol>(v % l);
            v /= l;
        }
        std::size_t c = ctx.index(std::span<const Symbol>(x).first(m));
        double lp = std::log2(pi[c]);
        for (std::size_t i = m; i < L; ++i) {
            lp += std::log2(model.prob(c, x[i]));
            c = ctx.shift(c, x[i]);
        }
        logp[idx] = lp;
    }
    std::vector<double> per_position(L, 0.0);
    parallel_for(L, [&](std::size_t pos) {
        std::size_t weight = 1;
        for (std::size_t i = pos + 1; i < L; ++i) weight *= l;
        double best = 0.0;
        for (std::size_t idx = 0; idx < total; ++idx) {
            const std::size_t digit = idx / weight % l;
            for (std::size_t y = digit + 1; y < l; ++y) {
                best = std::max(best, std::abs(logp[idx] - logp[idx + (y - digit) * weight]));
            }
        }
        per_position[pos] = best;
    });
    out.exact = *std::max_element(per_position.begin(), per_position.end());
    return out;
}

DeltaCoefficients delta_coefficients(const MarkovModel& model, std::size_t k_start, double tol) {
    if (k_start > 1) fail(ErrorKind::Validation, "k_start must be 0 or 1");
    if (!(tol > 0.0)) fail(ErrorKind::Validation, "tol must be positive");
    constexpr std::size_t kMaxHorizon = std::size_t{1} << 16;
    for (std::size_t N = 64; N <= kMaxHorizon; N *= 2) {
        const auto phi = phi_profile(model, N);
        double tail = 0.0;
        if (phi[N] > 0.0) {
            if (phi[N / 2] <= 0.0) continue;
            const double r = std::pow(phi[N] / phi[N / 2], 2.0 / static_cast<double>(N));
            if (!(r < 1.0)) continue;
            tail = phi[N] * r / (1.0 - r);
            if (!(tail < tol)) continue;
        }
        DeltaCoefficients out;
        out.k_start = k_start;
        double sum = 0.0;
        for (std::size_t k = k_start; k <= N; ++k) sum += phi[k];
        out.sum_phi = sum + tail;
        out.terms = N + 1 - k_start;
        out.tail_bound = tail;
        out.delta_thm = 1.0 + 24.0 * out.sum_phi;
        out.delta_proof = 1.0 + 4.0 * out.sum_phi;
        return out;
    }
    fail(ErrorKind::NoDecay, "phi tail not certified within 2^16 lags");
}

PhiPrimeResult phi_prime_matrix(const MarkovModel& model, std::size_t n) {
    if (n > 10'000) fail(ErrorKind::GuardExceeded, "phi' matrix is limited to n <= 10^4");
    if (n == 0) fail(ErrorKind::Validation, "n must be positive");
    const auto phi = phi_profile(model, n - 1);
    PhiPrimeResult out;
    out.row_sums.resize(n);
    // Row i (1-based) sums min(4 phi(k), 2) over k = 1..n - i; build from the
    // last row upward.
    double acc = 1.0;
    out.row_sums[n - 1] = acc;
    for (std::size_t i = n - 1; i-- > 0;) {
        acc += std::min(4.0 * phi[n - 1 - i], 2.0);
        out.row_sums[i] = acc;
    }
    out.delta_n = *std::max_element(out.row_sums.begin(), out.row_sums.end());
    return out;
}

ConcentrationConstants concentration_constants(const MarkovModel& model, double eta, std::size_t k_start, double tol) {
    if (!(eta > 0.0 && eta < 0.5)) fail(ErrorKind::Validation, "eta must lie in (0, 0.5)");
    ConcentrationConstants c;
    c.model_id = model.id();
    c.l = model.alphabet_size();
    c.m = model.order();
    const auto stab = m_stability(model);
    c.M = stab.exact;
    c.M_bound = stab.bound;
    c.rho = stab.rho;
    const auto d0 = delta_coefficients(model, 0, tol);
    const auto d1 = delta_coefficients(model, 1, tol);
    c.k_start = k_start;
    c.sum_phi_from0 = d0.sum_phi;
    c.sum_phi_from1 = d1.sum_phi;
    const auto& chosen = k_start == 0 ? d0 : d1;
    c.delta_thm = chosen.delta_thm;
    c.delta_proof = chosen.delta_proof;
    c.eta = eta;
    c.entropy_rate = entropy_rate(model);
    c.marginal_entropy = marginal_entropy(model);
    c.k_sym = ceil_log2(c.l);
    return c;
}

double c1(const ConcentrationConstants& c, std::size_t n) { return paper_bound_header(c.l, c.m, n); }

double c_prime(const ConcentrationConstants& c, std::size_t n) {
    return static_cast<double>(codec_constants(c.l, c.m, n).c_prime);
}

double zeta(const ConcentrationConstants& c, std::size_t n) { return static_cast<double>(codec_constants(c.l, c.m, n).zeta); }

double gamma_n(const ConcentrationConstants& c, std::size_t n) {
    const auto N = static_cast<double>(n);
    return c1(c, n) / N + static_cast<double>(c.m) / N * c.entropy_rate + std::pow(N, -0.5 - c.eta);
}

double gamma_prime(const ConcentrationConstants& c, std::size_t n) {
    return (c1(c, n) + static_cast<double>(c.m) * c.marginal_entropy) / static_cast<double>(n);
}

double K1_prime(const ConcentrationConstants& c, std::size_t n, DeltaVariant v) {
    const double inner = c_prime(c, n) + static_cast<double>(log_star(static_cast<double>(n))) + static_cast<double>(c.k_sym);
    return 2.0 * c.delta(v) * c.delta(v) * inner * inner;
}

double bound_concentration2(const ConcentrationConstants& c, std::size_t n, double t, DeltaVariant v) {
    const double g = gamma_n(c, n);
    if (!(t > g)) fail(ErrorKind::BelowThreshold, "t must exceed gamma_n = " + std::to_string(g));
    const auto N = static_cast<double>(n);
    const double gauss = 2.0 * std::exp(-N * (t - g) * (t - g) / c.K1(v));
    const double floor_term = N * zeta(c, n) * std::exp2(-std::pow(N, 0.5 - c.eta));
    return std::clamp(gauss + floor_term, 0.0, 1.0);
}

double bound_concentration1(const ConcentrationConstants& c, std::size_t n, double t, DeltaVariant v) {
    const double g = gamma_prime(c, n);
    if (!(t > g)) fail(ErrorKind::BelowThreshold, "t must exceed gamma'(n) = " + std::to_string(g));
    const auto N = static_cast<double>(n);
    return std::clamp(2.0 * std::exp(-N * (t - g) * (t - g) / K1_prime(c, n, v)), 0.0, 1.0);
}

}  // namespace entrokit
