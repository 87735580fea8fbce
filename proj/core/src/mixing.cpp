#include "entrokit/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "entrokit/errors.hpp"
#include "entrokit/markov_chain.hpp"
#include "entrokit/parallel.hpp"
#include "entrokit/rng.hpp"
#include "entrokit/sampling.hpp"

namespace entrokit {

namespace {

std::size_t cylinder_count(const MarkovModel& model, std::size_t depth) {
    if (depth == 0) fail(ErrorKind::Validation, "depth must be at least 1");
    std::size_t count = 1;
    for (std::size_t i = 0; i < depth; ++i) {
        count *= model.alphabet_size();
        if (count > kMaxCylinders) {
            fail(ErrorKind::TooLarge, "l^d exceeds " + std::to_string(kMaxCylinders) + " cylinders");
        }
    }
    return count;
}

void emit(const MarkovModel& model, std::size_t ctx, std::size_t index, std::size_t remaining, double weight,
          std::vector<double>& out) {
    if (weight == 0.0) return;
    if (remaining == 0) {
        out[index] += weight;
        return;
    }
    const std::size_t l = model.alphabet_size();
    for (std::size_t x = 0; x < l; ++x) {
        emit(model, model.contexts().shift(ctx, static_cast<Symbol>(x)), index * l + x, remaining - 1,
             weight * model.prob(ctx, static_cast<Symbol>(x)), out);
    }
}

// Law of the block whose first symbol is the last symbol of a context drawn
// from `v`. For m = 0 the context carries no symbol and the block is iid.
std::vector<double> block_law(const MarkovModel& model, std::span<const double> v, std::size_t depth) {
    const std::size_t l = model.alphabet_size();
    std::size_t cylinders = 1;
    for (std::size_t i = 0; i < depth; ++i) cylinders *= l;
    std::vector<double> out(cylinders, 0.0);
    if (model.order() == 0) {
        emit(model, 0, 0, depth, 1.0, out);
        return out;
    }
    for (std::size_t c = 0; c < v.size(); ++c) emit(model, c, c % l, depth - 1, v[c], out);
    return out;
}

std::vector<double> context_law_after(const MarkovModel& model, std::size_t context, std::size_t n) {
    const std::size_t K = model.contexts().count();
    std::vector<double> v(K, 0.0);
    std::vector<double> next(K);
    v[context] = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        step_distribution(model, v, next);
        v.swap(next);
    }
    return v;
}

double check_delta(double delta) {
    if (!(delta > 0.0 && delta <= 1.0)) fail(ErrorKind::BadDelta, "delta must lie in (0, 1]");
    return (2.0 + delta) / (1.0 + delta);
}

}  // namespace

std::vector<double> phi_profile(const MarkovModel& model, std::size_t max_gap) {
    const auto pi = stationary_distribution(model);
    const std::size_t K = pi.size();
    // Propagate d_s = delta_s P^k - pi instead of delta_s P^k, so the decay is
    // resolved far below machine epsilon. Re-centering each step removes the
    // rounding component along pi, which P would otherwise preserve.
    std::vector<std::vector<double>> dev(K, std::vector<double>(K));
    for (std::size_t s = 0; s < K; ++s) {
        for (std::size_t j = 0; j < K; ++j) dev[s][j] = (s == j ? 1.0 : 0.0) - pi[j];
    }
    std::vector<double> next(K);
    std::vector<double> phi;
    phi.reserve(max_gap + 1);
    for (std::size_t k = 0;; ++k) {
        double worst = 0.0;
        for (const auto& d : dev) {
            double tv = 0.0;
            for (double x : d) tv += std::abs(x);
            worst = std::max(worst, 0.5 * tv);
        }
        phi.push_back(std::min(1.0, worst));
        if (k == max_gap) break;
        for (auto& d : dev) {
            step_distribution(model, d, next);
            double drift = 0.0;
            for (double x : next) drift += x;
            for (std::size_t j = 0; j < K; ++j) next[j] -= drift * pi[j];
            d.swap(next);
        }
    }
    return phi;
}

double phi_mixing(const MarkovModel& model, std::size_t n) { return phi_profile(model, n).back(); }

std::vector<double> future_block_law(const MarkovModel& model, std::size_t context, std::size_t n,
                                     std::size_t depth) {
    if (context >= model.contexts().count()) fail(ErrorKind::BadContext, "context index out of range");
    return block_law(model, context_law_after(model, context, n), depth);
}

std::vector<double> stationary_block_law(const MarkovModel& model, std::size_t depth) {
    return block_law(model, stationary_distribution(model), depth);
}

double phi_bruteforce(const MarkovModel& model, std::size_t n, std::size_t depth) {
    const std::size_t cylinders = cylinder_count(model, depth);
    const auto pi = stationary_distribution(model);
    const auto reference = block_law(model, pi, depth);
    double best = 0.0;
    for (std::size_t s = 0; s < pi.size(); ++s) {
        if (pi[s] <= 0.0) continue;
        const auto law = future_block_law(model, s, n, depth);
        for (std::size_t mask = 1; mask < (std::size_t{1} << cylinders); ++mask) {
            double diff = 0.0;
            for (std::size_t b = 0; b < cylinders; ++b) {
                if (mask >> b & 1U) diff += law[b] - reference[b];
            }
            best = std::max(best, std::abs(diff));
        }
    }
    return best;
}

AlphaBounds alpha_mixing_bounds(const MarkovModel& model, std::size_t n, std::size_t depth) {
    const std::size_t cylinders = cylinder_count(model, depth);
    const auto pi = stationary_distribution(model);
    const auto reference = block_law(model, pi, depth);
    std::vector<std::vector<double>> laws(pi.size());
    for (std::size_t s = 0; s < pi.size(); ++s) laws[s] = future_block_law(model, s, n, depth);

    double lower = 0.0;
    for (std::size_t mask = 1; mask < (std::size_t{1} << cylinders); ++mask) {
        double pb = 0.0;
        for (std::size_t b = 0; b < cylinders; ++b) {
            if (mask >> b & 1U) pb += reference[b];
        }
        double gain = 0.0;
        for (std::size_t s = 0; s < pi.size(); ++s) {
            double h = 0.0;
            for (std::size_t b = 0; b < cylinders; ++b) {
                if (mask >> b & 1U) h += laws[s][b];
            }
            gain += pi[s] * std::max(0.0, h - pb);
        }
        lower = std::max(lower, gain);
    }
    const double upper = phi_mixing(model, n);
    return {std::min(lower, upper), upper};
}

NuDeltaEstimate nu_delta(const MarkovModel& model, std::size_t n, double delta) {
    const double power = check_delta(delta);
    NuDeltaEstimate out;
    out.exact = true;
    const std::size_t m = model.order();
    if (n >= m) return out;

    const auto pi = stationary_distribution(model);
    const std::size_t l = model.alphabet_size();
    std::size_t suffixes = 1;
    for (std::size_t i = 0; i < n; ++i) suffixes *= l;
    // Contexts sharing their last n symbols share c mod l^n.
    std::vector<double> mass(suffixes, 0.0);
    std::vector<double> joint(suffixes * l, 0.0);
    for (std::size_t c = 0; c < pi.size(); ++c) {
        mass[c % suffixes] += pi[c];
        for (std::size_t x = 0; x < l; ++x) joint[(c % suffixes) * l + x] += pi[c] * model.prob(c, static_cast<Symbol>(x));
    }
    double value = 0.0;
    for (std::size_t c = 0; c < pi.size(); ++c) {
        if (pi[c] <= 0.0) continue;
        for (std::size_t x = 0; x < l; ++x) {
            const double p = model.prob(c, static_cast<Symbol>(x));
            if (p <= 0.0) continue;
            const double q = joint[(c % suffixes) * l + x] / mass[c % suffixes];
            value += pi[c] * p * std::pow(std::abs(std::log2(p) - std::log2(q)), power);
        }
    }
    out.value = value;
    return out;
}

std::vector<double> hmm_predictive(const HmmModel& model, std::span<const Symbol> observations) {
    const std::size_t H = model.hidden_states();
    const std::size_t l = model.alphabet_size();
    std::vector<double> alpha = model.hidden_stationary();
    std::vector<double> next(H);
    for (Symbol y : observations) {
        double norm = 0.0;
        for (std::size_t h = 0; h < H; ++h) {
            alpha[h] *= model.emission(h, y);
            norm += alpha[h];
        }
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t h = 0; h < H; ++h) {
            const double a = alpha[h] / norm;
            for (std::size_t k = 0; k < H; ++k) next[k] += a * model.kernel(h, k);
        }
        alpha.swap(next);
    }
    std::vector<double> out(l, 0.0);
    for (std::size_t y = 0; y < l; ++y) {
        for (std::size_t h = 0; h < H; ++h) out[y] += alpha[h] * model.emission(h, static_cast<Symbol>(y));
    }
    return out;
}

NuDeltaEstimate nu_delta(const HmmModel& model, std::size_t n, double delta, std::size_t window, std::size_t reps,
                         std::uint64_t seed) {
    const double power = check_delta(delta);
    if (window < n) fail(ErrorKind::WindowTooShort, "window W must be at least n");
    if (reps < 2) fail(ErrorKind::Validation, "reps must be at least 2");
    std::vector<double> at_w(reps);
    std::vector<double> at_2w(reps);
    parallel_for(reps, [&](std::size_t i) {
        const auto path = sample(model, 2 * window + 1, derive_seed(seed, i)).observed;
        const auto symbols = path.symbols();
        const Symbol y0 = symbols.back();
        const auto past = symbols.first(symbols.size() - 1);
        const double pn = hmm_predictive(model, past.last(n))[y0];
        const double pw = hmm_predictive(model, past.last(window))[y0];
        const double p2w = hmm_predictive(model, past)[y0];
        at_w[i] = std::pow(std::abs(std::log2(pn) - std::log2(pw)), power);
        at_2w[i] = std::pow(std::abs(std::log2(pn) - std::log2(p2w)), power);
    });
    auto summarize = [reps](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(reps);
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::pair{mean, std::sqrt(ss / static_cast<double>(reps - 1) / static_cast<double>(reps))};
    };
    NuDeltaEstimate out;
    std::tie(out.value, out.std_error) = summarize(at_w);
    std::tie(out.value_double_window, out.std_error_double_window) = summarize(at_2w);
    out.window = window;
    out.window_converged = std::abs(out.value - out.value_double_window) <= std::max(out.std_error, 1e-300);
    return out;
}

DecayFit fit_decay(std::span<const double> values) {
    std::vector<double> xs, logs, ys;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > 0.0) {
            xs.push_back(static_cast<double>(i));
            logs.push_back(std::log(static_cast<double>(i)));
            ys.push_back(std::log(values[i]));
        }
    }
    DecayFit fit;
    fit.points = xs.size();
    if (xs.size() < 2) return fit;
    auto regress = [&ys](const std::vector<double>& x) {
        const auto k = static_cast<double>(x.size());
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            mx += x[i];
            my += ys[i];
        }
        mx /= k;
        my /= k;
        double sxy = 0.0, sxx = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxy += (x[i] - mx) * (ys[i] - my);
            sxx += (x[i] - mx) * (x[i] - mx);
        }
        const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
        double rss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = ys[i] - (my + slope * (x[i] - mx));
            rss += r * r;
        }
        return std::pair{slope, std::sqrt(rss / k)};
    };
    const auto [gslope, gres] = regress(xs);
    const auto [pslope, pres] = regress(logs);
    fit.geometric_ratio = std::exp(gslope);
    fit.geometric_residual = gres;
    fit.power_exponent = pslope;
    fit.power_residual = pres;
    return fit;
}

MixingProfile mixing_profile(const MarkovModel& model, std::size_t max_gap, std::size_t depth, double delta) {
    MixingProfile profile;
    profile.model_id = model.id();
    profile.depth = depth;
    profile.delta = delta;
    profile.phi = phi_profile(model, max_gap);
    profile.alpha_upper = profile.phi;
    for (std::size_t n = 0; n <= max_gap; ++n) {
        profile.alpha_lower.push_back(alpha_mixing_bounds(model, n, depth).lower);
        profile.nu_delta.push_back(nu_delta(model, n, delta).value);
    }
    profile.phi_fit = fit_decay(profile.phi);
    return profile;
}

ConditionsReport check_theorem2_conditions(const MarkovModel& model, std::span<const double> deltas, double beta,
                                           std::size_t horizon) {
    if (!(beta > 1.0)) fail(ErrorKind::Validation, "beta must exceed 1");
    if (horizon < 2) fail(ErrorKind::Validation, "horizon must be at least 2");
    ConditionsReport report;
    report.beta = beta;
    report.horizon = horizon;
    const auto phi = phi_profile(model, horizon);
    const bool vanishes = phi.back() == 0.0;
    // Worst one-step ratio over the second half of the horizon; beyond the
    // horizon phi(n) <= phi(N) r^(n - N).
    double ratio = 0.0;
    for (std::size_t n = horizon / 2 + 1; n <= horizon && !vanishes; ++n) {
        if (phi[n - 1] > 0.0) ratio = std::max(ratio, phi[n] / phi[n - 1]);
    }
    const bool geometric = vanishes || ratio < 1.0;
    bool all_ok = true;
    for (double delta : deltas) {
        check_delta(delta);
        ConditionsRow row;
        row.delta = delta;
        row.exponent = beta * (2.0 + delta) * (1.0 + delta) / (delta * delta);
        // log2 of sup_n phi(n) n^e; alpha <= phi, so phi supplies the constant K.
        double log2_k = -std::numeric_limits<double>::infinity();
        for (std::size_t n = 1; n <= horizon; ++n) {
            if (phi[n] > 0.0) {
                log2_k = std::max(log2_k, std::log2(phi[n]) + row.exponent * std::log2(static_cast<double>(n)));
            }
        }
        if (!vanishes && geometric && ratio > 0.0) {
            // phi(N) r^(x - N) x^e peaks at x = e / ln(1/r).
            const auto N = static_cast<double>(horizon);
            const double peak = std::max(N, row.exponent / std::log(1.0 / ratio));
            log2_k = std::max(log2_k, std::log2(phi[horizon]) + (peak - N) * std::log2(ratio) +
                                          row.exponent * std::log2(peak));
        }
        row.log2_K = log2_k;
        row.alpha_ok = geometric;
        row.nu_ok = true;
        if (vanishes) {
            row.note = "phi vanishes within the horizon";
        } else if (geometric) {
            std::ostringstream note;
            note << "phi decays geometrically with ratio " << ratio << ", dominating n^-exponent past n = "
                 << row.exponent / std::log(1.0 / ratio);
            row.note = note.str();
        } else {
            row.note = "no geometric decay visible within the horizon";
        }
        all_ok = all_ok && row.alpha_ok && row.nu_ok;
        report.rows.push_back(std::move(row));
    }
    report.status = all_ok ? "satisfied" : "inconclusive";
    report.note = "nu_delta(n) = 0 for n >= m (order " + std::to_string(model.order()) + ")";
    return report;
}

ConditionsReport conditions_not_applicable(const std::string& kind) {
    ConditionsReport report;
    report.status = "not applicable";
    report.note = "not applicable: no exact mixing computation for " + kind + " models";
    return report;
}

}  // namespace entrokit
