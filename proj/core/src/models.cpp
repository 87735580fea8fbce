#include "entrokit/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include <boost/math/special_functions/zeta.hpp>

#include "entrokit/errors.hpp"
#include "entrokit/markov_chain.hpp"
#include "entrokit/rng.hpp"

namespace entrokit {

namespace {

constexpr double kRowTol = 1e-12;
constexpr std::size_t kMaxContexts = 1024;

void check_distribution(std::span<const double> row, const std::string& field, std::size_t index) {
    double sum = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) {
        const double p = row[j];
        if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
            fail(ErrorKind::Validation, field + " row " + std::to_string(index) + " entry " + std::to_string(j) +
                                            " must lie in [0, 1]");
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > kRowTol) {
        fail(ErrorKind::Validation, field + " row " + std::to_string(index) + " sums to " + std::to_string(sum) +
                                        ", expected 1 within 1e-12");
    }
}

}  // namespace

Alphabet::Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
    if (labels_.size() < 2 || labels_.size() > kMaxAlphabet) {
        fail(ErrorKind::Validation, "alphabet must have between 2 and 255 symbols, got " + std::to_string(labels_.size()));
    }
    std::unordered_set<std::string> seen;
    for (const auto& label : labels_) {
        if (label.empty()) fail(ErrorKind::Validation, "alphabet labels must be non-empty");
        if (!seen.insert(label).second) fail(ErrorKind::Validation, "alphabet label '" + label + "' is repeated");
    }
}

Alphabet Alphabet::indices(std::size_t l) {
    std::vector<std::string> labels;
    labels.reserve(l);
    for (std::size_t i = 0; i < l; ++i) labels.push_back(std::to_string(i));
    return Alphabet(std::move(labels));
}

std::optional<Symbol> Alphabet::index_of(std::string_view label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] == label) return static_cast<Symbol>(i);
    }
    return std::nullopt;
}

SymbolSequence::SymbolSequence(std::size_t alphabet_size, std::vector<Symbol> data)
    : alphabet_size_(alphabet_size), data_(std::move(data)) {
    if (alphabet_size_ < 2 || alphabet_size_ > kMaxAlphabet) {
        fail(ErrorKind::Validation, "alphabet size must lie in [2, 255]");
    }
    for (std::size_t i = 0; i < data_.size(); ++i) {
        if (data_[i] >= alphabet_size_) {
            fail(ErrorKind::Validation, "symbol at position " + std::to_string(i) + " is outside the alphabet");
        }
    }
}

ContextSpace::ContextSpace(std::size_t l, std::size_t m) : l_(l), m_(m), count_(1) {
    for (std::size_t i = 0; i < m; ++i) {
        if (count_ > (std::size_t{1} << 40) / l) fail(ErrorKind::GuardExceeded, "l^m exceeds 2^40 contexts");
        count_ *= l;
    }
}

std::size_t ContextSpace::index(std::span<const Symbol> context) const {
    if (context.size() != m_) {
        fail(ErrorKind::BadContext, "context has length " + std::to_string(context.size()) + ", expected " +
                                        std::to_string(m_));
    }
    std::size_t c = 0;
    for (Symbol s : context) {
        if (s >= l_) fail(ErrorKind::BadContext, "context symbol outside the alphabet");
        c = c * l_ + s;
    }
    return c;
}

std::vector<Symbol> ContextSpace::symbols(std::size_t ctx) const {
    std::vector<Symbol> out(m_);
    for (std::size_t i = m_; i-- > 0;) {
        out[i] = static_cast<Symbol>(ctx % l_);
        ctx /= l_;
    }
    return out;
}

MarkovModel MarkovModel::create(Alphabet alphabet, std::size_t order, std::vector<double> transitions,
                                std::optional<std::vector<double>> initial_law, bool ergodic, std::string id) {
    const std::size_t l = alphabet.size();
    std::size_t K = 1;
    for (std::size_t i = 0; i < order; ++i) {
        K *= l;
        if (K > kMaxContexts) {
            fail(ErrorKind::Validation, "order: l^m must not exceed " + std::to_string(kMaxContexts) + " contexts");
        }
    }
    MarkovModel model(std::move(alphabet), order);
    model.id_ = std::move(id);
    model.declared_ergodic_ = ergodic;
    if (transitions.size() != K * l) {
        fail(ErrorKind::Validation, "transitions: expected " + std::to_string(K) + " rows of " + std::to_string(l) +
                                        " entries, got " + std::to_string(transitions.size()) + " values");
    }
    for (std::size_t c = 0; c < K; ++c) {
        check_distribution(std::span<const double>(transitions).subspan(c * l, l), "transitions", c);
    }
    model.transitions_ = std::move(transitions);

    const auto P = model.context_transition_matrix();
    const auto structure = analyze_chain(P, K);
    model.irreducible_ = structure.irreducible;
    model.period_ = structure.period;
    if (ergodic && (!structure.irreducible || structure.period != 1)) {
        fail(ErrorKind::NonErgodic, structure.irreducible ? "context chain has period " + std::to_string(structure.period)
                                                          : std::string("context chain is reducible"));
    }
    if (structure.irreducible) model.stationary_ = solve_stationary(P, K);

    if (initial_law) {
        if (initial_law->size() != K) {
            fail(ErrorKind::Validation, "initial_law: expected " + std::to_string(K) + " entries");
        }
        check_distribution(*initial_law, "initial_law", 0);
        model.initial_law_ = std::move(*initial_law);
        bool same = model.stationary_.has_value();
        for (std::size_t c = 0; same && c < K; ++c) {
            same = std::abs(model.initial_law_[c] - (*model.stationary_)[c]) <= kRowTol;
        }
        model.initial_is_stationary_ = same;
    } else {
        if (!model.stationary_) {
            fail(ErrorKind::Validation, "initial_law is required when the context chain has no unique stationary law");
        }
        model.initial_law_ = *model.stationary_;
    }
    return model;
}

std::vector<double> MarkovModel::context_transition_matrix() const {
    const std::size_t K = contexts_.count();
    const std::size_t l = alphabet_size();
    std::vector<double> P(K * K, 0.0);
    for (std::size_t c = 0; c < K; ++c) {
        for (std::size_t x = 0; x < l; ++x) {
            P[c * K + contexts_.shift(c, static_cast<Symbol>(x))] += prob(c, static_cast<Symbol>(x));
        }
    }
    return P;
}

HmmModel HmmModel::create(Alphabet alphabet, std::size_t hidden_states, std::vector<double> hidden_kernel,
                          std::vector<double> emissions, std::string id) {
    const std::size_t l = alphabet.size();
    const std::size_t H = hidden_states;
    if (H < 2) fail(ErrorKind::Validation, "hidden_kernel: at least two hidden states are required");
    if (hidden_kernel.size() != H * H) {
        fail(ErrorKind::Validation, "hidden_kernel: expected a " + std::to_string(H) + "x" + std::to_string(H) + " matrix");
    }
    if (emissions.size() != H * l) {
        fail(ErrorKind::Validation, "emissions: expected " + std::to_string(H) + " rows of " + std::to_string(l) + " entries");
    }
    for (std::size_t h = 0; h < H; ++h) {
        const auto krow = std::span<const double>(hidden_kernel).subspan(h * H, H);
        const auto erow = std::span<const double>(emissions).subspan(h * l, l);
        check_distribution(krow, "hidden_kernel", h);
        check_distribution(erow, "emissions", h);
        for (std::size_t j = 0; j < H; ++j) {
            if (!(krow[j] > 0.0)) {
                fail(ErrorKind::Validation, "hidden_kernel row " + std::to_string(h) + " entry " + std::to_string(j) +
                                                " must be strictly positive");
            }
        }
        for (std::size_t y = 0; y < l; ++y) {
            if (!(erow[y] > 0.0)) {
                fail(ErrorKind::Validation, "emissions row " + std::to_string(h) + " entry " + std::to_string(y) +
                                                " must be strictly positive");
            }
        }
    }

    HmmModel model(std::move(alphabet));
    model.id_ = std::move(id);
    model.hidden_ = H;
    model.kernel_ = std::move(hidden_kernel);
    model.emissions_ = std::move(emissions);

    const auto [qmin, qmax] = std::minmax_element(model.kernel_.begin(), model.kernel_.end());
    model.epsilon_ = *qmin / *qmax;
    double eta = 1.0;
    for (std::size_t y = 0; y < l; ++y) {
        double gmin = std::numeric_limits<double>::infinity();
        double gmax = 0.0;
        for (std::size_t h = 0; h < H; ++h) {
            gmin = std::min(gmin, model.emissions_[h * l + y]);
            gmax = std::max(gmax, model.emissions_[h * l + y]);
        }
        eta = std::max(eta, gmax / gmin);
    }
    model.eta_ = eta;
    if (!(model.epsilon_ < 1.0)) fail(ErrorKind::Validation, "hidden_kernel: constant kernel gives epsilon = 1");
    if (!(model.eta_ > 1.0)) fail(ErrorKind::Validation, "emissions: identical rows give eta = 1");
    model.hidden_stationary_ = solve_stationary(model.kernel_, H);
    return model;
}

namespace {

constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 20;

// Euler-Maclaurin estimate of sum_{t=A}^{B} t^-a for large A.
double power_sum(std::uint64_t A, std::uint64_t B, double a) {
    const double x = static_cast<double>(A);
    const double y = static_cast<double>(B);
    const double integral = (std::pow(x, 1.0 - a) - std::pow(y, 1.0 - a)) / (a - 1.0);
    const auto f = [a](double t) { return std::pow(t, -a); };
    const auto d1 = [a](double t) { return -a * std::pow(t, -a - 1.0); };
    const auto d3 = [a](double t) { return -a * (a + 1.0) * (a + 2.0) * std::pow(t, -a - 3.0); };
    return integral + 0.5 * (f(x) + f(y)) + (d1(y) - d1(x)) / 12.0 - (d3(y) - d3(x)) / 720.0;
}

// t^-a divided by the integral of x^-a over [t, t+1).
double envelope_ratio(double t, double a) {
    const double cell = std::pow(t, 1.0 - a) * -std::expm1((1.0 - a) * std::log1p(1.0 / t)) / (a - 1.0);
    return std::pow(t, -a) / cell;
}

}  // namespace

BlockwiseModel BlockwiseModel::create(double epsilon, std::uint64_t tail_cap, std::string id) {
    if (!(epsilon > 0.0 && epsilon < 1.0 / 6.0)) fail(ErrorKind::Validation, "epsilon must lie in (0, 1/6)");
    if (tail_cap < 1) fail(ErrorKind::Validation, "tail_cap must be a positive integer");
    BlockwiseModel model;
    model.id_ = std::move(id);
    model.epsilon_ = epsilon;
    model.tail_cap_ = tail_cap;
    const double a = model.exponent();

    const std::uint64_t dense = std::min(tail_cap, kDenseLimit);
    model.dense_cdf_.resize(dense);
    long double acc = 0.0L;
    for (std::uint64_t t = 1; t <= dense; ++t) {
        acc += std::pow(static_cast<long double>(t), -static_cast<long double>(a));
        model.dense_cdf_[t - 1] = static_cast<double>(acc);
    }
    for (std::uint64_t first = dense + 1; first <= tail_cap;) {
        const std::uint64_t last = first > tail_cap / 2 ? tail_cap : std::min(tail_cap, 2 * first - 1);
        const double w = power_sum(first, last, a);
        acc += w;
        model.tail_.push_back({first, last, w});
        model.tail_cdf_.push_back(static_cast<double>(acc) - model.dense_cdf_.back());
        first = last + 1;
    }
    model.total_weight_ = static_cast<double>(acc);
    model.truncated_mass_ = std::max(0.0, 1.0 - model.total_weight_ / boost::math::zeta(a));
    return model;
}

double BlockwiseModel::pmf(std::uint64_t t) const {
    if (t < 1 || t > tail_cap_) return 0.0;
    return std::pow(static_cast<double>(t), -exponent()) / total_weight_;
}

std::uint64_t BlockwiseModel::draw_length(Rng& rng, std::uint64_t& cap_hits) const {
    const double a = exponent();
    // A draw from the untruncated law lands beyond the cap with probability
    // truncated_mass(); such draws are counted and redrawn.
    while (rng.uniform() < truncated_mass_) ++cap_hits;

    const double u = rng.uniform() * total_weight_;
    const double dense_total = dense_cdf_.back();
    if (u < dense_total || tail_.empty()) {
        const auto it = std::upper_bound(dense_cdf_.begin(), dense_cdf_.end(), u);
        const auto idx = static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - dense_cdf_.begin(),
                                                                            static_cast<std::ptrdiff_t>(dense_cdf_.size()) - 1));
        return idx + 1;
    }
    const auto bit = std::upper_bound(tail_cdf_.begin(), tail_cdf_.end(), u - dense_total);
    const auto& block = tail_[std::min<std::size_t>(static_cast<std::size_t>(bit - tail_cdf_.begin()), tail_.size() - 1)];

    // Rejection from the continuous envelope x^-a on [first, last + 1).
    const double lo = std::pow(static_cast<double>(block.first), 1.0 - a);
    const double hi = std::pow(static_cast<double>(block.last) + 1.0, 1.0 - a);
    const double r0 = envelope_ratio(static_cast<double>(block.first), a);
    for (;;) {
        const double v = rng.uniform();
        const double x = std::pow(lo - v * (lo - hi), 1.0 / (1.0 - a));
        auto t = static_cast<std::uint64_t>(x);
        t = std::clamp(t, block.first, block.last);
        if (rng.uniform() * r0 < envelope_ratio(static_cast<double>(t), a)) return t;
    }
}

}  // namespace entrokit
