#include "entrokit/markov_chain.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

#include <Eigen/Dense>

#include "entrokit/errors.hpp"

namespace entrokit {

namespace {

constexpr auto unseen = static_cast<std::size_t>(-1);

std::vector<std::size_t> bfs_levels(std::span<const double> P, std::size_t K, bool reverse) {
    std::vector<std::size_t> level(K, unseen);
    std::deque<std::size_t> queue{0};
    level[0] = 0;
    while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        for (std::size_t v = 0; v < K; ++v) {
            const double p = reverse ? P[v * K + u] : P[u * K + v];
            if (p > 0.0 && level[v] == unseen) {
                level[v] = level[u] + 1;
                queue.push_back(v);
            }
        }
    }
    return level;
}

}  // namespace

ChainStructure analyze_chain(std::span<const double> P, std::size_t K) {
    const auto forward = bfs_levels(P, K, false);
    const auto backward = bfs_levels(P, K, true);
    const bool irreducible = std::none_of(forward.begin(), forward.end(), [](auto v) { return v == unseen; }) &&
                             std::none_of(backward.begin(), backward.end(), [](auto v) { return v == unseen; });
    if (!irreducible) return {false, 0};
    // Period = gcd over edges u->v of level(u) + 1 - level(v).
    std::size_t g = 0;
    for (std::size_t u = 0; u < K; ++u) {
        for (std::size_t v = 0; v < K; ++v) {
            if (P[u * K + v] > 0.0) {
                const auto d = static_cast<long long>(forward[u]) + 1 - static_cast<long long>(forward[v]);
                g = std::gcd(g, static_cast<std::size_t>(d < 0 ? -d : d));
            }
        }
    }
    return {true, g};
}

std::vector<double> solve_stationary(std::span<const double> P, std::size_t K) {
    const auto n = static_cast<Eigen::Index>(K);
    Eigen::MatrixXd A(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) A(i, j) = P[static_cast<std::size_t>(j) * K + static_cast<std::size_t>(i)];
        A(i, i) -= 1.0;
    }
    A.row(n - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(n - 1) = 1.0;
    const auto lu = A.partialPivLu();
    Eigen::VectorXd pi = lu.solve(b);
    // One step of iterative refinement.
    pi += lu.solve(b - A * pi);

    std::vector<double> out(K);
    double sum = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        out[i] = std::max(0.0, pi(static_cast<Eigen::Index>(i)));
        sum += out[i];
    }
    for (auto& v : out) v /= sum;
    return out;
}

std::vector<double> stationary_distribution(const MarkovModel& model) {
    if (!model.irreducible()) fail(ErrorKind::NonErgodic, "context chain is reducible");
    if (model.period() != 1) fail(ErrorKind::NonErgodic, "context chain has period " + std::to_string(model.period()));
    return *model.unique_stationary_law();
}

std::vector<double> conditional_law(const MarkovModel& model, std::span<const Symbol> context) {
    const auto row = model.row(model.contexts().index(context));
    return {row.begin(), row.end()};
}

void step_distribution(const MarkovModel& model, std::span<const double> v, std::span<double> out) {
    const auto& ctx = model.contexts();
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t c = 0; c < ctx.count(); ++c) {
        if (v[c] == 0.0) continue;
        for (std::size_t x = 0; x < model.alphabet_size(); ++x) {
            out[ctx.shift(c, static_cast<Symbol>(x))] += v[c] * model.prob(c, static_cast<Symbol>(x));
        }
    }
}

}  // namespace entrokit
