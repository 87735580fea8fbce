#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "entrokit/models.hpp"

namespace entrokit {

struct ChainStructure {
    bool irreducible = false;
    std::size_t period = 0;  // 0 when reducible
};

/// Communicating structure of a row-major K x K stochastic matrix.
ChainStructure analyze_chain(std::span<const double> P, std::size_t K);

/// Solves pi = pi P, sum(pi) = 1 for an irreducible chain.
std::vector<double> solve_stationary(std::span<const double> P, std::size_t K);

/// Stationary law over the m-contexts. Throws NonErgodic when the context
/// chain is reducible or periodic.
std::vector<double> stationary_distribution(const MarkovModel& model);

/// P(. | context). Throws BadContext on a wrong length or unknown symbol.
std::vector<double> conditional_law(const MarkovModel& model, std::span<const Symbol> context);

/// Row vector times the context chain kernel: out = v P. Uses the sparse
/// structure (l successors per context).
void step_distribution(const MarkovModel& model, std::span<const double> v, std::span<double> out);

}  // namespace entrokit
