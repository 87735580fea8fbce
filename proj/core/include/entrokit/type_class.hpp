#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "entrokit/models.hpp"

namespace entrokit {

/// Prefix and (m+1)-block counts of a sequence. counts[c * l + x] is the
/// number of positions i > m with context c before symbol x.
struct BlockFrequencyVector {
    std::size_t m = 0;
    std::size_t l = 2;
    std::size_t n = 0;
    std::vector<Symbol> prefix;
    std::vector<std::uint64_t> counts;

    friend bool operator==(const BlockFrequencyVector&, const BlockFrequencyVector&) = default;
};

/// Throws TooShort when n < m.
BlockFrequencyVector block_frequencies(const SymbolSequence& seq, std::size_t m);

/// Checks shapes and ranges only; flow feasibility shows up as a zero size.
void validate_descriptor(const BlockFrequencyVector& desc);

/// Number of sequences sharing the descriptor's prefix and counts; 0 when no
/// walk realizes the counts.
///
/// Sequences of the class are Eulerian trails of the context graph that start
/// at the prefix context, so the count follows from the BEST theorem:
///   |T| = t_e * d_e! * prod_{v != e} (d_v - 1)! / prod N(v, x)!
/// where e is the end context and t_e counts spanning arborescences rooted at
/// e (matrix-tree theorem on the out-degree Laplacian).
mpz_class type_class_size(const BlockFrequencyVector& desc);

/// Lexicographic rank of seq within its type class.
mpz_class rank_in_type_class(const SymbolSequence& seq, std::size_t m);

/// Inverse of rank_in_type_class. Throws IndexOutOfRange, or Infeasible when
/// the class is empty.
SymbolSequence unrank(const BlockFrequencyVector& desc, const mpz_class& index);

}  // namespace entrokit
