#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "entrokit/models.hpp"

namespace entrokit {

/// First m symbols from the model's initial law, then the chain. For n < m the
/// initial context is truncated to n symbols.
SymbolSequence sample(const MarkovModel& model, std::size_t n, std::uint64_t seed);

struct HmmSample {
    SymbolSequence observed;
    std::vector<std::uint32_t> hidden;
};

HmmSample sample(const HmmModel& model, std::size_t n, std::uint64_t seed);

struct BlockRecord {
    std::size_t start = 0;        // position of the first emitted symbol
    std::size_t length = 0;       // symbols emitted (less than planned if cut at n)
    std::uint64_t planned = 0;    // tau - theta for the first block, tau otherwise
    std::uint64_t tau = 0;
    bool all_zeros = false;
    bool complete = false;
};

struct BlockwiseSample {
    SymbolSequence sequence;
    std::vector<BlockRecord> blocks;
    std::uint64_t theta = 0;
    std::uint64_t tail_cap_hits = 0;
};

BlockwiseSample sample_blockwise(const BlockwiseModel& model, std::size_t n, std::uint64_t seed);

}  // namespace entrokit
