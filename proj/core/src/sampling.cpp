#include "entrokit/sampling.hpp"

#include "entrokit/rng.hpp"

namespace entrokit {

namespace {

std::size_t draw_index(Rng& rng, std::span<const double> law) {
    const double u = rng.uniform();
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < law.size(); ++i) {
        if (law[i] <= 0.0) continue;
        acc += law[i];
        last_positive = i;
        if (u < acc) return i;
    }
    return last_positive;  // rounding slack in the row sum
}

}  // namespace

SymbolSequence sample(const MarkovModel& model, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    const auto& ctx = model.contexts();
    const std::size_t m = model.order();
    std::vector<Symbol> data;
    data.reserve(n);
    std::size_t c = draw_index(rng, model.initial_law());
    const auto prefix = ctx.symbols(c);
    for (std::size_t i = 0; i < m && i < n; ++i) data.push_back(prefix[i]);
    while (data.size() < n) {
        const auto x = static_cast<Symbol>(draw_index(rng, model.row(c)));
        data.push_back(x);
        c = ctx.shift(c, x);
    }
    return SymbolSequence(model.alphabet_size(), std::move(data));
}

HmmSample sample(const HmmModel& model, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    const std::size_t H = model.hidden_states();
    const std::size_t l = model.alphabet_size();
    std::vector<double> krow(H);
    std::vector<double> erow(l);
    std::vector<Symbol> observed;
    std::vector<std::uint32_t> hidden;
    observed.reserve(n);
    hidden.reserve(n);
    std::size_t h = draw_index(rng, model.hidden_stationary());
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t y = 0; y < l; ++y) erow[y] = model.emission(h, static_cast<Symbol>(y));
        observed.push_back(static_cast<Symbol>(draw_index(rng, erow)));
        hidden.push_back(static_cast<std::uint32_t>(h));
        for (std::size_t j = 0; j < H; ++j) krow[j] = model.kernel(h, j);
        h = draw_index(rng, krow);
    }
    return {SymbolSequence(l, std::move(observed)), std::move(hidden)};
}

BlockwiseSample sample_blockwise(const BlockwiseModel& model, std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    BlockwiseSample out;
    std::vector<Symbol> data;
    data.reserve(n);
    bool first = true;
    while (data.size() < n) {
        BlockRecord block;
        block.tau = model.draw_length(rng, out.tail_cap_hits);
        block.planned = block.tau;
        if (first) {
            // Stationarization: drop theta ~ unif{0, ..., tau_1 - 1} symbols.
            out.theta = rng.below(block.tau);
            block.planned = block.tau - out.theta;
            first = false;
        }
        block.all_zeros = rng.bernoulli_half();
        block.start = data.size();
        const std::size_t room = n - data.size();
        block.length = block.planned < room ? static_cast<std::size_t>(block.planned) : room;
        block.complete = block.length == block.planned;
        if (block.all_zeros) {
            data.insert(data.end(), block.length, Symbol{0});
        } else {
            for (std::size_t i = 0; i < block.length; ++i) data.push_back(rng.bernoulli_half() ? 1 : 0);
        }
        out.blocks.push_back(block);
    }
    out.sequence = SymbolSequence(2, std::move(data));
    return out;
}

}  // namespace entrokit
