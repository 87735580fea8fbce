#include <benchmark/benchmark.h>

#include "entrokit/entropy.hpp"
#include "entrokit/models.hpp"
#include "entrokit/sampling.hpp"
#include "entrokit/type_class.hpp"
#include "entrokit/type_coder.hpp"

using namespace entrokit;

namespace {

const MarkovModel& symmetric() {
    static const auto model = MarkovModel::create(Alphabet::indices(2), 1, {0.9, 0.1, 0.1, 0.9});
    return model;
}

const MarkovModel& ternary2() {
    static const auto model = [] {
        std::vector<double> rows;
        for (std::size_t c = 0; c < 9; ++c) {
            const double a = 0.2 + 0.05 * static_cast<double>(c);
            rows.insert(rows.end(), {a, 0.5 * (1 - a), 0.5 * (1 - a)});
        }
        return MarkovModel::create(Alphabet::indices(3), 2, rows);
    }();
    return model;
}

void BM_Sample(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) benchmark::DoNotOptimize(sample(symmetric(), n, ++seed));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Sample)->RangeMultiplier(8)->Range(1 << 10, 1 << 19);

void BM_Encode(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto m = static_cast<std::size_t>(state.range(1));
    const auto x = sample(symmetric(), n, 7);
    for (auto _ : state) benchmark::DoNotOptimize(encode(x, CodecParams::fixed(m)));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Encode)->ArgsProduct({{1 << 10, 1 << 13, 1 << 16}, {1, 4}});

void BM_Decode(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto code = encode(sample(symmetric(), n, 7), CodecParams::fixed(2));
    for (auto _ : state) benchmark::DoNotOptimize(decode(code));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Decode)->Arg(1 << 10)->Arg(1 << 13)->Arg(1 << 16);

void BM_Codelength(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto x = sample(symmetric(), n, 7);
    for (auto _ : state) benchmark::DoNotOptimize(codelength(x, CodecParams::paper_schedule()));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Codelength)->Arg(1 << 12)->Arg(1 << 16)->Arg(1 << 20);

void BM_TypeClassSize(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto m = static_cast<std::size_t>(state.range(1));
    const auto desc = block_frequencies(sample(ternary2(), n, 3), m);
    for (auto _ : state) benchmark::DoNotOptimize(type_class_size(desc));
}
BENCHMARK(BM_TypeClassSize)->ArgsProduct({{1 << 10, 1 << 14}, {1, 2, 4}});

void BM_SigmaSquared(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(sigma_squared(ternary2()));
}
BENCHMARK(BM_SigmaSquared);

}  // namespace

BENCHMARK_MAIN();
