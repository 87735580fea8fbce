#include <cmath>
#include <functional>
#include <numeric>

#include <gtest/gtest.h>

#include "entrokit/errors.hpp"
#include "entrokit/markov_chain.hpp"
#include "entrokit/models.hpp"
#include "entrokit/rng.hpp"
#include "entrokit/sampling.hpp"
#include "oracles.hpp"

using namespace entrokit;

namespace {

MarkovModel binary(std::size_t m, std::vector<double> rows) {
    return MarkovModel::create(Alphabet::indices(2), m, std::move(rows));
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::Empty;
}

}  // namespace

TEST(Models, RejectsBadRows) {
    EXPECT_EQ(kind_of([] { binary(1, {0.5, 0.6, 0.5, 0.5}); }), ErrorKind::Validation);
    EXPECT_EQ(kind_of([] { binary(1, {1.5, -0.5, 0.5, 0.5}); }), ErrorKind::Validation);
    EXPECT_EQ(kind_of([] { binary(1, {0.5, 0.5}); }), ErrorKind::Validation);
    EXPECT_EQ(kind_of([] { MarkovModel::create(Alphabet({"a", "a"}), 0, {0.5, 0.5}); }), ErrorKind::Validation);
    EXPECT_EQ(kind_of([] { MarkovModel::create(Alphabet({"a"}), 0, {1.0}); }), ErrorKind::Validation);
}

TEST(Models, ValidationNamesRow) {
    try {
        binary(1, {0.5, 0.5, 0.2, 0.2});
        FAIL();
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("1"), std::string::npos) << e.what();
    }
}

TEST(Models, ErgodicityGate) {
    EXPECT_EQ(kind_of([] { binary(1, {1, 0, 0, 1}); }), ErrorKind::NonErgodic);
    EXPECT_EQ(kind_of([] { binary(1, {0, 1, 1, 0}); }), ErrorKind::NonErgodic);
    const auto cyc = MarkovModel::create(Alphabet::indices(2), 1, {0, 1, 1, 0}, std::vector<double>{0.5, 0.5}, false);
    EXPECT_TRUE(cyc.irreducible());
    EXPECT_EQ(cyc.period(), 2U);
}

TEST(Models, StationaryLaw) {
    const auto sym = binary(1, {0.9, 0.1, 0.1, 0.9});
    auto pi = stationary_distribution(sym);
    EXPECT_NEAR(pi[0], 0.5, 1e-12);
    const auto skew = binary(1, {0.9, 0.1, 0.5, 0.5});
    pi = stationary_distribution(skew);
    EXPECT_NEAR(pi[0], 5.0 / 6.0, 1e-12);
    EXPECT_NEAR(pi[1], 1.0 / 6.0, 1e-12);
}

TEST(Models, StationaryMatchesPowerIteration) {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t l = 2 + rng.below(2);
        const std::size_t m = rng.below(3);
        const std::size_t K = static_cast<std::size_t>(std::pow(l, m));
        std::vector<double> rows;
        for (std::size_t c = 0; c < K; ++c) {
            std::vector<double> r(l);
            for (auto& v : r) v = 0.05 + rng.uniform();
            const double s = std::accumulate(r.begin(), r.end(), 0.0);
            for (auto v : r) rows.push_back(v / s);
        }
        const auto model = MarkovModel::create(Alphabet::indices(l), m, rows);
        const auto pi = stationary_distribution(model);
        const auto ref = oracle::stationary_power(model);
        for (std::size_t c = 0; c < K; ++c) EXPECT_NEAR(pi[c], ref[c], 1e-12);
    }
}

TEST(Models, ConditionalLaw) {
    const auto fair = binary(0, {0.25, 0.75});
    auto q = conditional_law(fair, {});
    EXPECT_DOUBLE_EQ(q[1], 0.75);
    const auto sym = binary(1, {0.9, 0.1, 0.1, 0.9});
    const std::vector<Symbol> zero{0};
    q = conditional_law(sym, zero);
    EXPECT_DOUBLE_EQ(q[0], 0.9);
    EXPECT_DOUBLE_EQ(q[1], 0.1);
    const auto m2 = binary(2, {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
    EXPECT_EQ(kind_of([&] { conditional_law(m2, zero); }), ErrorKind::BadContext);
}

TEST(Sampling, EmptyAndDeterministic) {
    const auto sym = binary(1, {0.9, 0.1, 0.1, 0.9});
    EXPECT_TRUE(sample(sym, 0, 3).empty());
    EXPECT_EQ(sample(sym, 1000, 42), sample(sym, 1000, 42));
    EXPECT_NE(sample(sym, 1000, 42), sample(sym, 1000, 43));
}

TEST(Sampling, Frequencies) {
    const auto sym = binary(1, {0.9, 0.1, 0.1, 0.9});
    double zeros = 0;
    const int runs = 20;
    for (int s = 0; s < runs; ++s) {
        const auto x = sample(sym, 100000, derive_seed(9, s));
        for (auto v : x.symbols()) zeros += v == 0;
    }
    const double f = zeros / (runs * 100000.0);
    EXPECT_GE(f, 0.495);
    EXPECT_LE(f, 0.505);

    const auto bern = binary(0, {0.75, 0.25});
    const auto x = sample(bern, 100000, 17);
    double ones = 0;
    for (auto v : x.symbols()) ones += v;
    EXPECT_GE(ones / 1e5, 0.245);
    EXPECT_LE(ones / 1e5, 0.255);
}

TEST(Sampling, StationarityBand) {
    // Symbol marginal at t in {1, n/2, n} over 10^4 replicates, 4 sigma band.
    const auto skew = MarkovModel::create(Alphabet::indices(3), 1, {0.7, 0.2, 0.1, 0.3, 0.3, 0.4, 0.1, 0.1, 0.8});
    const auto pi = oracle::stationary_power(skew);
    const std::size_t n = 64, R = 10000;
    for (std::size_t t : {std::size_t{1}, n / 2, n}) {
        std::vector<double> counts(3, 0.0);
        for (std::size_t r = 0; r < R; ++r) counts[sample(skew, n, derive_seed(123, r))[t - 1]] += 1;
        for (std::size_t s = 0; s < 3; ++s) {
            const double band = 4.0 * std::sqrt(pi[s] * (1 - pi[s]) / R);
            EXPECT_NEAR(counts[s] / R, pi[s], band) << "t=" << t << " s=" << s;
        }
    }
}

TEST(Sampling, HmmValidationAndConstants) {
    const auto hmm = HmmModel::create(Alphabet::indices(2), 2, {0.8, 0.2, 0.3, 0.7}, {0.9, 0.1, 0.2, 0.8});
    EXPECT_DOUBLE_EQ(hmm.epsilon(), 0.2 / 0.8);
    EXPECT_DOUBLE_EQ(hmm.eta(), std::max(0.9 / 0.2, 0.8 / 0.1));
    EXPECT_GT(hmm.epsilon(), 0.0);
    EXPECT_LT(hmm.epsilon(), 1.0);
    EXPECT_GT(hmm.eta(), 1.0);
    EXPECT_EQ(kind_of([] { HmmModel::create(Alphabet::indices(2), 2, {1.0, 0.0, 0.3, 0.7}, {0.9, 0.1, 0.2, 0.8}); }),
              ErrorKind::Validation);
    EXPECT_EQ(kind_of([] { HmmModel::create(Alphabet::indices(2), 2, {0.8, 0.2, 0.3, 0.7}, {1.0, 0.0, 0.2, 0.8}); }),
              ErrorKind::Validation);
    const auto s = sample(hmm, 500, 3);
    EXPECT_EQ(s.observed.size(), 500U);
    EXPECT_EQ(s.hidden.size(), 500U);
    EXPECT_TRUE(sample(hmm, 0, 3).observed.empty());
}

TEST(Blockwise, Validation) {
    EXPECT_EQ(kind_of([] { BlockwiseModel::create(0.2); }), ErrorKind::Validation);
    EXPECT_EQ(kind_of([] { BlockwiseModel::create(0.0); }), ErrorKind::Validation);
    const auto b = BlockwiseModel::create(0.1, 100000);
    double total = 0.0;
    for (std::uint64_t t = 1; t <= b.tail_cap(); ++t) total += b.pmf(t);
    EXPECT_NEAR(total, 1.0, 1e-9);
    EXPECT_NEAR(b.pmf(2) / b.pmf(1), std::pow(2.0, -1.4), 1e-12);
    EXPECT_GT(b.truncated_mass(), 0.0);
}

TEST(Blockwise, MarginalAndBlocks) {
    const auto b = BlockwiseModel::create(0.1, 100000000);
    EXPECT_TRUE(sample_blockwise(b, 0, 1).sequence.empty());
    // Blocks have infinite mean length, so symbols of one path are strongly
    // dependent; the marginal uses independent draws.
    double zeros = 0;
    const std::size_t draws = 100000;
    for (std::size_t r = 0; r < draws; ++r) zeros += sample_blockwise(b, 1, derive_seed(78, r)).sequence[0] == 0;
    const double f = zeros / static_cast<double>(draws);
    EXPECT_GE(f, 0.74);
    EXPECT_LE(f, 0.76);

    std::size_t complete = 0, zero_blocks = 0;
    for (int r = 0; r < 200; ++r) {
        const auto s = sample_blockwise(b, 500, derive_seed(77, r));
        ASSERT_EQ(s.sequence.size(), 500U);
        // The block log tiles the sequence and explains every symbol.
        std::size_t pos = 0;
        for (const auto& blk : s.blocks) {
            ASSERT_EQ(blk.start, pos);
            if (blk.all_zeros) {
                for (std::size_t i = blk.start; i < blk.start + blk.length; ++i) ASSERT_EQ(s.sequence[i], 0);
            }
            pos += blk.length;
            if (blk.complete) {
                ++complete;
                zero_blocks += blk.all_zeros;
            }
        }
        ASSERT_EQ(pos, 500U);
    }
    const double p = static_cast<double>(zero_blocks) / complete;
    EXPECT_NEAR(p, 0.5, 3.0 * std::sqrt(0.25 / complete));
}

TEST(Blockwise, CoinBlocksLookFair) {
    const auto b = BlockwiseModel::create(0.1, 100000000);
    double ones = 0, coin = 0;
    for (int r = 0; r < 50; ++r) {
        const auto s = sample_blockwise(b, 2000, derive_seed(5, r));
        for (const auto& blk : s.blocks) {
            if (blk.all_zeros) continue;
            for (std::size_t i = blk.start; i < blk.start + blk.length; ++i) ones += s.sequence[i];
            coin += static_cast<double>(blk.length);
        }
    }
    ASSERT_GT(coin, 1000);
    EXPECT_NEAR(ones / coin, 0.5, 4.0 * std::sqrt(0.25 / coin));
}

TEST(Rng, SeedDerivationIsStable) {
    EXPECT_EQ(derive_seed(1, 0), derive_seed(1, 0));
    EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
    EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
    Rng a(9), b(9);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.below(7), b.below(7));
}
