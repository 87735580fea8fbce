#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include <gtest/gtest.h>

#include "entrokit/errors.hpp"
#include "entrokit/rng.hpp"
#include "entrokit/sampling.hpp"
#include "entrokit/type_class.hpp"
#include "entrokit/type_coder.hpp"
#include "oracles.hpp"

using namespace entrokit;

namespace {

SymbolSequence seq_of(const std::string& s, std::size_t l = 2) {
    std::vector<Symbol> v;
    for (char c : s) v.push_back(static_cast<Symbol>(c - '0'));
    return SymbolSequence(l, std::move(v));
}

SymbolSequence wrap(const std::vector<Symbol>& v, std::size_t l) { return SymbolSequence(l, v); }

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::Empty;
}

// Elias delta length by its definition: N = bit length of v, then
// (bit length of N) - 1 zeros, N's bits, and N - 1 bits of v.
std::size_t delta_len(std::uint64_t v) {
    std::size_t N = 0;
    while ((v >> N) != 0) ++N;
    std::size_t LN = 0;
    while ((N >> LN) != 0) ++LN;
    return (LN - 1) + LN + (N - 1);
}

std::size_t clog2(std::uint64_t v) {
    std::size_t k = 0;
    while ((std::uint64_t{1} << k) < v) ++k;
    return k;
}

MarkovModel random_model(Rng& rng, std::size_t l, std::size_t m) {
    const std::size_t K = static_cast<std::size_t>(std::pow(l, m));
    std::vector<double> rows;
    for (std::size_t c = 0; c < K; ++c) {
        std::vector<double> r(l);
        for (auto& v : r) v = 0.05 + rng.uniform();
        const double s = std::accumulate(r.begin(), r.end(), 0.0);
        for (auto v : r) rows.push_back(v / s);
    }
    return MarkovModel::create(Alphabet::indices(l), m, rows);
}

}  // namespace

TEST(LogStar, Values) {
    EXPECT_EQ(log_star(1), 0U);
    EXPECT_EQ(log_star(0.5), 0U);
    EXPECT_EQ(log_star(2), 1U);
    EXPECT_EQ(log_star(16), 3U);
    EXPECT_EQ(log_star(17), 4U);
    EXPECT_EQ(log_star(65536), 4U);
    for (double n = 1; n < 1e12; n = n * 1.37 + 1) EXPECT_LT(log_star(n), 2 * std::log2(n) + 2) << n;
}

TEST(Schedule, Order) {
    EXPECT_EQ(schedule_order(1, 2, 0.1), 0U);
    EXPECT_EQ(schedule_order(1024, 2, 0.1), 4U);
    EXPECT_EQ(schedule_order(65536, 2, 0.1), 6U);
    EXPECT_EQ(schedule_order(65536, 4, 0.1), 3U);
}

TEST(BlockFrequencies, PaperExample) {
    const auto d = block_frequencies(seq_of("01001"), 1);
    EXPECT_EQ(d.prefix, std::vector<Symbol>{0});
    // counts[c * 2 + x]: 0->0, 0->1, 1->0, 1->1.
    EXPECT_EQ(d.counts, (std::vector<std::uint64_t>{1, 2, 1, 0}));
    EXPECT_EQ(d, oracle::descriptor({0, 1, 0, 0, 1}, 2, 1));
    EXPECT_EQ(block_frequencies(seq_of("0110"), 0).counts, (std::vector<std::uint64_t>{2, 2}));
    EXPECT_EQ(kind_of([] { block_frequencies(seq_of("0"), 2); }), ErrorKind::TooShort);
}

TEST(TypeClass, PaperExample) {
    const auto x = seq_of("01001");
    const auto d = block_frequencies(x, 1);
    EXPECT_EQ(type_class_size(d), 2);
    EXPECT_EQ(rank_in_type_class(x, 1), 1);
    EXPECT_EQ(unrank(d, 0), seq_of("00101"));
    EXPECT_EQ(unrank(d, 1), x);
    EXPECT_EQ(kind_of([&] { unrank(d, 2); }), ErrorKind::IndexOutOfRange);
}

TEST(TypeClass, SingletonAndInfeasible) {
    EXPECT_EQ(type_class_size(block_frequencies(seq_of(std::string(100, '0')), 1)), 1);
    BlockFrequencyVector d;
    d.m = 1;
    d.l = 2;
    d.n = 3;
    d.prefix = {0};
    d.counts = {0, 0, 2, 0};  // only 1 -> 0 edges, but the walk starts at 0
    EXPECT_EQ(type_class_size(d), 0);
    EXPECT_EQ(kind_of([&] { unrank(d, 0); }), ErrorKind::Infeasible);
    d.counts = {0, 0, 1, 0};
    EXPECT_EQ(kind_of([&] { type_class_size(d); }), ErrorKind::Validation);
}

TEST(TypeClass, MatchesDpAndEnumeration) {
    for (std::size_t m = 0; m <= 2; ++m) {
        for (std::size_t n = m; n <= 10; ++n) {
            for (const auto& x : oracle::all_sequences(2, n)) {
                const auto members = oracle::enumerate_class(x, 2, m);
                const auto d = block_frequencies(wrap(x, 2), m);
                ASSERT_EQ(type_class_size(d), mpz_class(members.size()));
                const auto pos = std::find(members.begin(), members.end(), x) - members.begin();
                ASSERT_EQ(rank_in_type_class(wrap(x, 2), m), mpz_class(pos));
                ASSERT_EQ(unrank(d, pos), wrap(x, 2));
                ASSERT_EQ(oracle::dp_class_size(d), type_class_size(d));
            }
        }
    }
}

TEST(TypeClass, TernaryMatchesEnumeration) {
    for (std::size_t m = 0; m <= 1; ++m) {
        for (std::size_t n = m; n <= 7; ++n) {
            for (const auto& x : oracle::all_sequences(3, n)) {
                const auto members = oracle::enumerate_class(x, 3, m);
                const auto d = block_frequencies(wrap(x, 3), m);
                ASSERT_EQ(type_class_size(d), mpz_class(members.size()));
                const auto pos = std::find(members.begin(), members.end(), x) - members.begin();
                ASSERT_EQ(rank_in_type_class(wrap(x, 3), m), mpz_class(pos));
            }
        }
    }
    const auto d = block_frequencies(wrap({0, 1, 2, 2, 0, 1}, 3), 1);
    EXPECT_EQ(type_class_size(d), 1);
}

TEST(TypeClass, DpAgreesOnLongerSequences) {
    Rng rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t l = 2 + rng.below(2);
        const std::size_t m = rng.below(3);
        const std::size_t n = m + rng.below(20);
        std::vector<Symbol> v(n);
        for (auto& s : v) s = static_cast<Symbol>(rng.below(l));
        const auto d = block_frequencies(wrap(v, l), m);
        ASSERT_EQ(type_class_size(d), oracle::dp_class_size(d));
    }
}

TEST(TypeClass, RankUnrankInverse) {
    Rng rng(13);
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t l = 2 + rng.below(2);
        const std::size_t m = rng.below(3);
        const auto model = random_model(rng, l, rng.below(3));
        const std::size_t n = m + rng.below(65 - m);
        const auto x = sample(model, n, derive_seed(14, trial));
        const auto d = block_frequencies(x, m);
        const auto r = rank_in_type_class(x, m);
        ASSERT_LT(r, type_class_size(d));
        ASSERT_EQ(unrank(d, r), x);
    }
}

TEST(Codec, RoundTripPaperExample) {
    const auto x = seq_of("01001");
    const auto code = encode(x, CodecParams::fixed(1));
    EXPECT_EQ(decode(code), x);
    const auto b = codelength_breakdown(x, CodecParams::fixed(1));
    EXPECT_EQ(b.index, 1U);
    EXPECT_EQ(code.size(), b.total());
}

TEST(Codec, HeaderOnlyForSingletonClass) {
    const auto x = seq_of(std::string(100, '0'));
    const auto b = codelength_breakdown(x, CodecParams::fixed(1));
    EXPECT_EQ(b.index, 0U);
    const std::size_t fixed = 8 + 8 + delta_len(2) + delta_len(101);
    EXPECT_EQ(b.fixed, fixed);
    EXPECT_EQ(b.prefix, 1U);
    EXPECT_EQ(b.counts, 4 * clog2(100));
    EXPECT_EQ(encode(x, CodecParams::fixed(1)).size(), fixed + 1 + 4 * clog2(100));
}

TEST(Codec, ConstantsFollowGrammar) {
    for (std::size_t l : {2, 3, 4, 200}) {
        for (std::size_t m : {0, 1, 3}) {
            for (std::size_t n : {5, 100, 4096}) {
                const auto c = codec_constants(l, m, n);
                EXPECT_EQ(c.c_prime, 16 + delta_len(m + 1) + delta_len(n + 1));
                EXPECT_EQ(c.k_sym, clog2(l));
                EXPECT_EQ(c.zeta, c.c_prime + c.k_sym);
            }
        }
    }
}

TEST(Codec, RandomRoundTrips) {
    Rng rng(15);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t l = 2 + rng.below(3);
        const std::size_t m = rng.below(3);
        const auto model = random_model(rng, l, rng.below(2));
        const std::size_t n = m + rng.below(300);
        const auto x = sample(model, n, derive_seed(16, trial));
        const auto params = CodecParams::fixed(m);
        const auto code = encode(x, params);
        ASSERT_EQ(code.size(), codelength(x, params));
        ASSERT_EQ(decode(code), x);
        ASSERT_EQ(decode(from_file_bytes(to_file_bytes(code))), x);
    }
}

TEST(Codec, ScheduleRoundTrip) {
    const auto model = MarkovModel::create(Alphabet::indices(2), 0, {0.7, 0.3});
    for (std::size_t n : {1, 2, 100, 1024, 5000}) {
        const auto x = sample(model, n, n);
        const auto code = encode(x, CodecParams::paper_schedule());
        EXPECT_EQ(decode(code), x);
        EXPECT_EQ(codelength_breakdown(x, CodecParams::paper_schedule()).order, schedule_order(n, 2, 0.1));
    }
}

TEST(Codec, EmptyAndShort) {
    const SymbolSequence empty(2, {});
    EXPECT_EQ(decode(encode(empty, CodecParams::fixed(0))), empty);
    EXPECT_EQ(kind_of([] { encode(seq_of("0"), CodecParams::fixed(2)); }), ErrorKind::TooShort);
    EXPECT_EQ(decode(encode(seq_of("01"), CodecParams::fixed(2))), seq_of("01"));
}

TEST(Codec, KraftAndCountBound) {
    for (std::size_t m : {0, 1, 2}) {
        double kraft = 0.0;
        std::map<std::size_t, std::size_t> by_length;
        for (std::size_t n = m; n <= 8; ++n) {
            for (const auto& x : oracle::all_sequences(2, n)) {
                const auto len = codelength(wrap(x, 2), CodecParams::fixed(m));
                kraft += std::ldexp(1.0, -static_cast<int>(len));
                ++by_length[len];
            }
        }
        EXPECT_LE(kraft, 1.0) << "m=" << m;
        std::size_t below = 0;
        for (std::size_t v = 0; v <= 200; ++v) {
            EXPECT_LE(static_cast<double>(below), std::ldexp(1.0, static_cast<int>(v)));
            below += by_length.count(v) ? by_length[v] : 0;
        }
    }
}

TEST(Codec, PrefixFreeOnSmallSet) {
    std::vector<Bitstream> codes;
    for (std::size_t n = 1; n <= 6; ++n) {
        for (const auto& x : oracle::all_sequences(2, n)) codes.push_back(encode(wrap(x, 2), CodecParams::fixed(1)));
    }
    for (std::size_t i = 0; i < codes.size(); ++i) {
        for (std::size_t j = 0; j < codes.size(); ++j) {
            if (i == j || codes[i].size() > codes[j].size()) continue;
            bool prefix = true;
            for (std::size_t k = 0; k < codes[i].size() && prefix; ++k) prefix = codes[i].bit(k) == codes[j].bit(k);
            ASSERT_FALSE(prefix) << i << " is a prefix of " << j;
        }
    }
}

TEST(Codec, DamagedCodewordsNeverAlias) {
    Rng rng(17);
    const auto model = MarkovModel::create(Alphabet::indices(3), 1, {0.6, 0.3, 0.1, 0.2, 0.5, 0.3, 0.3, 0.3, 0.4});
    for (int trial = 0; trial < 300; ++trial) {
        const auto x = sample(model, 1 + rng.below(80), derive_seed(18, trial));
        const auto params = CodecParams::fixed(1);
        const auto code = encode(x, params);
        // Truncation.
        BitWriter cut;
        const std::size_t keep = rng.below(code.size());
        for (std::size_t i = 0; i < keep; ++i) cut.put(code.bit(i));
        EXPECT_THROW(decode(cut.bits()), Error);
        // Single flips.
        for (int f = 0; f < 10; ++f) {
            const std::size_t at = rng.below(code.size());
            BitWriter w;
            for (std::size_t i = 0; i < code.size(); ++i) w.put(i == at ? !code.bit(i) : code.bit(i));
            try {
                const auto y = decode(w.bits());
                EXPECT_NE(y, x);
                EXPECT_NE(encode(y, params), code);
            } catch (const Error& e) {
                EXPECT_EQ(e.kind(), ErrorKind::Corrupt);
            }
        }
    }
    EXPECT_EQ(kind_of([] { decode(from_file_bytes({0xde, 0xad, 0xbe, 0xef})); }), ErrorKind::Corrupt);
}

TEST(Codec, FileFraming) {
    for (std::size_t bits = 0; bits < 40; ++bits) {
        BitWriter w;
        for (std::size_t i = 0; i < bits; ++i) w.put(i % 3 == 0);
        const auto bytes = to_file_bytes(w.bits());
        EXPECT_EQ(bytes.size(), (bits + 3 + 7) / 8);
        EXPECT_EQ(from_file_bytes(bytes), w.bits());
    }
    EXPECT_THROW(from_file_bytes({}), Error);
}

TEST(Codec, Guard) {
    EXPECT_EQ(kind_of([] { check_codec_guard(2, 30, 1000); }), ErrorKind::GuardExceeded);
    EXPECT_EQ(kind_of([] { check_codec_guard(2, 0, (std::size_t{1} << 28) + 1); }), ErrorKind::GuardExceeded);
    EXPECT_NO_THROW(check_codec_guard(2, 4, 100000));
}

TEST(Codec, EliasDelta) {
    for (std::uint64_t v = 1; v < 3000; v = v * 3 + 1) {
        BitWriter w;
        w.put_elias_delta(v);
        EXPECT_EQ(w.bits().size(), delta_len(v));
        EXPECT_EQ(elias_delta_length(v), delta_len(v));
        BitReader r(w.bits());
        EXPECT_EQ(r.get_elias_delta(), v);
    }
}

TEST(UpperBound, HoldsExhaustively) {
    const auto bern = MarkovModel::create(Alphabet::indices(2), 0, {0.75, 0.25});
    const auto sym = MarkovModel::create(Alphabet::indices(2), 1, {0.9, 0.1, 0.1, 0.9});
    const auto skew = MarkovModel::create(Alphabet::indices(2), 1, {0.9, 0.1, 0.5, 0.5});
    for (const auto* model : {&bern, &sym, &skew}) {
        const auto params = CodecParams::fixed(model->order());
        for (std::size_t n = model->order(); n <= 12; ++n) {
            for (const auto& x : oracle::all_sequences(2, n)) {
                const auto s = wrap(x, 2);
                ASSERT_LE(static_cast<double>(codelength(s, params)), paper_upper_bound(s, params, *model) + 1e-9);
            }
        }
    }
}

TEST(UpperBound, UniformLikelihoodTermIsN) {
    const auto fair = MarkovModel::create(Alphabet::indices(2), 0, {0.5, 0.5});
    for (std::size_t n : {1, 7, 64, 1000}) {
        const auto x = sample(fair, n, n);
        const double b = paper_upper_bound(x, CodecParams::fixed(0), fair);
        EXPECT_DOUBLE_EQ(b - paper_bound_header(2, 0, n), static_cast<double>(n));
    }
}

TEST(UpperBound, ZeroProbabilityBlock) {
    const auto stuck = MarkovModel::create(Alphabet::indices(2), 1, {1.0, 0.0, 0.5, 0.5}, std::vector<double>{0.5, 0.5}, false);
    EXPECT_EQ(kind_of([&] { paper_upper_bound(seq_of("0101"), CodecParams::fixed(1), stuck); }),
              ErrorKind::ZeroProbabilityBlock);
}

TEST(UpperBound, IndexBoundByEmpiricalLaw) {
    Rng rng(19);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t l = 2 + rng.below(2);
        const std::size_t m = rng.below(3);
        const std::size_t n = m + rng.below(200);
        std::vector<Symbol> v(n);
        for (auto& s : v) s = static_cast<Symbol>(rng.below(l));
        const auto d = block_frequencies(wrap(v, l), m);
        double bits = 0.0;  // -(n - m) sum f log2 Qhat
        const std::size_t K = d.counts.size() / l;
        for (std::size_t c = 0; c < K; ++c) {
            std::uint64_t row = 0;
            for (std::size_t x = 0; x < l; ++x) row += d.counts[c * l + x];
            for (std::size_t x = 0; x < l; ++x) {
                const auto N = static_cast<double>(d.counts[c * l + x]);
                if (N > 0) bits -= N * std::log2(N / static_cast<double>(row));
            }
        }
        ASSERT_LE(static_cast<double>(ceil_log2(type_class_size(d))), bits + 1.0 + 1e-9);
    }
}

TEST(UpperBound, SingleFlipLipschitz) {
    Rng rng(20);
    struct Config {
        std::size_t l, m, n;
    };
    for (const Config cfg : {Config{2, 0, 512}, Config{2, 1, 256}, Config{3, 2, 300}, Config{4, 1, 128}}) {
        const auto model = random_model(rng, cfg.l, cfg.m);
        const auto c = codec_constants(cfg.l, cfg.m, cfg.n);
        const double cap = static_cast<double>(c.c_prime + log_star(static_cast<double>(cfg.n)) + c.k_sym);
        const auto params = CodecParams::fixed(cfg.m);
        for (int trial = 0; trial < 10000; ++trial) {
            const auto x = sample(model, cfg.n, derive_seed(21, trial));
            std::vector<Symbol> y(x.symbols().begin(), x.symbols().end());
            const std::size_t at = rng.below(cfg.n);
            y[at] = static_cast<Symbol>((y[at] + 1 + rng.below(cfg.l - 1)) % cfg.l);
            const double diff = std::abs(static_cast<double>(codelength(x, params)) -
                                         static_cast<double>(codelength(wrap(y, cfg.l), params)));
            ASSERT_LE(diff, cap);
        }
    }
}
