#include "entrokit/type_coder.hpp"

#include <cmath>

#include "entrokit/errors.hpp"
#include "entrokit/markov_chain.hpp"

namespace entrokit {

std::size_t log_star(double n) {
    std::size_t k = 0;
    while (n > 1.0) {
        n = std::log2(n);
        ++k;
    }
    return k;
}

std::size_t schedule_order(std::size_t n, std::size_t l, double epsilon) {
    if (n <= 1) return 0;
    const double v = (0.5 - epsilon) / std::log2(static_cast<double>(l)) * std::log2(static_cast<double>(n));
    return v <= 0.0 ? 0 : static_cast<std::size_t>(std::floor(v));
}

CodecConstants codec_constants(std::size_t l, std::size_t m, std::size_t n) {
    CodecConstants c;
    c.c_prime = 16 + elias_delta_length(m + 1) + elias_delta_length(n + 1);
    c.k_sym = ceil_log2(l);
    c.zeta = c.c_prime + c.k_sym;
    return c;
}

namespace {

// l^(m+1) and the count field width, or nullopt on overflow past the guard.
struct Layout {
    std::uint64_t blocks = 0;
    unsigned width = 0;
};

bool layout_within_guard(std::size_t l, std::size_t m, std::size_t n, Layout& out) {
    std::uint64_t blocks = 1;
    for (std::size_t i = 0; i <= m; ++i) {
        blocks *= l;
        if (blocks > kHeaderGuardBits) return false;
    }
    const unsigned guard_width = ceil_log2(static_cast<std::uint64_t>(n) + 1);
    if (blocks * guard_width > kHeaderGuardBits) return false;
    if (n > kMaxCodecLength) return false;
    out.blocks = blocks;
    out.width = ceil_log2(static_cast<std::uint64_t>(n - m) + 1);
    return true;
}

}  // namespace

void check_codec_guard(std::size_t l, std::size_t m, std::size_t n) {
    Layout layout;
    if (!layout_within_guard(l, m, n, layout)) {
        fail(ErrorKind::GuardExceeded, "header for l = " + std::to_string(l) + ", m = " + std::to_string(m) + ", n = " +
                                           std::to_string(n) + " exceeds the 2^26-bit count table or 2^28 symbols");
    }
}

CodelengthBreakdown codelength_breakdown(const BlockFrequencyVector& desc) {
    const auto k = codec_constants(desc.l, desc.m, desc.n);
    CodelengthBreakdown b;
    b.order = desc.m;
    b.fixed = k.c_prime;
    b.prefix = desc.m * k.k_sym;
    b.counts = desc.counts.size() * ceil_log2(static_cast<std::uint64_t>(desc.n - desc.m) + 1);
    b.index = ceil_log2(type_class_size(desc));
    return b;
}

CodelengthBreakdown codelength_breakdown(const SymbolSequence& seq, const CodecParams& params) {
    const std::size_t m = params.order_for(seq.size(), seq.alphabet_size());
    if (seq.size() < m) fail(ErrorKind::TooShort, "sequence shorter than the codec order");
    check_codec_guard(seq.alphabet_size(), m, seq.size());
    return codelength_breakdown(block_frequencies(seq, m));
}

std::size_t codelength(const SymbolSequence& seq, const CodecParams& params) {
    return codelength_breakdown(seq, params).total();
}

Bitstream encode(const SymbolSequence& seq, const CodecParams& params) {
    const std::size_t l = seq.alphabet_size();
    const std::size_t n = seq.size();
    const std::size_t m = params.order_for(n, l);
    if (n < m) fail(ErrorKind::TooShort, "sequence shorter than the codec order");
    check_codec_guard(l, m, n);
    const auto desc = block_frequencies(seq, m);
    const unsigned k_sym = ceil_log2(l);
    const unsigned width = ceil_log2(static_cast<std::uint64_t>(n - m) + 1);

    BitWriter w;
    w.put_bits(kCodecVersion, 8);
    w.put_bits(l, 8);
    w.put_elias_delta(m + 1);
    w.put_elias_delta(n + 1);
    for (Symbol s : desc.prefix) w.put_bits(s, k_sym);
    for (std::uint64_t c : desc.counts) w.put_bits(c, width);
    const mpz_class size = type_class_size(desc);
    const std::size_t index_bits = ceil_log2(size);
    if (index_bits > 0) w.put_big(rank_in_type_class(seq, m), index_bits);
    return w.take();
}

SymbolSequence decode(const Bitstream& bits) {
    BitReader r(bits);
    if (r.get_bits(8) != kCodecVersion) fail(ErrorKind::Corrupt, "unknown codec version");
    const std::size_t l = r.get_bits(8);
    if (l < 2) fail(ErrorKind::Corrupt, "alphabet size below 2");
    const std::uint64_t m1 = r.get_elias_delta();
    const std::uint64_t n1 = r.get_elias_delta();
    const std::uint64_t m = m1 - 1;
    const std::uint64_t n = n1 - 1;
    if (n < m) fail(ErrorKind::Corrupt, "length below order");
    Layout layout;
    if (!layout_within_guard(l, m, n, layout)) fail(ErrorKind::Corrupt, "header exceeds the codec guard");
    const unsigned k_sym = ceil_log2(l);
    // Both tables must fit in what is left before anything is allocated.
    const std::uint64_t table_bits = m * k_sym + layout.blocks * layout.width;
    if (table_bits > r.remaining()) fail(ErrorKind::Corrupt, "codeword ends inside the header");

    BlockFrequencyVector desc;
    desc.l = l;
    desc.m = m;
    desc.n = n;
    desc.prefix.reserve(m);
    for (std::uint64_t i = 0; i < m; ++i) {
        const std::uint64_t s = r.get_bits(k_sym);
        if (s >= l) fail(ErrorKind::Corrupt, "prefix symbol outside the alphabet");
        desc.prefix.push_back(static_cast<Symbol>(s));
    }
    desc.counts.resize(layout.blocks);
    std::uint64_t total = 0;
    for (auto& c : desc.counts) {
        c = r.get_bits(layout.width);
        total += c;
    }
    if (total != n - m) fail(ErrorKind::Corrupt, "counts do not sum to n - m");
    const mpz_class size = type_class_size(desc);
    if (size == 0) fail(ErrorKind::Corrupt, "counts admit no sequence");
    const std::size_t index_bits = ceil_log2(size);
    if (index_bits != r.remaining()) {
        fail(ErrorKind::Corrupt, index_bits > r.remaining() ? "codeword ends inside the index" : "trailing bits after the index");
    }
    const mpz_class index = r.get_big(index_bits);
    if (index >= size) fail(ErrorKind::Corrupt, "index outside the type class");
    return unrank(desc, index);
}

std::vector<double> model_block_conditional(const MarkovModel& model, std::size_t m) {
    const std::size_t l = model.alphabet_size();
    const std::size_t k = model.order();
    const ContextSpace target(l, m);
    std::vector<double> q(target.count() * l, 0.0);
    if (k <= m) {
        // The model reads the last k symbols of the m-context.
        std::size_t reduce = 1;
        for (std::size_t i = 0; i < k; ++i) reduce *= l;
        for (std::size_t c = 0; c < target.count(); ++c) {
            const auto row = model.row(c % reduce);
            for (std::size_t x = 0; x < l; ++x) q[c * l + x] = row[x];
        }
        return q;
    }
    const auto pi = stationary_distribution(model);
    std::size_t reduce = 1;
    for (std::size_t i = 0; i < m; ++i) reduce *= l;
    std::vector<double> mass(target.count(), 0.0);
    for (std::size_t c = 0; c < pi.size(); ++c) {
        mass[c % reduce] += pi[c];
        for (std::size_t x = 0; x < l; ++x) q[(c % reduce) * l + x] += pi[c] * model.prob(c, static_cast<Symbol>(x));
    }
    for (std::size_t c = 0; c < target.count(); ++c) {
        for (std::size_t x = 0; x < l; ++x) q[c * l + x] = mass[c] > 0.0 ? q[c * l + x] / mass[c] : 0.0;
    }
    return q;
}

double paper_bound_header(std::size_t l, std::size_t m, std::size_t n) {
    const auto k = codec_constants(l, m, n);
    double blocks = 1.0;
    for (std::size_t i = 0; i <= m; ++i) blocks *= static_cast<double>(l);
    return static_cast<double>(k.c_prime) + static_cast<double>(log_star(static_cast<double>(m))) +
           static_cast<double>(l * k.k_sym) + static_cast<double>(m * k.k_sym) +
           blocks * static_cast<double>(ceil_log2(static_cast<std::uint64_t>(n - m) + 1));
}

double paper_upper_bound(const SymbolSequence& seq, const CodecParams& params, const MarkovModel& model) {
    if (model.alphabet_size() != seq.alphabet_size()) fail(ErrorKind::Validation, "model and sequence alphabets differ");
    const std::size_t m = params.order_for(seq.size(), seq.alphabet_size());
    if (seq.size() < m) fail(ErrorKind::TooShort, "sequence shorter than the codec order");
    check_codec_guard(seq.alphabet_size(), m, seq.size());
    const auto desc = block_frequencies(seq, m);
    const auto q = model_block_conditional(model, m);
    double loglik = 0.0;
    for (std::size_t j = 0; j < desc.counts.size(); ++j) {
        if (desc.counts[j] == 0) continue;
        if (!(q[j] > 0.0)) fail(ErrorKind::ZeroProbabilityBlock, "observed block " + std::to_string(j) + " has Q = 0");
        loglik += static_cast<double>(desc.counts[j]) * std::log2(q[j]);
    }
    return paper_bound_header(seq.alphabet_size(), m, seq.size()) - loglik;
}

}  // namespace entrokit
