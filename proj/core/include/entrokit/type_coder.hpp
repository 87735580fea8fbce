#pragma once

#include <cstddef>
#include <cstdint>

#include <gmpxx.h>

#include "entrokit/bitstream.hpp"
#include "entrokit/models.hpp"
#include "entrokit/type_class.hpp"

namespace entrokit {

/// Iterated logarithm on the reals: 0 for n <= 1, else 1 + log*(log2 n).
std::size_t log_star(double n);

/// floor(((1/2 - epsilon) / log2 l) * log2 n), and 0 for n <= 1.
std::size_t schedule_order(std::size_t n, std::size_t l, double epsilon);

struct CodecParams {
    std::size_t m = 0;
    bool schedule = false;  // use schedule_order(n, l, epsilon) instead of m
    double epsilon = 0.1;

    static CodecParams fixed(std::size_t m) { return {m, false, 0.1}; }
    static CodecParams paper_schedule(double epsilon = 0.1) { return {0, true, epsilon}; }

    std::size_t order_for(std::size_t n, std::size_t l) const { return schedule ? schedule_order(n, l, epsilon) : m; }
};

inline constexpr unsigned kCodecVersion = 1;
inline constexpr std::uint64_t kHeaderGuardBits = std::uint64_t{1} << 26;
inline constexpr std::size_t kMaxCodecLength = std::size_t{1} << 28;

/// The codec's concrete stand-ins for the machine-dependent constants.
struct CodecConstants {
    std::size_t c_prime = 0;  // version + l + the two Elias delta envelopes
    std::size_t k_sym = 0;    // ceil(log2 l), the cost of naming one symbol
    std::size_t zeta = 0;     // c_prime + k_sym
};

CodecConstants codec_constants(std::size_t l, std::size_t m, std::size_t n);

struct CodelengthBreakdown {
    std::size_t order = 0;
    std::size_t fixed = 0;    // c_prime
    std::size_t prefix = 0;   // m * k_sym
    std::size_t counts = 0;   // l^(m+1) * ceil(log2(n - m + 1))
    std::size_t index = 0;    // ceil(log2 |T|)
    std::size_t total() const noexcept { return fixed + prefix + counts + index; }
};

/// Throws GuardExceeded when l^(m+1) ceil(log2(n+1)) > 2^26 or n > 2^28.
void check_codec_guard(std::size_t l, std::size_t m, std::size_t n);

/// Header layout, MSB first:
///   [8: version = 1][8: l][delta(m + 1)][delta(n + 1)]
///   [m x ceil(log2 l): prefix][l^(m+1) x ceil(log2(n - m + 1)): counts]
///   [ceil(log2 |T|): index, absent when |T| = 1]
Bitstream encode(const SymbolSequence& seq, const CodecParams& params);

/// Throws Corrupt on any inconsistency, including trailing bits.
SymbolSequence decode(const Bitstream& bits);

/// Length of encode(seq, params) without ranking.
CodelengthBreakdown codelength_breakdown(const SymbolSequence& seq, const CodecParams& params);
std::size_t codelength(const SymbolSequence& seq, const CodecParams& params);

/// Same, starting from the descriptor.
CodelengthBreakdown codelength_breakdown(const BlockFrequencyVector& desc);

/// Model conditional Q(x | m-context). Orders above m are marginalized with
/// the stationary law. Result has l^(m+1) entries.
std::vector<double> model_block_conditional(const MarkovModel& model, std::size_t m);

/// C' + log*(m) + l K_sym + m K_sym + l^(m+1) ceil(log2(n - m + 1))
///   - sum_j N_j log2 Q_j.
/// Throws ZeroProbabilityBlock when an observed block has Q = 0.
double paper_upper_bound(const SymbolSequence& seq, const CodecParams& params, const MarkovModel& model);

/// The deterministic part of paper_upper_bound, everything but the
/// likelihood term.
double paper_bound_header(std::size_t l, std::size_t m, std::size_t n);

}  // namespace entrokit
