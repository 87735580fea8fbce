#include "entrokit/bitstream.hpp"

#include <bit>

#include "entrokit/errors.hpp"

namespace entrokit {

unsigned bit_width_of(std::uint64_t v) noexcept { return static_cast<unsigned>(std::bit_width(v)); }

unsigned ceil_log2(std::uint64_t v) noexcept { return v <= 1 ? 0 : bit_width_of(v - 1); }

std::size_t ceil_log2(const mpz_class& v) {
    if (v <= 1) return 0;
    const mpz_class w = v - 1;
    return mpz_sizeinbase(w.get_mpz_t(), 2);
}

std::size_t elias_delta_length(std::uint64_t v) {
    if (v == 0) fail(ErrorKind::Validation, "Elias delta codes start at 1");
    const unsigned n = bit_width_of(v) - 1;
    const unsigned len = n + 1;
    return 2 * (bit_width_of(len) - 1) + 1 + n;
}

void BitWriter::put_bits(std::uint64_t value, unsigned width) {
    for (unsigned i = width; i-- > 0;) out_.push_back((value >> i) & 1U);
}

void BitWriter::put_big(const mpz_class& value, std::size_t width) {
    for (std::size_t i = width; i-- > 0;) out_.push_back(mpz_tstbit(value.get_mpz_t(), i) != 0);
}

void BitWriter::put_elias_delta(std::uint64_t v) {
    if (v == 0) fail(ErrorKind::Validation, "Elias delta codes start at 1");
    const unsigned n = bit_width_of(v) - 1;
    const unsigned len = n + 1;
    const unsigned len_bits = bit_width_of(len);
    for (unsigned i = 1; i < len_bits; ++i) out_.push_back(false);
    put_bits(len, len_bits);
    put_bits(v, n);  // v without its leading 1
}

void BitReader::need(std::size_t bits) const {
    if (bits > remaining()) fail(ErrorKind::Corrupt, "codeword ends early");
}

bool BitReader::get() {
    need(1);
    return in_.bit(pos_++);
}

std::uint64_t BitReader::get_bits(unsigned width) {
    need(width);
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) v = (v << 1) | static_cast<std::uint64_t>(in_.bit(pos_++));
    return v;
}

mpz_class BitReader::get_big(std::size_t width) {
    need(width);
    mpz_class v = 0;
    for (std::size_t i = width; i-- > 0;) {
        if (in_.bit(pos_++)) mpz_setbit(v.get_mpz_t(), i);
    }
    return v;
}

std::uint64_t BitReader::get_elias_delta() {
    unsigned zeros = 0;
    while (!get()) {
        if (++zeros > 6) fail(ErrorKind::Corrupt, "Elias delta prefix too long");
    }
    const std::uint64_t len = (std::uint64_t{1} << zeros) | get_bits(zeros);
    if (len > 64) fail(ErrorKind::Corrupt, "Elias delta value exceeds 64 bits");
    const auto n = static_cast<unsigned>(len - 1);
    const std::uint64_t low = get_bits(n);
    return n == 64 ? low : (std::uint64_t{1} << n) | low;
}

std::vector<std::uint8_t> to_file_bytes(const Bitstream& bits) {
    Bitstream framed = bits;
    const unsigned pad = static_cast<unsigned>((8 - (bits.size() + 3) % 8) % 8);
    for (unsigned i = 0; i < pad; ++i) framed.push_back(false);
    for (unsigned i = 3; i-- > 0;) framed.push_back((pad >> i) & 1U);
    return framed.bytes();
}

Bitstream from_file_bytes(const std::vector<std::uint8_t>& bytes) {
    if (bytes.empty()) fail(ErrorKind::Corrupt, "empty codeword file");
    const std::size_t total = bytes.size() * 8;
    const unsigned pad = bytes.back() & 7U;
    if (total < 3 + pad) fail(ErrorKind::Corrupt, "pad length exceeds file");
    const std::size_t length = total - 3 - pad;
    Bitstream out;
    for (std::size_t i = 0; i < total - 3; ++i) {
        const bool b = (bytes[i >> 3] >> (7 - (i & 7))) & 1U;
        if (i < length) {
            out.push_back(b);
        } else if (b) {
            fail(ErrorKind::Corrupt, "non-zero padding bits");
        }
    }
    return out;
}

}  // namespace entrokit
