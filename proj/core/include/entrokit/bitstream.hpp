#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <gmpxx.h>

namespace entrokit {

/// Bits packed MSB-first.
class Bitstream {
public:
    std::size_t size() const noexcept { return length_; }
    bool bit(std::size_t i) const { return (bytes_[i >> 3] >> (7 - (i & 7))) & 1U; }
    const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }

    void push_back(bool b) {
        if ((length_ & 7) == 0) bytes_.push_back(0);
        if (b) bytes_.back() |= static_cast<std::uint8_t>(0x80U >> (length_ & 7));
        ++length_;
    }

    friend bool operator==(const Bitstream&, const Bitstream&) = default;

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t length_ = 0;
};

/// floor(log2 v) + 1 bits for v >= 1, 0 for v = 0.
unsigned bit_width_of(std::uint64_t v) noexcept;
/// ceil(log2 v) for v >= 1; 0 for v <= 1.
unsigned ceil_log2(std::uint64_t v) noexcept;
std::size_t ceil_log2(const mpz_class& v);

/// Length of the Elias delta code of v >= 1.
std::size_t elias_delta_length(std::uint64_t v);

class BitWriter {
public:
    void put(bool b) { out_.push_back(b); }
    void put_bits(std::uint64_t value, unsigned width);
    void put_big(const mpz_class& value, std::size_t width);
    void put_elias_delta(std::uint64_t v);

    const Bitstream& bits() const noexcept { return out_; }
    Bitstream take() { return std::move(out_); }

private:
    Bitstream out_;
};

/// Reads a Bitstream; every overrun throws Corrupt.
class BitReader {
public:
    explicit BitReader(const Bitstream& in) : in_(in) {}

    bool get();
    std::uint64_t get_bits(unsigned width);
    mpz_class get_big(std::size_t width);
    std::uint64_t get_elias_delta();

    std::size_t position() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return in_.size() - pos_; }

private:
    void need(std::size_t bits) const;

    const Bitstream& in_;
    std::size_t pos_ = 0;
};

/// File framing: the bits, zero padding, then a 3-bit pad length, so the
/// total is a whole number of bytes.
std::vector<std::uint8_t> to_file_bytes(const Bitstream& bits);
Bitstream from_file_bytes(const std::vector<std::uint8_t>& bytes);

}  // namespace entrokit
