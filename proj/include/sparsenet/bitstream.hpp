#ifndef SPARSENET_BITSTREAM_HPP
#define SPARSENET_BITSTREAM_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sparsenet/error.hpp"

namespace sparsenet {

/// Append-only bit sequence, packed big-endian within bytes (first bit is the MSB of byte 0).
class Bitstream {
 public:
  Bitstream() = default;

  /// Wraps packed bytes; every bit of every byte counts as payload.
  static Bitstream from_bytes(std::span<const std::uint8_t> bytes) {
    Bitstream b;
    b.bytes_.assign(bytes.begin(), bytes.end());
    b.size_ = bytes.size() * 8;
    return b;
  }

  std::size_t size() const noexcept { return size_; }
  const std::vector<std::uint8_t>& bytes() const noexcept { return bytes_; }

  void push(bool bit) {
    if (size_ % 8 == 0) bytes_.push_back(0);
    if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (size_ % 8));
    ++size_;
  }

  /// Appends the low `width` bits of value, most significant first.
  void push_bits(std::uint64_t value, unsigned width) {
    for (unsigned i = width; i-- > 0;) push(((value >> i) & 1u) != 0);
  }

  void push_unary(std::size_t ones) {
    for (std::size_t i = 0; i < ones; ++i) push(true);
    push(false);
  }

  bool at(std::size_t i) const {
    if (i >= size_) throw ValidationError("bitstream: index out of range");
    return (bytes_[i / 8] & (0x80u >> (i % 8))) != 0;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(size_);
    for (std::size_t i = 0; i < size_; ++i) s += at(i) ? '1' : '0';
    return s;
  }

  friend bool operator==(const Bitstream&, const Bitstream&) = default;

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t size_ = 0;
};

/// Sequential reader; any read past the end throws ParseError carrying the bit offset.
class BitReader {
 public:
  explicit BitReader(const Bitstream& bits) : bits_(&bits) {}

  std::size_t position() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bits_->size() - pos_; }

  bool read() {
    if (pos_ >= bits_->size()) throw ParseError("bitstream truncated at bit " + std::to_string(pos_), pos_);
    return bits_->at(pos_++);
  }

  std::uint64_t read_bits(unsigned width) {
    if (width > remaining()) {
      throw ParseError("bitstream truncated at bit " + std::to_string(pos_) + " (need " + std::to_string(width) +
                           " bits)",
                       pos_);
    }
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) v = (v << 1) | (bits_->at(pos_++) ? 1u : 0u);
    return v;
  }

  /// Counts ones up to the terminating zero; rejects runs longer than limit.
  std::size_t read_unary(std::size_t limit) {
    const std::size_t start = pos_;
    std::size_t n = 0;
    while (read()) {
      if (++n > limit) throw ParseError("unary field too long at bit " + std::to_string(start), start);
    }
    return n;
  }

 private:
  const Bitstream* bits_;
  std::size_t pos_ = 0;
};

}  // namespace sparsenet

#endif  // SPARSENET_BITSTREAM_HPP
