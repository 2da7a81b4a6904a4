#pragma once

// Packed bit vector used for codewords. Bits are MSB-first within each byte;
// fixed-width integer fields are emitted most significant bit first.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pvlc/errors.hpp"

namespace pvlc {

class Bitstring {
 public:
  Bitstring() = default;

  std::size_t size() const { return nbits_; }
  bool empty() const { return nbits_ == 0; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

  bool bit(std::size_t i) const {
    if (i >= nbits_) fail(Errc::IndexOutOfRange, "bit index past end of bitstring");
    return (bytes_[i >> 3] >> (7 - (i & 7))) & 1u;
  }

  void push_back(bool b) {
    if ((nbits_ & 7) == 0) bytes_.push_back(0);
    if (b) bytes_[nbits_ >> 3] |= static_cast<std::uint8_t>(1u << (7 - (nbits_ & 7)));
    ++nbits_;
  }

  void append(const Bitstring& other) {
    for (std::size_t i = 0; i < other.size(); ++i) push_back(other.bit(i));
  }

  // Writes `width` bits of `value`, most significant first. width == 0 writes nothing.
  void append_uint(std::uint64_t value, unsigned width) {
    if (width > 64) fail(Errc::DomainError, "field width exceeds 64 bits");
    if (width < 64 && (value >> width) != 0)
      fail(Errc::IndexOutOfRange, "value does not fit in the field width");
    for (unsigned i = 0; i < width; ++i) push_back((value >> (width - 1 - i)) & 1u);
  }

  // Reads a width-bit field starting at *cursor and advances it.
  std::uint64_t read_uint(std::size_t& cursor, unsigned width) const {
    if (cursor + width > nbits_) fail(Errc::TruncatedStream, "bitstring ends inside a fixed field");
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) v = (v << 1) | static_cast<std::uint64_t>(bit(cursor++));
    return v;
  }

  std::string to_string() const {
    std::string s;
    s.reserve(nbits_);
    for (std::size_t i = 0; i < nbits_; ++i) s.push_back(bit(i) ? '1' : '0');
    return s;
  }

  static Bitstring from_string(const std::string& s) {
    Bitstring b;
    for (char c : s) {
      if (c != '0' && c != '1') fail(Errc::ParseError, "bitstring literal has a non-bit character");
      b.push_back(c == '1');
    }
    return b;
  }

  // Reinterprets packed MSB-first bytes as the first `nbits` bits; trailing
  // pad bits in the last byte are zeroed so equality stays canonical.
  static Bitstring from_bytes(const std::vector<std::uint8_t>& bytes, std::size_t nbits) {
    if (nbits > bytes.size() * 8) fail(Errc::IndexOutOfRange, "bit count exceeds payload");
    Bitstring b;
    b.bytes_.assign(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>((nbits + 7) / 8));
    b.nbits_ = nbits;
    if (nbits & 7) b.bytes_.back() &= static_cast<std::uint8_t>(0xff00u >> (nbits & 7));
    return b;
  }

  friend bool operator==(const Bitstring& a, const Bitstring& b) {
    return a.nbits_ == b.nbits_ && a.bytes_ == b.bytes_;
  }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t nbits_ = 0;
};

}  // namespace pvlc
