#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace kqlab {

// Bit string value type backed by '0'/'1' characters. One representation for
// everything: program tapes, machine outputs, aux tapes and probability
// support strings. operator< is plain lexicographic order, which places a
// proper prefix before all of its extensions; enumeration dumps and ordered
// map iteration both rely on that.
class Bits {
 public:
  Bits() = default;

  // Parses a literal of '0'/'1' characters ("" is the empty string).
  // Throws ValidationError on any other character.
  static Bits bits(std::string_view literal);

  // Parses the canonical "hex:bitlen" form: bits packed MSB-first into
  // nibbles, last nibble zero-padded on the right. A bare hex string without
  // the ":bitlen" suffix denotes exactly 4*digits bits.
  static Bits hex(std::string_view text);

  // MSB-first bits of a raw byte buffer.
  static Bits of_bytes(std::string_view bytes);

  // Minimal-length binary expansion of n, MSB first; 0 encodes as "0".
  static Bits of_integer(std::uint64_t n);

  std::size_t size() const { return s_.size(); }
  bool empty() const { return s_.empty(); }
  bool bit(std::size_t i) const { return s_[i] == '1'; }

  void push_back(bool b) { s_.push_back(b ? '1' : '0'); }
  void append(const Bits& other) { s_ += other.s_; }
  void append(std::string_view zeros_and_ones) { s_ += zeros_and_ones; }
  // Drops all bits at positions >= n. Used by the enumerator to undo appends.
  void truncate(std::size_t n) { s_.resize(n); }

  Bits substr(std::size_t pos, std::size_t count) const;

  // Self-delimiting encoding 1^n 0 x of this n-bit string x.
  Bits self_delimited() const;

  // Pair encoding: self_delimited(x) followed by the raw bits of y.
  static Bits pair(const Bits& x, const Bits& y);

  const std::string& str() const { return s_; }  // raw '0'/'1' characters
  std::string to_hex() const;                    // canonical "hex:bitlen"

  auto operator<=>(const Bits&) const = default;

 private:
  explicit Bits(std::string s) : s_(std::move(s)) {}
  std::string s_;
};

}  // namespace kqlab
