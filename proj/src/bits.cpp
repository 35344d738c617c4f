#include "kqlab/bits.hpp"

#include <charconv>

#include "kqlab/errors.hpp"

namespace kqlab {

namespace {

int hex_digit_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bits Bits::bits(std::string_view literal) {
  for (char c : literal) {
    if (c != '0' && c != '1') {
      throw ValidationError("bit_literal",
                            "bit literal may contain only '0'/'1': got '" +
                                std::string(literal) + "'");
    }
  }
  return Bits(std::string(literal));
}

Bits Bits::hex(std::string_view text) {
  std::string_view digits = text;
  std::size_t bitlen = 0;
  bool explicit_len = false;
  if (auto colon = text.find(':'); colon != std::string_view::npos) {
    digits = text.substr(0, colon);
    std::string_view lenpart = text.substr(colon + 1);
    auto [ptr, ec] =
        std::from_chars(lenpart.data(), lenpart.data() + lenpart.size(), bitlen);
    if (ec != std::errc() || ptr != lenpart.data() + lenpart.size()) {
      throw ValidationError("hex_string",
                            "bad bit length in hex string '" + std::string(text) + "'");
    }
    explicit_len = true;
  } else {
    bitlen = 4 * digits.size();
  }
  if (explicit_len && (bitlen + 3) / 4 != digits.size()) {
    throw ValidationError("hex_string",
                          "hex digit count does not match bit length in '" +
                              std::string(text) + "'");
  }
  std::string out;
  out.reserve(bitlen);
  for (std::size_t i = 0; i < digits.size(); ++i) {
    int v = hex_digit_value(digits[i]);
    if (v < 0) {
      throw ValidationError("hex_string",
                            "bad hex digit in '" + std::string(text) + "'");
    }
    for (int b = 3; b >= 0; --b) {
      std::size_t pos = 4 * i + (3 - b);
      bool bit = (v >> b) & 1;
      if (pos < bitlen) {
        out.push_back(bit ? '1' : '0');
      } else if (bit) {
        throw ValidationError("hex_string",
                              "nonzero padding bits in '" + std::string(text) + "'");
      }
    }
  }
  return Bits(std::move(out));
}

Bits Bits::of_bytes(std::string_view bytes) {
  std::string out;
  out.reserve(8 * bytes.size());
  for (unsigned char c : bytes) {
    for (int b = 7; b >= 0; --b) out.push_back(((c >> b) & 1) ? '1' : '0');
  }
  return Bits(std::move(out));
}

Bits Bits::of_integer(std::uint64_t n) {
  if (n == 0) return Bits("0");
  std::string out;
  for (int b = 63; b >= 0; --b) {
    if (!out.empty() || ((n >> b) & 1)) out.push_back(((n >> b) & 1) ? '1' : '0');
  }
  return Bits(std::move(out));
}

Bits Bits::substr(std::size_t pos, std::size_t count) const {
  return Bits(s_.substr(pos, count));
}

Bits Bits::self_delimited() const {
  std::string out(size(), '1');
  out.push_back('0');
  out += s_;
  return Bits(std::move(out));
}

Bits Bits::pair(const Bits& x, const Bits& y) {
  Bits enc = x.self_delimited();
  enc.append(y);
  return enc;
}

std::string Bits::to_hex() const {
  static const char* kDigits = "0123456789abcdef";
  std::string out;
  out.reserve(size() / 4 + 8);
  for (std::size_t i = 0; i < size(); i += 4) {
    int v = 0;
    for (std::size_t j = 0; j < 4; ++j) {
      v <<= 1;
      if (i + j < size() && bit(i + j)) v |= 1;
    }
    out.push_back(kDigits[v]);
  }
  out.push_back(':');
  out += std::to_string(size());
  return out;
}

}  // namespace kqlab
