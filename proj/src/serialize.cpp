#include <cmath>
#include <cstdint>

#include "kqlab/errors.hpp"
#include "kqlab/quantum.hpp"

namespace kqlab::quantum {

namespace {

// Decimal string of 2^k, by repeated doubling. k is at most 1074 (the
// smallest subnormal), so this stays tiny.
std::string pow2_decimal(int k) {
  std::string digits = "1";  // little-endian during the loop
  for (int step = 0; step < k; ++step) {
    int carry = 0;
    for (char& c : digits) {
      int v = 2 * (c - '0') + carry;
      c = char('0' + v % 10);
      carry = v / 10;
    }
    if (carry) digits.push_back(char('0' + carry));
  }
  return {digits.rbegin(), digits.rend()};
}

constexpr char kFieldSep = '\x1f';
constexpr char kMatrixSep = '\x1e';

}  // namespace

// Every finite double is an integer times a power of two, so it has an exact
// representation p/2^k; serializing that instead of a rounded decimal keeps
// aux tapes bit-for-bit reproducible.
std::string exact_rational(double x) {
  if (!std::isfinite(x)) {
    throw ValidationError("finite_entry", "matrix entries must be finite");
  }
  if (x == 0.0) return "0/1";
  std::string sign;
  if (x < 0.0) {
    sign = "-";
    x = -x;
  }
  int exp = 0;
  double frac = std::frexp(x, &exp);           // x = frac * 2^exp, frac in [0.5, 1)
  auto mant = std::uint64_t(std::ldexp(frac, 53));  // 53-bit integer mantissa
  exp -= 53;
  while ((mant & 1) == 0) {
    mant >>= 1;
    ++exp;
  }
  std::string num = std::to_string(mant);
  if (exp >= 0) {
    // Multiply the numerator out; entries are O(1) so exp stays small.
    std::string shifted = pow2_decimal(exp);
    if (shifted != "1") {
      // num * 2^exp via the same doubling trick on num.
      std::string digits(num.rbegin(), num.rend());
      for (int step = 0; step < exp; ++step) {
        int carry = 0;
        for (char& c : digits) {
          int v = 2 * (c - '0') + carry;
          c = char('0' + v % 10);
          carry = v / 10;
        }
        if (carry) digits.push_back(char('0' + carry));
      }
      num.assign(digits.rbegin(), digits.rend());
    }
    return sign + num + "/1";
  }
  return sign + num + "/" + pow2_decimal(-exp);
}

std::string canonical_matrix_bytes(std::span<const Matrix> matrices) {
  std::string out;
  for (std::size_t k = 0; k < matrices.size(); ++k) {
    if (k) out.push_back(kMatrixSep);
    const Matrix& m = matrices[k];
    bool first = true;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (!first) out.push_back(kFieldSep);
        out += exact_rational(m(i, j).real());
        out.push_back(kFieldSep);
        out += exact_rational(m(i, j).imag());
        first = false;
      }
    }
  }
  return out;
}

Bits povm_aux(const Povm& povm) {
  return Bits::of_bytes(canonical_matrix_bytes(povm.elements)).self_delimited();
}

}  // namespace kqlab::quantum
