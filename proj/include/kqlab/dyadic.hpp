#pragma once

#include <cstdint>
#include <string>

namespace kqlab {

// Exact dyadic rational num / 2^pow, num >= 0, kept in lowest terms (num odd
// or zero). Algorithmic probabilities and Kraft sums are sums of 2^-|p| terms
// with |p| bounded by the program-length budget, so 64-bit numerators suffice
// and addition is exact and order-independent.
struct Dyadic {
  std::uint64_t num = 0;
  int pow = 0;  // denominator exponent

  static Dyadic zero() { return {}; }

  // 2^-negexp, negexp in [0, 62].
  static Dyadic one_over_pow2(int negexp);

  Dyadic& operator+=(const Dyadic& o);
  friend Dyadic operator+(Dyadic a, const Dyadic& b) {
    a += b;
    return a;
  }

  bool operator==(const Dyadic&) const = default;

  bool is_zero() const { return num == 0; }
  bool leq_one() const;
  double to_double() const;
  std::string to_string() const;  // "num/den", both decimal

 private:
  void normalize();
};

}  // namespace kqlab
