#include "kqlab/dyadic.hpp"

#include <cmath>
#include <stdexcept>

namespace kqlab {

Dyadic Dyadic::one_over_pow2(int negexp) {
  if (negexp < 0 || negexp > 62) {
    throw std::out_of_range("dyadic exponent out of range");
  }
  Dyadic d;
  d.num = 1;
  d.pow = negexp;
  return d;
}

void Dyadic::normalize() {
  if (num == 0) {
    pow = 0;
    return;
  }
  while (pow > 0 && (num & 1) == 0) {
    num >>= 1;
    --pow;
  }
}

Dyadic& Dyadic::operator+=(const Dyadic& o) {
  if (o.num == 0) return *this;
  if (num == 0) {
    *this = o;
    return *this;
  }
  int common = pow > o.pow ? pow : o.pow;
  if (common > 62) throw std::overflow_error("dyadic exponent overflow");
  std::uint64_t a = num << (common - pow);
  std::uint64_t b = o.num << (common - o.pow);
  if (a + b < a) throw std::overflow_error("dyadic numerator overflow");
  num = a + b;
  pow = common;
  normalize();
  return *this;
}

bool Dyadic::leq_one() const {
  if (num == 0) return true;
  return pow < 63 && num <= (std::uint64_t{1} << pow);
}

double Dyadic::to_double() const { return std::ldexp(double(num), -pow); }

std::string Dyadic::to_string() const {
  return std::to_string(num) + "/" + std::to_string(std::uint64_t{1} << pow);
}

}  // namespace kqlab
