#pragma once

#include <map>
#include <optional>
#include <vector>

#include "kqlab/bits.hpp"
#include "kqlab/complexity.hpp"

namespace kqlab::info {

// Absolute tolerance for totals of probability vectors and channel columns.
inline constexpr double kNormTolerance = 1e-9;

// Finite-support (sub-)probability over bit strings: nonnegative masses,
// total at most 1 + tolerance. Exact zeros are dropped so the support is
// exactly the set of charged strings; the ordered map fixes every summation
// order downstream.
class FiniteProbability {
 public:
  FiniteProbability() = default;
  static FiniteProbability from_masses(std::map<Bits, double> mass);
  static FiniteProbability point_mass(const Bits& x);

  double total() const;
  double mass(const Bits& x) const;
  const std::map<Bits, double>& masses() const { return mass_; }
  bool operator==(const FiniteProbability&) const = default;

 private:
  std::map<Bits, double> mass_;
};

// Column-stochastic channel: columns[y](x) = f(x | y), each column a
// probability over outputs summing to 1 within tolerance.
class Channel {
 public:
  static Channel from_columns(std::map<Bits, FiniteProbability> columns);
  static Channel identity(const std::vector<Bits>& support);

  const std::map<Bits, FiniteProbability>& columns() const { return columns_; }
  bool operator==(const Channel&) const = default;

 private:
  std::map<Bits, FiniteProbability> columns_;
};

// Information between probabilities:
//   prob_info(p, q) = log2 sum_{x,y} 2^{i(x:y)} p(x) q(y),
// evaluated log-sum-exp style over the sorted support product. Undefined
// (nullopt) when any supported string or pair lacks finite complexity at the
// table's budget -- never silently zero.
std::optional<double> prob_info(const FiniteProbability& p, const FiniteProbability& q,
                                const machine::ComplexityTable& table);

// Pushforward (fp)(x) = sum_y f(x|y) p(y). Every supported input of p must
// have a channel column.
FiniteProbability transform(const Channel& f, const FiniteProbability& p);

// prob_info(fp, q) - prob_info(p, q); nullopt propagates from prob_info.
std::optional<double> conservation_slack(const Channel& f, const FiniteProbability& p,
                                         const FiniteProbability& q,
                                         const machine::ComplexityTable& table);

// Channel with the given support whose columns are independent uniform draws
// from the probability simplex (normalized exponential variates).
Channel random_channel(const std::vector<Bits>& inputs, const std::vector<Bits>& outputs,
                       std::uint64_t seed);

}  // namespace kqlab::info
