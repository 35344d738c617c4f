#include "kqlab/info.hpp"

#include <algorithm>
#include <cmath>

#include "kqlab/errors.hpp"
#include "kqlab/rng.hpp"

namespace kqlab::info {

FiniteProbability FiniteProbability::from_masses(std::map<Bits, double> mass) {
  double total = 0.0;
  for (auto it = mass.begin(); it != mass.end();) {
    double v = it->second;
    if (!(v >= 0.0)) {
      throw ValidationError("nonnegative_mass", "mass of " + it->first.to_hex() +
                                                    " is negative or NaN");
    }
    if (v == 0.0) {
      it = mass.erase(it);
      continue;
    }
    total += v;
    ++it;
  }
  if (total > 1.0 + kNormTolerance) {
    throw ValidationError("total_mass",
                          "total mass " + std::to_string(total) + " exceeds 1");
  }
  FiniteProbability p;
  p.mass_ = std::move(mass);
  return p;
}

FiniteProbability FiniteProbability::point_mass(const Bits& x) {
  return from_masses({{x, 1.0}});
}

double FiniteProbability::total() const {
  double t = 0.0;
  for (const auto& [x, v] : mass_) t += v;
  return t;
}

double FiniteProbability::mass(const Bits& x) const {
  auto it = mass_.find(x);
  return it == mass_.end() ? 0.0 : it->second;
}

Channel Channel::from_columns(std::map<Bits, FiniteProbability> columns) {
  for (const auto& [y, col] : columns) {
    double t = col.total();
    if (std::abs(t - 1.0) > kNormTolerance) {
      throw ValidationError("column_stochastic",
                            "channel column for input " + y.to_hex() + " sums to " +
                                std::to_string(t));
    }
  }
  Channel f;
  f.columns_ = std::move(columns);
  return f;
}

Channel Channel::identity(const std::vector<Bits>& support) {
  std::map<Bits, FiniteProbability> cols;
  for (const Bits& x : support) cols[x] = FiniteProbability::point_mass(x);
  return from_columns(std::move(cols));
}

std::optional<double> prob_info(const FiniteProbability& p, const FiniteProbability& q,
                                const machine::ComplexityTable& table) {
  // Collect i(x:y) for the support product first; any missing value makes
  // the whole quantity undefined at this budget.
  std::vector<double> infos;
  std::vector<double> weights;
  infos.reserve(p.masses().size() * q.masses().size());
  int max_info = 0;
  bool have_max = false;
  for (const auto& [x, px] : p.masses()) {
    for (const auto& [y, qy] : q.masses()) {
      auto i = table.string_info(x, y);
      if (!i) return std::nullopt;
      infos.push_back(double(*i));
      weights.push_back(px * qy);
      if (!have_max || *i > max_info) {
        max_info = *i;
        have_max = true;
      }
    }
  }
  if (!have_max) return std::nullopt;  // empty support
  // log-sum-exp in base 2, pivoted at the largest exponent; summation order
  // is the sorted (x, y) order fixed above.
  double sum = 0.0;
  for (std::size_t k = 0; k < infos.size(); ++k) {
    sum += std::exp2(infos[k] - double(max_info)) * weights[k];
  }
  return double(max_info) + std::log2(sum);
}

FiniteProbability transform(const Channel& f, const FiniteProbability& p) {
  std::map<Bits, double> out;
  for (const auto& [y, py] : p.masses()) {
    auto col = f.columns().find(y);
    if (col == f.columns().end()) {
      throw ValidationError("channel_domain",
                            "channel has no column for supported input " + y.to_hex());
    }
    for (const auto& [x, fxy] : col->second.masses()) out[x] += fxy * py;
  }
  return FiniteProbability::from_masses(std::move(out));
}

std::optional<double> conservation_slack(const Channel& f, const FiniteProbability& p,
                                         const FiniteProbability& q,
                                         const machine::ComplexityTable& table) {
  auto after = prob_info(transform(f, p), q, table);
  auto before = prob_info(p, q, table);
  if (!after || !before) return std::nullopt;
  return *after - *before;
}

Channel random_channel(const std::vector<Bits>& inputs, const std::vector<Bits>& outputs,
                       std::uint64_t seed) {
  if (inputs.empty() || outputs.empty()) {
    throw ValidationError("channel_support", "random_channel needs nonempty supports");
  }
  std::map<Bits, FiniteProbability> cols;
  RngStream rng(seed, 0);
  // Ordered inputs, so a given seed fixes the channel regardless of how the
  // caller ordered the support vectors.
  std::vector<Bits> sorted_inputs(inputs.begin(), inputs.end());
  std::sort(sorted_inputs.begin(), sorted_inputs.end());
  std::vector<Bits> sorted_outputs(outputs.begin(), outputs.end());
  std::sort(sorted_outputs.begin(), sorted_outputs.end());
  for (const Bits& y : sorted_inputs) {
    std::map<Bits, double> col;
    double total = 0.0;
    std::vector<double> draws(sorted_outputs.size());
    for (double& d : draws) {
      d = rng.exponential();
      total += d;
    }
    for (std::size_t i = 0; i < sorted_outputs.size(); ++i) {
      col[sorted_outputs[i]] = draws[i] / total;
    }
    cols[y] = FiniteProbability::from_masses(std::move(col));
  }
  return Channel::from_columns(std::move(cols));
}

}  // namespace kqlab::info
