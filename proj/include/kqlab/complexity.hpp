#pragma once

#include <map>
#include <optional>

#include "kqlab/bits.hpp"
#include "kqlab/dyadic.hpp"
#include "kqlab/machine.hpp"

namespace kqlab::machine {

// Aggregated view of one full enumeration: minimal program length and total
// algorithmic probability per output string. Built once and queried many
// times; joint quantities are lookups of pair-encoded strings in the same
// table. Absence of a key means no program within budget produces the string
// (complexity is infinite), never that its complexity is zero.
class ComplexityTable {
 public:
  static ComplexityTable build(const Bits& aux, const MachineBudget& budget,
                               int workers = 1,
                               std::uint64_t cap = kDefaultEnumerationCap);

  // K(x / aux): length in bits of the shortest halting program printing x.
  std::optional<int> complexity(const Bits& x) const;

  // m(x / aux) = sum of 2^-|p| over halting programs printing x.
  Dyadic algorithmic_probability(const Bits& x) const;

  // K of the pair encoding <x>y.
  std::optional<int> joint_complexity(const Bits& x, const Bits& y) const;

  // i(x:y) = K(x) + K(y) - K(x,y), in bits; nullopt when any term is
  // infinite at this budget.
  std::optional<int> string_info(const Bits& x, const Bits& y) const;

  // Sum of 2^-|p| over every halting program; at most 1 by prefix-freeness.
  Dyadic kraft_sum() const { return kraft_; }

  const MachineBudget& budget() const { return budget_; }
  const Bits& aux() const { return aux_; }
  const std::map<Bits, int>& k_of() const { return k_of_; }
  const std::map<Bits, Dyadic>& m_of() const { return m_of_; }

 private:
  MachineBudget budget_;
  Bits aux_;
  std::map<Bits, int> k_of_;
  std::map<Bits, Dyadic> m_of_;
  Dyadic kraft_;
};

// One-shot conveniences; each builds a fresh table for (aux, budget).
std::optional<int> complexity(const Bits& x, const Bits& aux, const MachineBudget& budget);
Dyadic algorithmic_probability(const Bits& x, const Bits& aux, const MachineBudget& budget);
std::optional<int> joint_complexity(const Bits& x, const Bits& y, const Bits& aux,
                                    const MachineBudget& budget);
std::optional<int> string_info(const Bits& x, const Bits& y, const Bits& aux,
                               const MachineBudget& budget);
Dyadic kraft_sum(const Bits& aux, const MachineBudget& budget);

}  // namespace kqlab::machine
