#include "kqlab/complexity.hpp"

#include <future>

namespace kqlab::machine {

namespace {

struct PartialTable {
  std::map<Bits, int> k;
  std::map<Bits, Dyadic> m;
  Dyadic kraft;

  void add(const HaltingRecord& r) {
    int len = static_cast<int>(r.program.size());
    Dyadic w = Dyadic::one_over_pow2(len);
    auto [it, fresh] = k.try_emplace(r.output, len);
    if (!fresh && len < it->second) it->second = len;
    m[r.output] += w;
    kraft += w;
  }

  // Dyadic addition and min are exact, so merge order cannot matter.
  void merge(PartialTable&& other) {
    for (auto& [x, len] : other.k) {
      auto [it, fresh] = k.try_emplace(x, len);
      if (!fresh && len < it->second) it->second = len;
    }
    for (auto& [x, w] : other.m) m[x] += w;
    kraft += other.kraft;
  }
};

}  // namespace

ComplexityTable ComplexityTable::build(const Bits& aux, const MachineBudget& budget,
                                       int workers, std::uint64_t cap) {
  detail::check_enumeration_cap(budget, cap);
  PartialTable total;
  if (workers <= 1) {
    for_each_halting(aux, budget, [&](const HaltingRecord& r) { total.add(r); }, cap);
  } else {
    std::vector<std::future<PartialTable>> parts;
    for (int op = int(Opcode::halt); op <= int(Opcode::out_aux_all); ++op) {
      parts.push_back(std::async(std::launch::async, [&, op] {
        PartialTable part;
        detail::for_each_halting_from(Opcode(op), aux, budget,
                                      [&](const HaltingRecord& r) { part.add(r); });
        return part;
      }));
    }
    for (auto& f : parts) total.merge(f.get());
  }
  ComplexityTable table;
  table.budget_ = budget;
  table.aux_ = aux;
  table.k_of_ = std::move(total.k);
  table.m_of_ = std::move(total.m);
  table.kraft_ = total.kraft;
  return table;
}

std::optional<int> ComplexityTable::complexity(const Bits& x) const {
  auto it = k_of_.find(x);
  if (it == k_of_.end()) return std::nullopt;
  return it->second;
}

Dyadic ComplexityTable::algorithmic_probability(const Bits& x) const {
  auto it = m_of_.find(x);
  if (it == m_of_.end()) return Dyadic::zero();
  return it->second;
}

std::optional<int> ComplexityTable::joint_complexity(const Bits& x, const Bits& y) const {
  return complexity(Bits::pair(x, y));
}

std::optional<int> ComplexityTable::string_info(const Bits& x, const Bits& y) const {
  auto kx = complexity(x);
  auto ky = complexity(y);
  auto kxy = joint_complexity(x, y);
  if (!kx || !ky || !kxy) return std::nullopt;
  return *kx + *ky - *kxy;
}

std::optional<int> complexity(const Bits& x, const Bits& aux, const MachineBudget& budget) {
  return ComplexityTable::build(aux, budget).complexity(x);
}

Dyadic algorithmic_probability(const Bits& x, const Bits& aux,
                               const MachineBudget& budget) {
  return ComplexityTable::build(aux, budget).algorithmic_probability(x);
}

std::optional<int> joint_complexity(const Bits& x, const Bits& y, const Bits& aux,
                                    const MachineBudget& budget) {
  return ComplexityTable::build(aux, budget).joint_complexity(x, y);
}

std::optional<int> string_info(const Bits& x, const Bits& y, const Bits& aux,
                               const MachineBudget& budget) {
  return ComplexityTable::build(aux, budget).string_info(x, y);
}

Dyadic kraft_sum(const Bits& aux, const MachineBudget& budget) {
  return ComplexityTable::build(aux, budget).kraft_sum();
}

}  // namespace kqlab::machine
