#include "kqlab/machine.hpp"

#include <future>
#include <ostream>
#include <string>

#include "kqlab/errors.hpp"

namespace kqlab::machine {

namespace {

constexpr int kOpcodeBits = 3;
const char* kOpcodeBitsOf[6] = {"000", "001", "010", "011", "100", "101"};

int opcode_at(const Bits& program, std::size_t pos) {
  return 4 * program.bit(pos) + 2 * program.bit(pos + 1) + program.bit(pos + 2);
}

// Depth-first walk of the opcode tree. `program` and `output` are mutated in
// place and restored on unwind; only reachable (non-diverging) prefixes are
// expanded, so the walk touches exactly the halting programs plus their
// proper prefixes.
template <class Sink>
void dfs(const Bits& aux, const MachineBudget& b, Bits& program, Bits& output,
         std::size_t aux_pos, long long steps, Sink&& sink) {
  if (program.size() + kOpcodeBits > static_cast<std::size_t>(b.max_program_bits) ||
      steps + 1 > b.max_steps) {
    return;  // no room to execute another opcode
  }
  const std::size_t out_len = output.size();
  const std::size_t max_out = static_cast<std::size_t>(b.max_output_bits);

  // HALT child first: it is opcode 000, the lexicographically least.
  program.append(kOpcodeBitsOf[int(Opcode::halt)]);
  sink(HaltingRecord{program, output, static_cast<int>(aux_pos), steps + 1});
  program.truncate(program.size() - kOpcodeBits);

  for (int op = int(Opcode::out0); op <= int(Opcode::out_aux_all); ++op) {
    std::size_t next_aux = aux_pos;
    switch (Opcode(op)) {
      case Opcode::out0:
      case Opcode::out1:
        if (out_len + 1 > max_out) continue;
        output.push_back(Opcode(op) == Opcode::out1);
        break;
      case Opcode::read_aux:
        if (aux_pos >= aux.size()) continue;  // diverges
        if (out_len + 1 > max_out) continue;
        output.push_back(aux.bit(aux_pos));
        next_aux = aux_pos + 1;
        break;
      case Opcode::dup:
        if (2 * out_len > max_out) continue;
        output.append(output.str().substr(0, out_len));
        break;
      case Opcode::out_aux_all: {
        std::size_t rest = aux.size() - aux_pos;
        if (out_len + rest > max_out) continue;
        for (std::size_t i = aux_pos; i < aux.size(); ++i) output.push_back(aux.bit(i));
        next_aux = aux.size();
        break;
      }
      default:
        continue;
    }
    program.append(kOpcodeBitsOf[op]);
    dfs(aux, b, program, output, next_aux, steps + 1, sink);
    program.truncate(program.size() - kOpcodeBits);
    output.truncate(out_len);
  }
}

template <class Sink>
void walk_from(Opcode first_op, const Bits& aux, const MachineBudget& b, Sink&& sink) {
  Bits program, output;
  if (first_op == Opcode::halt) {
    if (b.max_program_bits >= kOpcodeBits && b.max_steps >= 1) {
      sink(HaltingRecord{Bits::bits("000"), Bits(), 0, 1});
    }
    return;
  }
  if (b.max_program_bits < 2 * kOpcodeBits || b.max_steps < 2) return;
  std::size_t aux_pos = 0;
  const std::size_t max_out = static_cast<std::size_t>(b.max_output_bits);
  switch (first_op) {
    case Opcode::out0:
      if (max_out < 1) return;
      output.push_back(false);
      break;
    case Opcode::out1:
      if (max_out < 1) return;
      output.push_back(true);
      break;
    case Opcode::read_aux:
      if (aux.empty() || max_out < 1) return;
      output.push_back(aux.bit(0));
      aux_pos = 1;
      break;
    case Opcode::dup:
      break;  // duplicating the empty output is a no-op
    case Opcode::out_aux_all:
      if (aux.size() > max_out) return;
      output.append(aux);
      aux_pos = aux.size();
      break;
    default:
      return;
  }
  program.append(kOpcodeBitsOf[int(first_op)]);
  dfs(aux, b, program, output, aux_pos, 1, sink);
}

}  // namespace

void MachineBudget::validate() const {
  if (max_program_bits < 3) throw ValidationError("budget", "budget requires L >= 3");
  if (max_steps < 1) throw ValidationError("budget", "budget requires T >= 1");
  if (max_output_bits < 1) throw ValidationError("budget", "budget requires M >= 1");
}

std::string MachineBudget::to_string() const {
  return "L=" + std::to_string(max_program_bits) + ",T=" + std::to_string(max_steps) +
         ",M=" + std::to_string(max_output_bits);
}

RunResult run(const Bits& program, const Bits& aux, const MachineBudget& budget) {
  budget.validate();
  Bits output;
  std::size_t pos = 0, aux_pos = 0;
  long long steps = 0;
  const std::size_t max_out = static_cast<std::size_t>(budget.max_output_bits);
  const std::size_t usable =
      std::min(program.size(), static_cast<std::size_t>(budget.max_program_bits));
  for (;;) {
    if (pos + kOpcodeBits > usable) return NonHalting{NonHalting::Reason::program_exhausted};
    if (steps + 1 > budget.max_steps) return NonHalting{NonHalting::Reason::step_limit};
    int op = opcode_at(program, pos);
    pos += kOpcodeBits;
    ++steps;
    switch (op) {
      case int(Opcode::halt):
        return HaltingRecord{program.substr(0, pos), output, static_cast<int>(aux_pos),
                             steps};
      case int(Opcode::out0):
      case int(Opcode::out1):
        if (output.size() + 1 > max_out)
          return NonHalting{NonHalting::Reason::output_overflow};
        output.push_back(op == int(Opcode::out1));
        break;
      case int(Opcode::read_aux):
        if (aux_pos >= aux.size()) return NonHalting{NonHalting::Reason::aux_exhausted};
        if (output.size() + 1 > max_out)
          return NonHalting{NonHalting::Reason::output_overflow};
        output.push_back(aux.bit(aux_pos++));
        break;
      case int(Opcode::dup): {
        if (2 * output.size() > max_out)
          return NonHalting{NonHalting::Reason::output_overflow};
        std::string copy = output.str();
        output.append(copy);
        break;
      }
      case int(Opcode::out_aux_all): {
        std::size_t rest = aux.size() - aux_pos;
        if (output.size() + rest > max_out)
          return NonHalting{NonHalting::Reason::output_overflow};
        while (aux_pos < aux.size()) output.push_back(aux.bit(aux_pos++));
        break;
      }
      default:
        return NonHalting{NonHalting::Reason::divergent_opcode};
    }
  }
}

namespace detail {

void check_enumeration_cap(const MachineBudget& budget, std::uint64_t cap) {
  budget.validate();
  int l = budget.max_program_bits;
  if (l + 1 >= 64 || (std::uint64_t{1} << (l + 1)) > cap) {
    throw ResourceLimitError("enumeration of 2^" + std::to_string(l + 1) +
                             " candidate programs exceeds the enumeration cap " +
                             std::to_string(cap));
  }
}

void for_each_halting_from(Opcode first_op, const Bits& aux, const MachineBudget& budget,
                           const std::function<void(const HaltingRecord&)>& fn) {
  walk_from(first_op, aux, budget, [&](const HaltingRecord& r) { fn(r); });
}

}  // namespace detail

void for_each_halting(const Bits& aux, const MachineBudget& budget,
                      const std::function<void(const HaltingRecord&)>& fn,
                      std::uint64_t cap) {
  detail::check_enumeration_cap(budget, cap);
  for (int op = int(Opcode::halt); op <= int(Opcode::out_aux_all); ++op) {
    detail::for_each_halting_from(Opcode(op), aux, budget, fn);
  }
}

std::vector<HaltingRecord> enumerate(const Bits& aux, const MachineBudget& budget,
                                     std::uint64_t cap, int workers) {
  detail::check_enumeration_cap(budget, cap);
  std::vector<HaltingRecord> all;
  if (workers <= 1) {
    for_each_halting(aux, budget, [&](const HaltingRecord& r) { all.push_back(r); }, cap);
    return all;
  }
  // Partition by first opcode; merging in opcode order restores global
  // lexicographic order whatever the worker count.
  std::vector<std::future<std::vector<HaltingRecord>>> parts;
  for (int op = int(Opcode::halt); op <= int(Opcode::out_aux_all); ++op) {
    parts.push_back(std::async(std::launch::async, [&, op] {
      std::vector<HaltingRecord> part;
      detail::for_each_halting_from(Opcode(op), aux, budget,
                                    [&](const HaltingRecord& r) { part.push_back(r); });
      return part;
    }));
  }
  for (auto& f : parts) {
    auto part = f.get();
    all.insert(all.end(), std::make_move_iterator(part.begin()),
               std::make_move_iterator(part.end()));
  }
  return all;
}

void write_enumeration_dump(std::ostream& os, const std::vector<HaltingRecord>& records) {
  for (const auto& r : records) {
    os << r.program.to_hex() << ',' << r.output.to_hex() << ',' << r.steps << ','
       << r.aux_consumed << '\n';
  }
}

Bits integer_aux(std::uint64_t n) { return Bits::of_integer(n).self_delimited(); }

}  // namespace kqlab::machine
