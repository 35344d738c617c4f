#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <variant>
#include <vector>

#include "kqlab/bits.hpp"

namespace kqlab::machine {

// Resource budget for one machine run or enumeration.
//   max_program_bits (L): programs longer than this are not considered.
//   max_steps (T): executed opcodes, HALT included.
//   max_output_bits (M): any instruction pushing the output past M diverges.
struct MachineBudget {
  int max_program_bits = 18;
  long long max_steps = 10000;
  int max_output_bits = 64;

  void validate() const;  // L >= 3, T >= 1, M >= 1
  std::string to_string() const;
};

// The machine reads its program strictly left to right in 3-bit opcodes and
// never rereads a bit, so the set of halting programs is prefix-free by
// construction: a halting program ends at its HALT opcode and any extension
// would have to execute past it.
enum class Opcode : int {
  halt = 0,         // 000
  out0 = 1,         // 001  append 0 to the output
  out1 = 2,         // 010  append 1 to the output
  read_aux = 3,     // 011  append next aux bit; diverges if aux is exhausted
  dup = 4,          // 100  append a copy of the output; diverges past M
  out_aux_all = 5,  // 101  append all remaining aux bits
                    // 110, 111  diverge
};

struct HaltingRecord {
  Bits program;  // the exact bits consumed, HALT opcode included
  Bits output;
  int aux_consumed = 0;
  long long steps = 0;

  bool operator==(const HaltingRecord&) const = default;
};

struct NonHalting {
  enum class Reason {
    divergent_opcode,
    program_exhausted,  // fewer than 3 bits left before HALT
    aux_exhausted,      // READAUX past the end of the aux tape
    output_overflow,    // output would exceed M bits
    step_limit,         // T opcodes executed without reaching HALT
  };
  Reason reason;

  bool operator==(const NonHalting&) const = default;
};

using RunResult = std::variant<HaltingRecord, NonHalting>;

// Runs `program` against `aux` under `budget`. Bits beyond the consumed
// prefix are ignored and do not appear in HaltingRecord.program.
RunResult run(const Bits& program, const Bits& aux, const MachineBudget& budget);

// Guard against runaway enumerations: enumerating up to L program bits covers
// at most 2^(L+1) candidate strings, and requests above the cap are refused.
inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 40;

// All halting programs of length <= L for this aux tape, duplicate-free, in
// lexicographic program order. Worker count never changes the result: the
// program tree is partitioned by first opcode and merged in opcode order.
std::vector<HaltingRecord> enumerate(const Bits& aux, const MachineBudget& budget,
                                     std::uint64_t cap = kDefaultEnumerationCap,
                                     int workers = 1);

// Streaming variant; visits records in lexicographic program order.
void for_each_halting(const Bits& aux, const MachineBudget& budget,
                      const std::function<void(const HaltingRecord&)>& fn,
                      std::uint64_t cap = kDefaultEnumerationCap);

// One line per record: program_hex,output_hex,steps,aux_consumed.
void write_enumeration_dump(std::ostream& os, const std::vector<HaltingRecord>& records);

// For integer-conditioned tables: aux = self-delimited binary of n.
Bits integer_aux(std::uint64_t n);

namespace detail {

// Visits halting records whose program begins with `first_op` (for
// Opcode::halt that is just the bare HALT program), in lexicographic order.
// Building block for prefix-partitioned parallel enumeration; performs no
// cap check of its own.
void for_each_halting_from(Opcode first_op, const Bits& aux, const MachineBudget& budget,
                           const std::function<void(const HaltingRecord&)>& fn);

void check_enumeration_cap(const MachineBudget& budget, std::uint64_t cap);

}  // namespace detail

}  // namespace kqlab::machine
