#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

// Reference interpreter for the 3-bit opcode machine, written from the
// instruction table alone and kept deliberately separate from the library:
// plain std::string bits, an index cursor, and a blunt enumerate-everything
// loop, so the two implementations can actually disagree.
namespace oracle {

struct Halt {
  std::string output;
  int aux_consumed = 0;
  long long steps = 0;
};

// Runs one candidate program. A string is a halting program only when HALT
// executes with every one of its bits consumed -- no bits left over, no
// running off the end.
inline std::optional<Halt> run_exact(const std::string& prog, const std::string& aux,
                                     long long max_steps, int max_out) {
  std::size_t pc = 0;
  std::size_t ax = 0;
  std::string out;
  long long steps = 0;
  while (true) {
    if (prog.size() - pc < 3) return std::nullopt;  // ran off the tape
    if (steps >= max_steps) return std::nullopt;    // step budget gone
    int op = (prog[pc] - '0') * 4 + (prog[pc + 1] - '0') * 2 + (prog[pc + 2] - '0');
    pc += 3;
    ++steps;
    switch (op) {
      case 0:  // HALT
        if (pc != prog.size()) return std::nullopt;  // leftover bits
        return Halt{out, int(ax), steps};
      case 1:
        out.push_back('0');
        break;
      case 2:
        out.push_back('1');
        break;
      case 3:  // READAUX
        if (ax >= aux.size()) return std::nullopt;
        out.push_back(aux[ax++]);
        break;
      case 4:  // DUP
        out += out;
        break;
      case 5:  // OUTAUXALL
        out += aux.substr(ax);
        ax = aux.size();
        break;
      default:  // 110, 111
        return std::nullopt;
    }
    if (int(out.size()) > max_out) return std::nullopt;
  }
}

struct Table {
  std::map<std::string, int> k;       // output -> shortest program length
  std::map<std::string, double> m;    // output -> sum of 2^-len (exact in double)
  double kraft = 0.0;
  long long halting = 0;
};

// Tries every bit string of length 0..max_len as a program. Exponential and
// meant to be: max_len stays small.
inline Table enumerate_all(const std::string& aux, int max_len, long long max_steps,
                           int max_out) {
  Table t;
  for (int len = 0; len <= max_len; ++len) {
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << len); ++v) {
      std::string prog(std::size_t(len), '0');
      for (int b = 0; b < len; ++b) {
        if ((v >> (len - 1 - b)) & 1) prog[std::size_t(b)] = '1';
      }
      auto h = run_exact(prog, aux, max_steps, max_out);
      if (!h) continue;
      ++t.halting;
      double w = std::ldexp(1.0, -len);
      auto it = t.k.find(h->output);
      if (it == t.k.end() || len < it->second) t.k[h->output] = len;
      t.m[h->output] += w;
      t.kraft += w;
    }
  }
  return t;
}

}  // namespace oracle
