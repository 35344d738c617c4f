#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kqlab/complexity.hpp"
#include "kqlab/errors.hpp"
#include "kqlab/experiments.hpp"
#include "kqlab/info.hpp"
#include "kqlab/io.hpp"
#include "kqlab/machine.hpp"
#include "kqlab/quantum.hpp"

namespace {

using kqlab::Bits;
using kqlab::BudgetError;
using kqlab::ResourceLimitError;
using kqlab::ValidationError;

int default_workers() {
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : int(hc);
}

// Command-line string values: a value of only 0/1 characters is a bit
// literal; anything else must parse as hex ("hex" or "hex:bitlen").
// --bits / --hex force one reading for every string value of the command;
// asking for both at once is the one ambiguity we refuse to resolve.
Bits parse_string_value(const std::string& value, bool force_bits, bool force_hex) {
  if (force_bits && force_hex) {
    throw ValidationError("string_format", "--bits and --hex are mutually exclusive");
  }
  if (force_bits) return Bits::bits(value);
  if (force_hex) return Bits::hex(value);
  if (value.find_first_not_of("01") == std::string::npos) return Bits::bits(value);
  return Bits::hex(value);
}

// Partial budget override "L=..,T=..,M=.." applied on top of `base`.
kqlab::machine::MachineBudget parse_budget(const std::string& text,
                                           kqlab::machine::MachineBudget base) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t comma = text.find(',', pos);
    std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                   : comma - pos);
    pos = comma == std::string::npos ? text.size() : comma + 1;
    if (item.empty()) continue;
    std::size_t eq = item.find('=');
    if (eq == std::string::npos || eq + 1 == item.size()) {
      throw ValidationError("budget", "budget item '" + item + "' is not KEY=VALUE");
    }
    std::string key = item.substr(0, eq);
    long long v = 0;
    try {
      std::size_t used = 0;
      v = std::stoll(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ValidationError("budget", "budget value in '" + item + "' is not an integer");
    }
    if (key == "L") {
      base.max_program_bits = int(v);
    } else if (key == "T") {
      base.max_steps = v;
    } else if (key == "M") {
      base.max_output_bits = int(v);
    } else {
      throw ValidationError("budget", "unknown budget key '" + key + "' (expected L, T or M)");
    }
  }
  base.validate();
  return base;
}

nlohmann::json load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("file", "cannot open config file " + path);
  nlohmann::json cfg;
  try {
    in >> cfg;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("json", "config file " + path + ": " + e.what());
  }
  if (!cfg.is_object()) throw ValidationError("config", "config file must hold a JSON object");
  return cfg;
}

// Config file supplies a value only where the command line stayed silent;
// null means unset, so replayed report-config blocks work as config files.
template <class T>
void apply_config(const nlohmann::json& cfg, const char* key, const CLI::Option* opt, T& target) {
  if (opt->count() > 0 || !cfg.contains(key) || cfg.at(key).is_null()) return;
  try {
    target = cfg.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("config", std::string("config key '") + key + "': " + e.what());
  }
}

std::string json_double(double v) { return nlohmann::json(v).dump(); }

void write_output(const std::optional<std::string>& out_path, const std::string& content) {
  if (!out_path) {
    std::cout << content;
    return;
  }
  std::ofstream out(*out_path, std::ios::binary);
  if (!out) throw ValidationError("file", "cannot open " + *out_path + " for writing");
  out << content;
}

struct EnumerateArgs {
  std::string budget_text;
  std::string aux;
  bool force_bits = false;
  bool force_hex = false;
  int workers = default_workers();
  std::uint64_t cap = kqlab::machine::kDefaultEnumerationCap;
  std::optional<std::string> out;
};

int run_enumerate(const EnumerateArgs& a) {
  auto budget = parse_budget(a.budget_text, kqlab::machine::MachineBudget{});
  Bits aux = parse_string_value(a.aux, a.force_bits, a.force_hex);
  auto records = kqlab::machine::enumerate(aux, budget, a.cap, a.workers);
  std::ostringstream os;
  kqlab::machine::write_enumeration_dump(os, records);
  write_output(a.out, os.str());
  return 0;
}

struct KArgs {
  std::string value;
  std::string aux;
  bool force_bits = false;
  bool force_hex = false;
  std::string budget_text;
  int workers = default_workers();
};

int run_k(const KArgs& a) {
  auto budget = parse_budget(a.budget_text, kqlab::machine::MachineBudget{});
  Bits x = parse_string_value(a.value, a.force_bits, a.force_hex);
  Bits aux = parse_string_value(a.aux, a.force_bits, a.force_hex);
  auto table = kqlab::machine::ComplexityTable::build(aux, budget, a.workers);
  auto k = table.complexity(x);
  if (!k) {
    std::cout << "Infinite\n";
    return 3;
  }
  std::cout << *k << "\n";
  return 0;
}

struct InfoStringsArgs {
  std::string x;
  std::string y;
  std::string aux;
  bool force_bits = false;
  bool force_hex = false;
  std::string budget_text;
  int workers = default_workers();
};

int run_info_strings(const InfoStringsArgs& a) {
  auto budget = parse_budget(a.budget_text, kqlab::machine::MachineBudget{});
  Bits x = parse_string_value(a.x, a.force_bits, a.force_hex);
  Bits y = parse_string_value(a.y, a.force_bits, a.force_hex);
  Bits aux = parse_string_value(a.aux, a.force_bits, a.force_hex);
  auto table = kqlab::machine::ComplexityTable::build(aux, budget, a.workers);
  auto value = table.string_info(x, y);
  if (!value) {
    std::cout << "Undefined\n";
    return 3;
  }
  std::cout << *value << "\n";
  return 0;
}

struct InfoProbsArgs {
  std::string p_path;
  std::string q_path;
  std::string aux;
  bool force_bits = false;
  bool force_hex = false;
  std::string budget_text;
  int workers = default_workers();
};

int run_info_probs(const InfoProbsArgs& a) {
  auto budget = parse_budget(a.budget_text, kqlab::machine::MachineBudget{});
  Bits aux = parse_string_value(a.aux, a.force_bits, a.force_hex);
  auto p = kqlab::io::load_probability(a.p_path);
  auto q = kqlab::io::load_probability(a.q_path);
  auto table = kqlab::machine::ComplexityTable::build(aux, budget, a.workers);
  auto value = kqlab::info::prob_info(p, q, table);
  if (!value) {
    std::cout << "Undefined\n";
    return 3;
  }
  std::cout << json_double(*value) << "\n";
  return 0;
}

struct MeasureArgs {
  std::string povm_path;
  std::string state_path;
  std::optional<std::string> out;
};

int run_measure(const MeasureArgs& a) {
  auto povm = kqlab::io::load_povm(a.povm_path);
  auto state = kqlab::io::load_state(a.state_path);
  auto p = kqlab::quantum::measure(povm, state);
  write_output(a.out, kqlab::io::probability_json(p));
  return 0;
}

struct HaarCheckArgs {
  int n = 1;
  long long samples = 100000;
  std::uint64_t seed = 0;
  int workers = default_workers();
};

int run_haar_check(const HaarCheckArgs& a) {
  const long long d = 1ll << a.n;
  auto m1 = kqlab::quantum::first_moment_estimate(a.n, a.samples, a.seed, a.workers);
  kqlab::quantum::Matrix expected1 =
      kqlab::quantum::Matrix::Identity(d, d) / double(d);
  double dev1 = (m1 - expected1).cwiseAbs().maxCoeff();

  auto m2 = kqlab::quantum::second_moment_estimate(a.n, a.samples, a.seed, a.workers);
  kqlab::quantum::Matrix sym = kqlab::quantum::symmetric_projector(a.n);
  kqlab::quantum::Matrix expected2 = sym * (2.0 / double(d * (d + 1)));
  double dev2 = (m2 - expected2).cwiseAbs().maxCoeff();
  kqlab::quantum::Matrix anti =
      kqlab::quantum::Matrix::Identity(d * d, d * d) - sym;
  double anti_dev = (anti * m2 * anti).cwiseAbs().maxCoeff();

  std::cout << "first_moment_max_abs_dev=" << json_double(dev1) << "\n"
            << "second_moment_max_abs_dev=" << json_double(dev2) << "\n"
            << "antisymmetric_block_max_abs=" << json_double(anti_dev) << "\n";
  return 0;
}

int run_validate_povm(const std::string& path) {
  auto povm = kqlab::io::load_povm(path);
  std::cout << "ok: " << povm.elements.size() << " outcomes on " << povm.n << " qubits\n";
  return 0;
}

void print_noinfo_summary(const kqlab::experiments::ExperimentReport& report,
                          const std::string& out_path) {
  for (const auto& est : report.per_n) {
    std::cout << "n=" << est.n << " samples=" << est.samples
              << " mean=" << json_double(est.mean) << " se=" << json_double(est.se) << "\n";
  }
  std::cout << "report: " << out_path << " (+ .csv), wall_seconds="
            << json_double(report.wall_seconds) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"resource-bounded algorithmic information laboratory"};
  app.require_subcommand(1);

  EnumerateArgs enum_args;
  auto* cmd_enum = app.add_subcommand("enumerate", "dump the halting-program table");
  cmd_enum->add_option("--budget", enum_args.budget_text, "budget override L=..,T=..,M=..");
  cmd_enum->add_option("--aux", enum_args.aux, "aux tape (default empty)");
  cmd_enum->add_flag("--bits", enum_args.force_bits, "read string values as 0/1 literals");
  cmd_enum->add_flag("--hex", enum_args.force_hex, "read string values as hex[:bitlen]");
  cmd_enum->add_option("--workers", enum_args.workers, "worker threads");
  cmd_enum->add_option("--cap", enum_args.cap, "enumeration cap on 2^(L+1)");
  std::string enum_out;
  auto* enum_out_opt = cmd_enum->add_option("--out", enum_out, "write dump to file");

  KArgs k_args;
  auto* cmd_k = app.add_subcommand("k", "complexity of a string");
  cmd_k->add_option("--string", k_args.value, "the string to price")->required();
  cmd_k->add_option("--aux", k_args.aux, "aux tape (default empty)");
  cmd_k->add_flag("--bits", k_args.force_bits, "read string values as 0/1 literals");
  cmd_k->add_flag("--hex", k_args.force_hex, "read string values as hex[:bitlen]");
  cmd_k->add_option("--budget", k_args.budget_text, "budget override L=..,T=..,M=..");
  cmd_k->add_option("--workers", k_args.workers, "worker threads");

  InfoStringsArgs is_args;
  auto* cmd_is = app.add_subcommand("info-strings", "information between two strings");
  cmd_is->add_option("--x", is_args.x, "first string")->required();
  cmd_is->add_option("--y", is_args.y, "second string")->required();
  cmd_is->add_option("--aux", is_args.aux, "aux tape (default empty)");
  cmd_is->add_flag("--bits", is_args.force_bits, "read string values as 0/1 literals");
  cmd_is->add_flag("--hex", is_args.force_hex, "read string values as hex[:bitlen]");
  cmd_is->add_option("--budget", is_args.budget_text, "budget override L=..,T=..,M=..");
  cmd_is->add_option("--workers", is_args.workers, "worker threads");

  InfoProbsArgs ip_args;
  auto* cmd_ip = app.add_subcommand("info-probs", "information between two probability files");
  cmd_ip->add_option("--p", ip_args.p_path, "probability JSON file")->required();
  cmd_ip->add_option("--q", ip_args.q_path, "probability JSON file")->required();
  cmd_ip->add_option("--aux", ip_args.aux, "aux tape (default empty)");
  cmd_ip->add_flag("--bits", ip_args.force_bits, "read string values as 0/1 literals");
  cmd_ip->add_flag("--hex", ip_args.force_hex, "read string values as hex[:bitlen]");
  cmd_ip->add_option("--budget", ip_args.budget_text, "budget override L=..,T=..,M=..");
  cmd_ip->add_option("--workers", ip_args.workers, "worker threads");

  MeasureArgs measure_args;
  auto* cmd_measure = app.add_subcommand("measure", "Born distribution of a POVM on a state");
  cmd_measure->add_option("--povm", measure_args.povm_path, "POVM JSON file")->required();
  cmd_measure->add_option("--state", measure_args.state_path, "state JSON file")->required();
  std::string measure_out;
  auto* measure_out_opt = cmd_measure->add_option("--out", measure_out, "write result to file");

  HaarCheckArgs haar_args;
  auto* cmd_haar = app.add_subcommand("haar-check", "first/second moment checks of Haar sampling");
  cmd_haar->add_option("--n", haar_args.n, "qubit count");
  cmd_haar->add_option("--samples", haar_args.samples, "Monte Carlo samples");
  cmd_haar->add_option("--seed", haar_args.seed, "RNG seed");
  cmd_haar->add_option("--workers", haar_args.workers, "worker threads");

  kqlab::experiments::NoInfoConfig ni_cfg;
  ni_cfg.workers = default_workers();
  std::vector<int> ni_n_values = ni_cfg.n_values;
  std::string ni_budget_text;
  std::string ni_relativize = "povm";
  std::string ni_povm_path;
  std::string ni_out = "noinfo_report.json";
  std::string ni_config_path;
  auto* cmd_ni = app.add_subcommand("exp-noinfo", "self-information of measured Haar states");
  auto* ni_n_opt = cmd_ni->add_option("--n", ni_n_values, "qubit counts for the basis study");
  auto* ni_samples_opt = cmd_ni->add_option("--samples", ni_cfg.samples_per_n, "samples per n");
  auto* ni_budget_opt = cmd_ni->add_option("--budget", ni_budget_text, "budget L=..,T=..,M=..");
  auto* ni_seed_opt = cmd_ni->add_option("--seed", ni_cfg.seed, "RNG seed");
  auto* ni_workers_opt = cmd_ni->add_option("--workers", ni_cfg.workers, "worker threads");
  auto* ni_rel_opt =
      cmd_ni->add_option("--relativize", ni_relativize, "aux conditioning: povm or qubits");
  auto* ni_povm_opt = cmd_ni->add_option("--povm", ni_povm_path, "study this POVM file instead");
  auto* ni_out_opt = cmd_ni->add_option("--out", ni_out, "report path");
  cmd_ni->add_option("--config", ni_config_path, "JSON config file (command line wins)");

  kqlab::experiments::ConservationConfig cons_cfg;
  cons_cfg.workers = default_workers();
  std::string cons_budget_text;
  std::string cons_out = "conservation_report.json";
  std::string cons_config_path;
  auto* cmd_cons = app.add_subcommand("exp-conservation", "channel conservation slack study");
  auto* cons_trials_opt = cmd_cons->add_option("--trials", cons_cfg.trials, "random triples");
  auto* cons_support_opt =
      cmd_cons->add_option("--support-size", cons_cfg.support_size, "support size per draw");
  auto* cons_budget_opt =
      cmd_cons->add_option("--budget", cons_budget_text, "budget L=..,T=..,M=..");
  auto* cons_seed_opt = cmd_cons->add_option("--seed", cons_cfg.seed, "RNG seed");
  auto* cons_every_opt =
      cmd_cons->add_option("--control-every", cons_cfg.control_every, "identity control cadence");
  auto* cons_workers_opt = cmd_cons->add_option("--workers", cons_cfg.workers, "worker threads");
  auto* cons_out_opt = cmd_cons->add_option("--out", cons_out, "report path");
  cmd_cons->add_option("--config", cons_config_path, "JSON config file (command line wins)");

  std::string validate_path;
  auto* cmd_validate = app.add_subcommand("validate-povm", "check a POVM file");
  cmd_validate->add_option("--file", validate_path, "POVM JSON file")->required();

  try {
    app.parse(argc, argv);

    if (cmd_enum->parsed()) {
      if (enum_out_opt->count() > 0) enum_args.out = enum_out;
      return run_enumerate(enum_args);
    }
    if (cmd_k->parsed()) return run_k(k_args);
    if (cmd_is->parsed()) return run_info_strings(is_args);
    if (cmd_ip->parsed()) return run_info_probs(ip_args);
    if (cmd_measure->parsed()) {
      if (measure_out_opt->count() > 0) measure_args.out = measure_out;
      return run_measure(measure_args);
    }
    if (cmd_haar->parsed()) return run_haar_check(haar_args);

    if (cmd_ni->parsed()) {
      if (!ni_config_path.empty()) {
        nlohmann::json cfg = load_config_file(ni_config_path);
        apply_config(cfg, "n", ni_n_opt, ni_n_values);
        apply_config(cfg, "samples", ni_samples_opt, ni_cfg.samples_per_n);
        apply_config(cfg, "budget", ni_budget_opt, ni_budget_text);
        apply_config(cfg, "seed", ni_seed_opt, ni_cfg.seed);
        apply_config(cfg, "workers", ni_workers_opt, ni_cfg.workers);
        apply_config(cfg, "relativize", ni_rel_opt, ni_relativize);
        apply_config(cfg, "povm", ni_povm_opt, ni_povm_path);
        apply_config(cfg, "out", ni_out_opt, ni_out);
      }
      ni_cfg.n_values = ni_n_values;
      ni_cfg.budget = parse_budget(ni_budget_text, ni_cfg.budget);
      if (ni_relativize == "povm") {
        ni_cfg.relativize = kqlab::experiments::Relativize::povm;
      } else if (ni_relativize == "qubits") {
        ni_cfg.relativize = kqlab::experiments::Relativize::qubits;
      } else {
        throw ValidationError("relativize", "--relativize must be povm or qubits");
      }
      if (!ni_povm_path.empty()) ni_cfg.povm = kqlab::io::load_povm(ni_povm_path);

      auto start = std::chrono::steady_clock::now();
      auto report = kqlab::experiments::run_noinfo(ni_cfg);
      report.wall_seconds = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start).count();
      kqlab::experiments::emit_report(report, ni_out);
      print_noinfo_summary(report, ni_out);
      return 0;
    }

    if (cmd_cons->parsed()) {
      if (!cons_config_path.empty()) {
        nlohmann::json cfg = load_config_file(cons_config_path);
        apply_config(cfg, "trials", cons_trials_opt, cons_cfg.trials);
        apply_config(cfg, "support_size", cons_support_opt, cons_cfg.support_size);
        apply_config(cfg, "budget", cons_budget_opt, cons_budget_text);
        apply_config(cfg, "seed", cons_seed_opt, cons_cfg.seed);
        apply_config(cfg, "control_every", cons_every_opt, cons_cfg.control_every);
        apply_config(cfg, "workers", cons_workers_opt, cons_cfg.workers);
        apply_config(cfg, "out", cons_out_opt, cons_out);
      }
      cons_cfg.budget = parse_budget(cons_budget_text, cons_cfg.budget);

      auto start = std::chrono::steady_clock::now();
      auto report = kqlab::experiments::run_conservation(cons_cfg);
      report.wall_seconds = std::chrono::duration<double>(
                                std::chrono::steady_clock::now() - start).count();
      kqlab::experiments::emit_report(report, cons_out);
      const auto& s = *report.slack;
      std::cout << "trials=" << s.trials << " max_slack=" << json_double(s.max)
                << " median_slack=" << json_double(s.median)
                << " control_max_abs=" << json_double(s.control_max_abs) << "\n";
      std::cout << "report: " << cons_out << " (+ .csv), wall_seconds="
                << json_double(report.wall_seconds) << "\n";
      return 0;
    }

    if (cmd_validate->parsed()) return run_validate_povm(validate_path);
  } catch (const CLI::ParseError& e) {
    // CLI11 has its own exit-code scheme; the contract here is plain
    // 0 = help, 1 = bad usage.
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const ValidationError& e) {
    std::cerr << "error (" << e.condition() << "): " << e.what() << "\n";
    return 2;
  } catch (const BudgetError& e) {
    std::cerr << "budget error: " << e.what() << "\n";
    return 3;
  } catch (const ResourceLimitError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
