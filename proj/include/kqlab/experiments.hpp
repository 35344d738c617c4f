#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "kqlab/machine.hpp"
#include "kqlab/quantum.hpp"

namespace kqlab::experiments {

// Aux tape used when conditioning the complexity table for a POVM study:
//   povm   - the canonical serialization of the POVM elements
//   qubits - just the qubit count
enum class Relativize { povm, qubits };

struct NoInfoConfig {
  std::vector<int> n_values = {1, 2, 3};
  long long samples_per_n = 10000;
  machine::MachineBudget budget{33, 10000, 64};
  std::uint64_t seed = 0;
  int workers = 1;
  Relativize relativize = Relativize::povm;
  // When set, the study runs on this POVM alone (n taken from it) instead of
  // the computational-basis POVM per entry of n_values.
  std::optional<quantum::Povm> povm;
};

struct ConservationConfig {
  long long trials = 1000;
  int support_size = 3;
  machine::MachineBudget budget{24, 10000, 64};
  std::uint64_t seed = 0;
  int workers = 1;
  int control_every = 10;  // one identity-channel control per this many trials
};

struct PerNEstimate {
  int n = 0;
  double mean = 0.0;
  double se = 0.0;
  long long samples = 0;
};

struct SlackStats {
  double max = 0.0;
  double median = 0.0;
  double bin_width = 0.5;
  double first_edge = 0.0;
  std::vector<long long> counts;
  long long trials = 0;
  long long controls = 0;
  double control_max_abs = 0.0;
};

struct NoInfoSample {
  int n;
  long long index;
  double value;  // 2^{prob_info(p, p)} for that draw
};

struct SlackSample {
  long long index;
  bool control;
  double value;
};

struct ExperimentReport {
  std::string experiment_id;
  std::uint64_t seed = 0;
  nlohmann::json config;  // resolved parameters (execution knobs excluded)
  std::vector<PerNEstimate> per_n;
  std::optional<SlackStats> slack;
  machine::MachineBudget budget;
  double wall_seconds = 0.0;  // console information only, never serialized

  std::vector<NoInfoSample> noinfo_samples;  // CSV sidecar rows
  std::vector<SlackSample> slack_samples;

  // schema_version 1. Identical (config, seed) must serialize to identical
  // bytes whatever the worker count, so neither workers nor wall time appear.
  nlohmann::json to_json() const;
  std::string to_csv() const;
};

// Monte Carlo mean of 2^{prob_info(p, p)} (the integrand itself, not its
// log) for Born distributions p of Haar-random states. Outcome-pair string
// information is precomputed once per POVM; a pair without finite joint
// complexity aborts with BudgetError naming the pair.
ExperimentReport run_noinfo(const NoInfoConfig& cfg);

// Conservation of information under channels: slack distribution of
// prob_info(fp, q) - prob_info(p, q) over random (p, q, f) triples on small
// string supports, with interleaved identity-channel controls whose slack is
// exactly zero.
ExperimentReport run_conservation(const ConservationConfig& cfg);

// Fixed support universe for conservation trials.
const std::vector<Bits>& conservation_universe();

// Writes the report JSON to `path` and per-sample CSV to the same stem with
// a ".csv" extension.
void emit_report(const ExperimentReport& report, const std::filesystem::path& path);

}  // namespace kqlab::experiments
