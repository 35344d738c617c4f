#include "kqlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "kqlab/complexity.hpp"
#include "kqlab/errors.hpp"
#include "kqlab/info.hpp"
#include "kqlab/parallel.hpp"

namespace kqlab::experiments {

namespace {

// Samples are drawn in fixed blocks, one RNG stream per block, and block
// partials are reduced in block order. That makes every estimate a function
// of (seed, config) alone: the worker count decides who computes a block,
// never what the block contains or when it is added.
constexpr long long kSampleBlock = 1024;

std::string budget_string(const machine::MachineBudget& b) { return b.to_string(); }

// Shortest decimal that round-trips, courtesy of the JSON serializer; used
// for CSV so the sidecar is as reproducible as the report.
std::string csv_double(double v) { return nlohmann::json(v).dump(); }

// 2^{i(label_a : label_b)} for every outcome pair, or BudgetError naming the
// first pair the table cannot price.
std::vector<std::vector<double>> info_weights(const quantum::Povm& povm,
                                              const machine::ComplexityTable& table) {
  const std::size_t m = povm.labels.size();
  std::vector<std::vector<double>> w(m, std::vector<double>(m, 0.0));
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) {
      auto i_ab = table.string_info(povm.labels[a], povm.labels[b]);
      if (!i_ab) {
        throw BudgetError("string information of outcome pair (" + povm.labels[a].to_hex() +
                          ", " + povm.labels[b].to_hex() + ") is undefined at budget " +
                          budget_string(table.budget()) + "; raise max_program_bits");
      }
      w[a][b] = std::ldexp(1.0, *i_ab);
    }
  }
  return w;
}

// Born probabilities as a dense vector in element order: tiny negative
// quadratic-form noise clamped to zero, then normalized so the vector sums
// to 1 exactly (the raw total is 1 only up to rounding, and the degenerate
// one-outcome POVM should integrate to exactly 2^i).
std::vector<double> born_vector(const quantum::Povm& povm, const quantum::PureState& psi) {
  std::vector<double> p(povm.elements.size());
  double total = 0.0;
  for (std::size_t a = 0; a < povm.elements.size(); ++a) {
    double v = (psi.amplitudes.adjoint() * povm.elements[a] * psi.amplitudes)(0, 0).real();
    if (v < 0.0) {
      if (v < -quantum::kPsdTol) {
        throw ValidationError("psd", "outcome probability " + std::to_string(v) +
                                         " below tolerance");
      }
      v = 0.0;
    }
    p[a] = v;
    total += v;
  }
  for (double& v : p) v /= total;
  return p;
}

struct BlockPartial {
  double sum = 0.0;
  double sum_sq = 0.0;
};

void append_noinfo_for_povm(const NoInfoConfig& cfg, const quantum::Povm& povm,
                            ExperimentReport& report) {
  Bits aux = cfg.relativize == Relativize::povm ? quantum::povm_aux(povm)
                                                : machine::integer_aux(std::uint64_t(povm.n));
  auto table = machine::ComplexityTable::build(aux, cfg.budget, cfg.workers);
  auto weights = info_weights(povm, table);

  const long long samples = cfg.samples_per_n;
  const long long blocks = (samples + kSampleBlock - 1) / kSampleBlock;
  std::vector<double> values(static_cast<std::size_t>(samples));
  std::vector<BlockPartial> partials(static_cast<std::size_t>(blocks));

  parallel_for_index(std::size_t(blocks), cfg.workers, [&](std::size_t block) {
    RngStream rng(cfg.seed, (std::uint64_t(povm.n) << 40) | std::uint64_t(block));
    const long long begin = (long long)block * kSampleBlock;
    const long long end = std::min(samples, begin + kSampleBlock);
    BlockPartial part;
    for (long long s = begin; s < end; ++s) {
      quantum::PureState psi = quantum::haar_sample(povm.n, rng);
      std::vector<double> p = born_vector(povm, psi);
      double v = 0.0;
      for (std::size_t a = 0; a < p.size(); ++a) {
        for (std::size_t b = 0; b < p.size(); ++b) {
          v += weights[a][b] * p[a] * p[b];
        }
      }
      values[std::size_t(s)] = v;
      part.sum += v;
      part.sum_sq += v * v;
    }
    partials[block] = part;
  });

  double sum = 0.0;
  double sum_sq = 0.0;
  for (const BlockPartial& part : partials) {
    sum += part.sum;
    sum_sq += part.sum_sq;
  }
  double mean = sum / double(samples);
  double variance =
      samples > 1 ? std::max(0.0, (sum_sq - double(samples) * mean * mean) / double(samples - 1))
                  : 0.0;

  PerNEstimate est;
  est.n = povm.n;
  est.mean = mean;
  est.se = std::sqrt(variance / double(samples));
  est.samples = samples;
  report.per_n.push_back(est);
  for (long long s = 0; s < samples; ++s) {
    report.noinfo_samples.push_back({povm.n, s, values[std::size_t(s)]});
  }
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

const std::vector<Bits>& conservation_universe() {
  static const std::vector<Bits> universe = {
      Bits::bits(""),  Bits::bits("0"),  Bits::bits("00"), Bits::bits("01"),
      Bits::bits("1"), Bits::bits("10"), Bits::bits("11"),
  };
  return universe;
}

ExperimentReport run_noinfo(const NoInfoConfig& cfg) {
  cfg.budget.validate();
  if (cfg.samples_per_n < 1) {
    throw ValidationError("samples", "samples_per_n must be at least 1");
  }
  if (cfg.workers < 1) {
    throw ValidationError("workers", "workers must be at least 1");
  }
  if (!cfg.povm && cfg.n_values.empty()) {
    throw ValidationError("n_values", "need at least one qubit count");
  }

  ExperimentReport report;
  report.experiment_id = "noinfo";
  report.seed = cfg.seed;
  report.budget = cfg.budget;

  std::vector<int> n_values;
  if (cfg.povm) {
    n_values = {cfg.povm->n};
    append_noinfo_for_povm(cfg, *cfg.povm, report);
  } else {
    n_values = cfg.n_values;
    for (int n : n_values) {
      append_noinfo_for_povm(cfg, quantum::basis_povm(n), report);
    }
  }

  // Echoed under the same keys the --config reader accepts, so the config
  // block of a report can be replayed as a config file. The POVM is echoed
  // as its canonical aux tape (identity, not a path), or null.
  report.config = {
      {"budget", budget_string(cfg.budget)},
      {"n", n_values},
      {"povm", cfg.povm ? nlohmann::json(quantum::povm_aux(*cfg.povm).to_hex())
                        : nlohmann::json(nullptr)},
      {"relativize", cfg.relativize == Relativize::povm ? "povm" : "qubits"},
      {"samples", cfg.samples_per_n},
  };
  return report;
}

ExperimentReport run_conservation(const ConservationConfig& cfg) {
  cfg.budget.validate();
  const std::vector<Bits>& universe = conservation_universe();
  if (cfg.trials < 1) {
    throw ValidationError("trials", "trials must be at least 1");
  }
  if (cfg.support_size < 1 || std::size_t(cfg.support_size) > universe.size()) {
    throw ValidationError("support_size", "support_size must be between 1 and " +
                                              std::to_string(universe.size()));
  }
  if (cfg.control_every < 1) {
    throw ValidationError("control_every", "control_every must be at least 1");
  }
  if (cfg.workers < 1) {
    throw ValidationError("workers", "workers must be at least 1");
  }

  auto table = machine::ComplexityTable::build(Bits{}, cfg.budget, cfg.workers);
  for (const Bits& x : universe) {
    for (const Bits& y : universe) {
      if (!table.string_info(x, y)) {
        throw BudgetError("string information of universe pair (" + x.to_hex() + ", " +
                          y.to_hex() + ") is undefined at budget " + budget_string(cfg.budget) +
                          "; raise max_program_bits");
      }
    }
  }

  // Distinct support drawn by partial Fisher-Yates, then one simplex-uniform
  // mass vector on it (normalized exponentials), all from the trial's stream.
  auto random_probability = [&](RngStream& rng) {
    std::vector<Bits> deck = universe;
    std::map<Bits, double> mass;
    std::vector<double> draws(std::size_t(cfg.support_size));
    double total = 0.0;
    for (int j = 0; j < cfg.support_size; ++j) {
      std::size_t k = std::size_t(j) + std::size_t(rng.uniform_int(deck.size() - std::size_t(j)));
      std::swap(deck[std::size_t(j)], deck[k]);
      draws[std::size_t(j)] = rng.exponential();
      total += draws[std::size_t(j)];
    }
    for (int j = 0; j < cfg.support_size; ++j) {
      mass[deck[std::size_t(j)]] = draws[std::size_t(j)] / total;
    }
    return info::FiniteProbability::from_masses(std::move(mass));
  };

  auto support_of = [](const info::FiniteProbability& p) {
    std::vector<Bits> out;
    for (const auto& [x, _] : p.masses()) out.push_back(x);
    return out;
  };

  const long long trials = cfg.trials;
  std::vector<double> slack(static_cast<std::size_t>(trials));
  const long long controls = (trials + cfg.control_every - 1) / cfg.control_every;
  std::vector<double> control_slack(std::size_t(controls), 0.0);

  parallel_for_index(std::size_t(trials), cfg.workers, [&](std::size_t i) {
    {
      RngStream rng(cfg.seed, std::uint64_t(i));
      info::FiniteProbability p = random_probability(rng);
      info::FiniteProbability q = random_probability(rng);
      // The output alphabet is strictly smaller than the input support
      // (constant channels included): randomized post-processing typically
      // merges outcomes. With equal-size alphabets the Dirichlet smearing
      // pulls the bilinear form toward its support mean, which sits above
      // the typical value under the heavily skewed 2^i weights, and the
      // median slack stops saying anything about conservation.
      const int max_out = std::max(1, cfg.support_size - 1);
      const int out_size = 1 + int(rng.uniform_int(std::uint64_t(max_out)));
      std::vector<Bits> outputs;
      {
        std::vector<Bits> deck = universe;
        for (int j = 0; j < out_size; ++j) {
          std::size_t k =
              std::size_t(j) + std::size_t(rng.uniform_int(deck.size() - std::size_t(j)));
          std::swap(deck[std::size_t(j)], deck[k]);
          outputs.push_back(deck[std::size_t(j)]);
        }
        std::sort(outputs.begin(), outputs.end());
      }
      info::Channel f = info::random_channel(support_of(p), outputs, rng.next_u64());
      auto s = info::conservation_slack(f, p, q, table);
      if (!s) {
        throw BudgetError("conservation slack undefined at budget " + budget_string(cfg.budget));
      }
      slack[i] = *s;
    }
    if (static_cast<long long>(i) % cfg.control_every == 0) {
      // Identity channel on p's own support: the pushforward reproduces p
      // double for double, so the slack must come out exactly zero.
      RngStream rng(cfg.seed, (std::uint64_t{1} << 40) | std::uint64_t(i));
      info::FiniteProbability p = random_probability(rng);
      info::FiniteProbability q = random_probability(rng);
      info::Channel f = info::Channel::identity(support_of(p));
      auto s = info::conservation_slack(f, p, q, table);
      if (!s) {
        throw BudgetError("conservation slack undefined at budget " + budget_string(cfg.budget));
      }
      control_slack[i / std::size_t(cfg.control_every)] = *s;
    }
  });

  SlackStats stats;
  stats.trials = trials;
  stats.controls = controls;
  stats.max = *std::max_element(slack.begin(), slack.end());
  stats.median = median_of(slack);
  double min = *std::min_element(slack.begin(), slack.end());
  stats.first_edge = std::floor(min / stats.bin_width) * stats.bin_width;
  std::size_t bins = std::size_t(std::floor((stats.max - stats.first_edge) / stats.bin_width)) + 1;
  stats.counts.assign(bins, 0);
  for (double v : slack) {
    auto bin = std::size_t(std::floor((v - stats.first_edge) / stats.bin_width));
    stats.counts[std::min(bin, bins - 1)] += 1;
  }
  for (double v : control_slack) {
    stats.control_max_abs = std::max(stats.control_max_abs, std::fabs(v));
  }

  ExperimentReport report;
  report.experiment_id = "conservation";
  report.seed = cfg.seed;
  report.budget = cfg.budget;
  report.slack = stats;
  report.config = {
      {"budget", budget_string(cfg.budget)},
      {"control_every", cfg.control_every},
      {"support_size", cfg.support_size},
      {"trials", cfg.trials},
      {"universe", [&] {
         std::vector<std::string> hex;
         for (const Bits& x : universe) hex.push_back(x.to_hex());
         return hex;
       }()},
  };
  report.slack_samples.reserve(std::size_t(trials + controls));
  for (long long i = 0; i < trials; ++i) {
    report.slack_samples.push_back({i, false, slack[std::size_t(i)]});
    if (i % cfg.control_every == 0) {
      report.slack_samples.push_back(
          {i, true, control_slack[std::size_t(i / cfg.control_every)]});
    }
  }
  return report;
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json per_n_json = nlohmann::json::array();
  for (const PerNEstimate& est : per_n) {
    per_n_json.push_back({
        {"mean", est.mean},
        {"n", est.n},
        {"samples", est.samples},
        {"se", est.se},
    });
  }
  nlohmann::json slack_json(nullptr);
  if (slack) {
    slack_json = {
        {"bin_width", slack->bin_width},
        {"control_max_abs", slack->control_max_abs},
        {"controls", slack->controls},
        {"counts", slack->counts},
        {"first_edge", slack->first_edge},
        {"max", slack->max},
        {"median", slack->median},
        {"trials", slack->trials},
    };
  }
  return nlohmann::json{
      {"budget",
       {{"L", budget.max_program_bits}, {"M", budget.max_output_bits}, {"T", budget.max_steps}}},
      {"config", config},
      {"experiment_id", experiment_id},
      {"per_n", per_n_json},
      {"schema_version", 1},
      {"seed", seed},
      {"slack", slack_json},
  };
}

std::string ExperimentReport::to_csv() const {
  std::ostringstream os;
  if (!noinfo_samples.empty()) {
    os << "n,sample,value\n";
    for (const NoInfoSample& row : noinfo_samples) {
      os << row.n << ',' << row.index << ',' << csv_double(row.value) << '\n';
    }
  } else {
    os << "trial,control,slack\n";
    for (const SlackSample& row : slack_samples) {
      os << row.index << ',' << (row.control ? 1 : 0) << ',' << csv_double(row.value) << '\n';
    }
  }
  return os.str();
}

void emit_report(const ExperimentReport& report, const std::filesystem::path& path) {
  std::ofstream json_out(path, std::ios::binary);
  if (!json_out) {
    throw ValidationError("file", "cannot open " + path.string() + " for writing");
  }
  json_out << report.to_json().dump(2) << '\n';
  json_out.close();

  std::filesystem::path csv_path = path;
  csv_path.replace_extension(".csv");
  std::ofstream csv_out(csv_path, std::ios::binary);
  if (!csv_out) {
    throw ValidationError("file", "cannot open " + csv_path.string() + " for writing");
  }
  csv_out << report.to_csv();
}

}  // namespace kqlab::experiments
