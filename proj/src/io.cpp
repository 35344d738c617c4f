#include "kqlab/io.hpp"

#include <fstream>

#include "json.hpp"
#include "kqlab/errors.hpp"

namespace kqlab::io {

namespace {

using nlohmann::json;

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("file", "cannot open " + path.string());
  }
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    throw ValidationError("json", "malformed JSON in " + path.string());
  }
  return j;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ValidationError("file", "cannot write " + path.string());
  }
  out << text;
}

std::complex<double> parse_complex(const json& entry, const std::string& what) {
  if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() ||
      !entry[1].is_number()) {
    throw ValidationError("json", what + ": complex entries are [re, im] pairs");
  }
  return {entry[0].get<double>(), entry[1].get<double>()};
}

}  // namespace

info::FiniteProbability load_probability(const std::filesystem::path& path) {
  json j = load_json(path);
  if (!j.contains("support") || !j.contains("mass") || !j["support"].is_array() ||
      !j["mass"].is_array() || j["support"].size() != j["mass"].size()) {
    throw ValidationError("json", path.string() +
                                      ": expected parallel \"support\" and "
                                      "\"mass\" arrays");
  }
  std::map<Bits, double> mass;
  for (std::size_t i = 0; i < j["support"].size(); ++i) {
    Bits x = Bits::hex(j["support"][i].get<std::string>());
    if (mass.count(x)) {
      throw ValidationError("json", path.string() + ": duplicate support string " +
                                        x.to_hex());
    }
    mass[x] = j["mass"][i].get<double>();
  }
  return info::FiniteProbability::from_masses(std::move(mass));
}

std::string probability_json(const info::FiniteProbability& p) {
  json support = json::array();
  json mass = json::array();
  for (const auto& [x, v] : p.masses()) {
    support.push_back(x.to_hex());
    mass.push_back(v);
  }
  return json{{"mass", mass}, {"support", support}}.dump(2) + "\n";
}

void save_probability(const info::FiniteProbability& p,
                      const std::filesystem::path& path) {
  write_text(path, probability_json(p));
}

info::Channel load_channel(const std::filesystem::path& path) {
  json j = load_json(path);
  if (!j.contains("inputs") || !j.contains("outputs") || !j.contains("kernel")) {
    throw ValidationError("json",
                          path.string() + ": expected inputs/outputs/kernel");
  }
  std::vector<Bits> inputs, outputs;
  for (const auto& s : j["inputs"]) inputs.push_back(Bits::hex(s.get<std::string>()));
  for (const auto& s : j["outputs"]) outputs.push_back(Bits::hex(s.get<std::string>()));
  const json& kernel = j["kernel"];
  if (!kernel.is_array() || kernel.size() != outputs.size()) {
    throw ValidationError("json", path.string() + ": kernel needs one row per output");
  }
  std::map<Bits, std::map<Bits, double>> columns;
  for (std::size_t x = 0; x < outputs.size(); ++x) {
    if (!kernel[x].is_array() || kernel[x].size() != inputs.size()) {
      throw ValidationError("json",
                            path.string() + ": kernel rows need one entry per input");
    }
    for (std::size_t y = 0; y < inputs.size(); ++y) {
      columns[inputs[y]][outputs[x]] = kernel[x][y].get<double>();
    }
  }
  std::map<Bits, info::FiniteProbability> cols;
  for (auto& [y, col] : columns) {
    cols[y] = info::FiniteProbability::from_masses(std::move(col));
  }
  return info::Channel::from_columns(std::move(cols));
}

void save_channel(const info::Channel& f, const std::filesystem::path& path) {
  // Output support: union over columns, in Bits order.
  std::vector<Bits> inputs;
  std::map<Bits, std::size_t> output_index;
  for (const auto& [y, col] : f.columns()) {
    inputs.push_back(y);
    for (const auto& [x, v] : col.masses()) output_index.emplace(x, 0);
  }
  std::vector<Bits> outputs;
  for (auto& [x, idx] : output_index) {
    idx = outputs.size();
    outputs.push_back(x);
  }
  json kernel = json::array();
  for (std::size_t x = 0; x < outputs.size(); ++x) {
    kernel.push_back(json::array());
    for (std::size_t y = 0; y < inputs.size(); ++y) {
      kernel[x].push_back(f.columns().at(inputs[y]).mass(outputs[x]));
    }
  }
  json in_arr = json::array(), out_arr = json::array();
  for (const Bits& y : inputs) in_arr.push_back(y.to_hex());
  for (const Bits& x : outputs) out_arr.push_back(x.to_hex());
  write_text(path, json{{"inputs", in_arr}, {"kernel", kernel}, {"outputs", out_arr}}
                           .dump(2) +
                       "\n");
}

quantum::Povm load_povm(const std::filesystem::path& path) {
  json j = load_json(path);
  if (!j.contains("n") || !j.contains("elements") || !j["elements"].is_array()) {
    throw ValidationError("json", path.string() + ": expected n and elements");
  }
  int n = j["n"].get<int>();
  std::vector<quantum::Matrix> elements;
  for (const auto& elem : j["elements"]) {
    if (!elem.is_array()) {
      throw ValidationError("json", path.string() + ": element is not a matrix");
    }
    std::size_t rows = elem.size();
    quantum::Matrix m(rows, rows);
    for (std::size_t i = 0; i < rows; ++i) {
      if (!elem[i].is_array() || elem[i].size() != rows) {
        throw ValidationError("json", path.string() + ": element is not square");
      }
      for (std::size_t jj = 0; jj < rows; ++jj) {
        m(i, jj) = parse_complex(elem[i][jj], path.string());
      }
    }
    elements.push_back(std::move(m));
  }
  return quantum::validate_povm(std::move(elements), n);
}

void save_povm(const quantum::Povm& povm, const std::filesystem::path& path) {
  json elements = json::array();
  for (const auto& e : povm.elements) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < e.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index jj = 0; jj < e.cols(); ++jj) {
        row.push_back(json::array({e(i, jj).real(), e(i, jj).imag()}));
      }
      rows.push_back(row);
    }
    elements.push_back(rows);
  }
  write_text(path, json{{"elements", elements}, {"n", povm.n}}.dump(2) + "\n");
}

quantum::PureState load_state(const std::filesystem::path& path) {
  json j = load_json(path);
  if (!j.contains("n") || !j.contains("amplitudes") || !j["amplitudes"].is_array()) {
    throw ValidationError("json", path.string() + ": expected n and amplitudes");
  }
  int n = j["n"].get<int>();
  quantum::CVector amp(j["amplitudes"].size());
  for (std::size_t i = 0; i < j["amplitudes"].size(); ++i) {
    amp(i) = parse_complex(j["amplitudes"][i], path.string());
  }
  return quantum::PureState::from(n, std::move(amp));
}

void save_state(const quantum::PureState& state, const std::filesystem::path& path) {
  json amps = json::array();
  for (Eigen::Index i = 0; i < state.amplitudes.size(); ++i) {
    amps.push_back(
        json::array({state.amplitudes(i).real(), state.amplitudes(i).imag()}));
  }
  write_text(path, json{{"amplitudes", amps}, {"n", state.n}}.dump(2) + "\n");
}

}  // namespace kqlab::io
