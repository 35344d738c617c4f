#pragma once

#include <filesystem>

#include "kqlab/info.hpp"
#include "kqlab/quantum.hpp"

// JSON file formats used by the CLI:
//   probability: {"support": ["hex:bitlen", ...], "mass": [..]}  (parallel arrays)
//   channel:     {"inputs": [..], "outputs": [..], "kernel": [[..]]}
//                kernel[x][y] = f(outputs[x] | inputs[y])
//   POVM:        {"n": .., "elements": [[[re, im] per column] per row] per element}
//   state:       {"n": .., "amplitudes": [[re, im], ..]}
namespace kqlab::io {

info::FiniteProbability load_probability(const std::filesystem::path& path);
void save_probability(const info::FiniteProbability& p, const std::filesystem::path& path);
std::string probability_json(const info::FiniteProbability& p);

info::Channel load_channel(const std::filesystem::path& path);
void save_channel(const info::Channel& f, const std::filesystem::path& path);

quantum::Povm load_povm(const std::filesystem::path& path);
void save_povm(const quantum::Povm& povm, const std::filesystem::path& path);

quantum::PureState load_state(const std::filesystem::path& path);
void save_state(const quantum::PureState& state, const std::filesystem::path& path);

}  // namespace kqlab::io
