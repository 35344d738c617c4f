#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "kqlab/bits.hpp"
#include "kqlab/info.hpp"
#include "kqlab/rng.hpp"

namespace kqlab::quantum {

using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kNormTol = 1e-9;          // state norm, column sums
inline constexpr double kHermTol = 1e-9;          // max elementwise |E - E~|
inline constexpr double kPsdTol = 1e-8;           // eigenvalue floor for PSD
inline constexpr double kCompletenessTol = 1e-8;  // max elementwise |sum E - I|
inline constexpr double kEigenFloor = 1e-12;      // random POVM normalization
inline constexpr int kMaxQubits = 5;

// Unit vector in C^(2^n).
struct PureState {
  int n = 1;
  CVector amplitudes;

  static PureState from(int n, CVector amplitudes);  // validates
};

// Validated POVM on n qubits. Outcome labels are the outcome index written
// in fixed-width binary (width ceil(log2 m); the single-outcome POVM gets
// the empty label).
struct Povm {
  int n = 1;
  std::vector<Matrix> elements;
  std::vector<Bits> labels;
};

// Checks, in order: shapes, per-element hermiticity, per-element positive
// semidefiniteness, completeness. Throws ValidationError naming the first
// violated condition.
Povm validate_povm(std::vector<Matrix> elements, int n);

Povm basis_povm(int n);

// Born probabilities mass(k) = <psi| E_k |psi>, keyed by outcome label.
info::FiniteProbability measure(const Povm& povm, const PureState& state);

// Haar-random pure state: 2^n standard complex Gaussian amplitudes,
// normalized.
PureState haar_sample(int n, RngStream& rng);

// Monte Carlo mean of |psi><psi| (dimension 2^n).
Matrix first_moment_estimate(int n, long long samples, std::uint64_t seed,
                             int workers = 1);

// Monte Carlo mean of |psi psi><psi psi| on the doubled space (dim 4^n).
Matrix second_moment_estimate(int n, long long samples, std::uint64_t seed,
                              int workers = 1);

// Projector onto the symmetric subspace of C^d tensor C^d: (I + SWAP) / 2.
Matrix symmetric_projector(int n);

// POVM E_k = S^(-1/2) A_k S^(-1/2) with A_k = G_k G_k~ for complex Gaussian
// G_k and S = sum A_k. Eigenvalues of S below kEigenFloor are an error
// (degenerate draw; use another seed).
Povm random_povm(int n, int outcomes, std::uint64_t seed);

// Canonical serialization shared by files and aux conditioning: matrices
// row-major, every complex entry two exact decimal rationals (re, im),
// fields separated by 0x1F, matrices separated by 0x1E.
std::string exact_rational(double x);
std::string canonical_matrix_bytes(std::span<const Matrix> matrices);

// Aux tape for conditioning on a POVM: self-delimited bits of the canonical
// serialization.
Bits povm_aux(const Povm& povm);

// Row-major CSV of re/im pairs, one row per matrix row, for debugging.
void dump_matrix_csv(std::ostream& os, const Matrix& m);

}  // namespace kqlab::quantum
