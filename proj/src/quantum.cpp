#include "kqlab/quantum.hpp"

#include <cmath>
#include <ostream>

#include "kqlab/errors.hpp"
#include "kqlab/parallel.hpp"

namespace kqlab::quantum {

namespace {

int require_qubits(int n) {
  if (n < 1 || n > kMaxQubits) {
    throw ValidationError("qubits", "qubit count must be in [1, " +
                                        std::to_string(kMaxQubits) + "], got " +
                                        std::to_string(n));
  }
  return 1 << n;
}

int label_width(std::size_t outcomes) {
  int w = 0;
  while ((std::size_t{1} << w) < outcomes) ++w;
  return w;
}

Bits outcome_label(std::size_t index, int width) {
  Bits b;
  for (int i = width - 1; i >= 0; --i) b.push_back((index >> i) & 1);
  return b;
}

constexpr std::size_t kSampleBlock = 1024;

// Deterministic blocked Monte Carlo mean of a matrix-valued sample: the
// sample -> block assignment and the block reduction order are fixed, so the
// result is bit-identical for any worker count.
template <class SampleFn>
Matrix blocked_matrix_mean(int dim, long long samples, std::uint64_t seed, int workers,
                           SampleFn&& fn) {
  if (samples < 1) throw ValidationError("samples", "need at least one sample");
  std::size_t blocks = (samples + kSampleBlock - 1) / kSampleBlock;
  std::vector<Matrix> partial(blocks);
  parallel_for_index(blocks, workers, [&](std::size_t b) {
    RngStream rng(seed, b);
    Matrix acc = Matrix::Zero(dim, dim);
    long long lo = b * kSampleBlock;
    long long hi = std::min<long long>(samples, lo + kSampleBlock);
    for (long long s = lo; s < hi; ++s) fn(acc, rng);
    partial[b] = std::move(acc);
  });
  Matrix total = Matrix::Zero(dim, dim);
  for (const Matrix& m : partial) total += m;
  return total / double(samples);
}

}  // namespace

PureState PureState::from(int n, CVector amplitudes) {
  int d = require_qubits(n);
  if (amplitudes.size() != d) {
    throw ValidationError("shape", "state needs " + std::to_string(d) +
                                       " amplitudes, got " +
                                       std::to_string(amplitudes.size()));
  }
  double norm = amplitudes.norm();
  if (std::abs(norm - 1.0) > kNormTol) {
    throw ValidationError("norm", "state norm " + std::to_string(norm) +
                                      " deviates from 1 beyond tolerance");
  }
  return PureState{n, std::move(amplitudes)};
}

Povm validate_povm(std::vector<Matrix> elements, int n) {
  int d = require_qubits(n);
  if (elements.empty()) {
    throw ValidationError("shape", "a POVM needs at least one element");
  }
  for (std::size_t k = 0; k < elements.size(); ++k) {
    if (elements[k].rows() != d || elements[k].cols() != d) {
      throw ValidationError("shape", "element " + std::to_string(k) + " is not " +
                                         std::to_string(d) + "x" + std::to_string(d));
    }
  }
  for (std::size_t k = 0; k < elements.size(); ++k) {
    double dev = (elements[k] - elements[k].adjoint()).cwiseAbs().maxCoeff();
    if (dev > kHermTol) {
      throw ValidationError("hermiticity", "element " + std::to_string(k) +
                                               " deviates from Hermitian by " +
                                               std::to_string(dev));
    }
  }
  for (std::size_t k = 0; k < elements.size(); ++k) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(elements[k]);
    double lo = eig.eigenvalues().minCoeff();
    if (lo < -kPsdTol) {
      throw ValidationError("psd", "element " + std::to_string(k) +
                                       " has eigenvalue " + std::to_string(lo));
    }
  }
  Matrix sum = Matrix::Zero(d, d);
  for (const Matrix& e : elements) sum += e;
  double dev = (sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (dev > kCompletenessTol) {
    throw ValidationError("completeness",
                          "POVM elements sum to identity + " + std::to_string(dev));
  }
  Povm povm;
  povm.n = n;
  povm.elements = std::move(elements);
  int width = label_width(povm.elements.size());
  for (std::size_t k = 0; k < povm.elements.size(); ++k) {
    povm.labels.push_back(outcome_label(k, width));
  }
  return povm;
}

Povm basis_povm(int n) {
  int d = require_qubits(n);
  std::vector<Matrix> elements;
  for (int k = 0; k < d; ++k) {
    Matrix e = Matrix::Zero(d, d);
    e(k, k) = 1.0;
    elements.push_back(std::move(e));
  }
  return validate_povm(std::move(elements), n);
}

info::FiniteProbability measure(const Povm& povm, const PureState& state) {
  if (povm.n != state.n) {
    throw ValidationError("shape", "POVM is on " + std::to_string(povm.n) +
                                       " qubits, state on " + std::to_string(state.n));
  }
  std::map<Bits, double> mass;
  double total = 0.0;
  for (std::size_t k = 0; k < povm.elements.size(); ++k) {
    double p = (state.amplitudes.adjoint() * (povm.elements[k] * state.amplitudes))
                   .value()
                   .real();
    if (p < 0.0) {
      if (p < -kPsdTol) {
        throw ValidationError("psd", "outcome " + povm.labels[k].to_hex() +
                                         " has probability " + std::to_string(p));
      }
      p = 0.0;  // PSD up to float noise
    }
    mass[povm.labels[k]] = p;
    total += p;
  }
  if (total > 1.0) {
    // Completeness holds to 1e-8; rescale the float noise so the result is a
    // valid probability.
    for (auto& [label, p] : mass) p /= total;
  }
  return info::FiniteProbability::from_masses(std::move(mass));
}

PureState haar_sample(int n, RngStream& rng) {
  int d = require_qubits(n);
  CVector amp(d);
  double norm2 = 0.0;
  do {
    for (int i = 0; i < d; ++i) {
      amp(i) = std::complex<double>(rng.normal(), rng.normal());
    }
    norm2 = amp.squaredNorm();
  } while (norm2 == 0.0);
  amp /= std::sqrt(norm2);
  return PureState{n, std::move(amp)};
}

Matrix first_moment_estimate(int n, long long samples, std::uint64_t seed, int workers) {
  int d = require_qubits(n);
  return blocked_matrix_mean(d, samples, seed, workers, [&](Matrix& acc, RngStream& rng) {
    PureState psi = haar_sample(n, rng);
    acc += psi.amplitudes * psi.amplitudes.adjoint();
  });
}

Matrix second_moment_estimate(int n, long long samples, std::uint64_t seed, int workers) {
  int d = require_qubits(n);
  return blocked_matrix_mean(
      d * d, samples, seed, workers, [&](Matrix& acc, RngStream& rng) {
        PureState psi = haar_sample(n, rng);
        CVector doubled(d * d);
        for (int i = 0; i < d; ++i) {
          for (int j = 0; j < d; ++j) {
            doubled(i * d + j) = psi.amplitudes(i) * psi.amplitudes(j);
          }
        }
        acc += doubled * doubled.adjoint();
      });
}

Matrix symmetric_projector(int n) {
  int d = require_qubits(n);
  Matrix swap = Matrix::Zero(d * d, d * d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) swap(i * d + j, j * d + i) = 1.0;
  }
  return (Matrix::Identity(d * d, d * d) + swap) / 2.0;
}

Povm random_povm(int n, int outcomes, std::uint64_t seed) {
  int d = require_qubits(n);
  if (outcomes < 1) {
    throw ValidationError("outcomes", "POVM needs at least one outcome");
  }
  if (outcomes == 1) {
    // S = A_1, so E_1 = S^(-1/2) A_1 S^(-1/2) = I; skip the eigensolver and
    // return that identity without its rounding noise.
    return validate_povm({Matrix::Identity(d, d)}, n);
  }
  RngStream rng(seed, 0);
  std::vector<Matrix> raw;
  Matrix s = Matrix::Zero(d, d);
  for (int k = 0; k < outcomes; ++k) {
    Matrix g(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        g(i, j) = std::complex<double>(rng.normal(), rng.normal());
      }
    }
    Matrix a = g * g.adjoint();
    s += a;
    raw.push_back(std::move(a));
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  double lo = eig.eigenvalues().minCoeff();
  if (lo < kEigenFloor) {
    throw ValidationError("degenerate_draw",
                          "normalization matrix has eigenvalue " + std::to_string(lo) +
                              "; degenerate random draw, use another seed");
  }
  Matrix inv_sqrt = eig.eigenvectors() *
                    eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                    eig.eigenvectors().adjoint();
  std::vector<Matrix> elements;
  for (const Matrix& a : raw) elements.push_back(inv_sqrt * a * inv_sqrt);
  return validate_povm(std::move(elements), n);
}

void dump_matrix_csv(std::ostream& os, const Matrix& m) {
  os.precision(17);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << m(i, j).real() << ',' << m(i, j).imag();
    }
    os << '\n';
  }
}

}  // namespace kqlab::quantum
