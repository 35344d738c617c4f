#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "kqlab/errors.hpp"
#include "kqlab/io.hpp"
#include "kqlab/quantum.hpp"
#include "kqlab/rng.hpp"

using kqlab::Bits;
using kqlab::RngStream;
using kqlab::ValidationError;
namespace quantum = kqlab::quantum;
using quantum::Matrix;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("kqlab_test_" + name);
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("exact_rational pins every finite double") {
  CHECK(quantum::exact_rational(0.0) == "0/1");
  CHECK(quantum::exact_rational(-0.0) == "0/1");
  CHECK(quantum::exact_rational(1.0) == "1/1");
  CHECK(quantum::exact_rational(2.0) == "2/1");
  CHECK(quantum::exact_rational(0.5) == "1/2");
  CHECK(quantum::exact_rational(1.5) == "3/2");
  CHECK(quantum::exact_rational(-0.75) == "-3/4");
  // 0.3 rounds to 5404319552844595 * 2^-54.
  CHECK(quantum::exact_rational(0.3) == "5404319552844595/18014398509481984");

  // Smallest subnormal: 1 / 2^1074, whose denominator has 324 digits.
  std::string tiny = quantum::exact_rational(std::numeric_limits<double>::denorm_min());
  auto slash = tiny.find('/');
  CHECK(tiny.substr(0, slash) == "1");
  CHECK(tiny.size() - slash - 1 == 324);
  CHECK(tiny.back() == '4');

  CHECK_THROWS_WITH_AS((void)quantum::exact_rational(std::numeric_limits<double>::infinity()),
                       doctest::Contains("finite"), ValidationError);
  CHECK_THROWS_AS((void)quantum::exact_rational(std::numeric_limits<double>::quiet_NaN()),
                  ValidationError);
}

TEST_CASE("canonical matrix bytes and aux tape are frozen") {
  auto povm = quantum::basis_povm(1);
  std::string sep(1, '\x1f');
  // Row-major re/im fields per matrix, matrices joined by 0x1E.
  std::string e0 = "1/1" + sep + "0/1";
  for (int i = 0; i < 3; ++i) e0 += sep + "0/1" + sep + "0/1";
  std::string e1;
  for (int i = 0; i < 3; ++i) e1 += "0/1" + sep + "0/1" + sep;
  e1 += "1/1" + sep + "0/1";
  std::string expected = e0 + '\x1e' + e1;
  CHECK(quantum::canonical_matrix_bytes(povm.elements) == expected);

  CHECK(quantum::povm_aux(povm) == Bits::of_bytes(expected).self_delimited());
  CHECK(quantum::povm_aux(povm).size() == 2 * 8 * expected.size() + 1);
}

TEST_CASE("validate_povm names the first violated condition") {
  CHECK_NOTHROW(quantum::basis_povm(1));
  CHECK_NOTHROW(quantum::basis_povm(2));

  Matrix p0 = Matrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  Matrix id = Matrix::Identity(2, 2);

  auto expect_condition = [](std::vector<Matrix> elements, int n, const char* piece) {
    CHECK_THROWS_WITH_AS(quantum::validate_povm(std::move(elements), n),
                         doctest::Contains(piece), ValidationError);
  };

  expect_condition({p0, p0}, 1, "identity");            // completeness
  Matrix indefinite = 3.0 * p0 - id;                    // diag(2, -1)
  expect_condition({indefinite, id - indefinite}, 1, "eigenvalue");  // psd
  Matrix skew = id / 2.0;
  skew(0, 1) = std::complex<double>(0.0, 0.3);
  expect_condition({skew, id - skew}, 1, "Hermitian");  // hermiticity
  expect_condition({Matrix::Identity(3, 3)}, 1, "2x2"); // shape
  expect_condition({}, 1, "at least one");              // shape
  CHECK_THROWS_AS(quantum::validate_povm({id}, 0), ValidationError);   // qubits
  CHECK_THROWS_AS(quantum::validate_povm({id}, 6), ValidationError);   // qubits

  // Completeness within tolerance is accepted.
  Matrix near = id;
  near(1, 1) += 5e-9;
  CHECK_NOTHROW(quantum::validate_povm({p0, near - p0}, 1));
}

TEST_CASE("outcome labels are fixed-width binary indices") {
  auto b1 = quantum::basis_povm(1);
  REQUIRE(b1.labels.size() == 2);
  CHECK(b1.labels[0] == Bits::bits("0"));
  CHECK(b1.labels[1] == Bits::bits("1"));

  auto b2 = quantum::basis_povm(2);
  REQUIRE(b2.labels.size() == 4);
  CHECK(b2.labels[0] == Bits::bits("00"));
  CHECK(b2.labels[3] == Bits::bits("11"));

  CHECK(quantum::random_povm(1, 1, 0).labels == std::vector<Bits>{Bits{}});
  auto three = quantum::random_povm(1, 3, 0);
  CHECK(three.labels ==
        std::vector<Bits>{Bits::bits("00"), Bits::bits("01"), Bits::bits("10")});
}

TEST_CASE("pure states validate dimension and norm") {
  quantum::CVector amp(2);
  amp << 1.0, 0.0;
  CHECK_NOTHROW(quantum::PureState::from(1, amp));

  quantum::CVector bad_norm(2);
  bad_norm << 1.0, 1.0;
  CHECK_THROWS_WITH_AS(quantum::PureState::from(1, bad_norm), doctest::Contains("norm"),
                       ValidationError);
  CHECK_THROWS_AS(quantum::PureState::from(2, amp), ValidationError);  // needs dim 4
  CHECK_THROWS_AS(quantum::PureState::from(0, amp), ValidationError);
}

TEST_CASE("measure computes Born probabilities") {
  // Basis measurement of |00> is a point mass.
  quantum::CVector ground(4);
  ground << 1.0, 0.0, 0.0, 0.0;
  auto p = quantum::measure(quantum::basis_povm(2), quantum::PureState::from(2, ground));
  CHECK(p.masses().size() == 1);
  CHECK(p.mass(Bits::bits("00")) == 1.0);

  // The four-outcome POVM {I/4, I/4, I/4, I/4} is uniform on every state.
  Matrix quarter = Matrix::Identity(2, 2) / 4.0;
  auto flat = quantum::validate_povm({quarter, quarter, quarter, quarter}, 1);
  quantum::CVector zero(2);
  zero << 1.0, 0.0;
  auto u = quantum::measure(flat, quantum::PureState::from(1, zero));
  for (const auto& [label, mass] : u.masses()) CHECK(mass == 0.25);

  // |+> against the computational basis.
  quantum::CVector plus(2);
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  auto half = quantum::measure(quantum::basis_povm(1), quantum::PureState::from(1, plus));
  CHECK(half.mass(Bits::bits("0")) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(half.mass(Bits::bits("1")) == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(quantum::measure(quantum::basis_povm(1), quantum::PureState::from(2, ground)),
                  ValidationError);

  // Random POVM x Haar state still yields a probability.
  RngStream rng(3, 0);
  auto povm = quantum::random_povm(2, 5, 4);
  auto born = quantum::measure(povm, quantum::haar_sample(2, rng));
  CHECK(born.total() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("haar_sample is normalized, seeded and unbiased") {
  RngStream a(5, 0), b(5, 0);
  for (int i = 0; i < 100; ++i) {
    auto psi = quantum::haar_sample(3, a);
    CHECK(std::abs(psi.amplitudes.norm() - 1.0) <= 1e-9);
    CHECK(psi.amplitudes == quantum::haar_sample(3, b).amplitudes);
  }

  RngStream c(6, 1);
  double mean = 0.0;
  const int samples = 10000;
  for (int i = 0; i < samples; ++i) {
    mean += std::norm(quantum::haar_sample(2, c).amplitudes(0));
  }
  mean /= samples;
  CHECK(mean == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("moment estimates converge to their closed forms") {
  Matrix first = quantum::first_moment_estimate(1, 20000, 7);
  CHECK(max_abs(first - Matrix::Identity(2, 2) / 2.0) <= 0.015);
  CHECK(max_abs(first - first.adjoint()) <= 1e-15);
  CHECK(std::abs(first.trace().real() - 1.0) <= 1e-9);

  Matrix second = quantum::second_moment_estimate(1, 20000, 7);
  Matrix expected = quantum::symmetric_projector(1) / 3.0;
  CHECK(max_abs(second - expected) <= 0.015);
  CHECK(max_abs(second - second.adjoint()) <= 1e-15);
  CHECK(std::abs(second.trace().real() - 1.0) <= 1e-9);

  // Independent seeds agree to Monte Carlo accuracy.
  Matrix other = quantum::first_moment_estimate(1, 40000, 8);
  Matrix again = quantum::first_moment_estimate(1, 40000, 9);
  CHECK(max_abs(other - again) <= 0.015);

  CHECK_THROWS_AS((void)quantum::first_moment_estimate(1, 0, 7), ValidationError);
}

TEST_CASE("moment estimates are bit-identical across worker counts") {
  Matrix w1 = quantum::first_moment_estimate(2, 5000, 11, 1);
  Matrix w3 = quantum::first_moment_estimate(2, 5000, 11, 3);
  CHECK(max_abs(w1 - w3) == 0.0);

  Matrix s1 = quantum::second_moment_estimate(1, 3000, 11, 1);
  Matrix s4 = quantum::second_moment_estimate(1, 3000, 11, 4);
  CHECK(max_abs(s1 - s4) == 0.0);
}

TEST_CASE("symmetric projector is the right idempotent") {
  for (int n : {1, 2}) {
    Matrix p = quantum::symmetric_projector(n);
    int d = 1 << n;
    CHECK(p.rows() == d * d);
    CHECK(max_abs(p * p - p) <= 1e-12);
    CHECK(max_abs(p - p.adjoint()) == 0.0);
    // Rank d(d+1)/2 with unit eigenvalues.
    CHECK(std::abs(p.trace().real() - d * (d + 1) / 2.0) <= 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(p);
    int ones = 0;
    for (int i = 0; i < d * d; ++i) {
      double v = eig.eigenvalues()(i);
      CHECK(std::min(std::abs(v), std::abs(v - 1.0)) <= 1e-12);
      if (v > 0.5) ++ones;
    }
    CHECK(ones == d * (d + 1) / 2);
  }
}

TEST_CASE("random POVMs are valid, seeded and complete") {
  // One outcome short-circuits to the exact identity.
  auto single = quantum::random_povm(2, 1, 99);
  CHECK(max_abs(single.elements[0] - Matrix::Identity(4, 4)) == 0.0);

  for (std::uint64_t seed : {0, 1, 2, 3}) {
    auto povm = quantum::random_povm(1, 3, seed);
    Matrix sum = Matrix::Zero(2, 2);
    for (const Matrix& e : povm.elements) sum += e;
    CHECK(max_abs(sum - Matrix::Identity(2, 2)) <= quantum::kCompletenessTol);
  }

  auto a = quantum::random_povm(1, 2, 5);
  auto b = quantum::random_povm(1, 2, 5);
  CHECK(max_abs(a.elements[0] - b.elements[0]) == 0.0);
  auto c = quantum::random_povm(1, 2, 6);
  CHECK(max_abs(a.elements[0] - c.elements[0]) > 0.0);

  CHECK_THROWS_AS((void)quantum::random_povm(1, 0, 0), ValidationError);
}

TEST_CASE("json files round-trip bit-for-bit") {
  namespace io = kqlab::io;

  auto povm_path = temp_file("povm.json");
  auto povm = quantum::random_povm(1, 2, 12);
  io::save_povm(povm, povm_path);
  auto povm2 = io::load_povm(povm_path);
  CHECK(povm2.n == povm.n);
  REQUIRE(povm2.elements.size() == povm.elements.size());
  for (std::size_t k = 0; k < povm.elements.size(); ++k) {
    CHECK(max_abs(povm.elements[k] - povm2.elements[k]) == 0.0);
  }
  CHECK(povm2.labels == povm.labels);

  auto state_path = temp_file("state.json");
  RngStream rng(1, 0);
  auto psi = quantum::haar_sample(2, rng);
  io::save_state(psi, state_path);
  auto psi2 = io::load_state(state_path);
  CHECK(psi2.n == 2);
  CHECK(psi2.amplitudes == psi.amplitudes);

  auto prob_path = temp_file("prob.json");
  auto p = quantum::measure(povm, quantum::haar_sample(1, rng));
  io::save_probability(p, prob_path);
  CHECK(io::load_probability(prob_path) == p);

  auto chan_path = temp_file("chan.json");
  auto f = kqlab::info::random_channel({Bits::bits("0"), Bits::bits("1")},
                                       {Bits{}, Bits::bits("1")}, 17);
  io::save_channel(f, chan_path);
  CHECK(io::load_channel(chan_path) == f);

  for (const auto& path : {povm_path, state_path, prob_path, chan_path}) {
    std::filesystem::remove(path);
  }
}

TEST_CASE("json loaders reject bad input with named conditions") {
  namespace io = kqlab::io;

  CHECK_THROWS_WITH_AS((void)io::load_povm(temp_file("does_not_exist.json")),
                       doctest::Contains("open"), ValidationError);

  auto garbled = temp_file("garbled.json");
  std::ofstream(garbled) << "{ not json";
  CHECK_THROWS_AS((void)io::load_probability(garbled), ValidationError);

  auto dup = temp_file("dup.json");
  std::ofstream(dup) << R"({"support": ["0:1", "0:1"], "mass": [0.5, 0.5]})";
  CHECK_THROWS_AS((void)io::load_probability(dup), ValidationError);

  // A structurally fine POVM file still has to pass validation.
  auto incomplete = temp_file("incomplete_povm.json");
  std::ofstream(incomplete) << R"({"n": 1, "elements": [
    [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]],
    [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]
  ]})";
  CHECK_THROWS_WITH_AS((void)io::load_povm(incomplete), doctest::Contains("identity"),
                       ValidationError);

  for (const auto& path : {garbled, dup, incomplete}) std::filesystem::remove(path);
}

TEST_CASE("matrix csv dump uses full precision rows") {
  std::ostringstream os;
  quantum::dump_matrix_csv(os, quantum::basis_povm(1).elements[0]);
  CHECK(os.str() == "1,0,0,0\n0,0,0,0\n");
}
