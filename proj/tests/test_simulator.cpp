#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "qimp/oracle.hpp"
#include "qimp/simulator.hpp"

using namespace qimp;

namespace {

StateVec random_statevec(Rng& rng, int n) {
  StateVec s(n);
  double nn = 0.0;
  for (auto& a : s.amp) {
    a = cx(rng.normal(), rng.normal());
    nn += std::norm(a);
  }
  for (auto& a : s.amp) a /= std::sqrt(nn);
  return s;
}

PauliKey random_key(Rng& rng, int n, bool nonzero = false) {
  const uint64_t mask = (1ULL << n) - 1;
  PauliKey k{rng.u64() & mask, rng.u64() & mask};
  while (nonzero && weight(k) == 0) k = PauliKey{rng.u64() & mask, rng.u64() & mask};
  return k;
}

PauliSum random_hermitian(Rng& rng, int n, int n_terms) {
  PauliSum p(n);
  for (int t = 0; t < n_terms; ++t) p.add(random_key(rng, n), cx(rng.normal(), 0.0));
  return p;
}

double norm2(const StateVec& s) {
  double nn = 0.0;
  for (const auto& a : s.amp) nn += std::norm(a);
  return nn;
}

}  // namespace

TEST_CASE("pauli rotation matches cos - i sin P") {
  Rng rng(10001);
  for (int rep = 0; rep < 100; ++rep) {
    int n = 2 + int(rng.below(5));
    StateVec s = random_statevec(rng, n);
    PauliKey p = random_key(rng, n);
    double theta = rng.normal();

    PauliSum ps(n);
    ps.add(p, 1.0);
    std::vector<cx> pv = apply_sum(ps, s.amp);
    std::vector<cx> want(s.dim());
    const cx mis{0.0, -std::sin(theta)};
    for (size_t j = 0; j < s.dim(); ++j) want[j] = std::cos(theta) * s.amp[j] + mis * pv[j];

    StateVec par = s, ser = s;
    apply_pauli_rotation(par, p, theta, ExecPolicy::parallel);
    apply_pauli_rotation(ser, p, theta, ExecPolicy::serial);
    for (size_t j = 0; j < s.dim(); ++j) {
      CHECK(std::abs(par.amp[j] - want[j]) < 1e-12);
      // parallel and serial kernels are bit-identical
      CHECK(par.amp[j] == ser.amp[j]);
    }
    CHECK(norm2(par) == doctest::Approx(1.0).epsilon(1e-12));

    apply_pauli_rotation(par, p, -theta);
    for (size_t j = 0; j < s.dim(); ++j) CHECK(std::abs(par.amp[j] - s.amp[j]) < 1e-12);
  }

  SUBCASE("half-turn X rotation leaves global phase -i") {
    StateVec s(1, 0);
    apply_pauli_rotation(s, parse_pauli("X"), std::numbers::pi / 2);
    CHECK(std::abs(s.amp[0]) < 1e-15);
    CHECK(std::abs(s.amp[1] - cx{0.0, -1.0}) < 1e-12);
  }
}

TEST_CASE("apply_pauli and apply_sum_state match the oracle") {
  Rng rng(10002);
  for (int rep = 0; rep < 50; ++rep) {
    int n = 2 + int(rng.below(4));
    StateVec s = random_statevec(rng, n);
    PauliKey p = random_key(rng, n);
    PauliSum ps(n);
    ps.add(p, 1.0);
    std::vector<cx> want = apply_sum(ps, s.amp);
    StateVec t = s;
    apply_pauli(t, p);
    for (size_t j = 0; j < s.dim(); ++j) CHECK(std::abs(t.amp[j] - want[j]) < 1e-12);

    PauliSum h(n);
    for (int k = 0; k < 5; ++k) h.add(random_key(rng, n), cx(rng.normal(), rng.normal()));
    std::vector<cx> hw = apply_sum(h, s.amp);
    StateVec out(n);
    apply_sum_state(h, s, out);
    for (size_t j = 0; j < s.dim(); ++j) CHECK(std::abs(out.amp[j] - hw[j]) < 1e-12);
  }
}

TEST_CASE("expectation matches the oracle and is policy independent") {
  Rng rng(10003);
  for (int rep = 0; rep < 50; ++rep) {
    int n = 2 + int(rng.below(5));
    StateVec s = random_statevec(rng, n);
    PauliSum h = random_hermitian(rng, n, 8);
    double e_par = expectation(h, s, ExecPolicy::parallel);
    double e_ser = expectation(h, s, ExecPolicy::serial);
    CHECK(e_par == e_ser);
    CHECK(e_par == doctest::Approx(expectation_value(h, s.amp)).epsilon(1e-11));
  }
}

TEST_CASE("compiled rotation circuit equals the rotation kernel") {
  Rng rng(10004);
  for (int rep = 0; rep < 200; ++rep) {
    int n = 2 + int(rng.below(5));
    PauliKey p = random_key(rng, n, /*nonzero=*/true);
    double theta = rng.normal();
    std::vector<Gate> gates = compile_pauli_rotation(p, theta, n);
    CHECK(circuit_cnot_count(gates) == cnot_count(p));
    CHECK(cnot_count(p) == 2 * (weight(p) - 1));

    StateVec s = random_statevec(rng, n);
    StateVec direct = s, circ = s;
    apply_pauli_rotation(direct, p, theta);
    apply_circuit(circ, gates);
    for (size_t j = 0; j < s.dim(); ++j) CHECK(std::abs(direct.amp[j] - circ.amp[j]) < 1e-12);
  }
}

TEST_CASE("gate primitives") {
  SUBCASE("cnot truth table") {
    for (uint64_t b = 0; b < 4; ++b) {
      StateVec s(2, b);
      apply_gate(s, make_cnot(0, 1));
      uint64_t want = (b & 1) ? (b ^ 2) : b;
      CHECK(std::abs(s.amp[want] - cx(1.0, 0.0)) < 1e-15);
    }
  }
  SUBCASE("single-qubit gate acts on its qubit only") {
    Eigen::Matrix2cd x;
    x << 0, 1, 1, 0;
    StateVec s(3, 0b010);
    apply_gate(s, make_one_qubit_gate(2, x));
    CHECK(std::abs(s.amp[0b110] - cx(1.0, 0.0)) < 1e-15);
  }
}

TEST_CASE("density matrix tracks the pure state") {
  Rng rng(10005);
  const int n = 4;
  StateVec s = random_statevec(rng, n);
  DensityMatrix d = DensityMatrix::from_state(s);
  PauliSum h = random_hermitian(rng, n, 6);
  CHECK(expectation(h, d) == doctest::Approx(expectation(h, s)).epsilon(1e-11));

  PauliKey p = random_key(rng, n, true);
  std::vector<Gate> gates = compile_pauli_rotation(p, 0.37, n);
  apply_circuit(s, gates);
  apply_circuit(d, gates, NoiseModel{});
  DensityMatrix want = DensityMatrix::from_state(s);
  CHECK((d.rho - want.rho).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(d.rho.trace().real() == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> pd = probabilities(d), ps = probabilities(s);
  for (size_t j = 0; j < ps.size(); ++j) CHECK(pd[j] == doctest::Approx(ps[j]).epsilon(1e-11));
}

TEST_CASE("noise channel fixed points and trace") {
  const double p = 0.3;
  SUBCASE("excited population decays, ground grows") {
    DensityMatrix d(1, 1);
    apply_noise_channel(d, 0, p);
    CHECK(d.rho(0, 0).real() == doctest::Approx(p).epsilon(1e-12));
    CHECK(d.rho(1, 1).real() == doctest::Approx(1.0 - p).epsilon(1e-12));
    CHECK(d.rho.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("coherence shrinks by both channels") {
    DensityMatrix d(1);
    d.rho << 0.5, 0.5, 0.5, 0.5;
    apply_noise_channel(d, 0, p);
    // amplitude damping scales rho01 by sqrt(1-p), dephasing by sqrt(1-p) again
    CHECK(d.rho(0, 1).real() == doctest::Approx(0.5 * (1.0 - p)).epsilon(1e-12));
    CHECK(d.rho.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("trace preserved through a noisy circuit") {
    Rng rng(10006);
    DensityMatrix d(3);
    PauliKey p1 = random_key(rng, 3, true);
    std::vector<Gate> g = compile_pauli_rotation(p1, 0.9, 3);
    apply_circuit(d, g, NoiseModel{1e-3, 1e-2});
    CHECK(d.rho.trace().real() == doctest::Approx(1.0).epsilon(1e-10));
    // noise strictly reduces purity here
    CHECK((d.rho * d.rho).trace().real() < 1.0);
  }
}

TEST_CASE("global depolarizing rescales expectations exactly") {
  Rng rng(10007);
  const int n = 4;
  StateVec s = random_statevec(rng, n);
  DensityMatrix d = DensityMatrix::from_state(s);
  PauliSum h = random_hermitian(rng, n, 10);
  const double p = 0.23;
  const long dim = 1L << n;
  DensityMatrix dep = d;
  dep.rho = (1.0 - p) * d.rho + p / double(dim) * Eigen::MatrixXcd::Identity(dim, dim);
  double tr_h = dense_matrix(h).trace().real();
  CHECK(expectation(h, dep) ==
        doctest::Approx((1.0 - p) * expectation(h, d) + p / double(dim) * tr_h).epsilon(1e-11));

  // for traceless h the minimizer of a 1-parameter scan is noise invariant
  PauliSum htl = h;
  htl.add(PauliKey{}, -tr_h / double(dim));
  PauliKey gen = random_key(rng, n, true);
  auto scan_argmin = [&](bool noisy) {
    double best = 1e300;
    int arg = -1;
    for (int k = -32; k <= 32; ++k) {
      double th = k * M_PI / 64.0;
      StateVec t = s;
      apply_pauli_rotation(t, gen, th);
      DensityMatrix dt = DensityMatrix::from_state(t);
      if (noisy)
        dt.rho = (1.0 - p) * dt.rho + p / double(dim) * Eigen::MatrixXcd::Identity(dim, dim);
      double e = expectation(htl, dt);
      if (e < best) {
        best = e;
        arg = k;
      }
    }
    return arg;
  };
  CHECK(scan_argmin(false) == scan_argmin(true));
}

TEST_CASE("sampling is seed deterministic and consistent") {
  std::vector<double> probs = {0.5, 0.25, 0.125, 0.125};
  Rng r1(42), r2(42), r3(43);
  auto c1 = sample_counts(probs, 1 << 16, r1);
  auto c2 = sample_counts(probs, 1 << 16, r2);
  auto c3 = sample_counts(probs, 1 << 16, r3);
  CHECK(c1 == c2);
  CHECK(c1 != c3);
  long total = 0;
  for (long c : c1) total += c;
  CHECK(total == (1 << 16));
  CHECK(std::abs(double(c1[0]) / double(total) - 0.5) < 0.02);
}
