#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "qimp/measure.hpp"
#include "qimp/model.hpp"
#include "qimp/oracle.hpp"

using namespace qimp;

namespace {

double sum_diff(const PauliSum& a, const PauliSum& b) {
  PauliSum d = a;
  d -= b;
  return d.max_abs_coeff();
}

StateVec ground_statevec(const ImpurityModel& m, const Encoding& enc) {
  auto gs = ground_state(qubit_hamiltonian(m, enc));
  return StateVec(enc.n_qubits(), gs.vec);
}

Eigen::MatrixXd random_orthogonal(int n, Rng& rng) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ();
  Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

}  // namespace

TEST_CASE("factorized groups reassemble the hamiltonian") {
  for (const char* name : {"e_g", "t_2g"}) {
    ImpurityModel m = preset(name);
    Encoding enc = m.encoding();
    auto groups = double_factorize(m);
    REQUIRE(groups.size() == (m.M == 2 ? 3u : 5u));
    CHECK(groups[0].label == "density");
    CHECK(groups[1].label == "hybridization");
    for (size_t i = 2; i < groups.size(); ++i)
      CHECK(groups[i].label == "square_" + std::to_string(i - 2));

    PauliSum total(enc.n_qubits());
    for (const auto& g : groups) {
      const int n_sp = m.n_spatial();
      CHECK((g.rotation.transpose() * g.rotation -
             Eigen::MatrixXd::Identity(n_sp, n_sp))
                .cwiseAbs()
                .maxCoeff() < 1e-12);
      total += encode(group_operator(g), enc);
    }
    total.simplify(1e-11);
    CHECK(sum_diff(total, qubit_hamiltonian(m, enc)) < 1e-10);
  }
}

TEST_CASE("density and hybridization group contents") {
  ImpurityModel m = preset("e_g");
  auto groups = double_factorize(m);

  const auto& dens = groups[0];
  CHECK(dens.rotation.isIdentity(1e-14));
  CHECK(dens.quad(0, 0) == doctest::Approx(m.U / 2.0));
  CHECK(dens.quad(0, 1) == doctest::Approx((m.U - 2.0 * m.J) / 2.0));
  CHECK(dens.linear(2) == doctest::Approx(m.lam));

  const auto& hyb = groups[1];
  for (int i = 0; i < m.M; ++i) {
    CHECK(hyb.linear(i) == doctest::Approx(m.delta));
    CHECK(hyb.linear(m.M + i) == doctest::Approx(-m.delta));
    CHECK(hyb.rotation(i, i) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(hyb.rotation(m.M + i, i) == doctest::Approx(1.0 / std::sqrt(2.0)));
  }
  CHECK(hyb.quad.cwiseAbs().maxCoeff() == 0.0);

  // Both physical orbitals doubly occupied, bath empty: each orbital charge
  // is 2, so the linear part gives 4 eps - 2U - 2J and the quadratic part
  // 4U + 4(U - 2J).
  std::vector<int> occ(8, 0);
  occ[0] = occ[1] = occ[4] = occ[5] = 1;
  const double u = m.U, up = m.U - 2.0 * m.J;
  const double expect = 4.0 * m.eps - 0.5 * u * 4.0 - 0.5 * m.J * 4.0 +
                        0.5 * u * 8.0 + 0.5 * up * 8.0;
  CHECK(dens.value(occ) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("square group carries only the exchange quadratic") {
  ImpurityModel m = preset("e_g");
  auto groups = double_factorize(m);
  REQUIRE(groups.size() == 3);
  const auto& sq = groups[2];
  CHECK(sq.constant == 0.0);
  CHECK(sq.linear.cwiseAbs().maxCoeff() == 0.0);
  // Eigenvalue 2J, orbital matrix (X-like)/sqrt(2) with eigenvalues +-1/sqrt(2):
  // quad = J/2 * d d^T on the physical block.
  CHECK(std::abs(sq.quad(0, 0)) == doctest::Approx(m.J / 2.0));
  CHECK(std::abs(sq.quad(0, 1)) == doctest::Approx(m.J / 2.0));
  CHECK(sq.quad.bottomRightCorner(2, 2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("negative interaction eigenvalue is rejected") {
  ImpurityModel m = preset("e_g");
  m.J = -1.0;
  CHECK_THROWS_AS((void)double_factorize(m), std::invalid_argument);
}

TEST_CASE("grouped expectation equals the direct energy") {
  for (const char* name : {"e_g", "t_2g"}) {
    ImpurityModel m = preset(name);
    Encoding enc = m.encoding();
    StateVec psi = ground_statevec(m, enc);
    const double direct = expectation(qubit_hamiltonian(m, enc), psi);

    auto prepared = prepare_groups(double_factorize(m), psi, enc);
    auto est = estimate_energy(prepared, 0, nullptr);
    CHECK(est.energy == doctest::Approx(direct).epsilon(1e-10));
    CHECK(est.se == 0.0);
    CHECK(est.groups.size() == prepared.size());
  }
}

TEST_CASE("density-matrix preparation matches the statevector path") {
  ImpurityModel m = preset("e_g");
  Encoding enc = m.encoding();
  StateVec psi = ground_statevec(m, enc);
  auto groups = double_factorize(m);
  auto sv = prepare_groups(groups, psi, enc);
  auto dm = prepare_groups(groups, DensityMatrix::from_state(psi), enc);
  REQUIRE(sv.size() == dm.size());
  for (size_t g = 0; g < sv.size(); ++g) {
    CHECK(sv[g].values == dm[g].values);
    for (size_t b = 0; b < sv[g].probs.size(); ++b)
      CHECK(sv[g].probs[b] == doctest::Approx(dm[g].probs[b]).epsilon(1e-12));
  }
}

TEST_CASE("givens circuit transports determinants") {
  ImpurityModel m = preset("e_g");
  Encoding enc = m.encoding();
  const int n_sp = m.n_spatial();
  Rng rng(777);

  SUBCASE("identity rotation compiles to nothing") {
    CHECK(givens_circuit(Eigen::MatrixXd::Identity(n_sp, n_sp), enc).empty());
  }

  SUBCASE("random rotations, both determinant signs") {
    for (int rep = 0; rep < 6; ++rep) {
      Eigen::MatrixXd r = random_orthogonal(n_sp, rng);
      if (rep % 2 == 1) r.col(0) *= -1.0;  // det -1
      Eigen::MatrixXd c = random_orthogonal(n_sp, rng);

      StateVec got(enc.n_qubits(), slater_statevector(c, enc.n_up(), enc));
      apply_circuit(got, givens_circuit(r, enc));
      auto want = slater_statevector(Eigen::MatrixXd(r.transpose() * c),
                                     enc.n_up(), enc);
      for (size_t i = 0; i < got.dim(); ++i)
        CHECK(std::abs(got.amp[i] - want[i]) < 1e-9);
    }
  }

  SUBCASE("hybridization rotation moves level charge onto the bonding modes") {
    auto groups = double_factorize(m);
    StateVec psi = ground_statevec(m, enc);
    apply_circuit(psi, givens_circuit(groups[1].rotation, enc));
    auto probs = probabilities(psi);
    double hyb_direct = 0.0;
    for (size_t b = 0; b < probs.size(); ++b)
      hyb_direct += probs[b] * groups[1].value(decode_occupations(b, enc));
    FermionSum hyb_op;
    for (int i = 0; i < m.M; ++i)
      for (int s = 0; s < 2; ++s) {
        hyb_op.add(cx(m.delta, 0.0), {{i + s * 2 * m.M, true}, {i + m.M + s * 2 * m.M, false}});
        hyb_op.add(cx(m.delta, 0.0), {{i + m.M + s * 2 * m.M, true}, {i + s * 2 * m.M, false}});
      }
    StateVec gs = ground_statevec(m, enc);
    CHECK(hyb_direct == doctest::Approx(expectation(encode(hyb_op, enc), gs)).epsilon(1e-10));
  }

  SUBCASE("malformed rotations are rejected") {
    CHECK_THROWS_AS((void)givens_circuit(Eigen::MatrixXd::Identity(3, 3), enc),
                    std::invalid_argument);
    Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(n_sp, n_sp);
    bad(0, 1) = 0.5;
    CHECK_THROWS_AS((void)givens_circuit(bad, enc), std::invalid_argument);
  }
}

TEST_CASE("qubit-wise commuting partition of the encoded hamiltonian") {
  ImpurityModel m = preset("e_g");
  Encoding enc = m.encoding();
  PauliSum h = qubit_hamiltonian(m, enc);
  auto groups = qwc_groups(h);

  std::vector<size_t> sizes;
  size_t total = 0;
  for (const auto& g : groups) {
    sizes.push_back(g.size());
    total += g.size();
    for (size_t i = 0; i < g.size(); ++i)
      for (size_t j = i + 1; j < g.size(); ++j) {
        const uint64_t shared = (g[i].x | g[i].z) & (g[j].x | g[j].z);
        CHECK((((g[i].x ^ g[j].x) | (g[i].z ^ g[j].z)) & shared) == 0);
      }
  }
  CHECK(total == h.size() - 1);  // identity term excluded
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  CHECK(sizes == std::vector<size_t>{14, 4, 4, 2, 2});

  StateVec psi = ground_statevec(m, enc);
  auto est = estimate_energy(prepare_qwc(h, groups, psi), 0, nullptr);
  CHECK(est.energy == doctest::Approx(expectation(h, psi)).epsilon(1e-10));
}

TEST_CASE("sampled estimates are seeded and concentrate") {
  ImpurityModel m = preset("e_g");
  Encoding enc = m.encoding();
  StateVec psi = ground_statevec(m, enc);
  auto prepared = prepare_groups(double_factorize(m), psi, enc);
  const double exact = estimate_energy(prepared, 0, nullptr).energy;

  Rng a(42), b(42);
  auto ea = estimate_energy(prepared, 1 << 14, &a);
  auto eb = estimate_energy(prepared, 1 << 14, &b);
  CHECK(ea.energy == eb.energy);
  CHECK(ea.se > 0.0);

  for (uint64_t seed : {1u, 2u, 3u}) {
    Rng r(seed);
    auto est = estimate_energy(prepared, 1 << 16, &r);
    CHECK(std::abs(est.energy - exact) < 6.0 * est.se + 1e-6);
    for (const auto& g : est.groups) CHECK(g.shots == (1 << 16));
  }

  CHECK_THROWS_AS((void)estimate_energy(prepared, 0, &a), std::invalid_argument);
}
