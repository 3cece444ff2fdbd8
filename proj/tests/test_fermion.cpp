#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "qimp/fermion.hpp"
#include "qimp/rng.hpp"

using namespace qimp;

namespace {

// Dense ladder operators straight from the occupation-number definition,
// independent of apply_fermion and of any encoding.
Eigen::MatrixXcd ladder_dense(int mode, bool dagger, int n_modes) {
  const long dim = 1L << n_modes;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  const uint64_t bit = 1ULL << mode;
  for (uint64_t s = 0; s < uint64_t(dim); ++s) {
    bool occ = s & bit;
    if (dagger == occ) continue;
    double sgn = (popcount(s & (bit - 1)) & 1) ? -1.0 : 1.0;
    m(long(s ^ bit), long(s)) = sgn;
  }
  return m;
}

Eigen::MatrixXcd term_dense(const FermionTerm& t, int n_modes) {
  const long dim = 1L << n_modes;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(dim, dim);
  for (const auto& [mode, dag] : t.ops) m = m * ladder_dense(mode, dag, n_modes);
  return t.coeff * m;
}

Eigen::MatrixXcd sum_dense(const FermionSum& f, int n_modes) {
  const long dim = 1L << n_modes;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& t : f.terms) m += term_dense(t, n_modes);
  return m;
}

// Dense matrix of a PauliSum by per-qubit Kronecker products.
Eigen::Matrix2cd letter_mat(int code) {
  Eigen::Matrix2cd m;
  const cx i{0.0, 1.0};
  switch (code) {
    case 0: m << 1, 0, 0, 1; break;            // I
    case 1: m << 0, 1, 1, 0; break;            // X
    case 2: m << 1, 0, 0, -1; break;           // Z
    default: m << 0, -i, i, 0; break;          // Y
  }
  return m;
}

Eigen::MatrixXcd pauli_dense(const PauliSum& p) {
  const int n = p.n_qubits();
  const long dim = 1L << n;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [k, c] : p.terms()) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(1, 1);
    for (int q = 0; q < n; ++q) {
      int code = int((k.x >> q) & 1) + 2 * int((k.z >> q) & 1);
      Eigen::MatrixXcd next(m.rows() * 2, m.cols() * 2);
      Eigen::Matrix2cd l = letter_mat(code);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) next.block(a * m.rows(), b * m.cols(), m.rows(), m.cols()) = l(a, b) * m;
      m = std::move(next);
    }
    acc += c * m;
  }
  return acc;
}

FermionSum random_sum(Rng& rng, int n_modes, int n_terms, int max_ops) {
  FermionSum f;
  for (int t = 0; t < n_terms; ++t) {
    int k = 1 + int(rng.below(uint64_t(max_ops)));
    std::vector<std::pair<int, bool>> ops;
    for (int j = 0; j < k; ++j)
      ops.emplace_back(int(rng.below(uint64_t(n_modes))), rng.below(2) == 1);
    f.add(cx(rng.normal(), rng.normal()), std::move(ops));
  }
  return f;
}

}  // namespace

TEST_CASE("apply_fermion matches dense ladder products") {
  Rng rng(7001);
  const int n = 4;
  const long dim = 1L << n;
  for (int rep = 0; rep < 300; ++rep) {
    FermionSum f = random_sum(rng, n, 3, 4);
    Eigen::MatrixXcd ref = sum_dense(f, n);
    for (uint64_t s = 0; s < uint64_t(dim); ++s) {
      Eigen::VectorXcd col = Eigen::VectorXcd::Zero(dim);
      for (const auto& [t, amp] : apply_fermion(f, s)) col(long(t)) += amp;
      CHECK((col - ref.col(long(s))).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("normal_order preserves the operator") {
  Rng rng(7002);
  const int n = 4;
  for (int rep = 0; rep < 200; ++rep) {
    FermionSum f = random_sum(rng, n, 3, 5);
    FermionSum g = normal_order(f);
    CHECK((sum_dense(f, n) - sum_dense(g, n)).cwiseAbs().maxCoeff() < 1e-11);
    // normal form: daggers first, creations ascending, annihilations descending
    for (const auto& t : g.terms) {
      bool seen_ann = false;
      for (size_t i = 0; i < t.ops.size(); ++i) {
        if (!t.ops[i].second) seen_ann = true;
        else CHECK(!seen_ann);
        if (i + 1 < t.ops.size() && t.ops[i].second == t.ops[i + 1].second) {
          if (t.ops[i].second) CHECK(t.ops[i].first < t.ops[i + 1].first);
          else CHECK(t.ops[i].first > t.ops[i + 1].first);
        }
      }
    }
  }
}

TEST_CASE("jw encoding reproduces the dense ladder matrices") {
  Rng rng(7003);
  const int n = 4;
  Encoding enc{EncKind::jw, n, 0, 0};
  for (int mode = 0; mode < n; ++mode)
    for (bool dag : {false, true}) {
      FermionSum f;
      f.add(1.0, {{mode, dag}});
      CHECK((pauli_dense(encode(f, enc)) - ladder_dense(mode, dag, n)).cwiseAbs().maxCoeff() <
            1e-13);
    }
  for (int rep = 0; rep < 100; ++rep) {
    FermionSum f = random_sum(rng, n, 4, 4);
    CHECK((pauli_dense(encode(f, enc)) - sum_dense(f, n)).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("parity encoding is the jw matrix in the parity-transformed basis") {
  Rng rng(7004);
  const int n = 4;
  const long dim = 1L << n;
  Encoding ep{EncKind::parity, n, 0, 0};
  // permutation matrix: fock occupation index -> parity register index
  Eigen::MatrixXcd P = Eigen::MatrixXcd::Zero(dim, dim);
  for (uint64_t s = 0; s < uint64_t(dim); ++s) {
    std::vector<int> occ(n);
    for (int j = 0; j < n; ++j) occ[j] = int((s >> j) & 1);
    P(long(encode_basis_index(occ, ep)), long(s)) = 1.0;
  }
  for (int rep = 0; rep < 100; ++rep) {
    FermionSum f = random_sum(rng, n, 4, 4);
    Eigen::MatrixXcd lhs = pauli_dense(encode(f, ep));
    Eigen::MatrixXcd rhs = P * sum_dense(f, n) * P.adjoint();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("two-qubit reduction acts correctly on the symmetry sector") {
  // number- and spin-parity-conserving operator on 4 modes (2 up, 2 down)
  Rng rng(7005);
  const int n = 4;
  Encoding er{EncKind::parity_reduced, n, 2, 0};
  for (int rep = 0; rep < 60; ++rep) {
    FermionSum f;
    // hopping within each spin sector plus density products
    f.add(cx(rng.normal(), 0.0), {{0, true}, {1, false}});
    f.add(cx(rng.normal(), 0.0), {{1, true}, {0, false}});
    f.add(cx(rng.normal(), 0.0), {{2, true}, {3, false}});
    f.add(cx(rng.normal(), 0.0), {{3, true}, {2, false}});
    f.add(cx(rng.normal(), 0.0), {{0, true}, {0, false}, {2, true}, {2, false}});
    PauliSum red = encode(f, er);
    REQUIRE(red.n_qubits() == n - 2);
    Eigen::MatrixXcd mred = pauli_dense(red);
    for (uint64_t s = 0; s < (1ULL << n); ++s) {
      std::vector<int> occ(n);
      for (int j = 0; j < n; ++j) occ[j] = int((s >> j) & 1);
      if (total_electrons(occ) != er.n_elec || two_sz_of(occ, n) != er.two_sz) continue;
      uint64_t sidx = encode_basis_index(occ, er);
      Eigen::VectorXcd got = mred.col(long(sidx));
      Eigen::VectorXcd want = Eigen::VectorXcd::Zero(1L << er.n_qubits());
      for (const auto& [t, amp] : apply_fermion(f, s)) {
        std::vector<int> occ2(n);
        for (int j = 0; j < n; ++j) occ2[j] = int((t >> j) & 1);
        want(long(encode_basis_index(occ2, er))) += amp;
      }
      CHECK((got - want).cwiseAbs().maxCoeff() < 1e-11);
    }
  }
}

TEST_CASE("reduction rejects operators that break the sector parities") {
  Encoding er{EncKind::parity_reduced, 4, 2, 0};
  FermionSum single;
  single.add(1.0, {{0, true}});
  CHECK_THROWS_AS((void)encode(single, er), std::invalid_argument);
  FermionSum spinflip;
  spinflip.add(1.0, {{2, true}, {0, false}});
  CHECK_THROWS_AS((void)encode(spinflip, er), std::invalid_argument);
}

TEST_CASE("basis maps round-trip") {
  for (EncKind kind : {EncKind::jw, EncKind::parity, EncKind::parity_reduced}) {
    Encoding enc{kind, 6, 4, 0};
    for (uint64_t s = 0; s < 64; ++s) {
      std::vector<int> occ(6);
      for (int j = 0; j < 6; ++j) occ[j] = int((s >> j) & 1);
      if (kind == EncKind::parity_reduced) {
        // reduction only represents occupations with the sector parities
        if (total_electrons(occ) % 2 != enc.n_elec % 2) continue;
        int up = occ[0] + occ[1] + occ[2];
        if (up % 2 != enc.n_up() % 2) continue;
      }
      uint64_t idx = encode_basis_index(occ, enc);
      CHECK(idx < (1ULL << enc.n_qubits()));
      CHECK(decode_occupations(idx, enc) == occ);
    }
  }
}

TEST_CASE("slater determinant statevector") {
  const int n = 4;
  Encoding er{EncKind::parity_reduced, n, 2, 0};
  Eigen::MatrixXd C = Eigen::MatrixXd::Identity(2, 2);

  SUBCASE("identity orbitals give a basis state") {
    std::vector<cx> psi = slater_statevector(C, 1, er);
    std::vector<int> occ = {1, 0, 1, 0};
    for (size_t j = 0; j < psi.size(); ++j) {
      double want = (j == encode_basis_index(occ, er)) ? 1.0 : 0.0;
      CHECK(std::abs(psi[j] - want) < 1e-14);
    }
  }

  SUBCASE("occupied-block rotations leave the state invariant") {
    Rng rng(7006);
    Encoding e6{EncKind::parity_reduced, 6, 2, 0};
    // 3 spatial modes per spin, one occupied
    Eigen::MatrixXd G(3, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) G(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ();
    std::vector<cx> a = slater_statevector(Q, 1, e6);
    // scaling the single occupied column by -1 flips only the global sign
    Eigen::MatrixXd Q2 = Q;
    Q2.col(0) *= -1.0;
    std::vector<cx> b = slater_statevector(Q2, 1, e6);
    double fid = 0.0;
    cx ov{0.0, 0.0};
    for (size_t j = 0; j < a.size(); ++j) ov += std::conj(a[j]) * b[j];
    fid = std::norm(ov);
    CHECK(fid == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("one-body energy matches the orbital sum") {
    Rng rng(7007);
    const int half = 2;
    Eigen::MatrixXd G(half, half);
    for (int i = 0; i < half; ++i)
      for (int j = 0; j < half; ++j) G(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
    Eigen::MatrixXd Q = qr.householderQ();
    Eigen::MatrixXd h(half, half);
    h << 0.3, -0.7, -0.7, 1.1;
    FermionSum f;
    for (int s = 0; s < 2; ++s)
      for (int p = 0; p < half; ++p)
        for (int q = 0; q < half; ++q)
          f.add(h(p, q), {{s * half + p, true}, {s * half + q, false}});
    std::vector<cx> psi = slater_statevector(Q, 1, er);
    Eigen::MatrixXcd m = pauli_dense(encode(f, er));
    Eigen::Map<Eigen::VectorXcd> v(psi.data(), long(psi.size()));
    double e = std::real(cx(v.adjoint() * m * v));
    double want = 2.0 * (Q.col(0).transpose() * h * Q.col(0))(0, 0);
    CHECK(e == doctest::Approx(want).epsilon(1e-10));
  }
}
