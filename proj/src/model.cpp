#include "qimp/model.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "qimp/optim.hpp"
#include "qimp/rng.hpp"

namespace qimp {

namespace {

// Mode index helpers; order phys-up, bath-up, phys-down, bath-down.
int phys_mode(const ImpurityModel& m, int spin, int orb) { return spin * 2 * m.M + orb; }
int bath_mode(const ImpurityModel& m, int spin, int orb) { return spin * 2 * m.M + m.M + orb; }

}  // namespace

ImpurityModel preset(const std::string& name) {
  if (name == "e_g") return {"e_g", 2, -9.8, 0.3, -0.3, 7.0, 2.1};
  if (name == "t_2g") return {"t_2g", 3, -12.7, 0.1, -0.3, 7.0, 2.1};
  throw std::invalid_argument("unknown preset '" + name + "'");
}

Tensor4 kanamori_tensor(double U, double J, int M) {
  Tensor4 V(M);
  for (int a = 0; a < M; ++a) {
    V.at(a, a, a, a) = U;
    for (int b = 0; b < M; ++b) {
      if (a == b) continue;
      V.at(a, a, b, b) = U - 2.0 * J;
      V.at(a, b, a, b) = J;
      V.at(a, b, b, a) = J;
    }
  }
  return V;
}

FermionSum build_hamiltonian(const ImpurityModel& m) {
  FermionSum h;
  for (const auto& frag : hamiltonian_fragments(m)) h += frag.op;
  return h;
}

std::vector<Fragment> hamiltonian_fragments(const ImpurityModel& m) {
  const int M = m.M;
  Tensor4 V = kanamori_tensor(m.U, m.J, M);
  FermionSum density, exchange, hyb, level;
  for (int s = 0; s < 2; ++s) {
    for (int i = 0; i < M; ++i) {
      level.add(m.eps, {{phys_mode(m, s, i), true}, {phys_mode(m, s, i), false}});
      level.add(m.lam, {{bath_mode(m, s, i), true}, {bath_mode(m, s, i), false}});
      hyb.add(m.delta, {{phys_mode(m, s, i), true}, {bath_mode(m, s, i), false}});
      hyb.add(m.delta, {{bath_mode(m, s, i), true}, {phys_mode(m, s, i), false}});
    }
  }
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp)
      for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b)
          for (int g = 0; g < M; ++g)
            for (int d = 0; d < M; ++d) {
              double v = V.at(a, b, g, d);
              if (v == 0.0) continue;
              std::vector<std::pair<int, bool>> ops = {{phys_mode(m, s, a), true},
                                                       {phys_mode(m, sp, g), true},
                                                       {phys_mode(m, sp, d), false},
                                                       {phys_mode(m, s, b), false}};
              // density-density entries (a==b, g==d) vs exchange/pair-hopping
              if (a == b && g == d)
                density.add(0.5 * v, std::move(ops));
              else
                exchange.add(0.5 * v, std::move(ops));
            }
  return {{"interaction_density", std::move(density)},
          {"exchange_pair", std::move(exchange)},
          {"hybridization", std::move(hyb)},
          {"level", std::move(level)}};
}

Eigen::MatrixXd one_body_matrix(const ImpurityModel& m) {
  int n = m.n_spatial();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < m.M; ++i) {
    h(i, i) = m.eps;
    h(m.M + i, m.M + i) = m.lam;
    h(i, m.M + i) = h(m.M + i, i) = m.delta;
  }
  return h;
}

Tensor4 spatial_interaction(const ImpurityModel& m) {
  int n = m.n_spatial();
  Tensor4 V(n);
  Tensor4 Vk = kanamori_tensor(m.U, m.J, m.M);
  for (int a = 0; a < m.M; ++a)
    for (int b = 0; b < m.M; ++b)
      for (int g = 0; g < m.M; ++g)
        for (int d = 0; d < m.M; ++d)
          V.at(a, b, g, d) = Vk.at(a, b, g, d);
  return V;
}

PauliSum qubit_hamiltonian(const ImpurityModel& m, const Encoding& enc) {
  return encode(build_hamiltonian(m), enc);
}

namespace {

double rhf_energy(const Eigen::MatrixXd& C, const Eigen::MatrixXd& h, const Tensor4& V,
                  int nocc) {
  int n = int(h.rows());
  Eigen::MatrixXd D = C.leftCols(nocc) * C.leftCols(nocc).transpose();
  double E = 2.0 * (h.cwiseProduct(D)).sum();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int g = 0; g < n; ++g)
        for (int d = 0; d < n; ++d) {
          double vd = V.at(a, b, g, d);
          if (vd != 0.0) E += 2.0 * vd * D(a, b) * D(g, d);
          double vx = V.at(a, d, g, b);
          if (vx != 0.0) E -= vx * D(a, b) * D(g, d);
        }
  return E;
}

Eigen::MatrixXd fock_matrix(const Eigen::MatrixXd& D, const Eigen::MatrixXd& h,
                            const Tensor4& V) {
  int n = int(h.rows());
  Eigen::MatrixXd F = h;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double acc = 0.0;
      for (int g = 0; g < n; ++g)
        for (int d = 0; d < n; ++d)
          acc += 2.0 * V.at(a, b, g, d) * D(g, d) - V.at(a, d, g, b) * D(g, d);
      F(a, b) += acc;
    }
  return F;
}

Eigen::MatrixXd antisym_exp(const Eigen::VectorXd& k, int n) {
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n, n);
  int idx = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      K(i, j) = k[idx];
      K(j, i) = -k[idx];
      ++idx;
    }
  return K.exp();
}

}  // namespace

HartreeFock restricted_hf(const ImpurityModel& m, int n_starts, uint64_t seed) {
  const int n = m.n_spatial();
  const int nocc = m.M;
  const int nk = n * (n - 1) / 2;
  Eigen::MatrixXd h = one_body_matrix(m);
  Tensor4 V = spatial_interaction(m);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> core(h);
  Eigen::MatrixXd C0 = core.eigenvectors();

  Rng rng(seed);
  double best_E = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd best_C;
  for (int t = 0; t < n_starts; ++t) {
    Eigen::MatrixXd Cs;
    if (t == 0) {
      Cs = C0;
    } else {
      Eigen::MatrixXd G(n, n);
      Rng r = rng.child(uint64_t(t));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = r.normal();
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
      Cs = qr.householderQ();
    }
    auto fn = [&](const Vec& k) { return rhf_energy(Cs * antisym_exp(k, n), h, V, nocc); };
    ObjectiveFn fg = [&](const Vec& k, Vec* grad) {
      if (grad) *grad = finite_difference_gradient(fn, k, 1e-6);
      return fn(k);
    };
    BfgsOptions opt;
    opt.gtol = 1e-9;
    BfgsResult r = bfgs_minimize(fg, Vec::Zero(nk), opt);
    if (r.f < best_E - 1e-10) {
      best_E = r.f;
      best_C = Cs * antisym_exp(r.x, n);
    }
  }

  // canonical orbitals: diagonalize Fock inside occupied and virtual blocks
  Eigen::MatrixXd D = best_C.leftCols(nocc) * best_C.leftCols(nocc).transpose();
  Eigen::MatrixXd F = fock_matrix(D, h, V);
  HartreeFock out;
  out.C = best_C;
  for (int blk = 0; blk < 2; ++blk) {
    int c0 = blk == 0 ? 0 : nocc;
    int nc = blk == 0 ? nocc : n - nocc;
    Eigen::MatrixXd Fb = out.C.middleCols(c0, nc).transpose() * F * out.C.middleCols(c0, nc);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Fb);
    out.C.middleCols(c0, nc) = out.C.middleCols(c0, nc) * es.eigenvectors();
  }
  out.orbital_energies = (out.C.transpose() * F * out.C).diagonal();
  out.energy = rhf_energy(out.C, h, V, nocc);
  out.n_occ = nocc;
  return out;
}

FermionSum mo_hamiltonian(const ImpurityModel& m, const Eigen::MatrixXd& C) {
  const int n = m.n_spatial();
  Eigen::MatrixXd hmo = C.transpose() * one_body_matrix(m) * C;
  Tensor4 V = spatial_interaction(m);
  // two-index transforms applied sequentially
  Tensor4 W(n);
  for (int p = 0; p < n; ++p)
    for (int b = 0; b < n; ++b)
      for (int g = 0; g < n; ++g)
        for (int d = 0; d < n; ++d) {
          double acc = 0.0;
          for (int a = 0; a < n; ++a) acc += C(a, p) * V.at(a, b, g, d);
          W.at(p, b, g, d) = acc;
        }
  Tensor4 W2(n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int g = 0; g < n; ++g)
        for (int d = 0; d < n; ++d) {
          double acc = 0.0;
          for (int b = 0; b < n; ++b) acc += C(b, q) * W.at(p, b, g, d);
          W2.at(p, q, g, d) = acc;
        }
  Tensor4 W3(n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int d = 0; d < n; ++d) {
          double acc = 0.0;
          for (int g = 0; g < n; ++g) acc += C(g, r) * W2.at(p, q, g, d);
          W3.at(p, q, r, d) = acc;
        }
  Tensor4 Vmo(n);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int r = 0; r < n; ++r)
        for (int s = 0; s < n; ++s) {
          double acc = 0.0;
          for (int d = 0; d < n; ++d) acc += C(d, s) * W3.at(p, q, r, d);
          Vmo.at(p, q, r, s) = acc;
        }

  FermionSum out;
  for (int s = 0; s < 2; ++s) {
    int off = s * n;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q)
        if (std::abs(hmo(p, q)) > 1e-12)
          out.add(hmo(p, q), {{off + p, true}, {off + q, false}});
  }
  for (int s = 0; s < 2; ++s)
    for (int sp = 0; sp < 2; ++sp) {
      int o1 = s * n, o2 = sp * n;
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
          for (int r = 0; r < n; ++r)
            for (int t = 0; t < n; ++t) {
              double v = Vmo.at(p, q, r, t);
              if (std::abs(v) > 1e-12)
                out.add(0.5 * v,
                        {{o1 + p, true}, {o2 + r, true}, {o2 + t, false}, {o1 + q, false}});
            }
    }
  return out;
}

uint64_t product_reference_index(const ImpurityModel& m, const Encoding& enc) {
  std::vector<int> occ(m.n_modes(), 0);
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < m.M; ++i) occ[phys_mode(m, s, i)] = 1;
  return encode_basis_index(occ, enc);
}

uint64_t hf_reference_index_mo(const ImpurityModel& m, const Encoding& enc) {
  std::vector<int> occ(m.n_modes(), 0);
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < m.M; ++i) occ[s * m.n_spatial() + i] = 1;
  return encode_basis_index(occ, enc);
}

std::vector<cx> reference_state(RefKind kind, const ImpurityModel& m, const Encoding& enc) {
  if (kind == RefKind::product_atomic) {
    std::vector<cx> psi(size_t(1) << enc.n_qubits(), cx(0.0, 0.0));
    psi[product_reference_index(m, enc)] = 1.0;
    return psi;
  }
  Eigen::MatrixXd C;
  if (kind == RefKind::noninteracting) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(one_body_matrix(m));
    C = es.eigenvectors();
  } else {
    C = restricted_hf(m).C;
  }
  return slater_statevector(C, m.M, enc);
}

PauliSum number_operator(const ImpurityModel& m, const Encoding& enc) {
  FermionSum n;
  for (int mode = 0; mode < m.n_modes(); ++mode) n.add(1.0, {{mode, true}, {mode, false}});
  return encode(n, enc);
}

PauliSum two_sz_operator(const ImpurityModel& m, const Encoding& enc) {
  FermionSum n;
  for (int mode = 0; mode < m.n_modes(); ++mode) {
    double sgn = mode < m.n_modes() / 2 ? 1.0 : -1.0;
    n.add(sgn, {{mode, true}, {mode, false}});
  }
  return encode(n, enc);
}

}  // namespace qimp
