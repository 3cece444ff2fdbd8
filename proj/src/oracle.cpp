#include "qimp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qimp {

namespace {

// P(x,z)|j> = i^{|x&z|} (-1)^{|z&j|} |j^x>
cx pauli_entry_phase(PauliKey k, uint64_t j) {
  cx ph = ipow(popcount(k.x & k.z));
  if (popcount(k.z & j) & 1) ph = -ph;
  return ph;
}

}  // namespace

Eigen::MatrixXcd dense_matrix(const PauliSum& h) {
  const size_t dim = size_t(1) << h.n_qubits();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(long(dim), long(dim));
  for (const auto& [k, c] : h.terms())
    for (uint64_t j = 0; j < dim; ++j) m(long(j ^ k.x), long(j)) += c * pauli_entry_phase(k, j);
  return m;
}

std::vector<cx> apply_sum(const PauliSum& h, const std::vector<cx>& psi) {
  std::vector<cx> out(psi.size(), cx(0.0, 0.0));
  for (const auto& [k, c] : h.terms())
    for (uint64_t j = 0; j < psi.size(); ++j)
      out[j ^ k.x] += c * pauli_entry_phase(k, j) * psi[j];
  return out;
}

double expectation_value(const PauliSum& h, const std::vector<cx>& psi) {
  std::vector<cx> hp = apply_sum(h, psi);
  cx num{0.0, 0.0};
  double den = 0.0;
  for (size_t j = 0; j < psi.size(); ++j) {
    num += std::conj(psi[j]) * hp[j];
    den += std::norm(psi[j]);
  }
  return num.real() / den;
}

double fidelity(const std::vector<cx>& a, const std::vector<cx>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("fidelity: size mismatch");
  cx ov{0.0, 0.0};
  double na = 0.0, nb = 0.0;
  for (size_t j = 0; j < a.size(); ++j) {
    ov += std::conj(a[j]) * b[j];
    na += std::norm(a[j]);
    nb += std::norm(b[j]);
  }
  return std::norm(ov) / (na * nb);
}

namespace {

GroundState dense_ground(const PauliSum& h) {
  Eigen::MatrixXcd m = dense_matrix(h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  GroundState g;
  g.energy = es.eigenvalues()(0);
  Eigen::VectorXcd v = es.eigenvectors().col(0);
  g.vec.assign(v.data(), v.data() + v.size());
  return g;
}

GroundState lanczos_ground(const PauliSum& h, double residual_tol) {
  const size_t dim = size_t(1) << h.n_qubits();
  const int max_krylov = int(std::min<size_t>(dim, 400));
  std::vector<Eigen::VectorXcd> basis;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(long(dim));
  // deterministic pseudo-random start with nonzero overlap against any sector
  for (long j = 0; j < long(dim); ++j)
    v(j) = cx(std::cos(0.7 * double(j) + 0.3), std::sin(1.3 * double(j) + 0.1));
  v.normalize();

  std::vector<double> alpha, beta;
  Eigen::VectorXcd w;
  auto apply = [&](const Eigen::VectorXcd& in) {
    std::vector<cx> tmp(in.data(), in.data() + in.size());
    std::vector<cx> out = apply_sum(h, tmp);
    return Eigen::Map<Eigen::VectorXcd>(out.data(), long(out.size())).eval();
  };

  GroundState g;
  for (int it = 0; it < max_krylov; ++it) {
    basis.push_back(v);
    w = apply(v);
    double a = std::real(v.dot(w));
    alpha.push_back(a);
    w -= a * v;
    if (it > 0) w -= beta.back() * basis[size_t(it) - 1];
    // full reorthogonalization keeps the Ritz residual trustworthy
    for (const auto& b : basis) w -= b.dot(w) * b;
    for (const auto& b : basis) w -= b.dot(w) * b;

    int m = it + 1;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      T(i, i) = alpha[size_t(i)];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[size_t(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    double theta = es.eigenvalues()(0);
    Eigen::VectorXd y = es.eigenvectors().col(0);
    Eigen::VectorXcd ritz = Eigen::VectorXcd::Zero(long(dim));
    for (int i = 0; i < m; ++i) ritz += y(i) * basis[size_t(i)];
    ritz.normalize();
    Eigen::VectorXcd resid = apply(ritz) - theta * ritz;
    if (resid.norm() <= residual_tol) {
      g.energy = theta;
      g.vec.assign(ritz.data(), ritz.data() + ritz.size());
      return g;
    }
    double bnorm = w.norm();
    if (bnorm < 1e-14) {
      // Krylov space exhausted; the Ritz pair is exact in it
      g.energy = theta;
      g.vec.assign(ritz.data(), ritz.data() + ritz.size());
      return g;
    }
    beta.push_back(bnorm);
    v = w / bnorm;
  }
  throw std::runtime_error("lanczos_ground: residual tolerance not reached");
}

}  // namespace

GroundState ground_state(const PauliSum& h, double residual_tol, int dense_limit) {
  if (!h.is_hermitian(1e-10)) throw std::invalid_argument("ground_state: not Hermitian");
  const size_t dim = size_t(1) << h.n_qubits();
  GroundState g = dim <= size_t(dense_limit) ? dense_ground(h) : lanczos_ground(h, residual_tol);
  std::vector<cx> r = apply_sum(h, g.vec);
  double rn = 0.0;
  for (size_t j = 0; j < r.size(); ++j) rn += std::norm(r[j] - g.energy * g.vec[j]);
  if (std::sqrt(rn) > residual_tol * std::max(1.0, std::abs(g.energy)))
    throw std::runtime_error("ground_state: residual check failed");
  return g;
}

GroundState sector_ground_state(const PauliSum& h, const Encoding& enc) {
  const size_t dim = size_t(1) << h.n_qubits();
  std::vector<uint64_t> idx;
  for (uint64_t j = 0; j < dim; ++j) {
    std::vector<int> occ = decode_occupations(j, enc);
    if (total_electrons(occ) == enc.n_elec && two_sz_of(occ, enc.n_modes) == enc.two_sz)
      idx.push_back(j);
  }
  if (idx.empty()) throw std::invalid_argument("sector_ground_state: empty sector");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(long(idx.size()), long(idx.size()));
  std::vector<long> pos(dim, -1);
  for (size_t a = 0; a < idx.size(); ++a) pos[idx[a]] = long(a);
  for (const auto& [k, c] : h.terms())
    for (size_t a = 0; a < idx.size(); ++a) {
      uint64_t j = idx[a];
      uint64_t t = j ^ k.x;
      if (pos[t] < 0) continue;  // leakage handled by projection
      m(pos[t], long(a)) += c * pauli_entry_phase(k, j);
    }
  Eigen::MatrixXcd sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym);
  GroundState g;
  g.energy = es.eigenvalues()(0);
  g.vec.assign(dim, cx(0.0, 0.0));
  for (size_t a = 0; a < idx.size(); ++a) g.vec[idx[a]] = es.eigenvectors()(long(a), 0);
  return g;
}

std::vector<uint64_t> sector_basis(int n_modes, int n_elec, int two_sz) {
  std::vector<uint64_t> out;
  const uint64_t dim = uint64_t(1) << n_modes;
  const int half = n_modes / 2;
  const uint64_t up_mask = (uint64_t(1) << half) - 1;
  for (uint64_t s = 0; s < dim; ++s) {
    int up = popcount(s & up_mask);
    int dn = popcount(s >> half);
    if (up + dn == n_elec && up - dn == two_sz) out.push_back(s);
  }
  return out;
}

FockGround fermionic_sector_ground(const FermionSum& h, int n_modes, int n_elec, int two_sz) {
  FockGround g;
  g.basis = sector_basis(n_modes, n_elec, two_sz);
  const size_t nb = g.basis.size();
  std::vector<long> pos(size_t(1) << n_modes, -1);
  for (size_t a = 0; a < nb; ++a) pos[g.basis[a]] = long(a);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(long(nb), long(nb));
  for (size_t a = 0; a < nb; ++a)
    for (const auto& [t, amp] : apply_fermion(h, g.basis[a])) {
      if (pos[t] < 0) throw std::logic_error("fermionic_sector_ground: sector not conserved");
      m(pos[t], long(a)) += amp;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()));
  g.energy = es.eigenvalues()(0);
  g.amplitudes = es.eigenvectors().col(0);
  return g;
}

}  // namespace qimp
