#include "qimp/simulator.hpp"

#include <cmath>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qimp {

namespace {

// P|j> = phase(j) |j ^ p.x>
inline cx entry_phase(PauliKey p, uint64_t j) {
  cx ph = ipow(popcount(p.x & p.z));
  if (popcount(p.z & j) & 1) ph = -ph;
  return ph;
}

constexpr int kReduceChunks = 64;

}  // namespace

void apply_pauli_rotation(StateVec& s, PauliKey p, double theta, ExecPolicy pol) {
  const uint64_t dim = s.dim();
  const double c = std::cos(theta), sn = std::sin(theta);
  const cx mis{0.0, -sn};
  cx* a = s.amp.data();
  if (p.x == 0) {
    // diagonal: amplitude picks up e^{-i theta phase(j)}
    const cx em{c, -sn}, ep{c, sn};
#ifdef _OPENMP
#pragma omp parallel for if (pol == ExecPolicy::parallel && dim >= 4096) schedule(static)
#endif
    for (uint64_t j = 0; j < dim; ++j)
      a[j] *= (popcount(p.z & j) & 1) ? ep : em;
    return;
  }
  const uint64_t hi = uint64_t(1) << (63 - std::countl_zero(p.x));
#ifdef _OPENMP
#pragma omp parallel for if (pol == ExecPolicy::parallel && dim >= 4096) schedule(static)
#endif
  for (uint64_t j = 0; j < dim; ++j) {
    if (j & hi) continue;  // each pair handled once, from its low member
    const uint64_t k = j ^ p.x;
    const cx pj = entry_phase(p, j), pk = entry_phase(p, k);
    const cx aj = a[j], ak = a[k];
    a[j] = c * aj + mis * pk * ak;
    a[k] = c * ak + mis * pj * aj;
  }
}

void apply_pauli(StateVec& s, PauliKey p) {
  const uint64_t dim = s.dim();
  cx* a = s.amp.data();
  if (p.x == 0) {
    for (uint64_t j = 0; j < dim; ++j) a[j] *= entry_phase(p, j);
    return;
  }
  const uint64_t hi = uint64_t(1) << (63 - std::countl_zero(p.x));
  for (uint64_t j = 0; j < dim; ++j) {
    if (j & hi) continue;
    const uint64_t k = j ^ p.x;
    const cx aj = a[j], ak = a[k];
    a[j] = entry_phase(p, k) * ak;
    a[k] = entry_phase(p, j) * aj;
  }
}

void apply_sum_state(const PauliSum& h, const StateVec& in, StateVec& out, ExecPolicy pol) {
  const uint64_t dim = in.dim();
  out.n = in.n;
  out.amp.assign(dim, cx(0.0, 0.0));
  const cx* a = in.amp.data();
  cx* o = out.amp.data();
  for (const auto& [k, c] : h.terms()) {
    const PauliKey p = k;
    const cx cc = c;
#ifdef _OPENMP
#pragma omp parallel for if (pol == ExecPolicy::parallel && dim >= 4096) schedule(static)
#endif
    for (uint64_t j = 0; j < dim; ++j) o[j ^ p.x] += cc * entry_phase(p, j) * a[j];
  }
}

cx inner(const StateVec& a, const StateVec& b) {
  cx acc{0.0, 0.0};
  for (uint64_t j = 0; j < a.dim(); ++j) acc += std::conj(a.amp[j]) * b.amp[j];
  return acc;
}

cx pauli_matrix_element(const StateVec& b, PauliKey p, const StateVec& f, ExecPolicy pol) {
  const uint64_t dim = f.dim();
  const cx* bv = b.amp.data();
  const cx* fv = f.amp.data();
  cx chunk[kReduceChunks];
  std::fill(chunk, chunk + kReduceChunks, cx(0.0, 0.0));
  const uint64_t step = (dim + kReduceChunks - 1) / kReduceChunks;
#ifdef _OPENMP
#pragma omp parallel for if (pol == ExecPolicy::parallel && dim >= 4096) schedule(static)
#endif
  for (int ch = 0; ch < kReduceChunks; ++ch) {
    const uint64_t lo = uint64_t(ch) * step, hi = std::min(dim, lo + step);
    cx local{0.0, 0.0};
    for (uint64_t j = lo; j < hi; ++j)
      local += std::conj(bv[j ^ p.x]) * entry_phase(p, j) * fv[j];
    chunk[ch] = local;
  }
  cx acc{0.0, 0.0};
  for (int ch = 0; ch < kReduceChunks; ++ch) acc += chunk[ch];
  return acc;
}

double expectation(const PauliSum& h, const StateVec& s, ExecPolicy pol) {
  const uint64_t dim = s.dim();
  const cx* a = s.amp.data();
  double total = 0.0;
  for (const auto& [k, c] : h.terms()) {
    const PauliKey p = k;
    // fixed chunk grid: the summation order never depends on thread count
    double chunk[kReduceChunks] = {0.0};
    const uint64_t step = (dim + kReduceChunks - 1) / kReduceChunks;
#ifdef _OPENMP
#pragma omp parallel for if (pol == ExecPolicy::parallel && dim >= 4096) schedule(static)
#endif
    for (int ch = 0; ch < kReduceChunks; ++ch) {
      const uint64_t lo = uint64_t(ch) * step, hi = std::min(dim, lo + step);
      double local = 0.0;
      for (uint64_t j = lo; j < hi; ++j)
        local += (std::conj(a[j ^ p.x]) * entry_phase(p, j) * a[j]).real();
      chunk[ch] = local;
    }
    double term = 0.0;
    for (int ch = 0; ch < kReduceChunks; ++ch) term += chunk[ch];
    total += c.real() * term;  // Hermitian sums have real expectations per pair
  }
  return total;
}

std::vector<double> probabilities(const StateVec& s) {
  std::vector<double> p(s.dim());
  for (uint64_t j = 0; j < s.dim(); ++j) p[j] = std::norm(s.amp[j]);
  return p;
}

Gate make_one_qubit_gate(int q, const Eigen::Matrix2cd& u) {
  Gate g;
  g.kind = Gate::Kind::one_q;
  g.q0 = q;
  g.u = u;
  return g;
}

Gate make_cnot(int control, int target) {
  Gate g;
  g.kind = Gate::Kind::cnot;
  g.q0 = control;
  g.q1 = target;
  return g;
}

namespace {

Eigen::Matrix2cd hadamard() {
  Eigen::Matrix2cd h;
  const double r = 1.0 / std::sqrt(2.0);
  h << r, r, r, -r;
  return h;
}

// W Y W^dag = Z with W = H S^dag
Eigen::Matrix2cd y_basis_change() {
  Eigen::Matrix2cd sdg = Eigen::Matrix2cd::Identity();
  sdg(1, 1) = cx(0.0, -1.0);
  return hadamard() * sdg;
}

Eigen::Matrix2cd rz_gate(double lambda) {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = std::exp(cx(0.0, -lambda / 2.0));
  m(1, 1) = std::exp(cx(0.0, lambda / 2.0));
  return m;
}

}  // namespace

std::vector<Gate> compile_pauli_rotation(PauliKey p, double theta, int n_qubits) {
  std::vector<Gate> out;
  if (weight(p) == 0) return out;  // global phase only
  std::vector<int> support;
  for (int q = 0; q < n_qubits; ++q)
    if (((p.x | p.z) >> q) & 1) support.push_back(q);
  const int target = support.back();

  auto basis_change = [&](bool undo) {
    for (int q : support) {
      const bool bx = (p.x >> q) & 1, bz = (p.z >> q) & 1;
      if (bx && bz) {
        Eigen::Matrix2cd w = y_basis_change();
        out.push_back(make_one_qubit_gate(q, undo ? Eigen::Matrix2cd(w.adjoint()) : w));
      } else if (bx) {
        out.push_back(make_one_qubit_gate(q, hadamard()));
      }
    }
  };
  basis_change(false);
  for (size_t i = 0; i + 1 < support.size(); ++i)
    out.push_back(make_cnot(support[i], support[i + 1]));
  out.push_back(make_one_qubit_gate(target, rz_gate(2.0 * theta)));
  for (size_t i = support.size() - 1; i-- > 0;)
    out.push_back(make_cnot(support[i], support[i + 1]));
  basis_change(true);
  return out;
}

int cnot_count(PauliKey p) {
  const int w = weight(p);
  return w <= 1 ? 0 : 2 * (w - 1);
}

long circuit_cnot_count(const std::vector<Gate>& gates) {
  long n = 0;
  for (const auto& g : gates) n += g.kind == Gate::Kind::cnot ? 1 : 0;
  return n;
}

void apply_gate(StateVec& s, const Gate& g) {
  cx* a = s.amp.data();
  const uint64_t dim = s.dim();
  if (g.kind == Gate::Kind::cnot) {
    const uint64_t cb = uint64_t(1) << g.q0, tb = uint64_t(1) << g.q1;
    for (uint64_t j = 0; j < dim; ++j)
      if ((j & cb) && !(j & tb)) std::swap(a[j], a[j | tb]);
    return;
  }
  const uint64_t b = uint64_t(1) << g.q0;
  const Eigen::Matrix2cd& u = g.u;
  for (uint64_t j = 0; j < dim; ++j) {
    if (j & b) continue;
    const cx a0 = a[j], a1 = a[j | b];
    a[j] = u(0, 0) * a0 + u(0, 1) * a1;
    a[j | b] = u(1, 0) * a0 + u(1, 1) * a1;
  }
}

void apply_circuit(StateVec& s, const std::vector<Gate>& gates) {
  for (const auto& g : gates) apply_gate(s, g);
}

DensityMatrix DensityMatrix::from_state(const StateVec& s) {
  DensityMatrix d(s.n);
  Eigen::Map<const Eigen::VectorXcd> v(s.amp.data(), long(s.dim()));
  d.rho = v * v.adjoint();
  return d;
}

namespace {

// rho -> (I (x) u (x) I) rho, acting on the row index
void left_mult_one_qubit(Eigen::MatrixXcd& rho, int q, const Eigen::Matrix2cd& u) {
  const long dim = rho.rows();
  const long b = 1L << q;
  for (long col = 0; col < dim; ++col)
    for (long j = 0; j < dim; ++j) {
      if (j & b) continue;
      const cx a0 = rho(j, col), a1 = rho(j | b, col);
      rho(j, col) = u(0, 0) * a0 + u(0, 1) * a1;
      rho(j | b, col) = u(1, 0) * a0 + u(1, 1) * a1;
    }
}

}  // namespace

void apply_gate(DensityMatrix& d, const Gate& g) {
  if (g.kind == Gate::Kind::cnot) {
    const long cb = 1L << g.q0, tb = 1L << g.q1;
    const long dim = d.rho.rows();
    for (long j = 0; j < dim; ++j)
      if ((j & cb) && !(j & tb)) d.rho.row(j).swap(d.rho.row(j | tb));
    for (long j = 0; j < dim; ++j)
      if ((j & cb) && !(j & tb)) d.rho.col(j).swap(d.rho.col(j | tb));
    return;
  }
  left_mult_one_qubit(d.rho, g.q0, g.u);
  // right-multiply by u^dag: rows transform with conj(u)
  const Eigen::Matrix2cd uc = g.u.conjugate();
  const long dim = d.rho.rows();
  const long b = 1L << g.q0;
  for (long row = 0; row < dim; ++row)
    for (long j = 0; j < dim; ++j) {
      if (j & b) continue;
      const cx a0 = d.rho(row, j), a1 = d.rho(row, j | b);
      d.rho(row, j) = uc(0, 0) * a0 + uc(0, 1) * a1;
      d.rho(row, j | b) = uc(1, 0) * a0 + uc(1, 1) * a1;
    }
}

void apply_noise_channel(DensityMatrix& d, int qubit, double p) {
  if (p <= 0.0) return;
  const double s1 = std::sqrt(1.0 - p), sp = std::sqrt(p);
  Eigen::Matrix2cd a1 = Eigen::Matrix2cd::Identity(), a2 = Eigen::Matrix2cd::Zero();
  a1(1, 1) = s1;
  a2(0, 1) = sp;  // amplitude damping: |1> decays to |0>
  Eigen::Matrix2cd d1 = Eigen::Matrix2cd::Identity(), d2 = Eigen::Matrix2cd::Zero();
  d1(1, 1) = s1;
  d2(1, 1) = sp;  // dephasing
  auto channel = [&](const Eigen::Matrix2cd& k1, const Eigen::Matrix2cd& k2) {
    DensityMatrix t1 = d, t2 = d;
    apply_gate(t1, make_one_qubit_gate(qubit, k1));
    apply_gate(t2, make_one_qubit_gate(qubit, k2));
    d.rho = t1.rho + t2.rho;
  };
  channel(a1, a2);
  channel(d1, d2);
}

void apply_circuit(DensityMatrix& d, const std::vector<Gate>& gates, const NoiseModel& noise) {
  for (const auto& g : gates) {
    apply_gate(d, g);
    if (!noise.enabled()) continue;
    if (g.kind == Gate::Kind::cnot) {
      apply_noise_channel(d, g.q0, noise.p2);
      apply_noise_channel(d, g.q1, noise.p2);
    } else {
      apply_noise_channel(d, g.q0, noise.p1);
    }
  }
}

std::vector<double> probabilities(const DensityMatrix& d) {
  std::vector<double> p(d.dim());
  for (long j = 0; j < long(d.dim()); ++j) p[size_t(j)] = d.rho(j, j).real();
  return p;
}

double expectation(const PauliSum& h, const DensityMatrix& d) {
  // Tr[rho P] = sum_m phase(m^x) rho(m^x, m)
  cx acc{0.0, 0.0};
  for (const auto& [k, c] : h.terms()) {
    cx tr{0.0, 0.0};
    for (uint64_t m = 0; m < d.dim(); ++m)
      tr += entry_phase(k, m ^ k.x) * d.rho(long(m ^ k.x), long(m));
    acc += c * tr;
  }
  return acc.real();
}

std::vector<long> sample_counts(const std::vector<double>& probs, long shots, Rng& rng) {
  return rng.multinomial(probs, shots);
}

}  // namespace qimp
