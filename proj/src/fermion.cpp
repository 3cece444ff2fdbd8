#include "qimp/fermion.hpp"

#include <algorithm>
#include <cmath>

namespace qimp {

namespace {

// Recursive normal ordering of a single term into an accumulator.
void normal_order_term(FermionTerm t, std::vector<FermionTerm>& out, double tol) {
  if (std::abs(t.coeff) <= tol) return;
  auto& ops = t.ops;
  // bubble pass: daggers before non-daggers; within a block ascending modes
  for (size_t i = 0; i + 1 < ops.size(); ++i) {
    auto [pm, pd] = ops[i];
    auto [qm, qd] = ops[i + 1];
    bool swap = false;
    if (!pd && qd) {
      // c_p c+_q = delta_pq - c+_q c_p
      if (pm == qm) {
        FermionTerm contracted{t.coeff, {}};
        contracted.ops.reserve(ops.size() - 2);
        contracted.ops.insert(contracted.ops.end(), ops.begin(), ops.begin() + i);
        contracted.ops.insert(contracted.ops.end(), ops.begin() + i + 2, ops.end());
        normal_order_term(std::move(contracted), out, tol);
      }
      swap = true;
    } else if (pd == qd) {
      if (pm == qm) return;  // repeated dagger or repeated annihilation: zero
      // creations ascending; annihilations descending (adjoint-consistent)
      swap = pd ? (pm > qm) : (pm < qm);
    }
    if (swap) {
      std::swap(ops[i], ops[i + 1]);
      t.coeff = -t.coeff;
      normal_order_term(std::move(t), out, tol);
      return;
    }
  }
  out.push_back(std::move(t));
}

}  // namespace

FermionSum normal_order(const FermionSum& f, double tol) {
  std::vector<FermionTerm> expanded;
  for (const auto& t : f.terms) normal_order_term(t, expanded, tol);
  // merge identical operator sequences
  std::sort(expanded.begin(), expanded.end(), [](const FermionTerm& a, const FermionTerm& b) {
    return a.ops < b.ops;
  });
  FermionSum out;
  for (auto& t : expanded) {
    if (!out.terms.empty() && out.terms.back().ops == t.ops)
      out.terms.back().coeff += t.coeff;
    else
      out.terms.push_back(std::move(t));
  }
  std::erase_if(out.terms, [tol](const FermionTerm& t) { return std::abs(t.coeff) <= tol; });
  return out;
}

std::vector<std::pair<uint64_t, cx>> apply_fermion(const FermionSum& f, uint64_t fock_index) {
  std::vector<std::pair<uint64_t, cx>> acc;
  for (const auto& t : f.terms) {
    uint64_t s = fock_index;
    cx amp = t.coeff;
    bool dead = false;
    for (auto it = t.ops.rbegin(); it != t.ops.rend(); ++it) {
      auto [mode, dag] = *it;
      uint64_t bit = 1ULL << mode;
      bool occ = s & bit;
      if (dag == occ) {  // creating occupied or annihilating empty
        dead = true;
        break;
      }
      if (popcount(s & (bit - 1)) & 1) amp = -amp;
      s ^= bit;
    }
    if (!dead) acc.emplace_back(s, amp);
  }
  std::sort(acc.begin(), acc.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<uint64_t, cx>> out;
  for (const auto& [idx, a] : acc) {
    if (!out.empty() && out.back().first == idx)
      out.back().second += a;
    else
      out.emplace_back(idx, a);
  }
  std::erase_if(out, [](const auto& p) { return std::abs(p.second) <= 1e-15; });
  return out;
}

PauliSum ladder_qubit_op(int mode, int n_modes, bool dagger, EncKind kind) {
  PauliSum op(n_modes);
  cx half_sgn = dagger ? cx(0.0, -0.5) : cx(0.0, 0.5);
  uint64_t bit = 1ULL << mode;
  if (kind == EncKind::jw) {
    // c_j = Z_{<j} (X_j + i Y_j)/2
    uint64_t zlow = bit - 1;
    op.add(PauliKey{bit, zlow}, 0.5);
    op.add(PauliKey{bit, zlow | bit}, half_sgn);
  } else {
    // parity map: c+_j = (Z_{j-1} X_j - i Y_j)/2 * X_{j+1..n-1}
    uint64_t upd = ((n_modes == 64 ? ~0ULL : (1ULL << n_modes) - 1)) & ~((bit << 1) - 1);
    uint64_t zprev = mode > 0 ? (bit >> 1) : 0;
    op.add(PauliKey{bit | upd, zprev}, 0.5);
    op.add(PauliKey{bit | upd, bit}, half_sgn);
  }
  return op;
}

PauliSum encode(const FermionSum& f, const Encoding& enc) {
  EncKind base = enc.kind == EncKind::jw ? EncKind::jw : EncKind::parity;
  int n = enc.n_modes;
  PauliSum full(n);
  for (const auto& t : f.terms) {
    PauliSum prod(n);
    prod.add(PauliKey{}, t.coeff);
    for (const auto& [mode, dag] : t.ops)
      prod = prod.product(ladder_qubit_op(mode, n, dag, base));
    full += prod;
  }
  full.simplify();
  if (enc.kind != EncKind::parity_reduced) return full;

  int q_up = enc.dropped_up_qubit(), q_tot = enc.dropped_total_qubit();
  double s_up = (enc.n_up() % 2) ? -1.0 : 1.0;
  double s_tot = (enc.n_elec % 2) ? -1.0 : 1.0;
  uint64_t low = (1ULL << q_up) - 1;
  uint64_t midmask = ((1ULL << (q_tot - q_up - 1)) - 1);
  auto drop = [&](uint64_t m) {
    return (m & low) | (((m >> (q_up + 1)) & midmask) << q_up);
  };
  PauliSum red(n - 2);
  for (const auto& [k, c] : full.terms()) {
    if ((k.x >> q_up) & 1 || (k.x >> q_tot) & 1)
      throw std::invalid_argument(
          "operator does not preserve the reduction symmetries (X/Y support on "
          "a dropped qubit)");
    cx cc = c;
    if ((k.z >> q_up) & 1) cc *= s_up;
    if ((k.z >> q_tot) & 1) cc *= s_tot;
    red.add(PauliKey{drop(k.x), drop(k.z)}, cc);
  }
  return red.simplify();
}

uint64_t encode_basis_index(const std::vector<int>& occ, const Encoding& enc) {
  int n = enc.n_modes;
  std::vector<int> par(n);
  int acc = 0;
  for (int j = 0; j < n; ++j) {
    acc ^= occ[j] & 1;
    par[j] = acc;
  }
  if (enc.kind == EncKind::jw) {
    uint64_t idx = 0;
    for (int j = 0; j < n; ++j) idx |= uint64_t(occ[j] & 1) << j;
    return idx;
  }
  uint64_t idx = 0;
  if (enc.kind == EncKind::parity) {
    for (int j = 0; j < n; ++j) idx |= uint64_t(par[j]) << j;
    return idx;
  }
  int q_up = enc.dropped_up_qubit(), q_tot = enc.dropped_total_qubit();
  int bitpos = 0;
  for (int j = 0; j < n; ++j) {
    if (j == q_up || j == q_tot) continue;
    idx |= uint64_t(par[j]) << bitpos++;
  }
  return idx;
}

std::vector<int> decode_occupations(uint64_t index, const Encoding& enc) {
  int n = enc.n_modes;
  std::vector<int> par(n, 0), occ(n, 0);
  if (enc.kind == EncKind::jw) {
    for (int j = 0; j < n; ++j) occ[j] = int((index >> j) & 1);
    return occ;
  }
  if (enc.kind == EncKind::parity) {
    for (int j = 0; j < n; ++j) par[j] = int((index >> j) & 1);
  } else {
    int q_up = enc.dropped_up_qubit(), q_tot = enc.dropped_total_qubit();
    int bitpos = 0;
    for (int j = 0; j < n; ++j) {
      if (j == q_up) par[j] = enc.n_up() % 2;
      else if (j == q_tot) par[j] = enc.n_elec % 2;
      else par[j] = int((index >> bitpos++) & 1);
    }
  }
  int prev = 0;
  for (int j = 0; j < n; ++j) {
    occ[j] = par[j] ^ prev;
    prev = par[j];
  }
  return occ;
}

int total_electrons(const std::vector<int>& occ) {
  int s = 0;
  for (int v : occ) s += v;
  return s;
}

int two_sz_of(const std::vector<int>& occ, int n_modes) {
  int half = n_modes / 2, up = 0, dn = 0;
  for (int j = 0; j < n_modes; ++j) (j < half ? up : dn) += occ[j];
  return up - dn;
}

std::vector<cx> slater_statevector(const Eigen::MatrixXd& C, int n_occ, const Encoding& enc) {
  int n = enc.n_modes, half = n / 2;
  if (C.rows() != half || C.cols() != half)
    throw std::invalid_argument("slater_statevector: C must be the per-spin block");
  if (n_occ != enc.n_up() || n_occ != enc.n_dn())
    throw std::invalid_argument("slater_statevector: restricted determinant needs n_up == n_dn == n_occ");
  int dim = 1 << enc.n_qubits();
  std::vector<cx> psi(dim, cx(0.0, 0.0));
  // enumerate per-spin occupation patterns with the sector counts
  std::vector<std::vector<int>> pats_up, pats_dn;
  for (int s = 0; s < (1 << half); ++s) {
    if (popcount(uint64_t(s)) == enc.n_up() || popcount(uint64_t(s)) == enc.n_dn()) {
      std::vector<int> v(half);
      for (int j = 0; j < half; ++j) v[j] = (s >> j) & 1;
      if (popcount(uint64_t(s)) == enc.n_up()) pats_up.push_back(v);
      if (popcount(uint64_t(s)) == enc.n_dn()) pats_dn.push_back(v);
    }
  }
  auto det_amp = [&](const std::vector<int>& pat, int k) -> double {
    if (k == 0) return 1.0;
    Eigen::MatrixXd sub(k, k);
    int r = 0;
    for (int p = 0; p < half; ++p)
      if (pat[p]) {
        for (int c = 0; c < k; ++c) sub(r, c) = C(p, c);
        ++r;
      }
    return sub.determinant();
  };
  for (const auto& pu : pats_up) {
    double au = det_amp(pu, enc.n_up());
    if (std::abs(au) < 1e-300) continue;
    for (const auto& pd : pats_dn) {
      double ad = det_amp(pd, enc.n_dn());
      std::vector<int> occ(n);
      for (int j = 0; j < half; ++j) {
        occ[j] = pu[j];
        occ[half + j] = pd[j];
      }
      psi[encode_basis_index(occ, enc)] += au * ad;
    }
  }
  double norm = 0.0;
  for (const auto& a : psi) norm += std::norm(a);
  norm = std::sqrt(norm);
  for (auto& a : psi) a /= norm;
  return psi;
}

}  // namespace qimp
