#include "qimp/measure.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace qimp {

namespace {

constexpr double kTol = 1e-12;

FermionSum fermion_product(const FermionSum& a, const FermionSum& b) {
  FermionSum out;
  for (const auto& ta : a.terms)
    for (const auto& tb : b.terms) {
      FermionTerm t;
      t.coeff = ta.coeff * tb.coeff;
      t.ops = ta.ops;
      t.ops.insert(t.ops.end(), tb.ops.begin(), tb.ops.end());
      out.terms.push_back(std::move(t));
    }
  return out;
}

// Charge of rotated mode m for one spin: sum_pq R(p,m) R(q,m) c+_p c_q.
FermionSum rotated_charge(const Eigen::MatrixXd& r, int m, int spin) {
  const int n_sp = int(r.rows());
  FermionSum f;
  for (int p = 0; p < n_sp; ++p)
    for (int q = 0; q < n_sp; ++q) {
      const double w = r(p, m) * r(q, m);
      if (std::abs(w) > kTol)
        f.add(cx(w, 0.0), {{p + spin * n_sp, true}, {q + spin * n_sp, false}});
    }
  return f;
}

Eigen::Matrix2cd hadamard_u() {
  Eigen::Matrix2cd h;
  const double r = 1.0 / std::sqrt(2.0);
  h << r, r, r, -r;
  return h;
}

Eigen::Matrix2cd y_basis_u() {
  Eigen::Matrix2cd sdg = Eigen::Matrix2cd::Identity();
  sdg(1, 1) = cx(0.0, -1.0);
  return Eigen::Matrix2cd(hadamard_u() * sdg);
}

// Gates for exp(-i theta H) with H an encoded real combination of commuting
// strings, plus exp(i pi phase) of any identity part folded into the caller's
// running phase.
void append_sum_rotation(std::vector<Gate>& gates, const PauliSum& h,
                         double theta, int n_qubits, cx& phase) {
  for (const auto& [key, coeff] : h.terms()) {
    if (std::abs(coeff.imag()) > 1e-9)
      throw std::logic_error("rotation generator has a complex coefficient");
    if (weight(key) == 0) {
      phase *= std::exp(cx(0.0, -theta * coeff.real()));
      continue;
    }
    if (std::abs(coeff.real()) <= kTol) continue;
    auto part = compile_pauli_rotation(key, theta * coeff.real(), n_qubits);
    gates.insert(gates.end(), part.begin(), part.end());
  }
}

}  // namespace

double MeasurementGroup::value(const std::vector<int>& occ) const {
  const int n_sp = int(linear.size());
  Eigen::VectorXd charge(n_sp);
  for (int a = 0; a < n_sp; ++a)
    charge(a) = double(occ[size_t(a)] + occ[size_t(a + n_sp)]);
  return constant + linear.dot(charge) + charge.dot(quad * charge);
}

std::vector<MeasurementGroup> double_factorize(const ImpurityModel& m) {
  const int M = m.M;
  const int n_sp = m.n_spatial();
  const Tensor4 v = kanamori_tensor(m.U, m.J, M);

  // Coulomb supermatrix with the charge-charge entries zeroed; what remains
  // factorizes into squared one-body charges.
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(M * M, M * M);
  for (int a = 0; a < M; ++a)
    for (int b = 0; b < M; ++b)
      for (int g = 0; g < M; ++g)
        for (int d = 0; d < M; ++d)
          if (!(a == b && g == d)) w(a * M + b, g * M + d) = v.at(a, b, g, d);
  if ((w - w.transpose()).cwiseAbs().maxCoeff() > kTol)
    throw std::invalid_argument("interaction supermatrix is not symmetric");

  // One-body remainder of normal-ordering the squared charges back into
  // two-body form; it must be diagonal to stay inside the unrotated group.
  Eigen::MatrixXd corr = Eigen::MatrixXd::Zero(M, M);
  for (int a = 0; a < M; ++a)
    for (int d = 0; d < M; ++d)
      for (int g = 0; g < M; ++g) corr(a, d) += w(a * M + g, g * M + d);
  for (int a = 0; a < M; ++a)
    for (int d = 0; d < M; ++d)
      if (a != d && std::abs(corr(a, d)) > kTol)
        throw std::invalid_argument("interaction has an off-diagonal ordering remainder");

  std::vector<MeasurementGroup> out;

  MeasurementGroup dens;
  dens.label = "density";
  dens.rotation = Eigen::MatrixXd::Identity(n_sp, n_sp);
  dens.linear = Eigen::VectorXd::Zero(n_sp);
  dens.quad = Eigen::MatrixXd::Zero(n_sp, n_sp);
  for (int a = 0; a < M; ++a) {
    dens.linear(a) = m.eps - 0.5 * v.at(a, a, a, a) - 0.5 * corr(a, a);
    dens.linear(M + a) = m.lam;
    for (int g = 0; g < M; ++g) dens.quad(a, g) = 0.5 * v.at(a, a, g, g);
  }
  out.push_back(std::move(dens));

  if (std::abs(m.delta) > kTol) {
    MeasurementGroup hyb;
    hyb.label = "hybridization";
    hyb.rotation = Eigen::MatrixXd::Zero(n_sp, n_sp);
    hyb.linear = Eigen::VectorXd::Zero(n_sp);
    hyb.quad = Eigen::MatrixXd::Zero(n_sp, n_sp);
    const double r = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < M; ++i) {
      hyb.rotation(i, i) = r;
      hyb.rotation(M + i, i) = r;
      hyb.rotation(i, M + i) = r;
      hyb.rotation(M + i, M + i) = -r;
      hyb.linear(i) = m.delta;
      hyb.linear(M + i) = -m.delta;
    }
    out.push_back(std::move(hyb));
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("interaction supermatrix has a negative eigenvalue");
  int idx = 0;
  for (int k = M * M - 1; k >= 0; --k) {
    const double lam = es.eigenvalues()(k);
    if (lam <= 1e-12) break;
    Eigen::MatrixXd u(M, M);
    for (int a = 0; a < M; ++a)
      for (int b = 0; b < M; ++b) u(a, b) = es.eigenvectors()(a * M + b, k);
    if ((u - u.transpose()).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("supermatrix eigenvector is not an orbital-symmetric matrix");
    u = 0.5 * (u + u.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eu(u);

    MeasurementGroup sq;
    sq.label = "square_" + std::to_string(idx++);
    sq.rotation = Eigen::MatrixXd::Identity(n_sp, n_sp);
    sq.rotation.topLeftCorner(M, M) = eu.eigenvectors();
    sq.linear = Eigen::VectorXd::Zero(n_sp);
    sq.quad = Eigen::MatrixXd::Zero(n_sp, n_sp);
    sq.quad.topLeftCorner(M, M) =
        0.5 * lam * eu.eigenvalues() * eu.eigenvalues().transpose();
    out.push_back(std::move(sq));
  }
  return out;
}

FermionSum group_operator(const MeasurementGroup& g) {
  const int n_sp = int(g.rotation.rows());
  std::vector<FermionSum> charge(static_cast<size_t>(n_sp), FermionSum{});
  for (int m = 0; m < n_sp; ++m) {
    charge[size_t(m)] = rotated_charge(g.rotation, m, 0);
    charge[size_t(m)] += rotated_charge(g.rotation, m, 1);
  }

  FermionSum op;
  if (std::abs(g.constant) > kTol) op.add(cx(g.constant, 0.0), {});
  for (int m = 0; m < n_sp; ++m) {
    if (std::abs(g.linear(m)) <= kTol) continue;
    for (auto t : charge[size_t(m)].terms) {
      t.coeff *= g.linear(m);
      op.terms.push_back(std::move(t));
    }
  }
  for (int m = 0; m < n_sp; ++m)
    for (int mm = 0; mm < n_sp; ++mm) {
      if (std::abs(g.quad(m, mm)) <= kTol) continue;
      FermionSum prod = fermion_product(charge[size_t(m)], charge[size_t(mm)]);
      for (auto& t : prod.terms) t.coeff *= g.quad(m, mm);
      op += prod;
    }
  return op;
}

std::vector<Gate> givens_circuit(const Eigen::MatrixXd& rotation, const Encoding& enc) {
  const int n_sp = enc.n_modes / 2;
  if (rotation.rows() != n_sp || rotation.cols() != n_sp)
    throw std::invalid_argument("rotation size does not match the mode count");
  if ((rotation.transpose() * rotation - Eigen::MatrixXd::Identity(n_sp, n_sp))
          .cwiseAbs()
          .maxCoeff() > 1e-9)
    throw std::invalid_argument("rotation is not orthogonal");

  // A column sign flip makes the elimination end at +I; it is undone exactly
  // by a charge phase on the flipped mode, so the circuit realizes the given
  // matrix, not just its charges.
  Eigen::MatrixXd a = rotation;
  const bool flipped = a.determinant() < 0.0;
  if (flipped) a.col(n_sp - 1) *= -1.0;

  struct Plane {
    int p, q;
    double theta;
  };
  std::vector<Plane> planes;
  for (int j = 0; j + 1 < n_sp; ++j)
    for (int i = n_sp - 1; i > j; --i) {
      if (std::abs(a(i, j)) <= 1e-14) continue;
      const double theta = std::atan2(a(i, j), a(i - 1, j));
      const double c = std::cos(theta), s = std::sin(theta);
      const Eigen::RowVectorXd top = a.row(i - 1), bot = a.row(i);
      a.row(i - 1) = c * top + s * bot;
      a.row(i) = -s * top + c * bot;
      planes.push_back({i - 1, i, theta});
    }
  for (int j = 0; j + 1 < n_sp; ++j) {
    if (a(j, j) >= 0.0) continue;
    int jj = j + 1;
    while (jj < n_sp && a(jj, jj) >= 0.0) ++jj;
    if (jj == n_sp) throw std::logic_error("odd sign pattern after elimination");
    planes.push_back({j, jj, std::numbers::pi});
    a(j, j) *= -1.0;
    a(jj, jj) *= -1.0;
  }
  if ((a - Eigen::MatrixXd::Identity(n_sp, n_sp)).cwiseAbs().maxCoeff() > 1e-9)
    throw std::logic_error("plane elimination did not reach the identity");

  std::vector<Gate> gates;
  cx phase{1.0, 0.0};
  for (const auto& pl : planes) {
    for (int spin = 0; spin < 2; ++spin) {
      const int p = pl.p + spin * n_sp, q = pl.q + spin * n_sp;
      FermionSum gen;
      gen.add(cx(0.0, 1.0), {{p, true}, {q, false}});
      gen.add(cx(0.0, -1.0), {{q, true}, {p, false}});
      append_sum_rotation(gates, encode(gen, enc), pl.theta, enc.n_qubits(), phase);
    }
  }
  if (flipped) {
    // exp(i pi n) per spin on the flipped mode.
    for (int spin = 0; spin < 2; ++spin) {
      FermionSum num;
      num.add(cx(1.0, 0.0), {{n_sp - 1 + spin * n_sp, true}, {n_sp - 1 + spin * n_sp, false}});
      append_sum_rotation(gates, encode(num, enc), -std::numbers::pi, enc.n_qubits(), phase);
    }
  }
  if (std::abs(phase - cx(1.0, 0.0)) > kTol)
    gates.push_back(make_one_qubit_gate(0, Eigen::Matrix2cd(phase * Eigen::Matrix2cd::Identity())));
  return gates;
}

std::vector<std::vector<PauliKey>> qwc_groups(const PauliSum& h) {
  std::vector<std::pair<PauliKey, double>> terms;
  for (const auto& [key, coeff] : h.terms())
    if (weight(key) > 0) terms.push_back({key, std::abs(coeff)});
  std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  struct Bucket {
    uint64_t x = 0, z = 0, supp = 0;
    std::vector<PauliKey> keys;
  };
  std::vector<Bucket> buckets;
  for (const auto& [key, mag] : terms) {
    (void)mag;
    const uint64_t supp = key.x | key.z;
    bool placed = false;
    for (auto& b : buckets) {
      const uint64_t shared = b.supp & supp;
      if ((((b.x ^ key.x) | (b.z ^ key.z)) & shared) != 0) continue;
      b.x |= key.x;
      b.z |= key.z;
      b.supp |= supp;
      b.keys.push_back(key);
      placed = true;
      break;
    }
    if (!placed) buckets.push_back({key.x, key.z, supp, {key}});
  }
  std::vector<std::vector<PauliKey>> out;
  out.reserve(buckets.size());
  for (auto& b : buckets) out.push_back(std::move(b.keys));
  return out;
}

std::vector<Gate> qwc_basis_circuit(const std::vector<PauliKey>& group, int n_qubits) {
  uint64_t gx = 0, gz = 0;
  for (const auto& k : group) {
    gx |= k.x;
    gz |= k.z;
  }
  std::vector<Gate> gates;
  for (int q = 0; q < n_qubits; ++q) {
    const bool bx = (gx >> q) & 1, bz = (gz >> q) & 1;
    if (bx && bz)
      gates.push_back(make_one_qubit_gate(q, y_basis_u()));
    else if (bx)
      gates.push_back(make_one_qubit_gate(q, hadamard_u()));
  }
  return gates;
}

namespace {

std::vector<double> df_values(const MeasurementGroup& g, const Encoding& enc) {
  const uint64_t dim = uint64_t(1) << enc.n_qubits();
  std::vector<double> vals(dim);
  for (uint64_t b = 0; b < dim; ++b)
    vals[b] = g.value(decode_occupations(b, enc));
  return vals;
}

std::vector<double> clamped(std::vector<double> p) {
  for (double& x : p) x = std::max(x, 0.0);
  return p;
}

}  // namespace

std::vector<PreparedGroup> prepare_groups(const std::vector<MeasurementGroup>& groups,
                                          const StateVec& psi, const Encoding& enc) {
  std::vector<PreparedGroup> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    StateVec rot = psi;
    apply_circuit(rot, givens_circuit(g.rotation, enc));
    out.push_back({g.label, df_values(g, enc), clamped(probabilities(rot))});
  }
  return out;
}

std::vector<PreparedGroup> prepare_groups(const std::vector<MeasurementGroup>& groups,
                                          const DensityMatrix& rho, const Encoding& enc) {
  std::vector<PreparedGroup> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    DensityMatrix rot = rho;
    // Measurement-basis circuits run noiselessly.
    apply_circuit(rot, givens_circuit(g.rotation, enc), NoiseModel{});
    out.push_back({g.label, df_values(g, enc), clamped(probabilities(rot))});
  }
  return out;
}

std::vector<PreparedGroup> prepare_qwc(const PauliSum& h,
                                       const std::vector<std::vector<PauliKey>>& groups,
                                       const StateVec& psi) {
  const uint64_t dim = psi.dim();
  std::vector<PreparedGroup> out;
  out.reserve(groups.size());
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    StateVec rot = psi;
    apply_circuit(rot, qwc_basis_circuit(groups[gi], psi.n));
    std::vector<double> vals(dim, 0.0);
    for (const auto& key : groups[gi]) {
      const double c = h.coeff(key).real();
      const uint64_t supp = key.x | key.z;
      for (uint64_t b = 0; b < dim; ++b)
        vals[b] += (std::popcount(b & supp) & 1) ? -c : c;
    }
    if (gi == 0)
      for (uint64_t b = 0; b < dim; ++b) vals[b] += h.constant().real();
    out.push_back({"qwc_" + std::to_string(gi), std::move(vals),
                   clamped(probabilities(rot))});
  }
  return out;
}

EnergyEstimate estimate_energy(const std::vector<PreparedGroup>& groups,
                               long shots_per_group, Rng* rng) {
  if (rng != nullptr && shots_per_group < 1)
    throw std::invalid_argument("sampled estimation needs at least one shot");
  EnergyEstimate est;
  double var_sum = 0.0;
  for (const auto& g : groups) {
    GroupEstimate ge;
    ge.label = g.label;
    if (rng == nullptr) {
      ge.mean = std::inner_product(g.probs.begin(), g.probs.end(),
                                   g.values.begin(), 0.0);
    } else {
      const auto counts = sample_counts(g.probs, shots_per_group, *rng);
      double sum = 0.0, sum2 = 0.0;
      for (size_t b = 0; b < counts.size(); ++b) {
        sum += double(counts[b]) * g.values[b];
        sum2 += double(counts[b]) * g.values[b] * g.values[b];
      }
      const double n = double(shots_per_group);
      ge.shots = shots_per_group;
      ge.mean = sum / n;
      if (shots_per_group > 1) {
        const double var = std::max(0.0, (sum2 / n - ge.mean * ge.mean) * n / (n - 1.0));
        ge.se = std::sqrt(var / n);
      }
    }
    est.energy += ge.mean;
    var_sum += ge.se * ge.se;
    est.groups.push_back(std::move(ge));
  }
  est.se = std::sqrt(var_sum);
  return est;
}

}  // namespace qimp
