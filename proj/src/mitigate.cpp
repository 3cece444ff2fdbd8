#include "qimp/mitigate.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace qimp {

namespace {

Eigen::Matrix2d qubit_flip_map(double p01, double p10) {
  if (p01 < 0.0 || p01 > 1.0 || p10 < 0.0 || p10 > 1.0)
    throw std::invalid_argument("flip probability outside [0,1]");
  Eigen::Matrix2d m;
  m << 1.0 - p01, p10, p01, 1.0 - p10;
  return m;
}

Eigen::MatrixXd tensor_from_locals(const std::vector<Eigen::Matrix2d>& locals) {
  const int n = int(locals.size());
  const long dim = 1L << n;
  Eigen::MatrixXd m(dim, dim);
  for (long out = 0; out < dim; ++out)
    for (long in = 0; in < dim; ++in) {
      double v = 1.0;
      for (int q = 0; q < n; ++q) v *= locals[size_t(q)]((out >> q) & 1, (in >> q) & 1);
      m(out, in) = v;
    }
  return m;
}

}  // namespace

ReadoutModel ReadoutModel::uniform(int n_qubits, double p01, double p10) {
  ReadoutModel r;
  r.p01.assign(size_t(n_qubits), p01);
  r.p10.assign(size_t(n_qubits), p10);
  return r;
}

Eigen::MatrixXd confusion_matrix(const ReadoutModel& r) {
  std::vector<Eigen::Matrix2d> locals;
  locals.reserve(r.p01.size());
  for (size_t q = 0; q < r.p01.size(); ++q)
    locals.push_back(qubit_flip_map(r.p01[q], r.p10[q]));
  return tensor_from_locals(locals);
}

Eigen::MatrixXd confusion_matrix_sampled(const ReadoutModel& r, long shots_per_state,
                                         Rng& rng) {
  if (shots_per_state < 1) throw std::invalid_argument("shots_per_state must be positive");
  std::vector<Eigen::Matrix2d> locals;
  locals.reserve(r.p01.size());
  for (size_t q = 0; q < r.p01.size(); ++q) {
    const Eigen::Matrix2d exact = qubit_flip_map(r.p01[q], r.p10[q]);
    Eigen::Matrix2d est;
    for (int in = 0; in < 2; ++in) {
      const long flips = rng.binomial(shots_per_state, exact(1 - in, in));
      est(1 - in, in) = double(flips) / double(shots_per_state);
      est(in, in) = 1.0 - est(1 - in, in);
    }
    locals.push_back(est);
  }
  return tensor_from_locals(locals);
}

std::vector<double> apply_readout(const std::vector<double>& probs,
                                  const Eigen::MatrixXd& confusion) {
  if (long(probs.size()) != confusion.cols())
    throw std::invalid_argument("probability vector does not match the confusion matrix");
  const Eigen::Map<const Eigen::VectorXd> p(probs.data(), long(probs.size()));
  const Eigen::VectorXd out = confusion * p;
  return {out.data(), out.data() + out.size()};
}

std::vector<double> mitigate_counts(const std::vector<double>& counts,
                                    const Eigen::MatrixXd& confusion) {
  if (long(counts.size()) != confusion.cols())
    throw std::invalid_argument("counts vector does not match the confusion matrix");
  const Eigen::Map<const Eigen::VectorXd> c(counts.data(), long(counts.size()));
  const auto qr = confusion.colPivHouseholderQr();
  if (qr.rank() < confusion.cols()) throw std::invalid_argument("singular confusion matrix");
  Eigen::VectorXd x = qr.solve(c);
  x = x.cwiseMax(0.0);
  const double mass = c.sum();
  const double got = x.sum();
  if (mass > 0.0 && got > 0.0) x *= mass / got;
  return {x.data(), x.data() + x.size()};
}

FilterResult symmetry_filter(const std::vector<double>& counts, const Encoding& enc,
                             int n_elec, int two_sz) {
  FilterResult out;
  out.counts.assign(counts.size(), 0.0);
  double total = 0.0, kept = 0.0, sum_ne = 0.0, sum_sz = 0.0;
  for (size_t b = 0; b < counts.size(); ++b) {
    const double c = counts[b];
    if (c <= 0.0) continue;
    const auto occ = decode_occupations(b, enc);
    const int ne = total_electrons(occ);
    const int tsz = two_sz_of(occ, enc.n_modes);
    total += c;
    sum_ne += c * double(ne);
    sum_sz += c * 0.5 * double(tsz);
    if (ne == n_elec && tsz == two_sz) {
      out.counts[b] = c;
      kept += c;
    }
  }
  if (total <= 0.0 || kept <= 0.0) {
    out.empty = true;
    out.discard_fraction = 1.0;
    return out;
  }
  out.ne_dev = sum_ne / total - double(n_elec);
  out.sz_dev = sum_sz / total - 0.5 * double(two_sz);
  out.discard_fraction = (total - kept) / total;
  return out;
}

std::vector<Gate> fold(const std::vector<Gate>& gates, double scale, uint64_t seed) {
  if (scale < 1.0) throw std::invalid_argument("fold scale must be at least 1");
  const size_t n = gates.size();
  if (n == 0) return {};
  const auto units = size_t(std::llround((scale - 1.0) * double(n) / 2.0));
  std::vector<size_t> extra(n, units / n);
  const size_t rem = units % n;
  if (rem > 0) {
    std::vector<size_t> idx(n);
    std::iota(idx.begin(), idx.end(), size_t(0));
    Rng rng(seed);
    for (size_t j = 0; j < rem; ++j)
      std::swap(idx[j], idx[j + size_t(rng.below(uint64_t(n - j)))]);
    for (size_t j = 0; j < rem; ++j) ++extra[idx[j]];
  }
  std::vector<Gate> out;
  out.reserve(n + 2 * units);
  for (size_t i = 0; i < n; ++i) {
    const Gate& g = gates[i];
    Gate inv = g;
    if (g.kind == Gate::Kind::one_q) inv.u = g.u.adjoint();
    out.push_back(g);
    for (size_t k = 0; k < extra[i]; ++k) {
      out.push_back(inv);
      out.push_back(g);
    }
  }
  return out;
}

Extrapolation richardson(const ZneSeries& s) {
  const long n = long(s.points.size());
  if (n < 3) throw std::invalid_argument("need at least three scale points");
  std::vector<double> scales;
  for (const auto& p : s.points) {
    if (p.scale < 1.0) throw std::invalid_argument("scale must be at least 1");
    if (p.se < 0.0) throw std::invalid_argument("negative stderr");
    scales.push_back(p.scale);
  }
  std::sort(scales.begin(), scales.end());
  int distinct = 1;
  for (size_t i = 1; i < scales.size(); ++i)
    if (scales[i] > scales[i - 1] + 1e-12) ++distinct;
  if (distinct < 3) throw std::invalid_argument("need three distinct scales");

  Eigen::MatrixXd x(n, 3);
  Eigen::VectorXd y(n), w(n);
  bool weighted = true;
  for (long i = 0; i < n; ++i)
    if (s.points[size_t(i)].se <= 0.0) weighted = false;
  for (long i = 0; i < n; ++i) {
    const auto& p = s.points[size_t(i)];
    x(i, 0) = 1.0;
    x(i, 1) = p.scale;
    x(i, 2) = p.scale * p.scale;
    y(i) = p.energy;
    w(i) = weighted ? 1.0 / (p.se * p.se) : 1.0;
  }
  const Eigen::MatrixXd xtw = x.transpose() * w.asDiagonal();
  const Eigen::Matrix3d a = xtw * x;
  // Row of the solve that lands on the constant term: E0 = c . y.
  const Eigen::VectorXd c = xtw.transpose() * a.inverse().col(0);
  double var = 0.0;
  for (long i = 0; i < n; ++i) {
    const double se = s.points[size_t(i)].se;
    var += c(i) * c(i) * se * se;
  }
  Extrapolation out;
  out.energy = c.dot(y);
  out.se = std::sqrt(var);
  return out;
}

void global_depolarize(DensityMatrix& d, double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("depolarizing weight outside [0,1]");
  const long dim = d.rho.rows();
  const cx tr = d.rho.trace();
  d.rho = (1.0 - p) * d.rho +
          (p / double(dim)) * tr * Eigen::MatrixXcd::Identity(dim, dim);
}

}  // namespace qimp
