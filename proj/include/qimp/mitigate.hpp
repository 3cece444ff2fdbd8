#pragma once
// Simulated error mitigation: readout confusion correction, symmetry
// filtering of decoded occupations, local unitary folding, and Richardson
// zero-noise extrapolation.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "qimp/fermion.hpp"
#include "qimp/rng.hpp"
#include "qimp/simulator.hpp"

namespace qimp {

// Per-qubit readout flips: p01 = P(read 1 | prepared 0), p10 = P(read 0 | prepared 1).
struct ReadoutModel {
  std::vector<double> p01;
  std::vector<double> p10;
  static ReadoutModel uniform(int n_qubits, double p01, double p10);
  int n_qubits() const { return int(p01.size()); }
};

// Column-stochastic 2^n x 2^n matrix, tensor product of per-qubit flip maps.
Eigen::MatrixXd confusion_matrix(const ReadoutModel& r);
// Calibration by seeded per-qubit sampling instead of the analytic map.
Eigen::MatrixXd confusion_matrix_sampled(const ReadoutModel& r, long shots_per_state,
                                         Rng& rng);

// Forward readout model on outcome probabilities.
std::vector<double> apply_readout(const std::vector<double>& probs,
                                  const Eigen::MatrixXd& confusion);

// Least-squares inversion of the confusion map with nonnegativity clip and
// renormalization to the input mass. Throws std::invalid_argument on a
// singular matrix or a size mismatch.
std::vector<double> mitigate_counts(const std::vector<double>& counts,
                                    const Eigen::MatrixXd& confusion);

struct FilterResult {
  std::vector<double> counts;     // sector-correct strings only
  double ne_dev = 0.0;            // <N_e> - target over the raw distribution
  double sz_dev = 0.0;            // <S_z> - target
  double discard_fraction = 0.0;
  bool empty = false;             // every shot discarded
  // Run-selection predicate on the pre-filter distribution.
  bool selected() const { return std::abs(ne_dev) < 0.2 && std::abs(sz_dev) < 0.1; }
};

// Keeps only strings whose decoded occupations carry the target electron
// number and spin projection; diagnostics come from the raw distribution.
FilterResult symmetry_filter(const std::vector<double>& counts, const Encoding& enc,
                             int n_elec, int two_sz);

// Gate-count amplification: randomly chosen gates G become G G^dag G until the
// list grows by about (scale - 1)x. Noiseless action is unchanged; the choice
// of folded gates is a deterministic function of the seed.
std::vector<Gate> fold(const std::vector<Gate>& gates, double scale, uint64_t seed);

struct ZnePoint {
  double scale = 1.0;
  double energy = 0.0;
  double se = 0.0;
};
struct ZneSeries {
  std::vector<ZnePoint> points;
};
struct Extrapolation {
  double energy = 0.0;
  double se = 0.0;
};

// Weighted least-squares quadratic in the scale, evaluated at zero; needs at
// least three distinct scales. With three exact points this is Lagrange
// extrapolation.
Extrapolation richardson(const ZneSeries& s);

// rho <- (1 - p) rho + p tr(rho) I / 2^n.
void global_depolarize(DensityMatrix& d, double p);

}  // namespace qimp
