#pragma once
#include <Eigen/Dense>
#include <string>
#include <vector>

#include "qimp/fermion.hpp"
#include "qimp/model.hpp"
#include "qimp/pauli.hpp"
#include "qimp/rng.hpp"
#include "qimp/simulator.hpp"

namespace qimp {

// One measurement group: a single-particle basis rotation (same spatial matrix
// per spin) followed by computational-basis sampling of an observable that is
// a degree-<=2 polynomial in the rotated per-orbital charges
// N_a = n_{a,up} + n_{a,dn}. value = constant + l.N + N.quad.N (full double
// sum, so quad(a,g) multiplies N_a N_g for every ordered pair).
struct MeasurementGroup {
  std::string label;
  Eigen::MatrixXd rotation;
  double constant = 0.0;
  Eigen::VectorXd linear;
  Eigen::MatrixXd quad;

  double value(const std::vector<int>& occ) const;
};

// Exact regrouping of the impurity Hamiltonian into
//   (i)   all charge-only terms, measured without rotation,
//   (ii)  hybridization, diagonalized by bonding/antibonding combinations,
//   (iii) one squared-charge group per positive eigenvalue of the
//         density-zeroed Coulomb supermatrix.
// Throws std::invalid_argument when the supermatrix is not PSD within 1e-10
// or an eigenvector does not reshape to a symmetric orbital matrix.
std::vector<MeasurementGroup> double_factorize(const ImpurityModel& m);

// The group observable as a fermionic operator in the unrotated frame.
FermionSum group_operator(const MeasurementGroup& g);

// Circuit V with V+ c V = R^T c built from two-mode rotations; applying it to
// a determinant of orbitals C yields the determinant of R^T C. Throws
// std::invalid_argument unless R is orthogonal within 1e-9.
std::vector<Gate> givens_circuit(const Eigen::MatrixXd& rotation, const Encoding& enc);

// Qubit-wise commuting partition: greedy first-fit over terms sorted by
// weight descending (ties by mask). The identity term is excluded.
std::vector<std::vector<PauliKey>> qwc_groups(const PauliSum& h);
// Per-qubit basis changes mapping every letter of the group to Z.
std::vector<Gate> qwc_basis_circuit(const std::vector<PauliKey>& group, int n_qubits);

// A group reduced to sampling form: outcome probabilities after its basis
// circuit plus the observable value of every outcome.
struct PreparedGroup {
  std::string label;
  std::vector<double> values;
  std::vector<double> probs;
};

std::vector<PreparedGroup> prepare_groups(const std::vector<MeasurementGroup>& groups,
                                          const StateVec& psi, const Encoding& enc);
std::vector<PreparedGroup> prepare_groups(const std::vector<MeasurementGroup>& groups,
                                          const DensityMatrix& rho, const Encoding& enc);
// h supplies the coefficients; its constant is folded into the first group.
std::vector<PreparedGroup> prepare_qwc(const PauliSum& h,
                                       const std::vector<std::vector<PauliKey>>& groups,
                                       const StateVec& psi);

struct GroupEstimate {
  std::string label;
  double mean = 0.0;
  double se = 0.0;
  long shots = 0;
};

struct EnergyEstimate {
  double energy = 0.0;
  double se = 0.0;
  std::vector<GroupEstimate> groups;
};

// rng == nullptr: exact expectation per group (zero variance). Otherwise
// shots_per_group multinomial samples per group; se by propagation of the
// per-group sample variances.
EnergyEstimate estimate_energy(const std::vector<PreparedGroup>& groups,
                               long shots_per_group, Rng* rng);

}  // namespace qimp
