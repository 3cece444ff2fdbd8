#pragma once
#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "qimp/model.hpp"
#include "qimp/pauli.hpp"
#include "qimp/simulator.hpp"

namespace qimp {

// One variational parameter driving exp(-i theta sum_j w_j P_j). The strings
// of a step must pairwise commute, so the exponential factors exactly into
// per-string rotations by theta*w_j.
struct AnsatzStep {
  std::vector<PauliKey> keys;
  std::vector<double> weights;
};

AnsatzStep pauli_step(PauliKey p);

// Ordered parameterized circuit; steps.front() acts on the reference first.
struct Ansatz {
  int n_qubits = 0;
  std::vector<AnsatzStep> steps;

  int n_parameters() const { return int(steps.size()); }
  long cnot_count() const;
  // Throws std::logic_error on a malformed or non-commuting step.
  void check_steps() const;
  void apply(const Eigen::VectorXd& theta, StateVec& s,
             ExecPolicy pol = ExecPolicy::parallel) const;
  std::vector<Gate> compile(const Eigen::VectorXd& theta) const;
};

StateVec ansatz_state(const Ansatz& a, const Eigen::VectorXd& theta,
                      const StateVec& ref, ExecPolicy pol = ExecPolicy::parallel);
double ansatz_energy(const PauliSum& h, const Ansatz& a,
                     const Eigen::VectorXd& theta, const StateVec& ref,
                     ExecPolicy pol = ExecPolicy::parallel);
// Energy with the full analytic gradient from one backward sweep.
double ansatz_energy_gradient(const PauliSum& h, const Ansatz& a,
                              const Eigen::VectorXd& theta, const StateVec& ref,
                              Eigen::VectorXd& grad,
                              ExecPolicy pol = ExecPolicy::parallel);

// Unique Hermitian Pauli strings, sorted; signs are not stored (a pool element
// and its negation drive the same rotation family).
struct OperatorPool {
  std::string name;
  int n_qubits = 0;
  std::vector<PauliKey> elements;
};

// Distinct values of (1/2i)[P, P'] over anticommuting pairs of h's terms.
// Requires h real (every term even-Y); the results are then all odd-Y.
OperatorPool pool_hc(const PauliSum& h);

// Z letters outside the X/Y support dropped, then deduplicated.
OperatorPool strip_z(const OperatorPool& pool);

// 2(n_qubits-1)-element subset of the stripped pool's weight-2 strings: the
// first subset in lexicographic order that touches every qubit and passes the
// certifier. Throws std::runtime_error when no candidate certifies.
OperatorPool pool_mcp(const OperatorPool& stripped, int n_qubits,
                      const std::function<bool(const std::vector<PauliKey>&)>& certify);

// Spin-conserving excitation against the half-filled determinant of the
// molecular-orbital register (up modes 0..n_sp-1, down modes n_sp..2n_sp-1).
// step holds the encoded Hermitian generator i(T - T+), so exp(-i theta G)
// equals exp(theta (T - T+)).
struct Excitation {
  std::vector<int> create;
  std::vector<int> annihilate;
  AnsatzStep step;
};

// Singles first, then doubles, in a fixed deterministic order.
std::vector<Excitation> uccsd_excitations(const ImpurityModel& m, const Encoding& enc);
// One parameter per excitation, singles applied before doubles.
Ansatz uccsd_ansatz(const ImpurityModel& m, const Encoding& enc);

// All strings of all encoded UCCSD generators.
OperatorPool pool_uccsd(const ImpurityModel& m, const Encoding& enc);
// Spin-conserving singles plus same-orbital-pair paired doubles, one
// lexicographically-first odd-Y string per excitation.
OperatorPool pool_succspd(const ImpurityModel& m, const Encoding& enc);

// Greedy in-order first-fit partition into mutually commuting groups.
std::vector<std::vector<PauliKey>> commuting_split(const std::vector<PauliKey>& keys);

enum class HvaPartition {
  fragment,            // each source fragment split on its own
  merged_interaction,  // both interaction fragments pooled before splitting
};

// One layer's worth of rotation groups, interaction groups first.
struct HvaForm {
  int n_qubits = 0;
  std::vector<AnsatzStep> groups;
  std::vector<std::string> labels;  // source fragment per group
  long cnots_per_layer = 0;
};

HvaForm hva_form(const ImpurityModel& m,
                 HvaPartition part = HvaPartition::fragment);
// layers repetitions of the group cycle; parameter index = layer*N_G + group.
Ansatz hva_ansatz(const HvaForm& form, int layers);
// Uniform pi/7 start.
Eigen::VectorXd hva_initial_angles(int n_parameters);

// Rotation-sequence manifest: whitespace-separated Pauli strings, each
// optionally followed by an angle token; '#' starts a comment. Strings must
// be n_qubits letters; missing angles default to 0.
struct RotationSequence {
  int n_qubits = 0;
  std::vector<PauliKey> keys;
  Eigen::VectorXd angles;
};

RotationSequence parse_rotation_manifest(const std::string& text, int n_qubits);
std::string format_rotation_manifest(const RotationSequence& seq);
// Single-string step per rotation.
Ansatz rotation_ansatz(const std::vector<PauliKey>& keys, int n_qubits);

}  // namespace qimp
