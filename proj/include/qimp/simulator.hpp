#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "qimp/pauli.hpp"
#include "qimp/rng.hpp"

namespace qimp {

// Statevector over n qubits; amplitude index bit q is the state of qubit q.
struct StateVec {
  int n = 0;
  std::vector<cx> amp;
  explicit StateVec(int n_qubits, uint64_t basis_index = 0)
      : n(n_qubits), amp(size_t(1) << n_qubits, cx(0.0, 0.0)) {
    amp[basis_index] = 1.0;
  }
  StateVec(int n_qubits, std::vector<cx> amplitudes)
      : n(n_qubits), amp(std::move(amplitudes)) {}
  size_t dim() const { return amp.size(); }
};

// Serial and parallel kernels compute identical results: elementwise updates,
// and reductions over a fixed chunk grid independent of the thread count.
enum class ExecPolicy { serial, parallel };

// exp(-i theta P)|psi> = cos(theta)|psi> - i sin(theta) P|psi>, in place.
void apply_pauli_rotation(StateVec& s, PauliKey p, double theta,
                          ExecPolicy pol = ExecPolicy::parallel);

// P|psi> in place.
void apply_pauli(StateVec& s, PauliKey p);

// |out> = h|in>; out is resized.
void apply_sum_state(const PauliSum& h, const StateVec& in, StateVec& out,
                     ExecPolicy pol = ExecPolicy::parallel);

// Re <a|h|b> and <a|b>.
cx inner(const StateVec& a, const StateVec& b);
double expectation(const PauliSum& h, const StateVec& s,
                   ExecPolicy pol = ExecPolicy::parallel);

// <b|P|f> without materializing P|f>; chunked fixed-order reduction.
cx pauli_matrix_element(const StateVec& b, PauliKey p, const StateVec& f,
                        ExecPolicy pol = ExecPolicy::parallel);

std::vector<double> probabilities(const StateVec& s);

// Gate-level circuit representation.
struct Gate {
  enum class Kind { one_q, cnot };
  Kind kind = Kind::one_q;
  int q0 = 0;          // one_q: the qubit; cnot: control
  int q1 = 0;          // cnot: target
  Eigen::Matrix2cd u;  // one_q only
};

Gate make_one_qubit_gate(int q, const Eigen::Matrix2cd& u);
Gate make_cnot(int control, int target);

// exp(-i theta P) as basis changes, a CNOT ladder onto the highest support
// qubit, one RZ(2 theta), and the mirrored undo. 2(weight-1) CNOTs.
std::vector<Gate> compile_pauli_rotation(PauliKey p, double theta, int n_qubits);
int cnot_count(PauliKey p);
long circuit_cnot_count(const std::vector<Gate>& gates);

void apply_gate(StateVec& s, const Gate& g);
void apply_circuit(StateVec& s, const std::vector<Gate>& gates);

// Density matrix for noisy execution.
struct DensityMatrix {
  int n = 0;
  Eigen::MatrixXcd rho;
  explicit DensityMatrix(int n_qubits, uint64_t basis_index = 0)
      : n(n_qubits), rho(Eigen::MatrixXcd::Zero(1L << n_qubits, 1L << n_qubits)) {
    rho(long(basis_index), long(basis_index)) = 1.0;
  }
  static DensityMatrix from_state(const StateVec& s);
  size_t dim() const { return size_t(rho.rows()); }
};

// Amplitude damping then dephasing, each of strength p, after every gate on
// every participating qubit (both cnot qubits).
struct NoiseModel {
  double p1 = 0.0;
  double p2 = 0.0;
  bool enabled() const { return p1 > 0.0 || p2 > 0.0; }
};

void apply_gate(DensityMatrix& d, const Gate& g);
void apply_noise_channel(DensityMatrix& d, int qubit, double p);
void apply_circuit(DensityMatrix& d, const std::vector<Gate>& gates, const NoiseModel& noise);

std::vector<double> probabilities(const DensityMatrix& d);
double expectation(const PauliSum& h, const DensityMatrix& d);

// Sampled Z-basis histogram.
std::vector<long> sample_counts(const std::vector<double>& probs, long shots, Rng& rng);

}  // namespace qimp
