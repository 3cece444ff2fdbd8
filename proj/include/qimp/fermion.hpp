#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qimp/pauli.hpp"

namespace qimp {

// One product of ladder operators times a coefficient. ops are applied
// right-to-left: ops.front() acts last. (mode, dagger)
struct FermionTerm {
  cx coeff{1.0, 0.0};
  std::vector<std::pair<int, bool>> ops;
};

struct FermionSum {
  std::vector<FermionTerm> terms;
  void add(cx c, std::vector<std::pair<int, bool>> ops) {
    terms.push_back({c, std::move(ops)});
  }
  FermionSum& operator+=(const FermionSum& o) {
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    return *this;
  }
};

// Normal order: creations left of annihilations, mode indices ascending within
// each block; anticommutator contractions expand into extra terms.
FermionSum normal_order(const FermionSum& f, double tol = 1e-14);

// Apply f to the Fock basis state |index> (bit p = occupation of mode p, with
// |n> = c+_{p1}...c+_{pk}|0>, p1<...<pk). Sparse result as (index, amplitude).
std::vector<std::pair<uint64_t, cx>> apply_fermion(const FermionSum& f, uint64_t fock_index);

enum class EncKind { jw, parity, parity_reduced };

// Fermion-to-qubit map. Mode order is fixed by the caller; for the impurity
// models it is phys-up, bath-up, phys-down, bath-down, so qubit n/2-1 carries
// the spin-up parity and qubit n-1 the total parity. parity_reduced drops
// those two qubits and substitutes the sector parity eigenvalues.
struct Encoding {
  EncKind kind = EncKind::parity_reduced;
  int n_modes = 0;
  int n_elec = 0;   // sector electron count (reduction only)
  int two_sz = 0;   // sector 2*Sz (reduction only)

  int n_qubits() const {
    return kind == EncKind::parity_reduced ? n_modes - 2 : n_modes;
  }
  int n_up() const { return (n_elec + two_sz) / 2; }
  int n_dn() const { return (n_elec - two_sz) / 2; }
  int dropped_up_qubit() const { return n_modes / 2 - 1; }
  int dropped_total_qubit() const { return n_modes - 1; }
};

// Ladder operator as a qubit operator under jw / parity (pre-reduction).
PauliSum ladder_qubit_op(int mode, int n_modes, bool dagger, EncKind kind);

// Encode a fermionic operator. Throws std::invalid_argument if parity_reduced
// and the operator has X/Y support on a dropped qubit (it then fails to
// preserve the reduction symmetries).
PauliSum encode(const FermionSum& f, const Encoding& enc);

// Occupation-basis maps for the encoded register.
uint64_t encode_basis_index(const std::vector<int>& occ, const Encoding& enc);
// Inverse map; for parity_reduced the two dropped parity bits are
// reconstructed from the sector parity constants.
std::vector<int> decode_occupations(uint64_t index, const Encoding& enc);

int total_electrons(const std::vector<int>& occ);
int two_sz_of(const std::vector<int>& occ, int n_modes);

// Statevector (length 2^n_qubits) of the restricted Slater determinant whose
// per-spin orbitals are the first n_occ columns of C (per-spin block of
// n_modes/2 spatial modes).
std::vector<cx> slater_statevector(const Eigen::MatrixXd& C, int n_occ, const Encoding& enc);

}  // namespace qimp
