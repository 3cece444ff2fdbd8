#pragma once
#include <Eigen/Dense>
#include <string>
#include <vector>

#include "qimp/fermion.hpp"
#include "qimp/pauli.hpp"

namespace qimp {

// Rank-4 interaction tensor over n spatial orbitals, chemist index pairing.
struct Tensor4 {
  int n = 0;
  std::vector<double> v;
  explicit Tensor4(int n_) : n(n_), v(size_t(n_) * n_ * n_ * n_, 0.0) {}
  double& at(int a, int b, int g, int d) {
    return v[size_t(((a * n + b) * n + g)) * n + d];
  }
  double at(int a, int b, int g, int d) const {
    return v[size_t(((a * n + b) * n + g)) * n + d];
  }
};

// (M,M) impurity: M physical orbitals, one bath level per orbital, fixed
// half-filled sector N_e = 2M, Sz = 0. Energies in half-bandwidth units.
struct ImpurityModel {
  std::string name;
  int M = 2;
  double eps = 0.0;    // physical level
  double lam = 0.0;    // bath level
  double delta = 0.0;  // hybridization
  double U = 0.0;      // intra-orbital Coulomb
  double J = 0.0;      // Hund coupling

  int n_modes() const { return 4 * M; }
  int n_spatial() const { return 2 * M; }  // per-spin modes: M phys + M bath
  int n_elec() const { return 2 * M; }
  Encoding encoding(EncKind kind = EncKind::parity_reduced) const {
    return Encoding{kind, n_modes(), n_elec(), 0};
  }
};

// Named presets: "e_g" (two orbitals) and "t_2g" (three orbitals).
ImpurityModel preset(const std::string& name);

// Kanamori tensor on M physical orbitals:
// V[a,a,a,a]=U; V[a,a,b,b]=U-2J, V[a,b,a,b]=V[a,b,b,a]=J for a!=b.
Tensor4 kanamori_tensor(double U, double J, int M);

// Full second-quantized Hamiltonian, mode order phys-up, bath-up, phys-down,
// bath-down; two-body part (1/2) sum V c+ c+ c c over physical orbitals.
FermionSum build_hamiltonian(const ImpurityModel& m);

// Hamiltonian partitioned into named commuting-structure source fragments.
// Order: interaction density (U and U-2J), exchange + pair hopping (J),
// hybridization, level terms (eps and lam). Fragments sum to the full H.
struct Fragment {
  std::string label;
  FermionSum op;
};
std::vector<Fragment> hamiltonian_fragments(const ImpurityModel& m);

// Per-spin one-body matrix over the 2M spatial modes (phys block then bath).
Eigen::MatrixXd one_body_matrix(const ImpurityModel& m);
// Kanamori embedded in the 2M spatial space (physical block only).
Tensor4 spatial_interaction(const ImpurityModel& m);

// Convenience: encoded Hamiltonian.
PauliSum qubit_hamiltonian(const ImpurityModel& m, const Encoding& enc);

// Restricted HF by direct orbital-rotation minimization with multi-start;
// canonical orbitals from occupied/virtual Fock-block diagonalization.
// The plain core-Hamiltonian determinant is not self-consistent here, so the
// minimizing determinant is the reference.
struct HartreeFock {
  double energy = 0.0;
  Eigen::MatrixXd C;               // spatial MO coefficients, columns by energy
  Eigen::VectorXd orbital_energies;
  int n_occ = 0;                   // doubly occupied spatial MOs
};
HartreeFock restricted_hf(const ImpurityModel& m, int n_starts = 8, uint64_t seed = 20240501);

// Hamiltonian rotated into the molecular-orbital basis of C (same C per spin).
FermionSum mo_hamiltonian(const ImpurityModel& m, const Eigen::MatrixXd& C);

enum class RefKind {
  product_atomic,   // physical orbitals filled, bath empty
  noninteracting,   // ground determinant of the one-body matrix
  hartree_fock,     // minimizing restricted determinant
};

// Reference states in the atomic-frame encoded register.
uint64_t product_reference_index(const ImpurityModel& m, const Encoding& enc);
std::vector<cx> reference_state(RefKind kind, const ImpurityModel& m, const Encoding& enc);

// The HF determinant in the MO-frame register is a computational basis state.
uint64_t hf_reference_index_mo(const ImpurityModel& m, const Encoding& enc);

// Encoded symmetry operators for diagnostics.
PauliSum number_operator(const ImpurityModel& m, const Encoding& enc);
PauliSum two_sz_operator(const ImpurityModel& m, const Encoding& enc);

}  // namespace qimp
