#pragma once
#include <Eigen/Dense>
#include <vector>

#include "qimp/fermion.hpp"
#include "qimp/pauli.hpp"

namespace qimp {

// Dense matrix of an encoded operator; cross-check use only.
Eigen::MatrixXcd dense_matrix(const PauliSum& h);

// h|psi> without forming the dense matrix.
std::vector<cx> apply_sum(const PauliSum& h, const std::vector<cx>& psi);

// Re <psi|h|psi> / <psi|psi>.
double expectation_value(const PauliSum& h, const std::vector<cx>& psi);

double fidelity(const std::vector<cx>& a, const std::vector<cx>& b);

struct GroundState {
  double energy = 0.0;
  std::vector<cx> vec;
};

// Lowest eigenpair of a Hermitian sum. Dense solve up to dense_limit
// dimensions, Lanczos with full reorthogonalization above; the returned pair
// always satisfies |h v - E v| <= residual_tol.
GroundState ground_state(const PauliSum& h, double residual_tol = 1e-10,
                         int dense_limit = 4096);

// Lowest eigenpair restricted to the encoded-register subspace whose decoded
// occupations match the sector of enc. vec is embedded in the full register.
GroundState sector_ground_state(const PauliSum& h, const Encoding& enc);

// Fock indices with the given electron count and 2*Sz, ascending.
std::vector<uint64_t> sector_basis(int n_modes, int n_elec, int two_sz);

struct FockGround {
  double energy = 0.0;
  std::vector<uint64_t> basis;
  Eigen::VectorXcd amplitudes;  // over basis
};

// Sector-restricted exact diagonalization straight from the ladder operators,
// independent of any qubit encoding.
FockGround fermionic_sector_ground(const FermionSum& h, int n_modes, int n_elec, int two_sz);

}  // namespace qimp
