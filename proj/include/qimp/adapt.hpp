#pragma once
#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "qimp/ansatz.hpp"
#include "qimp/measure.hpp"
#include "qimp/model.hpp"
#include "qimp/optim.hpp"
#include "qimp/pauli.hpp"
#include "qimp/simulator.hpp"

namespace qimp {

// How circuits are executed and energies are read out.
struct ExecutionMode {
  enum class Kind { statevector, shots, noisy };
  Kind kind = Kind::statevector;
  long shots = 1 << 16;  // per measurement group (shots and noisy)
  NoiseModel noise;      // noisy only
};

enum class TieBreak { lexicographic, seeded_random };
enum class OptimizerKind { bfgs, smo, adadelta };
enum class Frame { atomic, molecular };

struct AdaptConfig {
  OperatorPool pool;
  double grad_tolerance = 1e-4;
  int max_parameters = 60;
  OptimizerKind optimizer = OptimizerKind::bfgs;
  long screening_shots = 1 << 16;  // parameter-shift screening (sampled modes)
  TieBreak tie_break = TieBreak::lexicographic;
  Frame frame = Frame::atomic;
  // Reference in the atomic frame; the molecular frame always starts from the
  // Hartree-Fock determinant.
  RefKind reference = RefKind::product_atomic;
  int smo_sweeps = 40;
  BfgsOptions bfgs;
  AdadeltaOptions adadelta;
};

struct AdaptIteration {
  PauliKey generator;
  double gmax = 0.0;       // largest screening score magnitude at selection
  Eigen::VectorXd theta;   // optimized parameters after this growth step
  double energy = 0.0;     // mode energy at theta
  double energy_sv = 0.0;  // statevector re-evaluation of the same circuit
  double fidelity = 0.0;   // vs the exact ground state
  long cnots = 0;          // cumulative circuit CNOTs
};

struct RunRecord {
  std::string mode;
  uint64_t seed = 0;
  std::string config_digest;  // filled by the runner that owns the config text
  bool converged = false;
  bool optimizer_failed = false;
  double final_grad = 0.0;
  double reference_energy = 0.0;
  double exact_energy = 0.0;
  std::vector<AdaptIteration> iterations;
  Ansatz ansatz;
  Eigen::VectorXd theta;
};

// Exact screening scores: score(P) = d/dtheta <psi_theta|H|psi_theta> at
// theta = 0 for the appended rotation exp(-i theta P), computed as
// 2 Im <H psi|P psi> with H psi formed once.
std::vector<double> screen(const StateVec& psi, const PauliSum& h,
                           const OperatorPool& pool,
                           ExecPolicy pol = ExecPolicy::parallel);

// Parameter-shift screening from sampled energies at +-pi/4 per candidate.
// The statevector overload adds the trial rotation exactly (shot noise only);
// the density-matrix overload compiles it through the gate set with noise.
std::vector<double> screen_sampled(const StateVec& psi,
                                   const std::vector<MeasurementGroup>& groups,
                                   const Encoding& enc, const OperatorPool& pool,
                                   long shots, Rng& rng);
std::vector<double> screen_sampled(const DensityMatrix& rho, const NoiseModel& noise,
                                   const std::vector<MeasurementGroup>& groups,
                                   const Encoding& enc, const OperatorPool& pool,
                                   long shots, Rng& rng);

// The adaptive loop: screen, grow by the largest-score generator with the new
// angle at 0, reoptimize everything, repeat until the largest score magnitude
// drops below grad_tolerance or the parameter budget is reached. Identical
// seeds reproduce identical records.
RunRecord adapt_vqe(const ImpurityModel& m, const AdaptConfig& cfg,
                    const ExecutionMode& mode, uint64_t seed = 0);

// Fixed-ansatz optimization under the same execution modes.
struct FixedRun {
  bool converged = false;
  double energy = 0.0;
  double energy_sv = 0.0;
  double fidelity = 0.0;
  double exact_energy = 0.0;
  Eigen::VectorXd theta;
  long cnots = 0;
  int iterations = 0;
};
FixedRun vqe_fixed(const PauliSum& h, const Ansatz& a, const Eigen::VectorXd& theta0,
                   const StateVec& ref, const ImpurityModel& m,
                   OptimizerKind opt, const ExecutionMode& mode, uint64_t seed = 0,
                   const BfgsOptions& bfgs = {}, int smo_sweeps = 40,
                   const AdadeltaOptions& adadelta = {});

// Minimal complete pool for the model: the first lexicographic weight-2
// subset of the Z-stripped commutator pool that covers every qubit and whose
// bounded statevector ADAPT run reaches the exact energy within tol.
OperatorPool mcp_pool_certified(const ImpurityModel& m, double tol = 1e-5,
                                int max_parameters = 36);

// Per-bin outcome probabilities of a circuit whose step k is swept over an
// angle t are exactly alpha + beta cos 2t + gamma sin 2t; three evaluations
// at t in {0, +pi/4, -pi/4} determine every bin.
struct SinusoidProbs {
  std::vector<double> alpha, beta, gamma;
  std::vector<double> at(double t) const;
};
SinusoidProbs fit_sinusoid_probs(const std::vector<double>& p0,
                                 const std::vector<double>& p_plus,
                                 const std::vector<double>& p_minus);

}  // namespace qimp
