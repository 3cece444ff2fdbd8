#include "qimp/adapt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "qimp/oracle.hpp"

namespace qimp {

namespace {

constexpr double kQuarter = std::numbers::pi / 4.0;

std::vector<double> clamped(std::vector<double> p) {
  for (double& x : p) x = std::max(x, 0.0);
  return p;
}

// Measurement group with its basis circuit and value table precomputed.
struct GroupCtx {
  std::string label;
  std::vector<Gate> gates;
  std::vector<double> values;
};

std::vector<GroupCtx> make_ctx(const std::vector<MeasurementGroup>& groups,
                               const Encoding& enc) {
  std::vector<GroupCtx> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    GroupCtx c;
    c.label = g.label;
    c.gates = givens_circuit(g.rotation, enc);
    const uint64_t dim = uint64_t(1) << enc.n_qubits();
    c.values.resize(dim);
    for (uint64_t b = 0; b < dim; ++b)
      c.values[b] = g.value(decode_occupations(b, enc));
    out.push_back(std::move(c));
  }
  return out;
}

// Exact or sampled mean of one group's observable over outcome probabilities.
double group_mean(const GroupCtx& g, const std::vector<double>& probs,
                  long shots, Rng* rng) {
  if (rng == nullptr)
    return std::inner_product(probs.begin(), probs.end(), g.values.begin(), 0.0);
  const auto counts = sample_counts(probs, shots, *rng);
  double sum = 0.0;
  for (size_t b = 0; b < counts.size(); ++b) sum += double(counts[b]) * g.values[b];
  return sum / double(shots);
}

struct SvEngine {
  using State = StateVec;
  const StateVec* ref;
  const std::vector<GroupCtx>* groups;

  State make_ref() const { return *ref; }
  void step(State& s, const AnsatzStep& st, double th) const {
    for (size_t j = 0; j < st.keys.size(); ++j)
      apply_pauli_rotation(s, st.keys[j], th * st.weights[j]);
  }
  std::vector<std::vector<double>> group_probs(const State& s) const {
    std::vector<std::vector<double>> out;
    out.reserve(groups->size());
    for (const auto& g : *groups) {
      StateVec rot = s;
      apply_circuit(rot, g.gates);
      out.push_back(clamped(probabilities(rot)));
    }
    return out;
  }
};

struct DmEngine {
  using State = DensityMatrix;
  const StateVec* ref;
  const std::vector<GroupCtx>* groups;
  NoiseModel noise;
  int n_qubits = 0;

  State make_ref() const { return DensityMatrix::from_state(*ref); }
  void step(State& s, const AnsatzStep& st, double th) const {
    std::vector<Gate> gates;
    for (size_t j = 0; j < st.keys.size(); ++j) {
      auto part = compile_pauli_rotation(st.keys[j], th * st.weights[j], n_qubits);
      gates.insert(gates.end(), part.begin(), part.end());
    }
    apply_circuit(s, gates, noise);
  }
  std::vector<std::vector<double>> group_probs(const State& s) const {
    std::vector<std::vector<double>> out;
    out.reserve(groups->size());
    for (const auto& g : *groups) {
      DensityMatrix rot = s;
      // Measurement-basis circuits run noiselessly.
      apply_circuit(rot, g.gates, NoiseModel{});
      out.push_back(clamped(probabilities(rot)));
    }
    return out;
  }
};

template <typename Engine>
double engine_energy(const Engine& eng, const Ansatz& a, const Vec& theta,
                     long shots, Rng* rng) {
  auto s = eng.make_ref();
  for (int k = 0; k < a.n_parameters(); ++k) eng.step(s, a.steps[size_t(k)], theta[k]);
  const auto probs = eng.group_probs(s);
  double e = 0.0;
  for (size_t g = 0; g < eng.groups->size(); ++g)
    e += group_mean((*eng.groups)[g], probs[g], shots, rng);
  return e;
}

// One-parameter sweeps: the three-angle probability reconstruction gives all
// eight mesh energies from three circuit evaluations per parameter.
template <typename Engine>
Vec smo_optimize(const Engine& eng, const Ansatz& a, Vec theta, long shots,
                 int sweeps, Rng* rng) {
  const auto mesh = smo_mesh();
  const int n = a.n_parameters();
  for (int sw = 0; sw < sweeps; ++sw) {
    auto prefix = eng.make_ref();
    for (int k = 0; k < n; ++k) {
      const double ts[3] = {0.0, kQuarter, -kQuarter};
      std::array<std::vector<std::vector<double>>, 3> pp;
      for (int t = 0; t < 3; ++t) {
        auto s = prefix;
        eng.step(s, a.steps[size_t(k)], ts[t]);
        for (int j = k + 1; j < n; ++j) eng.step(s, a.steps[size_t(j)], theta[j]);
        pp[size_t(t)] = eng.group_probs(s);
      }
      std::array<double, kSmoMeshPoints> energies{};
      for (size_t g = 0; g < eng.groups->size(); ++g) {
        const SinusoidProbs sp =
            fit_sinusoid_probs(pp[0][g], pp[1][g], pp[2][g]);
        for (int jm = 0; jm < kSmoMeshPoints; ++jm)
          energies[size_t(jm)] +=
              group_mean((*eng.groups)[g], sp.at(mesh[size_t(jm)]), shots, rng);
      }
      theta[k] = smo_choose(smo_fit(energies), theta[k]);
      eng.step(prefix, a.steps[size_t(k)], theta[k]);
    }
  }
  return theta;
}

// Period-pi single-string steps, the premise of the sinusoidal optimizer and
// of the pi/4 parameter-shift rule.
bool sinusoidal_steps(const Ansatz& a) {
  for (const auto& st : a.steps) {
    if (st.keys.size() != 1) return false;
    if (std::abs(std::abs(st.weights[0]) - 1.0) > 1e-12) return false;
  }
  return true;
}

struct Problem {
  Encoding enc;
  PauliSum h;
  StateVec ref{0};
  GroundState exact;
};

Problem make_problem(const ImpurityModel& m, Frame frame, RefKind ref_kind) {
  Problem p;
  p.enc = m.encoding();
  if (frame == Frame::molecular) {
    const HartreeFock hf = restricted_hf(m);
    p.h = encode(mo_hamiltonian(m, hf.C), p.enc);
    p.h.simplify();
    p.ref = StateVec(p.enc.n_qubits(), hf_reference_index_mo(m, p.enc));
  } else {
    p.h = qubit_hamiltonian(m, p.enc);
    p.ref = StateVec(p.enc.n_qubits(), reference_state(ref_kind, m, p.enc));
  }
  p.exact = ground_state(p.h);
  return p;
}

std::string mode_name(ExecutionMode::Kind k) {
  switch (k) {
    case ExecutionMode::Kind::statevector: return "statevector";
    case ExecutionMode::Kind::shots: return "shots";
    default: return "noisy";
  }
}

}  // namespace

std::vector<double> SinusoidProbs::at(double t) const {
  const double c = std::cos(2.0 * t), s = std::sin(2.0 * t);
  std::vector<double> p(alpha.size());
  for (size_t i = 0; i < p.size(); ++i)
    p[i] = std::max(0.0, alpha[i] + beta[i] * c + gamma[i] * s);
  return p;
}

SinusoidProbs fit_sinusoid_probs(const std::vector<double>& p0,
                                 const std::vector<double>& p_plus,
                                 const std::vector<double>& p_minus) {
  if (p0.size() != p_plus.size() || p0.size() != p_minus.size())
    throw std::invalid_argument("probability vectors differ in size");
  SinusoidProbs sp;
  sp.alpha.resize(p0.size());
  sp.beta.resize(p0.size());
  sp.gamma.resize(p0.size());
  for (size_t i = 0; i < p0.size(); ++i) {
    sp.alpha[i] = 0.5 * (p_plus[i] + p_minus[i]);
    sp.gamma[i] = 0.5 * (p_plus[i] - p_minus[i]);
    sp.beta[i] = p0[i] - sp.alpha[i];
  }
  return sp;
}

std::vector<double> screen(const StateVec& psi, const PauliSum& h,
                           const OperatorPool& pool, ExecPolicy pol) {
  StateVec hpsi(psi.n);
  apply_sum_state(h, psi, hpsi, pol);
  std::vector<double> scores(pool.elements.size());
  for (size_t i = 0; i < pool.elements.size(); ++i)
    scores[i] = 2.0 * pauli_matrix_element(hpsi, pool.elements[i], psi, pol).imag();
  return scores;
}

std::vector<double> screen_sampled(const StateVec& psi,
                                   const std::vector<MeasurementGroup>& groups,
                                   const Encoding& enc, const OperatorPool& pool,
                                   long shots, Rng& rng) {
  const auto ctx = make_ctx(groups, enc);
  std::vector<double> scores;
  scores.reserve(pool.elements.size());
  for (const auto& p : pool.elements) {
    double e[2] = {0.0, 0.0};
    for (int side = 0; side < 2; ++side) {
      StateVec s = psi;
      apply_pauli_rotation(s, p, side == 0 ? kQuarter : -kQuarter);
      for (const auto& g : ctx) {
        StateVec rot = s;
        apply_circuit(rot, g.gates);
        e[side] += group_mean(g, clamped(probabilities(rot)), shots, &rng);
      }
    }
    scores.push_back(e[0] - e[1]);
  }
  return scores;
}

std::vector<double> screen_sampled(const DensityMatrix& rho, const NoiseModel& noise,
                                   const std::vector<MeasurementGroup>& groups,
                                   const Encoding& enc, const OperatorPool& pool,
                                   long shots, Rng& rng) {
  const auto ctx = make_ctx(groups, enc);
  std::vector<double> scores;
  scores.reserve(pool.elements.size());
  for (const auto& p : pool.elements) {
    double e[2] = {0.0, 0.0};
    for (int side = 0; side < 2; ++side) {
      DensityMatrix s = rho;
      apply_circuit(s, compile_pauli_rotation(p, side == 0 ? kQuarter : -kQuarter,
                                              enc.n_qubits()),
                    noise);
      for (const auto& g : ctx) {
        DensityMatrix rot = s;
        apply_circuit(rot, g.gates, NoiseModel{});
        e[side] += group_mean(g, clamped(probabilities(rot)), shots, &rng);
      }
    }
    scores.push_back(e[0] - e[1]);
  }
  return scores;
}

RunRecord adapt_vqe(const ImpurityModel& m, const AdaptConfig& cfg,
                    const ExecutionMode& mode, uint64_t seed) {
  if (cfg.grad_tolerance <= 0.0)
    throw std::invalid_argument("grad_tolerance must be positive");
  if (cfg.pool.elements.empty()) throw std::invalid_argument("empty operator pool");
  const bool sampled = mode.kind != ExecutionMode::Kind::statevector;
  if (sampled && cfg.frame == Frame::molecular)
    throw std::invalid_argument("sampled execution runs in the atomic frame");
  if (sampled && cfg.optimizer == OptimizerKind::bfgs)
    throw std::invalid_argument("bfgs needs exact gradients; use smo in sampled modes");

  Problem pr = make_problem(m, cfg.frame, cfg.reference);
  if (cfg.pool.n_qubits != pr.enc.n_qubits())
    throw std::invalid_argument("pool register size mismatch");

  std::vector<MeasurementGroup> df;
  std::vector<GroupCtx> ctx;
  if (sampled) {
    df = double_factorize(m);
    ctx = make_ctx(df, pr.enc);
  }

  Rng root(seed);
  Rng rng_screen = root.child("screen");
  Rng rng_opt = root.child("optimize");
  Rng rng_energy = root.child("energy");
  Rng rng_tie = root.child("tiebreak");

  const SvEngine sv_eng{&pr.ref, &ctx};
  const DmEngine dm_eng{&pr.ref, &ctx, mode.noise, pr.enc.n_qubits()};

  RunRecord rec;
  rec.mode = mode_name(mode.kind);
  rec.seed = seed;
  rec.exact_energy = pr.exact.energy;
  rec.reference_energy = expectation(pr.h, pr.ref);
  rec.ansatz = Ansatz{pr.enc.n_qubits(), {}};

  Ansatz& a = rec.ansatz;
  Vec theta(0);

  while (true) {
    std::vector<double> scores;
    if (mode.kind == ExecutionMode::Kind::noisy) {
      auto rho = dm_eng.make_ref();
      for (int k = 0; k < a.n_parameters(); ++k)
        dm_eng.step(rho, a.steps[size_t(k)], theta[k]);
      scores = screen_sampled(rho, mode.noise, df, pr.enc, cfg.pool,
                              cfg.screening_shots, rng_screen);
    } else {
      const StateVec psi = ansatz_state(a, theta, pr.ref);
      scores = mode.kind == ExecutionMode::Kind::statevector
                   ? screen(psi, pr.h, cfg.pool)
                   : screen_sampled(psi, df, pr.enc, cfg.pool,
                                    cfg.screening_shots, rng_screen);
    }

    double gmax = 0.0;
    for (double s : scores) gmax = std::max(gmax, std::abs(s));
    if (gmax < cfg.grad_tolerance) {
      rec.converged = true;
      rec.final_grad = gmax;
      break;
    }
    if (a.n_parameters() >= cfg.max_parameters) {
      rec.final_grad = gmax;
      break;
    }

    std::vector<size_t> near;
    for (size_t i = 0; i < scores.size(); ++i)
      if (std::abs(scores[i]) > gmax - 1e-9) near.push_back(i);
    // Pool elements are sorted, so the first near-maximal index is the
    // lexicographically smallest string.
    const size_t pick = cfg.tie_break == TieBreak::lexicographic
                            ? near.front()
                            : near[rng_tie.below(near.size())];

    a.steps.push_back(pauli_step(cfg.pool.elements[pick]));
    theta.conservativeResize(theta.size() + 1);
    theta[theta.size() - 1] = 0.0;

    AdaptIteration it;
    it.generator = cfg.pool.elements[pick];
    it.gmax = gmax;

    if (cfg.optimizer == OptimizerKind::bfgs) {
      ObjectiveFn fg = [&](const Vec& x, Vec* grad) {
        if (grad != nullptr) return ansatz_energy_gradient(pr.h, a, x, pr.ref, *grad);
        return ansatz_energy(pr.h, a, x, pr.ref);
      };
      const BfgsResult res = bfgs_minimize(fg, theta, cfg.bfgs);
      if (!std::isfinite(res.f)) {
        rec.optimizer_failed = true;
      } else {
        theta = res.x;
      }
    } else if (cfg.optimizer == OptimizerKind::smo) {
      if (mode.kind == ExecutionMode::Kind::statevector) {
        // Exact sweeps straight on the energy functional.
        for (int sw = 0; sw < cfg.smo_sweeps; ++sw)
          theta = smo_sweep(
              [&](const Vec& x) { return ansatz_energy(pr.h, a, x, pr.ref); }, theta);
      } else if (mode.kind == ExecutionMode::Kind::noisy) {
        theta = smo_optimize(dm_eng, a, theta, mode.shots, cfg.smo_sweeps, &rng_opt);
      } else {
        theta = smo_optimize(sv_eng, a, theta, mode.shots, cfg.smo_sweeps, &rng_opt);
      }
    } else {
      auto grad_fn = [&](const Vec& x) {
        Vec g(x.size());
        if (mode.kind == ExecutionMode::Kind::statevector) {
          ansatz_energy_gradient(pr.h, a, x, pr.ref, g);
          return g;
        }
        for (int j = 0; j < x.size(); ++j) {
          Vec xp = x, xm = x;
          xp[j] += kQuarter;
          xm[j] -= kQuarter;
          if (mode.kind == ExecutionMode::Kind::noisy)
            g[j] = engine_energy(dm_eng, a, xp, mode.shots, &rng_opt) -
                   engine_energy(dm_eng, a, xm, mode.shots, &rng_opt);
          else
            g[j] = engine_energy(sv_eng, a, xp, mode.shots, &rng_opt) -
                   engine_energy(sv_eng, a, xm, mode.shots, &rng_opt);
        }
        return g;
      };
      theta = adadelta_run(grad_fn, theta, cfg.adadelta);
    }

    const StateVec psi_sv = ansatz_state(a, theta, pr.ref);
    it.theta = theta;
    it.energy_sv = expectation(pr.h, psi_sv);
    it.fidelity = fidelity(psi_sv.amp, pr.exact.vec);
    it.cnots = a.cnot_count();
    switch (mode.kind) {
      case ExecutionMode::Kind::statevector:
        it.energy = it.energy_sv;
        break;
      case ExecutionMode::Kind::shots:
        it.energy = engine_energy(sv_eng, a, theta, mode.shots, &rng_energy);
        break;
      default:
        it.energy = engine_energy(dm_eng, a, theta, mode.shots, &rng_energy);
        break;
    }
    rec.iterations.push_back(std::move(it));
    if (rec.optimizer_failed) {
      rec.final_grad = gmax;
      break;
    }
  }

  rec.theta = theta;
  return rec;
}

FixedRun vqe_fixed(const PauliSum& h, const Ansatz& a, const Eigen::VectorXd& theta0,
                   const StateVec& ref, const ImpurityModel& m,
                   OptimizerKind opt, const ExecutionMode& mode, uint64_t seed,
                   const BfgsOptions& bfgs, int smo_sweeps,
                   const AdadeltaOptions& adadelta) {
  const bool sampled = mode.kind != ExecutionMode::Kind::statevector;
  if (sampled && opt == OptimizerKind::bfgs)
    throw std::invalid_argument("bfgs needs exact gradients; use smo in sampled modes");
  const bool needs_sinusoid =
      opt == OptimizerKind::smo || (sampled && opt == OptimizerKind::adadelta);
  if (needs_sinusoid && !sinusoidal_steps(a))
    throw std::invalid_argument(
        "sinusoidal optimization needs unit-weight single-string steps");

  Rng root(seed);
  Rng rng_opt = root.child("optimize");
  Rng rng_energy = root.child("energy");

  std::vector<GroupCtx> ctx;
  Encoding enc = m.encoding();
  if (sampled) ctx = make_ctx(double_factorize(m), enc);
  const SvEngine sv_eng{&ref, &ctx};
  const DmEngine dm_eng{&ref, &ctx, mode.noise, ref.n};

  FixedRun out;
  Vec theta = theta0;

  if (opt == OptimizerKind::bfgs) {
    ObjectiveFn fg = [&](const Vec& x, Vec* grad) {
      if (grad != nullptr) return ansatz_energy_gradient(h, a, x, ref, *grad);
      return ansatz_energy(h, a, x, ref);
    };
    const BfgsResult res = bfgs_minimize(fg, theta, bfgs);
    theta = res.x;
    out.converged = res.converged;
    out.iterations = res.iterations;
  } else if (opt == OptimizerKind::smo) {
    if (!sampled) {
      for (int sw = 0; sw < smo_sweeps; ++sw)
        theta = smo_sweep([&](const Vec& x) { return ansatz_energy(h, a, x, ref); },
                          theta);
    } else if (mode.kind == ExecutionMode::Kind::noisy) {
      theta = smo_optimize(dm_eng, a, theta, mode.shots, smo_sweeps, &rng_opt);
    } else {
      theta = smo_optimize(sv_eng, a, theta, mode.shots, smo_sweeps, &rng_opt);
    }
    out.converged = true;
    out.iterations = smo_sweeps;
  } else {
    auto grad_fn = [&](const Vec& x) {
      Vec g(x.size());
      if (!sampled) {
        ansatz_energy_gradient(h, a, x, ref, g);
        return g;
      }
      for (int j = 0; j < x.size(); ++j) {
        Vec xp = x, xm = x;
        xp[j] += kQuarter;
        xm[j] -= kQuarter;
        if (mode.kind == ExecutionMode::Kind::noisy)
          g[j] = engine_energy(dm_eng, a, xp, mode.shots, &rng_opt) -
                 engine_energy(dm_eng, a, xm, mode.shots, &rng_opt);
        else
          g[j] = engine_energy(sv_eng, a, xp, mode.shots, &rng_opt) -
                 engine_energy(sv_eng, a, xm, mode.shots, &rng_opt);
      }
      return g;
    };
    theta = adadelta_run(grad_fn, theta, adadelta);
    out.converged = true;
    out.iterations = adadelta.steps;
  }

  const GroundState gs = ground_state(h);
  const StateVec psi = ansatz_state(a, theta, ref);
  out.theta = theta;
  out.energy_sv = expectation(h, psi);
  out.fidelity = fidelity(psi.amp, gs.vec);
  out.exact_energy = gs.energy;
  out.cnots = a.cnot_count();
  switch (mode.kind) {
    case ExecutionMode::Kind::statevector:
      out.energy = out.energy_sv;
      break;
    case ExecutionMode::Kind::shots:
      out.energy = engine_energy(sv_eng, a, theta, mode.shots, &rng_energy);
      break;
    default:
      out.energy = engine_energy(dm_eng, a, theta, mode.shots, &rng_energy);
      break;
  }
  return out;
}

OperatorPool mcp_pool_certified(const ImpurityModel& m, double tol, int max_parameters) {
  const Encoding enc = m.encoding();
  const OperatorPool stripped = strip_z(pool_hc(qubit_hamiltonian(m, enc)));
  const auto certify = [&](const std::vector<PauliKey>& keys) {
    AdaptConfig cfg;
    cfg.pool = OperatorPool{"candidate", enc.n_qubits(), keys};
    cfg.max_parameters = max_parameters;
    const RunRecord rec = adapt_vqe(m, cfg, ExecutionMode{});
    const double e = rec.iterations.empty() ? rec.reference_energy
                                            : rec.iterations.back().energy_sv;
    return std::abs(e - rec.exact_energy) < tol;
  };
  return pool_mcp(stripped, enc.n_qubits(), certify);
}

}  // namespace qimp
