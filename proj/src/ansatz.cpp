#include "qimp/ansatz.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

#include "qimp/fermion.hpp"

namespace qimp {

namespace {

uint64_t full_mask(int n_qubits) {
  return n_qubits >= 64 ? ~uint64_t(0) : (uint64_t(1) << n_qubits) - 1;
}

// Real-coefficient step from a Hermitian sum; identity terms are dropped
// (they contribute only a global phase to the rotation).
AnsatzStep step_from_sum(const PauliSum& p, double tol = 1e-12) {
  AnsatzStep st;
  for (const auto& [k, c] : p.terms()) {
    if (weight(k) == 0) continue;
    if (std::abs(c.imag()) > 1e-9)
      throw std::logic_error("rotation generator has a complex coefficient: " +
                             p.str());
    if (std::abs(c.real()) <= tol) continue;
    st.keys.push_back(k);
    st.weights.push_back(c.real());
  }
  return st;
}

}  // namespace

AnsatzStep pauli_step(PauliKey p) { return AnsatzStep{{p}, {1.0}}; }

long Ansatz::cnot_count() const {
  long total = 0;
  for (const auto& st : steps)
    for (PauliKey k : st.keys) total += std::max(0, 2 * (weight(k) - 1));
  return total;
}

void Ansatz::check_steps() const {
  for (const auto& st : steps) {
    if (st.keys.empty() || st.keys.size() != st.weights.size())
      throw std::logic_error("malformed ansatz step");
    for (size_t i = 0; i < st.keys.size(); ++i) {
      if (weight(st.keys[i]) == 0)
        throw std::logic_error("identity key in ansatz step");
      for (size_t j = i + 1; j < st.keys.size(); ++j)
        if (!commutes(st.keys[i], st.keys[j]))
          throw std::logic_error("non-commuting strings share an ansatz step");
    }
  }
}

void Ansatz::apply(const Eigen::VectorXd& theta, StateVec& s, ExecPolicy pol) const {
  if (theta.size() != long(steps.size()))
    throw std::invalid_argument("parameter count mismatch");
  if (s.n != n_qubits) throw std::invalid_argument("state size mismatch");
  for (size_t k = 0; k < steps.size(); ++k) {
    const AnsatzStep& st = steps[k];
    for (size_t j = 0; j < st.keys.size(); ++j)
      apply_pauli_rotation(s, st.keys[j], theta[k] * st.weights[j], pol);
  }
}

std::vector<Gate> Ansatz::compile(const Eigen::VectorXd& theta) const {
  if (theta.size() != long(steps.size()))
    throw std::invalid_argument("parameter count mismatch");
  std::vector<Gate> out;
  for (size_t k = 0; k < steps.size(); ++k) {
    const AnsatzStep& st = steps[k];
    for (size_t j = 0; j < st.keys.size(); ++j) {
      auto part = compile_pauli_rotation(st.keys[j], theta[k] * st.weights[j], n_qubits);
      out.insert(out.end(), part.begin(), part.end());
    }
  }
  return out;
}

StateVec ansatz_state(const Ansatz& a, const Eigen::VectorXd& theta,
                      const StateVec& ref, ExecPolicy pol) {
  StateVec s = ref;
  a.apply(theta, s, pol);
  return s;
}

double ansatz_energy(const PauliSum& h, const Ansatz& a,
                     const Eigen::VectorXd& theta, const StateVec& ref,
                     ExecPolicy pol) {
  StateVec s = ansatz_state(a, theta, ref, pol);
  return expectation(h, s, pol);
}

double ansatz_energy_gradient(const PauliSum& h, const Ansatz& a,
                              const Eigen::VectorXd& theta, const StateVec& ref,
                              Eigen::VectorXd& grad, ExecPolicy pol) {
  const int n = a.n_parameters();
  grad.resize(n);
  StateVec f = ansatz_state(a, theta, ref, pol);
  StateVec b(a.n_qubits);
  apply_sum_state(h, f, b, pol);
  const double energy = inner(f, b).real();
  // Backward sweep: at step k, f = U_k..U_0|ref> and b = U_{k+1..}^+ H|psi>,
  // so dE/dtheta_k = 2 Re <b|-i A_k|f> = 2 Im <b|A_k|f>.
  for (int k = n - 1; k >= 0; --k) {
    const AnsatzStep& st = a.steps[k];
    double g = 0.0;
    for (size_t j = 0; j < st.keys.size(); ++j)
      g += st.weights[j] * pauli_matrix_element(b, st.keys[j], f, pol).imag();
    grad[k] = 2.0 * g;
    for (size_t j = 0; j < st.keys.size(); ++j) {
      const double ang = -theta[k] * st.weights[j];
      apply_pauli_rotation(f, st.keys[j], ang, pol);
      apply_pauli_rotation(b, st.keys[j], ang, pol);
    }
  }
  return energy;
}

OperatorPool pool_hc(const PauliSum& h) {
  for (const auto& [k, c] : h.terms())
    if (count_y(k) & 1)
      throw std::invalid_argument("commutator pool needs a real operator");
  std::vector<PauliKey> keys;
  for (const auto& [k, c] : h.terms())
    if (weight(k) > 0) keys.push_back(k);
  std::set<PauliKey> out;
  for (size_t i = 0; i < keys.size(); ++i)
    for (size_t j = i + 1; j < keys.size(); ++j) {
      if (commutes(keys[i], keys[j])) continue;
      auto [prod, ph] = multiply(keys[i], keys[j]);
      // (1/2i)[P,P'] = -i P P'; for real inputs the value is +-prod
      if (std::abs(ph.real()) > 1e-12 || !(count_y(prod) & 1))
        throw std::logic_error("even-Y commutator of real terms");
      out.insert(prod);
    }
  return OperatorPool{"hc", h.n_qubits(),
                      std::vector<PauliKey>(out.begin(), out.end())};
}

OperatorPool strip_z(const OperatorPool& pool) {
  std::set<PauliKey> out;
  for (PauliKey k : pool.elements) {
    PauliKey s{k.x, k.z & k.x};
    if (weight(s) > 0) out.insert(s);
  }
  return OperatorPool{pool.name + "_stripped", pool.n_qubits,
                      std::vector<PauliKey>(out.begin(), out.end())};
}

OperatorPool pool_mcp(const OperatorPool& stripped, int n_qubits,
                      const std::function<bool(const std::vector<PauliKey>&)>& certify) {
  std::vector<PauliKey> cand;
  for (PauliKey k : stripped.elements)
    if (weight(k) == 2) cand.push_back(k);
  const int need = 2 * (n_qubits - 1);
  const int nc = int(cand.size());
  if (nc < need)
    throw std::runtime_error("not enough weight-2 strings for a minimal pool");
  const uint64_t all = full_mask(n_qubits);
  std::vector<int> idx(need);
  for (int i = 0; i < need; ++i) idx[i] = i;
  while (true) {
    uint64_t cover = 0;
    for (int i : idx) cover |= cand[i].x | cand[i].z;
    if (cover == all) {
      std::vector<PauliKey> subset;
      subset.reserve(need);
      for (int i : idx) subset.push_back(cand[i]);
      if (certify(subset))
        return OperatorPool{"mcp", n_qubits, std::move(subset)};
    }
    int i = need - 1;
    while (i >= 0 && idx[i] == nc - need + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < need; ++j) idx[j] = idx[j - 1] + 1;
  }
  throw std::runtime_error("no weight-2 subset certified as a complete pool");
}

namespace {

Excitation make_excitation(std::vector<int> create, std::vector<int> annihilate,
                           const Encoding& enc) {
  FermionSum f;
  std::vector<std::pair<int, bool>> fw, bw;
  for (int m : create) fw.emplace_back(m, true);
  for (int m : annihilate) fw.emplace_back(m, false);
  for (auto it = annihilate.rbegin(); it != annihilate.rend(); ++it)
    bw.emplace_back(*it, true);
  for (auto it = create.rbegin(); it != create.rend(); ++it)
    bw.emplace_back(*it, false);
  // G = i(T - T+), Hermitian with real string coefficients
  f.add(cx(0.0, 1.0), std::move(fw));
  f.add(cx(0.0, -1.0), std::move(bw));
  PauliSum g = encode(f, enc);
  g.simplify();
  return Excitation{std::move(create), std::move(annihilate), step_from_sum(g)};
}

}  // namespace

std::vector<Excitation> uccsd_excitations(const ImpurityModel& m, const Encoding& enc) {
  const int ns = m.n_spatial();
  const int nocc = m.M;
  std::vector<int> occ, virt;
  for (int i = 0; i < nocc; ++i) occ.push_back(i);
  for (int i = 0; i < nocc; ++i) occ.push_back(ns + i);
  for (int a = nocc; a < ns; ++a) virt.push_back(a);
  for (int a = nocc; a < ns; ++a) virt.push_back(ns + a);
  auto spin = [ns](int mode) { return mode < ns ? 0 : 1; };

  std::vector<Excitation> out;
  for (int i : occ)
    for (int a : virt)
      if (spin(i) == spin(a)) out.push_back(make_excitation({a}, {i}, enc));
  for (size_t i1 = 0; i1 < occ.size(); ++i1)
    for (size_t i2 = i1 + 1; i2 < occ.size(); ++i2)
      for (size_t a1 = 0; a1 < virt.size(); ++a1)
        for (size_t a2 = a1 + 1; a2 < virt.size(); ++a2) {
          if (spin(occ[i1]) + spin(occ[i2]) != spin(virt[a1]) + spin(virt[a2]))
            continue;
          out.push_back(make_excitation({virt[a1], virt[a2]},
                                        {occ[i2], occ[i1]}, enc));
        }
  return out;
}

Ansatz uccsd_ansatz(const ImpurityModel& m, const Encoding& enc) {
  Ansatz a;
  a.n_qubits = enc.n_qubits();
  for (auto& e : uccsd_excitations(m, enc)) a.steps.push_back(std::move(e.step));
  a.check_steps();
  return a;
}

OperatorPool pool_uccsd(const ImpurityModel& m, const Encoding& enc) {
  std::set<PauliKey> out;
  for (const auto& e : uccsd_excitations(m, enc))
    out.insert(e.step.keys.begin(), e.step.keys.end());
  return OperatorPool{"uccsd", enc.n_qubits(),
                      std::vector<PauliKey>(out.begin(), out.end())};
}

OperatorPool pool_succspd(const ImpurityModel& m, const Encoding& enc) {
  const int ns = m.n_spatial();
  const int nocc = m.M;
  std::vector<Excitation> exc;
  auto spin_modes = [&](int spatial, int s) { return spatial + s * ns; };
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < nocc; ++i)
      for (int a = nocc; a < ns; ++a)
        exc.push_back(make_excitation({spin_modes(a, s)}, {spin_modes(i, s)}, enc));
  for (int i = 0; i < nocc; ++i)
    for (int a = nocc; a < ns; ++a)
      exc.push_back(make_excitation({spin_modes(a, 0), spin_modes(a, 1)},
                                    {spin_modes(i, 1), spin_modes(i, 0)}, enc));
  std::set<PauliKey> out;
  for (const auto& e : exc) {
    auto it = std::find_if(e.step.keys.begin(), e.step.keys.end(),
                           [](PauliKey k) { return count_y(k) & 1; });
    if (it == e.step.keys.end())
      throw std::logic_error("excitation with no odd-Y string");
    out.insert(*it);
  }
  return OperatorPool{"succspd", enc.n_qubits(),
                      std::vector<PauliKey>(out.begin(), out.end())};
}

std::vector<std::vector<PauliKey>> commuting_split(const std::vector<PauliKey>& keys) {
  std::vector<std::vector<PauliKey>> groups;
  for (PauliKey k : keys) {
    bool placed = false;
    for (auto& g : groups) {
      if (std::all_of(g.begin(), g.end(),
                      [k](PauliKey o) { return commutes(k, o); })) {
        g.push_back(k);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({k});
  }
  return groups;
}

HvaForm hva_form(const ImpurityModel& m, HvaPartition part) {
  const Encoding enc = m.encoding();
  auto frags = hamiltonian_fragments(m);
  std::vector<Fragment> sources;
  if (part == HvaPartition::merged_interaction) {
    Fragment merged{"interaction", frags[0].op};
    merged.op += frags[1].op;
    sources.push_back(std::move(merged));
    sources.push_back(std::move(frags[2]));
    sources.push_back(std::move(frags[3]));
  } else {
    sources = std::move(frags);
  }

  HvaForm form;
  form.n_qubits = enc.n_qubits();
  for (const auto& src : sources) {
    PauliSum p = encode(src.op, enc);
    p.simplify();
    std::vector<PauliKey> keys;
    for (const auto& [k, c] : p.terms())
      if (weight(k) > 0) keys.push_back(k);
    for (auto& grp : commuting_split(keys)) {
      AnsatzStep st;
      for (PauliKey k : grp) {
        st.keys.push_back(k);
        st.weights.push_back(p.coeff(k).real());
      }
      form.groups.push_back(std::move(st));
      form.labels.push_back(src.label);
    }
  }
  for (const auto& st : form.groups)
    for (PauliKey k : st.keys)
      form.cnots_per_layer += std::max(0, 2 * (weight(k) - 1));
  return form;
}

Ansatz hva_ansatz(const HvaForm& form, int layers) {
  if (layers < 1) throw std::invalid_argument("layer count must be positive");
  Ansatz a;
  a.n_qubits = form.n_qubits;
  for (int l = 0; l < layers; ++l)
    for (const auto& g : form.groups) a.steps.push_back(g);
  a.check_steps();
  return a;
}

Eigen::VectorXd hva_initial_angles(int n_parameters) {
  return Eigen::VectorXd::Constant(n_parameters, std::numbers::pi / 7.0);
}

RotationSequence parse_rotation_manifest(const std::string& text, int n_qubits) {
  RotationSequence seq;
  seq.n_qubits = n_qubits;
  std::vector<double> angles;
  bool last_has_angle = true;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (auto pos = line.find('#'); pos != std::string::npos) line.resize(pos);
    std::istringstream toks(line);
    std::string tok;
    while (toks >> tok) {
      const bool pauli_like = std::all_of(tok.begin(), tok.end(), [](char c) {
        return c == 'I' || c == 'X' || c == 'Y' || c == 'Z';
      });
      if (pauli_like) {
        if (int(tok.size()) != n_qubits)
          throw std::invalid_argument("rotation string '" + tok + "' is not " +
                                      std::to_string(n_qubits) + " letters");
        seq.keys.push_back(parse_pauli(tok));
        angles.push_back(0.0);
        last_has_angle = false;
        continue;
      }
      size_t used = 0;
      double value = 0.0;
      try {
        value = std::stod(tok, &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("bad manifest token '" + tok + "'");
      }
      if (used != tok.size())
        throw std::invalid_argument("bad manifest token '" + tok + "'");
      if (angles.empty() || last_has_angle)
        throw std::invalid_argument("angle token without a rotation string");
      angles.back() = value;
      last_has_angle = true;
    }
  }
  seq.angles.resize(long(angles.size()));
  for (size_t i = 0; i < angles.size(); ++i) seq.angles[long(i)] = angles[i];
  return seq;
}

std::string format_rotation_manifest(const RotationSequence& seq) {
  std::string out;
  char buf[64];
  for (size_t i = 0; i < seq.keys.size(); ++i) {
    std::snprintf(buf, sizeof buf, " %.17g\n", seq.angles[long(i)]);
    out += to_string(seq.keys[i], seq.n_qubits);
    out += buf;
  }
  return out;
}

Ansatz rotation_ansatz(const std::vector<PauliKey>& keys, int n_qubits) {
  Ansatz a;
  a.n_qubits = n_qubits;
  for (PauliKey k : keys) a.steps.push_back(pauli_step(k));
  a.check_steps();
  return a;
}

}  // namespace qimp
