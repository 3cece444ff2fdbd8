#include "qimp/pauli.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace qimp {

std::string to_string(PauliKey k, int n_qubits) {
  static const char letters[] = "IXZY";
  std::string s(n_qubits, 'I');
  for (int q = 0; q < n_qubits; ++q) {
    int code = int((k.x >> q) & 1) + 2 * int((k.z >> q) & 1);
    s[n_qubits - 1 - q] = letters[code];
  }
  return s;
}

PauliKey parse_pauli(std::string_view s) {
  PauliKey k;
  int n = int(s.size());
  for (int i = 0; i < n; ++i) {
    uint64_t bit = 1ULL << (n - 1 - i);
    switch (s[i]) {
      case 'I': break;
      case 'X': k.x |= bit; break;
      case 'Z': k.z |= bit; break;
      case 'Y': k.x |= bit; k.z |= bit; break;
      default: throw std::invalid_argument("bad Pauli letter in '" + std::string(s) + "'");
    }
  }
  return k;
}

PauliSum& PauliSum::simplify(double tol) {
  for (auto it = terms_.begin(); it != terms_.end();) {
    if (std::abs(it->second) <= tol)
      it = terms_.erase(it);
    else
      ++it;
  }
  return *this;
}

PauliSum& PauliSum::operator+=(const PauliSum& o) {
  for (const auto& [k, c] : o.terms_) terms_[k] += c;
  return *this;
}

PauliSum& PauliSum::operator-=(const PauliSum& o) {
  for (const auto& [k, c] : o.terms_) terms_[k] -= c;
  return *this;
}

PauliSum& PauliSum::operator*=(cx s) {
  for (auto& [k, c] : terms_) c *= s;
  return *this;
}

PauliSum PauliSum::product(const PauliSum& o) const {
  PauliSum r(n_);
  for (const auto& [ka, ca] : terms_)
    for (const auto& [kb, cb] : o.terms_) {
      auto [k, ph] = multiply(ka, kb);
      r.terms_[k] += ca * cb * ph;
    }
  return r.simplify();
}

bool PauliSum::is_hermitian(double tol) const {
  for (const auto& [k, c] : terms_)
    if (std::abs(c.imag()) > tol) return false;
  return true;
}

bool PauliSum::is_diagonal() const {
  for (const auto& [k, c] : terms_)
    if (k.x != 0) return false;
  return true;
}

double PauliSum::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [k, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

std::string PauliSum::str() const {
  std::string out;
  char buf[64];
  for (const auto& [k, c] : terms_) {
    std::snprintf(buf, sizeof buf, "%+.6g%+.6gi*", c.real(), c.imag());
    out += buf;
    out += to_string(k, n_);
    out += ' ';
  }
  if (out.empty()) out = "0";
  return out;
}

PauliSum commutator_over_2i(PauliKey a, cx ca, PauliKey b, cx cb, int n_qubits) {
  PauliSum r(n_qubits);
  if (commutes(a, b)) return r;
  auto [k, ph] = multiply(a, b);
  // anticommuting strings: [A,B] = 2AB, so [A,B]/2i = -i AB
  r.add(k, cx{0.0, -1.0} * ph * ca * cb);
  return r;
}

}  // namespace qimp
