#pragma once
#include <bit>
#include <compare>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace qimp {

using cx = std::complex<double>;

// Pauli string on up to 64 qubits as a symplectic mask pair. Bit q of x/z set
// means an X/Z factor on qubit q; both set means Y. The represented operator
// is i^{|x&z|} X^x Z^z, i.e. the literal tensor product of I/X/Y/Z letters.
struct PauliKey {
  uint64_t x = 0, z = 0;
  friend auto operator<=>(const PauliKey&, const PauliKey&) = default;
};

inline int popcount(uint64_t v) { return std::popcount(v); }

// Number of non-identity letters.
inline int weight(PauliKey k) { return popcount(k.x | k.z); }

// Number of Y letters. Odd-Y strings generate real rotations exp(-i theta P).
inline int count_y(PauliKey k) { return popcount(k.x & k.z); }

// True iff the strings commute (symplectic form even).
inline bool commutes(PauliKey a, PauliKey b) {
  return ((popcount(a.x & b.z) + popcount(a.z & b.x)) & 1) == 0;
}

inline cx ipow(int k) {
  switch (k & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// P(a) * P(b) = phase * P(a^b)
inline std::pair<PauliKey, cx> multiply(PauliKey a, PauliKey b) {
  PauliKey c{a.x ^ b.x, a.z ^ b.z};
  int k = popcount(a.x & a.z) + popcount(b.x & b.z) - popcount(c.x & c.z);
  cx ph = ipow(((k % 4) + 4) % 4);
  if (popcount(a.z & b.x) & 1) ph = -ph;
  return {c, ph};
}

// Rendering: leftmost character is the highest qubit index.
std::string to_string(PauliKey k, int n_qubits);
// Inverse of to_string; the string length fixes the qubit count.
PauliKey parse_pauli(std::string_view s);

// Sum of Pauli terms with complex coefficients, unique sorted keys.
class PauliSum {
 public:
  PauliSum() = default;
  explicit PauliSum(int n_qubits) : n_(n_qubits) {}

  int n_qubits() const { return n_; }
  const std::map<PauliKey, cx>& terms() const { return terms_; }
  std::map<PauliKey, cx>& terms() { return terms_; }
  size_t size() const { return terms_.size(); }

  void add(PauliKey k, cx c) { terms_[k] += c; }
  cx coeff(PauliKey k) const {
    auto it = terms_.find(k);
    return it == terms_.end() ? cx{0.0, 0.0} : it->second;
  }
  cx constant() const { return coeff(PauliKey{}); }

  // Drops terms with |coeff| <= tol. Returns *this.
  PauliSum& simplify(double tol = 1e-12);

  PauliSum& operator+=(const PauliSum& o);
  PauliSum& operator-=(const PauliSum& o);
  PauliSum& operator*=(cx s);
  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
  friend PauliSum operator*(PauliSum a, cx s) { return a *= s; }

  PauliSum product(const PauliSum& o) const;

  bool is_hermitian(double tol = 1e-12) const;
  // True iff every term is a Z-mask (diagonal in the computational basis).
  bool is_diagonal() const;
  double max_abs_coeff() const;

  std::string str() const;

 private:
  int n_ = 0;
  std::map<PauliKey, cx> terms_;
};

// (1/2i)[A, B] for single terms: empty sum if they commute, else -i*A*B.
PauliSum commutator_over_2i(PauliKey a, cx ca, PauliKey b, cx cb, int n_qubits);

}  // namespace qimp
