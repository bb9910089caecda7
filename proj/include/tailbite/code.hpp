#pragma once
// Circular time axis, half-open intervals (a,b], vector spans, and linear
// block codes with recomputed parity-check matrices.

#include <algorithm>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailbite/caps.hpp"
#include "tailbite/galois.hpp"

namespace tailbite {

// Half-open circular interval (a,b] on the time axis {0, ..., n-1}.
// (a,b] = [a,b] \ {a}; it wraps when a > b and is empty when a == b.
// By construction it is never the whole axis.
struct CircularInterval {
  std::size_t a = 0, b = 0, n = 1;

  CircularInterval() = default;
  CircularInterval(std::size_t a_, std::size_t b_, std::size_t n_) : a(a_), b(b_), n(n_) {
    if (n == 0 || a >= n || b >= n) throw std::invalid_argument("interval endpoints out of range");
  }

  bool empty() const { return a == b; }
  bool linear() const { return a <= b; }  // equivalently: 0 is not a member

  bool contains(std::size_t j) const {
    if (a == b) return false;
    if (a < b) return j > a && j <= b;
    return j > a || j <= b;  // wraps past n-1
  }
  bool closed_contains(std::size_t j) const {  // membership in [a,b]
    if (a <= b) return j >= a && j <= b;
    return j >= a || j <= b;
  }

  // members in cyclic order a+1, a+2, ..., b
  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    if (a == b) return out;
    std::size_t j = (a + 1) % n;
    while (true) {
      out.push_back(j);
      if (j == b) break;
      j = (j + 1) % n;
    }
    return out;
  }
  std::size_t length() const { return (b + n - a) % n; }  // member count

  // I \ (a,b] = (b,a]; undefined for the empty interval.
  CircularInterval complement() const {
    if (a == b) throw std::invalid_argument("complement of an empty interval is the whole axis");
    return CircularInterval(b, a, n);
  }

  friend bool operator==(const CircularInterval& x, const CircularInterval& y) {
    return x.a == y.a && x.b == y.b && x.n == y.n;
  }
  friend bool operator!=(const CircularInterval& x, const CircularInterval& y) { return !(x == y); }
  friend bool operator<(const CircularInterval& x, const CircularInterval& y) {
    return x.a != y.a ? x.a < y.a : x.b < y.b;
  }

  std::string to_string() const {
    std::ostringstream os;
    os << '(' << a << ',' << b << ']';
    return os.str();
  }
};

inline std::vector<std::size_t> interval_members(const CircularInterval& iv) {
  return iv.members();
}
inline CircularInterval interval_complement(const CircularInterval& iv) {
  return iv.complement();
}

// All spans of a nonzero vector: intervals (a,b] with c_a != 0, c_b != 0 and
// c_j = 0 outside [a,b].  Ordered by (a,b).  Exactly one of them is linear.
inline std::vector<CircularInterval> spans_of(const FpVector& c) {
  if (c.is_zero()) throw std::invalid_argument("the zero vector has no span");
  std::size_t n = c.size();
  std::vector<CircularInterval> out;
  for (std::size_t a = 0; a < n; ++a) {
    if (c[a] == 0) continue;
    for (std::size_t b = 0; b < n; ++b) {
      if (c[b] == 0) continue;
      CircularInterval iv(a, b, n);
      bool ok = true;
      for (std::size_t j = 0; j < n && ok; ++j)
        if (!iv.closed_contains(j) && c[j] != 0) ok = false;
      if (ok) out.push_back(iv);
    }
  }
  return out;
}

// The unique linear span (first nonzero position, last nonzero position].
inline CircularInterval linear_span_of(const FpVector& c) {
  if (c.is_zero()) throw std::invalid_argument("the zero vector has no span");
  std::size_t first = c.size(), last = 0;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (c[j] != 0) {
      if (first == c.size()) first = j;
      last = j;
    }
  return CircularInterval(first, last, c.size());
}

// sigma(c_0, ..., c_{n-1}) = (c_1, ..., c_{n-1}, c_0), applied j times.
// A span (a,b] of c becomes the span (a-j, b-j] of the shifted vector.
inline FpVector cyclic_shift(const FpVector& v, std::size_t j = 1) {
  std::size_t n = v.size();
  if (n == 0) return v;
  j %= n;
  std::vector<int> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = v[(i + j) % n];
  return FpVector(v.field(), std::move(out));
}

inline CircularInterval shift_interval(const CircularInterval& iv, std::size_t j = 1) {
  j %= iv.n;
  return CircularInterval((iv.a + iv.n - j) % iv.n, (iv.b + iv.n - j) % iv.n, iv.n);
}

// Parity-check matrix: the canonical (RREF) basis of the dual code.
// Requires a full-rank generator.
inline FpMatrix parity_check(const FpMatrix& G) {
  if (rank(G) != G.rows()) throw std::invalid_argument("rank-deficient generator matrix");
  // {x : G x^T = 0} as row vectors = left kernel of G^T.
  return left_kernel(G.transpose());
}

class LinearCode {
 public:
  static LinearCode from_generator(const FpMatrix& G) { return LinearCode(G); }

  const PrimeField& field() const { return G_.field(); }
  std::size_t length() const { return G_.cols(); }
  std::size_t dimension() const { return G_.rows(); }
  const FpMatrix& generator() const { return G_; }
  const FpMatrix& parity() const { return H_; }

  bool full_support() const {
    for (std::size_t c = 0; c < G_.cols(); ++c)
      if (G_.col(c).is_zero()) return false;
    return true;
  }

  LinearCode dual() const { return LinearCode::from_generator(H_); }

  LinearCode shifted(std::size_t j = 1) const {
    std::vector<FpVector> rows;
    rows.reserve(G_.rows());
    for (std::size_t r = 0; r < G_.rows(); ++r) rows.push_back(cyclic_shift(G_.row(r), j));
    return LinearCode::from_generator(FpMatrix::from_rows(field(), rows, length()));
  }

  bool contains(const FpVector& v) const {
    if (v.size() != length()) throw std::invalid_argument("word length mismatch");
    return (v * H_.transpose()).is_zero();
  }

  // All q^k codewords in lexicographic order.
  std::vector<FpVector> codewords(const Caps& caps = Caps::defaults()) const {
    std::size_t k = dimension();
    int q = field().modulus();
    double est = 1;
    for (std::size_t i = 0; i < k; ++i) {
      est *= q;
      if (est > double(caps.enumeration))
        throw CapExceeded("codeword enumeration exceeds cap (q^k too large)");
    }
    std::vector<FpVector> out;
    FpVector alpha = FpVector::zeros(field(), k);
    while (true) {
      out.push_back(alpha * G_);
      std::size_t pos = k;
      while (pos > 0) {
        --pos;
        if (alpha[pos] + 1 < q) {
          alpha.set(pos, alpha[pos] + 1);
          break;
        }
        alpha.set(pos, 0);
        if (pos == 0) {
          std::sort(out.begin(), out.end(), lex_less);
          return out;
        }
      }
      if (k == 0) {  // zero code: only the zero word
        std::sort(out.begin(), out.end(), lex_less);
        return out;
      }
    }
  }

 private:
  explicit LinearCode(const FpMatrix& G) : G_(G), H_(parity_check(G)) {}
  FpMatrix G_;
  FpMatrix H_;
};

// Nonzero codewords whose span set contains iv, in lexicographic order.
inline std::vector<FpVector> codewords_with_span(const LinearCode& C, const CircularInterval& iv,
                                                 const Caps& caps = Caps::defaults()) {
  if (iv.n != C.length()) throw std::invalid_argument("interval axis length mismatch");
  std::vector<FpVector> out;
  for (const FpVector& cw : C.codewords(caps)) {
    if (cw.is_zero()) continue;
    std::vector<CircularInterval> sp = spans_of(cw);
    if (std::find(sp.begin(), sp.end(), iv) != sp.end()) out.push_back(cw);
  }
  return out;
}

}  // namespace tailbite
