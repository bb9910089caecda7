#pragma once
// Exact arithmetic and linear algebra over prime fields GF(p).
// Elements are least nonnegative residues; everything is integer-exact.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tailbite {

class PrimeField {
 public:
  explicit PrimeField(int p) : p_(p) {
    if (p < 2) throw std::invalid_argument("field modulus must be at least 2");
    for (int d = 2; (long long)d * d <= p; ++d)
      if (p % d == 0) throw std::invalid_argument("field modulus must be prime");
  }

  int modulus() const { return p_; }
  int reduce(long long v) const {
    int r = int(v % p_);
    return r < 0 ? r + p_ : r;
  }
  int add(int a, int b) const { int s = a + b; return s >= p_ ? s - p_ : s; }
  int sub(int a, int b) const { int s = a - b; return s < 0 ? s + p_ : s; }
  int mul(int a, int b) const { return int((long long)a * b % p_); }
  int neg(int a) const { return a == 0 ? 0 : p_ - a; }
  int inv(int a) const {
    if (a % p_ == 0) throw std::invalid_argument("inverse of zero");
    // extended Euclid
    int t = 0, nt = 1, r = p_, nr = a % p_;
    while (nr != 0) {
      int q = r / nr;
      t = std::exchange(nt, t - q * nt);
      r = std::exchange(nr, r - q * nr);
    }
    return t < 0 ? t + p_ : t;
  }
  int div(int a, int b) const { return mul(a, inv(b)); }

  friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.p_ == b.p_; }
  friend bool operator!=(const PrimeField& a, const PrimeField& b) { return a.p_ != b.p_; }

 private:
  int p_;
};

inline void require_same_field(const PrimeField& a, const PrimeField& b) {
  if (a != b) throw std::invalid_argument("mixed field moduli");
}

class FpVector {
 public:
  FpVector(PrimeField f, std::vector<int> entries) : f_(f), e_(std::move(entries)) {
    for (int& x : e_) x = f_.reduce(x);
  }
  static FpVector zeros(PrimeField f, std::size_t n) { return FpVector(f, std::vector<int>(n, 0)); }

  const PrimeField& field() const { return f_; }
  std::size_t size() const { return e_.size(); }
  int operator[](std::size_t i) const { return e_.at(i); }
  void set(std::size_t i, int v) { e_.at(i) = f_.reduce(v); }
  const std::vector<int>& entries() const { return e_; }

  bool is_zero() const {
    return std::all_of(e_.begin(), e_.end(), [](int x) { return x == 0; });
  }

  FpVector operator+(const FpVector& o) const {
    check(o);
    FpVector r = *this;
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = f_.add(r.e_[i], o.e_[i]);
    return r;
  }
  FpVector operator-(const FpVector& o) const {
    check(o);
    FpVector r = *this;
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] = f_.sub(r.e_[i], o.e_[i]);
    return r;
  }
  FpVector scaled(int c) const {
    FpVector r = *this;
    c = f_.reduce(c);
    for (int& x : r.e_) x = f_.mul(x, c);
    return r;
  }
  int dot(const FpVector& o) const {
    check(o);
    int acc = 0;
    for (std::size_t i = 0; i < e_.size(); ++i) acc = f_.add(acc, f_.mul(e_[i], o.e_[i]));
    return acc;
  }
  FpVector concat(const FpVector& o) const {
    require_same_field(f_, o.f_);
    std::vector<int> v = e_;
    v.insert(v.end(), o.e_.begin(), o.e_.end());
    return FpVector(f_, std::move(v));
  }
  FpVector slice(std::size_t from, std::size_t len) const {
    if (from + len > e_.size()) throw std::invalid_argument("slice out of range");
    return FpVector(f_, std::vector<int>(e_.begin() + from, e_.begin() + from + len));
  }

  friend bool operator==(const FpVector& a, const FpVector& b) {
    return a.f_ == b.f_ && a.e_ == b.e_;
  }
  friend bool operator!=(const FpVector& a, const FpVector& b) { return !(a == b); }

  std::string to_string() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < e_.size(); ++i) os << (i ? "," : "") << e_[i];
    os << ')';
    return os.str();
  }
  // compact form used in DOT vertex names; "e" marks the width-zero vector
  std::string digits() const {
    if (e_.empty()) return "e";
    std::ostringstream os;
    bool wide = f_.modulus() > 9;
    for (std::size_t i = 0; i < e_.size(); ++i) {
      if (wide && i) os << '_';
      os << e_[i];
    }
    return os.str();
  }

 private:
  void check(const FpVector& o) const {
    require_same_field(f_, o.f_);
    if (e_.size() != o.e_.size()) throw std::invalid_argument("vector length mismatch");
  }
  PrimeField f_;
  std::vector<int> e_;
};

// index 0 is the most significant position
inline bool lex_less(const FpVector& a, const FpVector& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

class FpMatrix {
 public:
  FpMatrix(PrimeField f, std::size_t rows, std::size_t cols)
      : f_(f), rows_(rows), cols_(cols), a_(rows * cols, 0) {}
  FpMatrix(PrimeField f, std::size_t rows, std::size_t cols, std::vector<int> entries)
      : f_(f), rows_(rows), cols_(cols), a_(std::move(entries)) {
    if (a_.size() != rows * cols) throw std::invalid_argument("entry count mismatch");
    for (int& x : a_) x = f_.reduce(x);
  }
  static FpMatrix identity(PrimeField f, std::size_t n) {
    FpMatrix m(f, n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1);
    return m;
  }
  static FpMatrix from_rows(PrimeField f, const std::vector<FpVector>& rows, std::size_t cols) {
    FpMatrix m(f, rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) throw std::invalid_argument("row width mismatch");
      require_same_field(f, rows[r].field());
      for (std::size_t c = 0; c < cols; ++c) m.set(r, c, rows[r][c]);
    }
    return m;
  }
  static FpMatrix from_rows(PrimeField f, const std::vector<std::vector<int>>& rows,
                            std::size_t cols) {
    FpMatrix m(f, rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) throw std::invalid_argument("row width mismatch");
      for (std::size_t c = 0; c < cols; ++c) m.set(r, c, rows[r][c]);
    }
    return m;
  }

  const PrimeField& field() const { return f_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  int at(std::size_t r, std::size_t c) const { return a_.at(r * cols_ + c); }
  void set(std::size_t r, std::size_t c, int v) { a_.at(r * cols_ + c) = f_.reduce(v); }

  FpVector row(std::size_t r) const {
    if (r >= rows_) throw std::invalid_argument("row index out of range");
    return FpVector(f_, std::vector<int>(a_.begin() + r * cols_, a_.begin() + (r + 1) * cols_));
  }
  FpVector col(std::size_t c) const {
    if (c >= cols_) throw std::invalid_argument("column index out of range");
    std::vector<int> v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = at(r, c);
    return FpVector(f_, std::move(v));
  }
  void set_row(std::size_t r, const FpVector& v) {
    if (v.size() != cols_) throw std::invalid_argument("row width mismatch");
    for (std::size_t c = 0; c < cols_; ++c) set(r, c, v[c]);
  }
  std::vector<FpVector> row_list() const {
    std::vector<FpVector> out;
    out.reserve(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out.push_back(row(r));
    return out;
  }

  FpMatrix transpose() const {
    FpMatrix m(f_, cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) m.set(c, r, at(r, c));
    return m;
  }
  FpMatrix operator*(const FpMatrix& o) const {
    require_same_field(f_, o.f_);
    if (cols_ != o.rows_) throw std::invalid_argument("matrix product shape mismatch");
    FpMatrix m(f_, rows_, o.cols_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < o.cols_; ++c) {
        long long acc = 0;
        for (std::size_t t = 0; t < cols_; ++t) acc += (long long)at(r, t) * o.at(t, c);
        m.set(r, c, f_.reduce(acc));
      }
    return m;
  }
  FpMatrix operator+(const FpMatrix& o) const {
    check_shape(o);
    FpMatrix m = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = f_.add(m.a_[i], o.a_[i]);
    return m;
  }
  FpMatrix operator-(const FpMatrix& o) const {
    check_shape(o);
    FpMatrix m = *this;
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = f_.sub(m.a_[i], o.a_[i]);
    return m;
  }
  FpMatrix negated() const {
    FpMatrix m = *this;
    for (int& x : m.a_) x = f_.neg(x);
    return m;
  }
  FpMatrix hstack(const FpMatrix& o) const {
    require_same_field(f_, o.f_);
    if (rows_ != o.rows_) throw std::invalid_argument("hstack row mismatch");
    FpMatrix m(f_, rows_, cols_ + o.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) m.set(r, c, at(r, c));
      for (std::size_t c = 0; c < o.cols_; ++c) m.set(r, cols_ + c, o.at(r, c));
    }
    return m;
  }
  FpMatrix vstack(const FpMatrix& o) const {
    require_same_field(f_, o.f_);
    if (cols_ != o.cols_) throw std::invalid_argument("vstack column mismatch");
    FpMatrix m(f_, rows_ + o.rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) m.set(r, c, at(r, c));
    for (std::size_t r = 0; r < o.rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) m.set(rows_ + r, c, o.at(r, c));
    return m;
  }
  bool is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](int x) { return x == 0; });
  }

  friend bool operator==(const FpMatrix& a, const FpMatrix& b) {
    return a.f_ == b.f_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }
  friend bool operator!=(const FpMatrix& a, const FpMatrix& b) { return !(a == b); }

  std::string to_string() const {
    std::ostringstream os;
    for (std::size_t r = 0; r < rows_; ++r) {
      os << '[';
      for (std::size_t c = 0; c < cols_; ++c) os << (c ? " " : "") << at(r, c);
      os << "]";
      if (r + 1 < rows_) os << '\n';
    }
    return os.str();
  }

 private:
  void check_shape(const FpMatrix& o) const {
    require_same_field(f_, o.f_);
    if (rows_ != o.rows_ || cols_ != o.cols_) throw std::invalid_argument("matrix shape mismatch");
  }
  PrimeField f_;
  std::size_t rows_, cols_;
  std::vector<int> a_;
};

inline FpVector operator*(const FpVector& v, const FpMatrix& m) {
  require_same_field(v.field(), m.field());
  if (v.size() != m.rows()) throw std::invalid_argument("vector-matrix shape mismatch");
  const PrimeField& f = v.field();
  std::vector<int> out(m.cols(), 0);
  for (std::size_t c = 0; c < m.cols(); ++c) {
    long long acc = 0;
    for (std::size_t r = 0; r < m.rows(); ++r) acc += (long long)v[r] * m.at(r, c);
    out[c] = f.reduce(acc);
  }
  return FpVector(f, std::move(out));
}

// k x 1 times 1 x w outer product; used by the BCJR recursion N_i+1 = N_i + G_i H_i.
inline FpMatrix outer(const FpVector& colv, const FpVector& roww) {
  require_same_field(colv.field(), roww.field());
  const PrimeField& f = colv.field();
  FpMatrix m(f, colv.size(), roww.size());
  for (std::size_t r = 0; r < colv.size(); ++r)
    for (std::size_t c = 0; c < roww.size(); ++c) m.set(r, c, f.mul(colv[r], roww[c]));
  return m;
}

struct RrefResult {
  FpMatrix matrix;
  std::vector<std::size_t> pivots;  // strictly increasing column indices
};

// Reduced row echelon form.  Pivot choice is deterministic: the first row (top
// to bottom) with a nonzero entry in the current column.
inline RrefResult rref(const FpMatrix& in) {
  FpMatrix m = in;
  const PrimeField& f = m.field();
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t sel = r;
    while (sel < m.rows() && m.at(sel, c) == 0) ++sel;
    if (sel == m.rows()) continue;
    if (sel != r) {
      FpVector tmp = m.row(sel);
      m.set_row(sel, m.row(r));
      m.set_row(r, tmp);
    }
    int invp = f.inv(m.at(r, c));
    m.set_row(r, m.row(r).scaled(invp));
    for (std::size_t t = 0; t < m.rows(); ++t) {
      if (t == r) continue;
      int factor = m.at(t, c);
      if (factor == 0) continue;
      m.set_row(t, m.row(t) - m.row(r).scaled(factor));
    }
    pivots.push_back(c);
    ++r;
  }
  return {std::move(m), std::move(pivots)};
}

inline std::size_t rank(const FpMatrix& m) { return rref(m).pivots.size(); }

// Nonzero rows of the RREF: the canonical basis of the row space.
inline FpMatrix row_space_basis(const FpMatrix& m) {
  RrefResult r = rref(m);
  FpMatrix out(m.field(), r.pivots.size(), m.cols());
  for (std::size_t i = 0; i < r.pivots.size(); ++i) out.set_row(i, r.matrix.row(i));
  return out;
}

// Basis of {alpha : alpha * m = 0}, returned in canonical (RREF) form.
// Row count is rows(m) - rank(m).
inline FpMatrix left_kernel(const FpMatrix& m) {
  const PrimeField& f = m.field();
  // alpha * m = 0  <=>  m^T alpha^T = 0; read the null space off rref(m^T).
  RrefResult r = rref(m.transpose());
  std::size_t vars = m.rows();
  std::vector<bool> is_pivot(vars, false);
  for (std::size_t p : r.pivots) is_pivot[p] = true;
  std::vector<FpVector> basis;
  for (std::size_t free = 0; free < vars; ++free) {
    if (is_pivot[free]) continue;
    FpVector v = FpVector::zeros(f, vars);
    v.set(free, 1);
    for (std::size_t t = 0; t < r.pivots.size(); ++t)
      v.set(r.pivots[t], f.neg(r.matrix.at(t, free)));
    basis.push_back(v);
  }
  FpMatrix out = FpMatrix::from_rows(f, basis, vars);
  return row_space_basis(out);  // canonicalize
}

enum class SpaceRelation { Equal, ASubspaceOfB, BSubspaceOfA, Incomparable };

inline SpaceRelation row_space_relation(const FpMatrix& a, const FpMatrix& b) {
  require_same_field(a.field(), b.field());
  if (a.cols() != b.cols()) throw std::invalid_argument("row space ambient dimension mismatch");
  std::size_t ra = rank(a), rb = rank(b), rab = rank(a.vstack(b));
  bool a_in_b = (rab == rb);
  bool b_in_a = (rab == ra);
  if (a_in_b && b_in_a) return SpaceRelation::Equal;
  if (a_in_b) return SpaceRelation::ASubspaceOfB;
  if (b_in_a) return SpaceRelation::BSubspaceOfA;
  return SpaceRelation::Incomparable;
}

// Deterministic solution of alpha * m = target (free variables set to zero).
inline std::optional<FpVector> solve_left(const FpMatrix& m, const FpVector& target) {
  require_same_field(m.field(), target.field());
  if (target.size() != m.cols()) throw std::invalid_argument("solve_left target width mismatch");
  const PrimeField& f = m.field();
  // m^T alpha^T = target^T: row reduce the augmented matrix.
  FpMatrix aug = m.transpose().hstack(
      FpMatrix::from_rows(f, std::vector<FpVector>{target}, target.size()).transpose());
  RrefResult r = rref(aug);
  std::size_t vars = m.rows();
  FpVector alpha = FpVector::zeros(f, vars);
  for (std::size_t t = 0; t < r.pivots.size(); ++t) {
    if (r.pivots[t] >= vars) return std::nullopt;  // pivot in the augmented column
    alpha.set(r.pivots[t], r.matrix.at(t, vars));
  }
  return alpha;
}

// Reduce v against an RREF basis (clears the pivot coordinates).  The result is
// the canonical coset representative of v modulo the row space; it is zero
// exactly when v lies in the row space.
inline FpVector reduce_by_rref(FpVector v, const RrefResult& basis) {
  for (std::size_t t = 0; t < basis.pivots.size(); ++t) {
    int c = v[basis.pivots[t]];
    if (c != 0) v = v - basis.matrix.row(t).scaled(c);
  }
  return v;
}

inline bool row_space_contains(const RrefResult& basis, const FpVector& v) {
  return reduce_by_rref(v, basis).is_zero();
}

}  // namespace tailbite
