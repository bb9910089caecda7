#pragma once
// Trellis builders: elementary and product trellises from (codeword, span)
// pairs, BCJR trellises from displacement matrices, complexity-profile
// formulas, the one-step shift, the path-to-zero walk, the cycle criterion,
// and the quotient merge from a product trellis onto its BCJR counterpart.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailbite/caps.hpp"
#include "tailbite/charpair.hpp"
#include "tailbite/code.hpp"
#include "tailbite/galois.hpp"
#include "tailbite/trellis.hpp"

namespace tailbite {

namespace detail {
inline bool is_span_of(const FpVector& c, const CircularInterval& iv) {
  if (c.is_zero()) return false;
  std::vector<CircularInterval> sp = spans_of(c);
  return std::find(sp.begin(), sp.end(), iv) != sp.end();
}
}  // namespace detail

// One-dimensional trellis of a single (codeword, span) pair: the vertex space
// at time i is F when i lies in the span and {0} otherwise, and the edges at
// section i read off alpha * c_i.  With `generalized` the interval only needs
// to cover the support of c (it need not be an exact span).
inline MatrixTrellis elementary_trellis(const FpVector& c, const CircularInterval& span,
                                        bool generalized = false) {
  std::size_t n = c.size();
  if (span.n != n) throw std::invalid_argument("span modulus differs from word length");
  if (generalized) {
    for (std::size_t j = 0; j < n; ++j)
      if (c[j] != 0 && !span.closed_contains(j))
        throw std::invalid_argument("word has support outside the generalized span");
  } else if (!detail::is_span_of(c, span)) {
    throw std::invalid_argument("interval is not a span of the word");
  }
  MatrixTrellis t(c.field(), n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    FpMatrix a(c.field(), 1, 1);
    a.set(0, 0, span.contains(i) ? 1 : 0);
    t.vertex.push_back(a);
    t.labels.set(0, i, c[i]);
  }
  t.spans = std::vector<CircularInterval>{span};
  return t;
}

// Product trellis T_{G,S}: vertex matrices are the diagonal projections
// M_i = diag(mu^1_i, ..., mu^m_i) with mu^l_i the indicator of i in span l,
// stored raw (never row-reduced) so the coefficient maps alpha -> alpha M_i
// stay aligned across the quotient/BCJR comparisons.
inline MatrixTrellis product_trellis(const FpMatrix& G,
                                     const std::vector<CircularInterval>& spans) {
  std::size_t m = G.rows(), n = G.cols();
  if (spans.size() != m) throw std::invalid_argument("one span per generator row required");
  for (std::size_t l = 0; l < m; ++l) {
    if (spans[l].n != n)
      throw std::invalid_argument("span modulus differs from code length");
    if (!detail::is_span_of(G.row(l), spans[l]))
      throw std::invalid_argument("row " + std::to_string(l) +
                                  ": interval is not a span of the row");
  }
  MatrixTrellis t(G.field(), n, m);
  for (std::size_t i = 0; i < n; ++i) {
    FpMatrix M(G.field(), m, m);
    for (std::size_t l = 0; l < m; ++l) M.set(l, l, spans[l].contains(i) ? 1 : 0);
    t.vertex.push_back(M);
  }
  t.labels = G;
  t.spans = spans;
  t.rank_deficient = rank(G) < m;
  return t;
}

struct ComplexityProfile {
  std::vector<std::size_t> scp;  // s_i = number of spans containing i
  std::vector<std::size_t> ecp;  // e_i = number of closed spans containing i
  bool starts_distinct = false;  // formula e = s + indicator(starts) applies
  bool ends_distinct = false;    // formula e_i = s_{i+1} + indicator(ends) applies
  bool recurrence_ok = false;    // s_{i+1} - s_i recurrence (needs both flags)
};

// SCP/ECP of a product trellis directly from its span list.
inline ComplexityProfile scp_ecp_formulas(const std::vector<CircularInterval>& spans) {
  if (spans.empty()) return {{}, {}, true, true, true};
  std::size_t n = spans[0].n;
  ComplexityProfile p;
  p.scp.assign(n, 0);
  p.ecp.assign(n, 0);
  std::vector<std::size_t> starts(n, 0), ends(n, 0);
  for (const CircularInterval& s : spans) {
    if (s.n != n) throw std::invalid_argument("mixed span moduli");
    ++starts[s.a];
    ++ends[s.b];
    for (std::size_t i = 0; i < n; ++i) {
      if (s.contains(i)) ++p.scp[i];
      if (s.closed_contains(i)) ++p.ecp[i];
    }
  }
  p.starts_distinct = *std::max_element(starts.begin(), starts.end()) <= 1;
  p.ends_distinct = *std::max_element(ends.begin(), ends.end()) <= 1;
  if (p.starts_distinct)
    for (std::size_t i = 0; i < n; ++i)
      if (p.ecp[i] != p.scp[i] + starts[i]) throw std::logic_error("ECP start formula failed");
  if (p.ends_distinct)
    for (std::size_t i = 0; i < n; ++i)
      if (p.ecp[i] != p.scp[(i + 1) % n] + ends[i]) throw std::logic_error("ECP end formula failed");
  if (p.starts_distinct && p.ends_distinct) {
    p.recurrence_ok = true;
    for (std::size_t i = 0; i < n; ++i) {
      long long expect = (long long)p.scp[i] + (long long)starts[i] - (long long)ends[i];
      if ((long long)p.scp[(i + 1) % n] != expect) p.recurrence_ok = false;
    }
  }
  return p;
}

// Displacement matrix of a span list: row l accumulates the parity columns of
// the tail of row l, d_l = sum_{j=a_l}^{n-1} g_{lj} H_j.  Rows with linear
// spans come out exactly zero.
inline FpMatrix bcjr_displacement(const FpMatrix& G, const FpMatrix& H,
                                  const std::vector<CircularInterval>& spans) {
  std::size_t m = G.rows(), n = G.cols(), r = H.rows();
  if (H.cols() != n) throw std::invalid_argument("parity length mismatch");
  if (!(G * H.transpose()).is_zero()) throw std::invalid_argument("G H^T != 0");
  if (spans.size() != m) throw std::invalid_argument("one span per generator row required");
  FpMatrix D(G.field(), m, r);
  for (std::size_t l = 0; l < m; ++l) {
    if (!detail::is_span_of(G.row(l), spans[l]))
      throw std::invalid_argument("row " + std::to_string(l) +
                                  ": interval is not a span of the row");
    for (std::size_t j = spans[l].a; j < n; ++j)
      for (std::size_t c = 0; c < r; ++c)
        D.set(l, c, G.field().add(D.at(l, c), G.field().mul(G.at(l, j), H.at(c, j))));
    if (spans[l].linear() && !D.row(l).is_zero())
      throw std::logic_error("linear span produced a nonzero displacement row");
  }
  return D;
}

// BCJR trellis T_{(G,H,D)}: vertex matrices N_0 = D and
// N_{i+1} = N_i + G_i H_i (outer product of the i-th columns), with the
// tail-biting closure N_n = N_0.  Works for any displacement matrix D.
inline MatrixTrellis bcjr_trellis(const FpMatrix& G, const FpMatrix& H, const FpMatrix& D) {
  std::size_t m = G.rows(), n = G.cols(), r = H.rows();
  if (H.cols() != n) throw std::invalid_argument("parity length mismatch");
  if (!(G * H.transpose()).is_zero()) throw std::invalid_argument("G H^T != 0");
  if (D.rows() != m || D.cols() != r) throw std::invalid_argument("displacement shape mismatch");
  MatrixTrellis t(G.field(), n, m);
  FpMatrix N = D;
  for (std::size_t i = 0; i < n; ++i) {
    t.vertex.push_back(N);
    N = N + outer(G.col(i), H.col(i));
  }
  if (!(N + D.negated()).is_zero())
    throw std::logic_error("tail-biting closure N_n = N_0 failed");
  t.labels = G;
  t.parity = H;
  t.displacement = D;
  t.rank_deficient = rank(G) < m;
  return t;
}

// Span-based BCJR trellis: the displacement is derived from the span list,
// and the zero-row pattern (row l of N_i vanishes outside span l) is checked.
inline MatrixTrellis bcjr_trellis_from_spans(const FpMatrix& G, const FpMatrix& H,
                                             const std::vector<CircularInterval>& spans) {
  MatrixTrellis t = bcjr_trellis(G, H, bcjr_displacement(G, H, spans));
  for (std::size_t l = 0; l < G.rows(); ++l)
    for (std::size_t i = 0; i < t.depth; ++i)
      if (!spans[l].contains(i) && !t.vertex[i].row(l).is_zero())
        throw std::logic_error("vertex matrix row alive outside its span");
  t.spans = spans;
  return t;
}

// One-step shift: the trellis of the left-shifted code, with A*_i = A_{i+1}
// and label columns rotated accordingly.
inline MatrixTrellis shift_trellis(const MatrixTrellis& t) {
  MatrixTrellis s(t.field, t.depth, t.coeff_dim);
  for (std::size_t i = 0; i < t.depth; ++i) {
    s.vertex.push_back(t.vertex_at(i + 1));
    for (std::size_t l = 0; l < t.coeff_dim; ++l)
      s.labels.set(l, i, t.labels.at(l, (i + 1) % t.depth));
  }
  if (t.spans) {
    std::vector<CircularInterval> shifted;
    for (const CircularInterval& iv : *t.spans) shifted.push_back(shift_interval(iv, 1));
    s.spans = shifted;
  }
  if (t.parity) {
    FpMatrix H(t.field, t.parity->rows(), t.depth);
    for (std::size_t r = 0; r < H.rows(); ++r)
      for (std::size_t i = 0; i < t.depth; ++i)
        H.set(r, i, t.parity->at(r, (i + 1) % t.depth));
    s.parity = H;
  }
  if (t.displacement) s.displacement = t.vertex_at(1);
  s.rank_deficient = t.rank_deficient;
  return s;
}

struct PathPreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroPath {
  std::vector<FpVector> alphas;    // alpha^(0), ..., alpha^(n-1); last one zero
  std::vector<FpVector> vertices;  // alpha^(j) A_j for j = 0..n-1, then 0 in V_0
  FpVector labels;                 // alpha^(j) G_j
};

// The constructive path lemma: from any v in V_0, walk forward dropping each
// coefficient as soon as its row leaves its span; the result is a genuine
// path ending at the zero vertex.  Requires the zero-row property: row l of
// A_i must vanish whenever i lies outside span l.  For trellises without an
// attached span list, a covering span is inferred per row from the label row.
inline ZeroPath path_to_zero(const MatrixTrellis& t, const FpVector& v) {
  std::size_t n = t.depth, m = t.coeff_dim;
  std::vector<CircularInterval> spans;
  if (t.spans) {
    spans = *t.spans;
    if (spans.size() != m) throw std::invalid_argument("span list length mismatch");
  } else {
    for (std::size_t l = 0; l < m; ++l) {
      std::vector<std::size_t> support;  // times where row l of A_i is nonzero
      for (std::size_t i = 0; i < n; ++i)
        if (!t.vertex_at(i).row(l).is_zero()) support.push_back(i);
      FpVector g = t.labels.row(l);
      std::optional<CircularInterval> found;
      if (!g.is_zero()) {
        for (const CircularInterval& cand : spans_of(g)) {
          bool covers = true;
          for (std::size_t i : support)
            if (!cand.contains(i)) { covers = false; break; }
          if (covers) { found = cand; break; }
        }
      }
      if (!found)
        throw PathPreconditionError("row " + std::to_string(l) +
                                    ": no label span covers the vertex-row support");
      spans.push_back(*found);
    }
  }
  for (std::size_t l = 0; l < m; ++l)
    for (std::size_t i = 0; i < n; ++i)
      if (!spans[l].contains(i) && !t.vertex_at(i).row(l).is_zero())
        throw PathPreconditionError("row " + std::to_string(l) +
                                    " of the vertex matrix at time " + std::to_string(i) +
                                    " is nonzero outside its span");

  auto alpha0 = solve_left(t.vertex_at(0), v);
  if (!alpha0) throw std::invalid_argument("vertex is not in V_0");
  FpVector alpha = *alpha0;
  for (std::size_t l = 0; l < m; ++l)
    if (!spans[l].contains(0)) alpha.set(l, 0);  // minimal-support representative

  ZeroPath path{{}, {}, FpVector::zeros(t.field, n)};
  for (std::size_t j = 0; j < n; ++j) {
    path.alphas.push_back(alpha);
    path.vertices.push_back(alpha * t.vertex_at(j));
    path.labels.set(j, alpha.dot(t.labels.col(j)));
    FpVector next = alpha;
    for (std::size_t l = 0; l < m; ++l)
      if (!spans[l].contains((j + 1) % n)) next.set(l, 0);
    alpha = next;
  }
  if (!path.alphas.back().is_zero())
    throw std::logic_error("walk failed to reach the zero coefficient vector");
  path.vertices.push_back(FpVector::zeros(t.field, t.vertex_at(0).cols()));
  return path;
}

// Cycle criterion for BCJR trellises: a path closes into a cycle exactly when
// its label word is a codeword.  Both sides are computed and compared.
inline bool cycle_criterion(const MatrixTrellis& t, const std::vector<FpVector>& alphas) {
  if (!t.parity) throw std::invalid_argument("cycle criterion needs a BCJR trellis (parity kept)");
  std::size_t n = t.depth;
  if (alphas.size() != n) throw std::invalid_argument("need one coefficient vector per time");
  for (std::size_t j = 0; j + 1 < n; ++j)
    if (alphas[j] * t.vertex_at(j + 1) != alphas[j + 1] * t.vertex_at(j + 1))
      throw std::invalid_argument("coefficient sequence is not a path");
  FpVector w(t.field, std::vector<int>(n, 0));
  for (std::size_t j = 0; j < n; ++j) w.set(j, alphas[j].dot(t.labels.col(j)));
  bool in_code = true;
  for (std::size_t r = 0; r < t.parity->rows(); ++r)
    if (w.dot(t.parity->row(r)) != 0) { in_code = false; break; }
  bool closes = alphas[n - 1] * t.vertex_at(0) == alphas[0] * t.vertex_at(0);
  if (closes != in_code) throw std::logic_error("cycle criterion violated");
  return in_code;
}

struct MergeReport {
  std::vector<FpMatrix> w;    // per time: basis of W_i inside im M_i
  ExplicitTrellis quotient;   // product trellis merged by the W_i
  bool psi_verified = false;  // psi_i(alpha M_i + W_i) = alpha N_i checked edge-wise
  Verdict graph_isomorphic = Verdict::Unknown;  // independent explicit-graph check
};

// Merge a product trellis onto its BCJR counterpart: W'_i complements
// ker M_i inside ker N_i, W_i = W'_i M_i, and quotienting every vertex space
// V_i by W_i yields a trellis isomorphic to T_{(G,H,S)} via alpha-coordinates.
inline MergeReport merge_product_to_bcjr(const FpMatrix& G, const FpMatrix& H,
                                         const std::vector<CircularInterval>& spans,
                                         const Caps& caps = Caps::defaults()) {
  MatrixTrellis prod = product_trellis(G, spans);
  MatrixTrellis bcjr = bcjr_trellis_from_spans(G, H, spans);
  std::size_t n = prod.depth, m = prod.coeff_dim;
  const PrimeField& f = prod.field;

  MergeReport rep{{}, expand(prod, caps).trellis, false, Verdict::Unknown};
  for (std::size_t i = 0; i < n; ++i) {
    FpMatrix kerM = left_kernel(prod.vertex_at(i));
    FpMatrix kerN = left_kernel(bcjr.vertex_at(i));
    // greedy completion of a basis of ker M_i to one of ker N_i
    RrefResult have = rref(kerM);
    std::vector<FpVector> wprime;
    for (std::size_t r = 0; r < kerN.rows(); ++r) {
      FpVector residue = reduce_by_rref(kerN.row(r), have);
      if (residue.is_zero()) continue;
      wprime.push_back(residue);
      std::vector<FpVector> rows;
      for (std::size_t x = 0; x < have.matrix.rows(); ++x) rows.push_back(have.matrix.row(x));
      rows.push_back(residue);
      have = rref(FpMatrix::from_rows(f, rows, m));
    }
    FpMatrix wp = FpMatrix::from_rows(f, wprime, m);
    rep.w.push_back(row_space_basis(wp * prod.vertex_at(i)));
    rep.quotient = quotient_at(rep.quotient, i, rep.w.back());
  }

  // verify psi: coset representative -> alpha N_i, bijective and edge-preserving
  ExplicitTrellis target = expand(bcjr, caps).trellis;
  bool ok = true;
  std::vector<std::vector<std::size_t>> psi(n);  // quotient vertex index -> target index
  for (std::size_t i = 0; i < n && ok; ++i) {
    if (rep.quotient.verts[i].size() != target.verts[i].size()) { ok = false; break; }
    std::vector<bool> hit(target.verts[i].size(), false);
    for (const FpVector& repv : rep.quotient.verts[i]) {
      auto alpha = solve_left(prod.vertex_at(i), repv);
      if (!alpha) { ok = false; break; }
      FpVector image = *alpha * bcjr.vertex_at(i);
      std::size_t idx = target.vertex_index(i, image);
      if (hit[idx]) { ok = false; break; }  // not injective
      hit[idx] = true;
      psi[i].push_back(idx);
    }
  }
  for (std::size_t i = 0; i < n && ok; ++i) {
    std::vector<ExplicitTrellis::Edge> mapped;
    for (const auto& e : rep.quotient.edges[i])
      mapped.push_back({psi[i][e.from], e.label, psi[(i + 1) % n][e.to]});
    std::sort(mapped.begin(), mapped.end());
    if (mapped != target.edges[i]) ok = false;
  }
  rep.psi_verified = ok;
  rep.graph_isomorphic = explicit_isomorphic(rep.quotient, target, caps);
  return rep;
}

struct DependentSelection : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// KV-trellis: the product trellis of an independent row selection of a
// characteristic matrix.
inline MatrixTrellis kv_trellis(const CharacteristicPair& pair,
                                const std::vector<std::size_t>& selection) {
  std::vector<FpVector> rows;
  std::vector<CircularInterval> spans;
  for (std::size_t l : selection) {
    if (l >= pair.X.rows()) throw std::invalid_argument("selection index out of range");
    rows.push_back(pair.X.row(l));
    spans.push_back(pair.spans.at(l));
  }
  FpMatrix G = FpMatrix::from_rows(pair.X.field(), rows, pair.X.cols());
  if (rank(G) != G.rows())
    throw DependentSelection("selected characteristic rows are linearly dependent");
  return product_trellis(G, spans);
}

}  // namespace tailbite
