#pragma once
// Tail-biting trellis representations and their structural analysis:
// matrix-form trellises (vertex matrices + label columns), explicit expanded
// trellises, cycle/label-code computation by two independent routes,
// one-to-one / biproper / mergeability / minimality predicates, and
// linear-isomorphism decision procedures.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tailbite/caps.hpp"
#include "tailbite/charpair.hpp"
#include "tailbite/code.hpp"
#include "tailbite/galois.hpp"

namespace tailbite {

// Linear tail-biting trellis in matrix form: vertex space at time i is the row
// space of vertex[i] (an m x r_i matrix), and the edges at time i are
// { (alpha A_i, alpha G_i, alpha A_{i+1}) : alpha in F^m } where G_i is column
// i of the label matrix.  Every such trellis is linear and reduced: the
// alpha-path (alpha A_0, ..., alpha A_{n-1}) closes into a cycle through each
// of its vertices and edges.
struct MatrixTrellis {
  PrimeField field;
  std::size_t depth = 0;      // n
  std::size_t coeff_dim = 0;  // m, the coefficient space dimension
  std::vector<FpMatrix> vertex;
  FpMatrix labels;  // m x depth; column i holds the labels G_i

  std::optional<std::vector<CircularInterval>> spans;  // set by span-based builders
  std::optional<FpMatrix> parity;                      // H, kept by the BCJR builder
  std::optional<FpMatrix> displacement;                // D, kept by the BCJR builder
  bool rank_deficient = false;  // label matrix rows dependent (generalized use)

  MatrixTrellis(PrimeField f, std::size_t n, std::size_t m)
      : field(f), depth(n), coeff_dim(m), labels(f, m, n) {
    if (n == 0) throw std::invalid_argument("trellis depth must be positive");
  }

  const FpMatrix& vertex_at(std::size_t i) const { return vertex.at(i % depth); }
  FpMatrix label_column(std::size_t i) const {
    FpMatrix c(field, coeff_dim, 1);
    for (std::size_t r = 0; r < coeff_dim; ++r) c.set(r, 0, labels.at(r, i % depth));
    return c;
  }
  FpMatrix edge_matrix(std::size_t i) const {
    return vertex_at(i).hstack(label_column(i)).hstack(vertex_at(i + 1));
  }

  std::vector<std::size_t> scp() const {
    std::vector<std::size_t> s;
    s.reserve(depth);
    for (std::size_t i = 0; i < depth; ++i) s.push_back(rank(vertex_at(i)));
    return s;
  }
  std::vector<std::size_t> ecp() const {
    std::vector<std::size_t> e;
    e.reserve(depth);
    for (std::size_t i = 0; i < depth; ++i) e.push_back(rank(edge_matrix(i)));
    return e;
  }
};

// All elements of the row space of a basis matrix, sorted lexicographically.
inline std::vector<FpVector> span_elements(const FpMatrix& basis,
                                           const Caps& caps = Caps::defaults()) {
  int q = basis.field().modulus();
  double est = 1;
  for (std::size_t i = 0; i < basis.rows(); ++i) {
    est *= q;
    if (est > double(caps.enumeration)) throw CapExceeded("row space enumeration exceeds cap");
  }
  std::vector<FpVector> out;
  FpVector alpha = FpVector::zeros(basis.field(), basis.rows());
  while (true) {
    out.push_back(alpha * basis);
    std::size_t pos = basis.rows();
    bool carried_out = true;
    while (pos > 0) {
      --pos;
      if (alpha[pos] + 1 < q) {
        alpha.set(pos, alpha[pos] + 1);
        carried_out = false;
        break;
      }
      alpha.set(pos, 0);
    }
    if (carried_out) break;
  }
  std::sort(out.begin(), out.end(), lex_less);
  return out;
}

struct ExplicitTrellis {
  PrimeField field;
  std::size_t depth = 0;
  std::vector<std::vector<FpVector>> verts;  // per time, lexicographically sorted
  struct Edge {
    std::size_t from;
    int label;
    std::size_t to;
    friend bool operator==(const Edge& a, const Edge& b) {
      return a.from == b.from && a.label == b.label && a.to == b.to;
    }
    friend bool operator<(const Edge& a, const Edge& b) {
      if (a.from != b.from) return a.from < b.from;
      if (a.label != b.label) return a.label < b.label;
      return a.to < b.to;
    }
  };
  std::vector<std::vector<Edge>> edges;  // per time, sorted; endpoints are vertex indices

  ExplicitTrellis(PrimeField f, std::size_t n) : field(f), depth(n), verts(n), edges(n) {}

  std::size_t vertex_index(std::size_t time, const FpVector& v) const {
    const auto& vs = verts.at(time % depth);
    auto it = std::lower_bound(vs.begin(), vs.end(), v, lex_less);
    if (it == vs.end() || *it != v) throw std::invalid_argument("vertex not present");
    return std::size_t(it - vs.begin());
  }
};

struct ExpandResult {
  ExplicitTrellis trellis;
  std::size_t pruned_vertices = 0;
  std::size_t pruned_edges = 0;  // always 0 for matrix-form trellises
};

namespace detail {

// reachability matrices: on_cycle flags for vertices and edges
inline void cycle_membership(const ExplicitTrellis& t, std::vector<std::vector<bool>>& vertex_on,
                             std::vector<std::vector<bool>>& edge_on) {
  std::size_t n = t.depth;
  vertex_on.assign(n, {});
  edge_on.assign(n, {});
  // boolean adjacency per section
  std::vector<std::vector<std::vector<bool>>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    adj[i].assign(t.verts[i].size(),
                  std::vector<bool>(t.verts[(i + 1) % n].size(), false));
    for (const auto& e : t.edges[i]) adj[i][e.from][e.to] = true;
  }
  auto mulbool = [](const std::vector<std::vector<bool>>& A,
                    const std::vector<std::vector<bool>>& B) {
    std::vector<std::vector<bool>> C(A.size(), std::vector<bool>(B.empty() ? 0 : B[0].size()));
    for (std::size_t i = 0; i < A.size(); ++i)
      for (std::size_t k = 0; k < B.size(); ++k)
        if (A[i][k])
          for (std::size_t j = 0; j < C[i].size(); ++j)
            if (B[k][j]) C[i][j] = true;
    return C;
  };
  for (std::size_t i = 0; i < n; ++i) {
    // product over one full revolution starting at section i
    std::vector<std::vector<bool>> full = adj[i];
    for (std::size_t s = 1; s < n; ++s) full = mulbool(full, adj[(i + s) % n]);
    vertex_on[i].assign(t.verts[i].size(), false);
    for (std::size_t v = 0; v < t.verts[i].size(); ++v) vertex_on[i][v] = full[v][v];
    // back-path of length n-1 from section i+1 to section i
    std::vector<std::vector<bool>> back;
    if (n == 1) {
      back.assign(t.verts[0].size(), std::vector<bool>(t.verts[0].size(), false));
      for (std::size_t v = 0; v < t.verts[0].size(); ++v) back[v][v] = true;
    } else {
      back = adj[(i + 1) % n];
      for (std::size_t s = 2; s < n; ++s) back = mulbool(back, adj[(i + s) % n]);
    }
    edge_on[i].assign(t.edges[i].size(), false);
    for (std::size_t e = 0; e < t.edges[i].size(); ++e)
      edge_on[i][e] = back[t.edges[i][e].to][t.edges[i][e].from];
  }
}

}  // namespace detail

inline bool is_reduced(const ExplicitTrellis& t) {
  std::vector<std::vector<bool>> von, eon;
  detail::cycle_membership(t, von, eon);
  for (const auto& layer : von)
    for (bool b : layer)
      if (!b) return false;
  for (const auto& layer : eon)
    for (bool b : layer)
      if (!b) return false;
  return true;
}

struct PruneResult {
  ExplicitTrellis trellis;
  std::size_t removed_vertices = 0;
  std::size_t removed_edges = 0;
};

// Remove every vertex and edge that lies on no cycle.  Cycles survive the
// removal, so a single pass reaches a reduced trellis.
inline PruneResult prune_unreduced(const ExplicitTrellis& t) {
  std::vector<std::vector<bool>> von, eon;
  detail::cycle_membership(t, von, eon);
  PruneResult out{ExplicitTrellis(t.field, t.depth)};
  std::vector<std::vector<std::size_t>> remap(t.depth);
  for (std::size_t i = 0; i < t.depth; ++i) {
    remap[i].assign(t.verts[i].size(), SIZE_MAX);
    for (std::size_t v = 0; v < t.verts[i].size(); ++v) {
      if (von[i][v]) {
        remap[i][v] = out.trellis.verts[i].size();
        out.trellis.verts[i].push_back(t.verts[i][v]);
      } else {
        ++out.removed_vertices;
      }
    }
  }
  for (std::size_t i = 0; i < t.depth; ++i) {
    for (std::size_t e = 0; e < t.edges[i].size(); ++e) {
      if (!eon[i][e]) {
        ++out.removed_edges;
        continue;
      }
      const auto& ed = t.edges[i][e];
      out.trellis.edges[i].push_back(
          {remap[i][ed.from], ed.label, remap[(i + 1) % t.depth][ed.to]});
    }
    std::sort(out.trellis.edges[i].begin(), out.trellis.edges[i].end());
  }
  return out;
}

inline std::size_t connected_components(const ExplicitTrellis& t) {
  // union-find over (time, vertex) pairs, edges taken as undirected
  std::vector<std::size_t> offset(t.depth + 1, 0);
  for (std::size_t i = 0; i < t.depth; ++i) offset[i + 1] = offset[i] + t.verts[i].size();
  std::vector<std::size_t> parent(offset[t.depth]);
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  std::vector<std::size_t>* pp = &parent;
  auto find = [pp](std::size_t x) {
    while ((*pp)[x] != x) x = (*pp)[x] = (*pp)[(*pp)[x]];
    return x;
  };
  for (std::size_t i = 0; i < t.depth; ++i)
    for (const auto& e : t.edges[i]) {
      std::size_t a = find(offset[i] + e.from);
      std::size_t b = find(offset[(i + 1) % t.depth] + e.to);
      if (a != b) parent[a] = b;
    }
  std::size_t comps = 0;
  for (std::size_t i = 0; i < parent.size(); ++i)
    if (find(i) == i) ++comps;
  return comps;
}

// Materialize a matrix trellis: list the vertex spaces and edge spaces.  A
// matrix trellis is reduced by construction, so the pruning counters are
// reported for the record and are zero.
inline ExpandResult expand(const MatrixTrellis& t, const Caps& caps = Caps::defaults()) {
  ExplicitTrellis out(t.field, t.depth);
  for (std::size_t i = 0; i < t.depth; ++i)
    out.verts[i] = span_elements(row_space_basis(t.vertex_at(i)), caps);
  for (std::size_t i = 0; i < t.depth; ++i) {
    std::size_t w0 = t.vertex_at(i).cols(), w1 = t.vertex_at(i + 1).cols();
    for (const FpVector& triple : span_elements(row_space_basis(t.edge_matrix(i)), caps)) {
      FpVector from = triple.slice(0, w0);
      int label = triple[w0];
      FpVector to = triple.slice(w0 + 1, w1);
      out.edges[i].push_back(
          {out.vertex_index(i, from), label, out.vertex_index(i + 1, to)});
    }
    std::sort(out.edges[i].begin(), out.edges[i].end());
    out.edges[i].erase(std::unique(out.edges[i].begin(), out.edges[i].end()),
                       out.edges[i].end());
  }
  PruneResult pruned = prune_unreduced(out);
  return {std::move(pruned.trellis), pruned.removed_vertices, pruned.removed_edges};
}

struct Cycle {
  std::vector<std::size_t> vertices;  // indices, one per time 0..n-1
  std::vector<int> labels;
};

// All closed length-n paths that start and end in V_0, in deterministic
// (vertex-index, then edge) order.
inline std::vector<Cycle> cycles(const ExplicitTrellis& t, const Caps& caps = Caps::defaults()) {
  std::size_t n = t.depth;
  std::vector<std::vector<std::vector<std::size_t>>> out_edges(n);
  for (std::size_t i = 0; i < n; ++i) {
    out_edges[i].assign(t.verts[i].size(), {});
    for (std::size_t e = 0; e < t.edges[i].size(); ++e)
      out_edges[i][t.edges[i][e].from].push_back(e);  // edges[i] sorted => lists sorted
  }
  std::vector<Cycle> found;
  std::uint64_t steps = 0;
  std::vector<std::size_t> vpath(n), epath(n);
  for (std::size_t start = 0; start < t.verts[0].size(); ++start) {
    // iterative DFS over edge choices
    std::vector<std::size_t> choice(n, 0);
    std::size_t depth = 0;
    vpath[0] = start;
    while (true) {
      if (++steps > caps.enumeration) throw CapExceeded("cycle enumeration exceeds cap");
      const auto& outs = out_edges[depth][vpath[depth]];
      if (choice[depth] >= outs.size()) {
        if (depth == 0) break;
        --depth;
        ++choice[depth];
        continue;
      }
      const auto& e = t.edges[depth][outs[choice[depth]]];
      if (depth + 1 == n) {
        if (e.to == start) {
          Cycle c;
          c.vertices.assign(vpath.begin(), vpath.end());
          c.labels.resize(n);
          for (std::size_t i = 0; i < n; ++i)
            c.labels[i] = t.edges[i][out_edges[i][vpath[i]][choice[i]]].label;
          found.push_back(std::move(c));
          if (found.size() > caps.enumeration) throw CapExceeded("too many cycles");
        }
        ++choice[depth];
      } else {
        vpath[depth + 1] = e.to;
        ++depth;
        choice[depth] = 0;
      }
    }
  }
  return found;
}

inline FpVector cycle_label_vector(const ExplicitTrellis& t, const Cycle& c) {
  return FpVector(t.field, std::vector<int>(c.labels.begin(), c.labels.end()));
}

// Edge-label code by explicit cycle enumeration: the set of label words.
inline std::vector<FpVector> edge_label_code(const ExplicitTrellis& t,
                                             const Caps& caps = Caps::defaults()) {
  std::vector<FpVector> words;
  for (const Cycle& c : cycles(t, caps)) words.push_back(cycle_label_vector(t, c));
  std::sort(words.begin(), words.end(), lex_less);
  words.erase(std::unique(words.begin(), words.end()), words.end());
  return words;
}

// The cycle space of a matrix trellis: coefficient tuples
// (alpha^(0), ..., alpha^(n-1)) subject to the matching conditions
// alpha^(i) A_{i+1} = alpha^(i+1) A_{i+1} and the tail-biting closure
// alpha^(n-1) A_0 = alpha^(0) A_0.  Rows of the returned basis are the
// stacked tuples (width n*m).
inline FpMatrix cycle_space(const MatrixTrellis& t) {
  std::size_t n = t.depth, m = t.coeff_dim;
  std::size_t ccols = 0;
  for (std::size_t i = 0; i < n; ++i) ccols += t.vertex_at(i + 1).cols();
  if (n == 1) return FpMatrix::identity(t.field, m);  // single section: closure is vacuous
  FpMatrix Q(t.field, n * m, ccols);
  std::size_t col0 = 0;
  for (std::size_t c = 0; c < n; ++c) {
    // constraint block c couples alpha^(c) and alpha^((c+1) mod n) via A_{c+1}
    const FpMatrix& A = t.vertex_at(c + 1);
    std::size_t rows_pos = c * m;
    std::size_t rows_neg = ((c + 1) % n) * m;
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t cc = 0; cc < A.cols(); ++cc) {
        Q.set(rows_pos + r, col0 + cc, t.field.add(Q.at(rows_pos + r, col0 + cc), A.at(r, cc)));
        Q.set(rows_neg + r, col0 + cc,
              t.field.sub(Q.at(rows_neg + r, col0 + cc), A.at(r, cc)));
      }
    col0 += A.cols();
  }
  return left_kernel(Q);
}

// Edge-label code by exact linear algebra: the image of the cycle space under
// the label map, returned as a canonical (RREF) basis.
inline FpMatrix edge_label_code_basis(const MatrixTrellis& t) {
  FpMatrix cyc = cycle_space(t);
  std::size_t n = t.depth, m = t.coeff_dim;
  FpMatrix words(t.field, cyc.rows(), n);
  for (std::size_t r = 0; r < cyc.rows(); ++r)
    for (std::size_t i = 0; i < n; ++i) {
      int acc = 0;
      for (std::size_t l = 0; l < m; ++l)
        acc = t.field.add(acc, t.field.mul(cyc.at(r, i * m + l), t.labels.at(l, i)));
      words.set(r, i, acc);
    }
  return row_space_basis(words);
}

struct VectorCycle {
  std::vector<FpVector> vertices;
  FpVector labels;
};

struct OneToOneReport {
  bool one_to_one = false;
  std::optional<std::pair<VectorCycle, VectorCycle>> witness;  // two cycles, equal labels
};

// Exact one-to-one test for matrix trellises: the label map restricted to the
// cycle space must be injective.  A nontrivial kernel element gives a nonzero
// cycle carrying the same labels (all zero) as the zero cycle.
inline OneToOneReport is_one_to_one(const MatrixTrellis& t) {
  FpMatrix cyc = cycle_space(t);
  std::size_t n = t.depth, m = t.coeff_dim;
  FpMatrix words(t.field, cyc.rows(), n);
  for (std::size_t r = 0; r < cyc.rows(); ++r)
    for (std::size_t i = 0; i < n; ++i) {
      int acc = 0;
      for (std::size_t l = 0; l < m; ++l)
        acc = t.field.add(acc, t.field.mul(cyc.at(r, i * m + l), t.labels.at(l, i)));
      words.set(r, i, acc);
    }
  FpMatrix ker = left_kernel(words);
  if (ker.rows() == 0) return {true, std::nullopt};
  FpVector tuple = ker.row(0) * cyc;  // nonzero cycle with all-zero labels
  VectorCycle bad{{}, FpVector::zeros(t.field, n)};
  VectorCycle zero{{}, FpVector::zeros(t.field, n)};
  for (std::size_t i = 0; i < n; ++i) {
    FpVector alpha = tuple.slice(i * m, m);
    bad.vertices.push_back(alpha * t.vertex_at(i));
    zero.vertices.push_back(FpVector::zeros(t.field, t.vertex_at(i).cols()));
  }
  return {false, std::make_pair(bad, zero)};
}

inline OneToOneReport is_one_to_one(const ExplicitTrellis& t,
                                    const Caps& caps = Caps::defaults()) {
  std::vector<Cycle> cs = cycles(t, caps);
  std::map<std::vector<int>, std::size_t> seen;
  for (std::size_t idx = 0; idx < cs.size(); ++idx) {
    auto [it, fresh] = seen.emplace(cs[idx].labels, idx);
    if (!fresh) {
      auto materialize = [&](const Cycle& c) {
        VectorCycle vc{{}, cycle_label_vector(t, c)};
        for (std::size_t i = 0; i < t.depth; ++i)
          vc.vertices.push_back(t.verts[i][c.vertices[i]]);
        return vc;
      };
      return {false, std::make_pair(materialize(cs[it->second]), materialize(cs[idx]))};
    }
  }
  return {true, std::nullopt};
}

// Biproper: no two edges out of (or into) one vertex share a label.  For a
// linear trellis this is a rank condition on the edge matrix.
inline bool is_biproper(const MatrixTrellis& t) {
  for (std::size_t i = 0; i < t.depth; ++i) {
    std::size_t e = rank(t.edge_matrix(i));
    if (rank(t.vertex_at(i).hstack(t.label_column(i))) != e) return false;
    if (rank(t.label_column(i).hstack(t.vertex_at(i + 1))) != e) return false;
  }
  return true;
}

inline bool is_biproper(const ExplicitTrellis& t) {
  for (std::size_t i = 0; i < t.depth; ++i) {
    std::map<std::pair<std::size_t, int>, std::size_t> out, in;
    for (const auto& e : t.edges[i]) {
      auto [io, fo] = out.emplace(std::make_pair(e.from, e.label), e.to);
      if (!fo && io->second != e.to) return false;
      auto [ii, fi] = in.emplace(std::make_pair(e.to, e.label), e.from);
      if (!fi && ii->second != e.from) return false;
    }
  }
  return true;
}

// Quotient the vertex set at one time by a subspace W of V_time; edges are
// re-attached to the canonical coset representatives.  Keeps linear structure.
inline ExplicitTrellis quotient_at(const ExplicitTrellis& t, std::size_t time,
                                   const FpMatrix& W) {
  std::size_t i = time % t.depth;
  RrefResult wr = rref(W);
  ExplicitTrellis out(t.field, t.depth);
  std::vector<std::size_t> remap(t.verts[i].size());
  for (std::size_t j = 0; j < t.depth; ++j)
    if (j != i) out.verts[j] = t.verts[j];
  {
    std::vector<FpVector> reps;
    for (const FpVector& v : t.verts[i]) reps.push_back(reduce_by_rref(v, wr));
    std::vector<FpVector> uniq = reps;
    std::sort(uniq.begin(), uniq.end(), lex_less);
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    out.verts[i] = uniq;
    for (std::size_t v = 0; v < reps.size(); ++v)
      remap[v] = std::size_t(std::lower_bound(uniq.begin(), uniq.end(), reps[v], lex_less) -
                             uniq.begin());
  }
  for (std::size_t j = 0; j < t.depth; ++j) {
    out.edges[j] = t.edges[j];
    if (j == i)
      for (auto& e : out.edges[j]) e.from = remap[e.from];
    if ((j + 1) % t.depth == i)
      for (auto& e : out.edges[j]) e.to = remap[e.to];
    std::sort(out.edges[j].begin(), out.edges[j].end());
    out.edges[j].erase(std::unique(out.edges[j].begin(), out.edges[j].end()),
                       out.edges[j].end());
  }
  return out;
}

// Merge the vertices of V_time modulo W (checked to be a subspace of V_time).
inline ExplicitTrellis merge_quotient(const MatrixTrellis& t, std::size_t time, const FpMatrix& W,
                                      const Caps& caps = Caps::defaults()) {
  if (W.cols() != t.vertex_at(time).cols())
    throw std::invalid_argument("merge subspace has the wrong ambient width");
  RrefResult vr = rref(t.vertex_at(time));
  for (std::size_t r = 0; r < W.rows(); ++r)
    if (!row_space_contains(vr, W.row(r)))
      throw std::invalid_argument("merge subspace is not contained in the vertex space");
  return quotient_at(expand(t, caps).trellis, time, W);
}

struct MergeabilityReport {
  bool non_mergeable = false;
  // witness: (time, nonzero vertex v) such that quotienting V_time by span{v}
  // preserves the edge-label code
  std::optional<std::pair<std::size_t, FpVector>> witness;
};

// A trellis is non-mergeable when no one-dimensional quotient of any vertex
// space preserves the edge-label code.  One-dimensional subspaces suffice:
// merging v1 with v2 is quotienting by span{v1 - v2}.  Times ascend and
// candidate generators are scanned in lexicographic order.
inline MergeabilityReport is_non_mergeable(const MatrixTrellis& t,
                                           const Caps& caps = Caps::defaults()) {
  FpMatrix base = edge_label_code_basis(t);
  std::uint64_t base_count = 1;
  for (std::size_t i = 0; i < base.rows(); ++i) {
    base_count *= std::uint64_t(t.field.modulus());
    if (base_count > caps.enumeration) throw CapExceeded("label code too large to compare");
  }
  ExplicitTrellis full = expand(t, caps).trellis;
  RrefResult base_r = rref(base);
  for (std::size_t i = 0; i < t.depth; ++i) {
    std::vector<FpVector> gens;
    for (const FpVector& v : span_elements(row_space_basis(t.vertex_at(i)), caps)) {
      if (v.is_zero()) continue;
      // normalize: first nonzero entry 1, so each 1-dim subspace appears once
      std::size_t lead = 0;
      while (v[lead] == 0) ++lead;
      if (v[lead] != 1) continue;
      gens.push_back(v);
    }
    for (const FpVector& g : gens) {
      ExplicitTrellis merged =
          quotient_at(full, i, FpMatrix::from_rows(t.field, std::vector<FpVector>{g}, g.size()));
      std::vector<FpVector> labels = edge_label_code(merged, caps);
      // the merged code always contains the original; equality iff same size
      if (labels.size() == base_count) {
        for (const FpVector& w : labels)
          if (!row_space_contains(base_r, w))
            throw std::logic_error("merged label code lost words");
        return {false, std::make_pair(i, g)};
      }
    }
  }
  return {true, std::nullopt};
}

enum class Verdict { Yes, No, Unknown };

struct IsoReport {
  Verdict verdict = Verdict::Unknown;
  // On Yes: phi_i maps the row space of domain_basis[i] onto the row space of
  // codomain_basis[i] by coords |-> coords * map[i] * codomain_basis[i].
  std::vector<FpMatrix> domain_basis, codomain_basis, maps;
};

namespace detail {

struct IsoProblem {
  const MatrixTrellis* t1;
  const MatrixTrellis* t2;
  bool structural;  // drop the label coordinate
  std::vector<FpMatrix> R1, R2;      // vertex space bases
  std::vector<FpMatrix> coords;      // m x s_i coordinates of t1's generators in R1
  std::vector<FpMatrix> kernels;     // per time: null basis of t2's (projected) edge matrix
};

inline FpMatrix projected_edge_matrix(const MatrixTrellis& t, std::size_t i, bool structural) {
  if (structural) return t.vertex_at(i).hstack(t.vertex_at(i + 1));
  return t.edge_matrix(i);
}

// Constraint: every generator edge of t1, mapped through (Z_i, Z_{i+1}),
// must land inside t2's edge space at time i.
inline bool edge_constraint(const IsoProblem& p, std::size_t i, const FpMatrix& Pz_i,
                            const FpMatrix& Pz_next) {
  const FpMatrix& K = p.kernels[i];
  if (K.rows() == 0) return true;
  std::size_t m = p.t1->coeff_dim;
  std::size_t w0 = Pz_i.cols(), w1 = Pz_next.cols();
  const PrimeField& f = p.t1->field;
  for (std::size_t l = 0; l < m; ++l) {
    for (std::size_t kr = 0; kr < K.rows(); ++kr) {
      int acc = 0;
      for (std::size_t c = 0; c < w0; ++c) acc = f.add(acc, f.mul(Pz_i.at(l, c), K.at(kr, c)));
      std::size_t off = w0;
      if (!p.structural) {
        acc = f.add(acc, f.mul(p.t1->labels.at(l, i), K.at(kr, off)));
        off += 1;
      }
      for (std::size_t c = 0; c < w1; ++c)
        acc = f.add(acc, f.mul(Pz_next.at(l, c), K.at(kr, off + c)));
      if (acc != 0) return false;
    }
  }
  return true;
}

inline std::vector<FpMatrix> invertible_matrices(const PrimeField& f, std::size_t s,
                                                 std::uint64_t cap) {
  if (s == 0) return {FpMatrix(f, 0, 0)};
  int q = f.modulus();
  double total = 1;
  for (std::size_t i = 0; i < s * s; ++i) {
    total *= q;
    if (total > double(cap)) throw CapExceeded("invertible map enumeration exceeds cap");
  }
  std::vector<FpMatrix> out;
  std::vector<int> digits(s * s, 0);
  while (true) {
    FpMatrix m(f, s, s, digits);
    if (rank(m) == s) out.push_back(m);
    std::size_t pos = digits.size();
    bool done = true;
    while (pos > 0) {
      --pos;
      if (digits[pos] + 1 < q) {
        ++digits[pos];
        done = false;
        break;
      }
      digits[pos] = 0;
    }
    if (done) break;
  }
  return out;
}

// Exhaustive cap-bounded decision: does a tuple of invertible vertex maps
// exist that carries every edge space of t1 into (hence onto) the one of t2?
// Implemented as a cyclic DP anchored at the time with fewest GL candidates.
inline IsoReport iso_search(const MatrixTrellis& a, const MatrixTrellis& b, bool structural,
                            const Caps& caps) {
  IsoReport rep;
  if (a.field != b.field || a.depth != b.depth) {
    rep.verdict = Verdict::No;
    return rep;
  }
  std::size_t n = a.depth;
  std::vector<std::size_t> s1 = a.scp(), s2 = b.scp(), e1 = a.ecp(), e2 = b.ecp();
  for (std::size_t i = 0; i < n; ++i)
    if (s1[i] != s2[i] || e1[i] != e2[i]) {
      rep.verdict = Verdict::No;
      return rep;
    }
  if (structural) {
    for (std::size_t i = 0; i < n; ++i)
      if (rank(projected_edge_matrix(a, i, true)) != rank(projected_edge_matrix(b, i, true))) {
        rep.verdict = Verdict::No;
        return rep;
      }
  }

  IsoProblem p{&a, &b, structural, {}, {}, {}, {}};
  for (std::size_t i = 0; i < n; ++i) {
    p.R1.push_back(row_space_basis(a.vertex_at(i)));
    p.R2.push_back(row_space_basis(b.vertex_at(i)));
    FpMatrix C(a.field, a.coeff_dim, s1[i]);
    for (std::size_t l = 0; l < a.coeff_dim; ++l) {
      // coordinates of generator row l in the basis R1[i]
      auto coord = solve_left(p.R1[i], a.vertex_at(i).row(l));
      if (!coord) throw std::logic_error("generator outside its own vertex space");
      for (std::size_t c = 0; c < s1[i]; ++c) C.set(l, c, (*coord)[c]);
    }
    p.coords.push_back(C);
    p.kernels.push_back(left_kernel(projected_edge_matrix(b, i, structural).transpose()));
  }

  auto assemble = [&](const std::vector<FpMatrix>& Z) {
    rep.verdict = Verdict::Yes;
    rep.domain_basis = p.R1;
    rep.codomain_basis = p.R2;
    rep.maps = Z;
  };

  // fast path: the identity tuple (covers same-basis trellises immediately)
  {
    std::vector<FpMatrix> Z;
    std::vector<FpMatrix> P;
    for (std::size_t i = 0; i < n; ++i) {
      Z.push_back(FpMatrix::identity(a.field, s1[i]));
      P.push_back(p.coords[i] * Z[i] * p.R2[i]);
    }
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i)
      ok = edge_constraint(p, i, P[i], P[(i + 1) % n]);
    if (ok) {
      assemble(Z);
      return rep;
    }
  }

  std::uint64_t work = 0;
  try {
    std::map<std::size_t, std::vector<FpMatrix>> gl_cache;
    auto gl = [&](std::size_t s) -> const std::vector<FpMatrix>& {
      auto it = gl_cache.find(s);
      if (it == gl_cache.end())
        it = gl_cache.emplace(s, invertible_matrices(a.field, s, caps.scan)).first;
      return it->second;
    };
    std::size_t anchor = 0;
    for (std::size_t i = 1; i < n; ++i)
      if (gl(s1[i]).size() < gl(s1[anchor]).size()) anchor = i;

    auto time_at = [&](std::size_t off) { return (anchor + off) % n; };
    // precompute mapped generator blocks per (time, candidate)
    std::vector<std::vector<FpMatrix>> blocks(n);
    for (std::size_t off = 0; off < n; ++off) {
      std::size_t i = time_at(off);
      for (const FpMatrix& z : gl(s1[i])) blocks[off].push_back(p.coords[i] * z * p.R2[i]);
    }
    auto charge = [&](std::uint64_t amount) {
      work += amount;
      if (work > caps.scan) throw CapExceeded("isomorphism scan exceeds cap");
    };

    const std::size_t NONE = SIZE_MAX;
    for (std::size_t a0 = 0; a0 < blocks[0].size(); ++a0) {
      if (n == 1) {
        charge(1);
        if (edge_constraint(p, time_at(0), blocks[0][a0], blocks[0][a0])) {
          assemble({gl(s1[time_at(0)])[a0]});
          return rep;
        }
        continue;
      }
      // reach[off][cand] = predecessor candidate or NONE
      std::vector<std::vector<std::size_t>> pred(n);
      std::vector<std::vector<bool>> reach(n);
      reach[0].assign(blocks[0].size(), false);
      reach[0][a0] = true;
      bool dead = false;
      for (std::size_t off = 1; off < n && !dead; ++off) {
        reach[off].assign(blocks[off].size(), false);
        pred[off].assign(blocks[off].size(), NONE);
        bool any = false;
        for (std::size_t prev = 0; prev < blocks[off - 1].size(); ++prev) {
          if (!reach[off - 1][prev]) continue;
          for (std::size_t cur = 0; cur < blocks[off].size(); ++cur) {
            if (reach[off][cur]) continue;
            charge(1);
            if (edge_constraint(p, time_at(off - 1), blocks[off - 1][prev], blocks[off][cur])) {
              reach[off][cur] = true;
              pred[off][cur] = prev;
              any = true;
            }
          }
        }
        dead = !any;
      }
      if (dead) continue;
      for (std::size_t last = 0; last < blocks[n - 1].size(); ++last) {
        if (!reach[n - 1][last]) continue;
        charge(1);
        if (!edge_constraint(p, time_at(n - 1), blocks[n - 1][last], blocks[0][a0])) continue;
        // reconstruct the chain
        std::vector<std::size_t> pick(n);
        pick[n - 1] = last;
        for (std::size_t off = n - 1; off > 1; --off) pick[off - 1] = pred[off][pick[off]];
        pick[0] = a0;
        std::vector<FpMatrix> Z;
        Z.reserve(n);
        std::vector<FpMatrix> Zt(n, FpMatrix(a.field, 0, 0));
        for (std::size_t off = 0; off < n; ++off) Zt[time_at(off)] = gl(s1[time_at(off)])[pick[off]];
        for (std::size_t i = 0; i < n; ++i) Z.push_back(Zt[i]);
        assemble(Z);
        return rep;
      }
    }
  } catch (const CapExceeded&) {
    rep.verdict = Verdict::Unknown;
    return rep;
  }
  rep.verdict = Verdict::No;
  return rep;
}

}  // namespace detail

// Linear trellis isomorphism: per-time linear bijections carrying edges onto
// edges with labels preserved.  Exhaustive up to the scan cap; Unknown is
// only returned when the cap stops the search.
inline IsoReport isomorphic(const MatrixTrellis& a, const MatrixTrellis& b,
                            const Caps& caps = Caps::defaults()) {
  return detail::iso_search(a, b, false, caps);
}

// Structural isomorphism: linear bijections preserving edge *counts* between
// vertex pairs, i.e. carrying the label-forgetting projection of each edge
// space onto the other's, with dim E_i = dim E'_i so the parallel-edge
// multiplicities q^(e_i - dim P_i) agree.
inline IsoReport structurally_isomorphic(const MatrixTrellis& a, const MatrixTrellis& b,
                                         const Caps& caps = Caps::defaults()) {
  return detail::iso_search(a, b, true, caps);
}

// Graph isomorphism for small explicit trellises (backtracking over per-time
// bijections).  Used to cross-check the linear decision procedures and to
// compare quotient results.
inline Verdict explicit_isomorphic(const ExplicitTrellis& a, const ExplicitTrellis& b,
                                   const Caps& caps = Caps::defaults()) {
  if (a.depth != b.depth || a.field != b.field) return Verdict::No;
  std::size_t n = a.depth;
  for (std::size_t i = 0; i < n; ++i)
    if (a.verts[i].size() != b.verts[i].size() || a.edges[i].size() != b.edges[i].size())
      return Verdict::No;

  std::vector<std::vector<std::size_t>> phi(n);  // per time: image index list
  std::uint64_t work = 0;

  // check the edges between time i and i+1 once both sides are assigned
  auto section_ok = [&](std::size_t i) {
    std::vector<ExplicitTrellis::Edge> mapped;
    mapped.reserve(a.edges[i].size());
    for (const auto& e : a.edges[i])
      mapped.push_back({phi[i][e.from], e.label, phi[(i + 1) % n][e.to]});
    std::sort(mapped.begin(), mapped.end());
    return mapped == b.edges[i];
  };

  // depth-first over times; at each time try every bijection
  auto rec = [&](auto&& self, std::size_t t) -> Verdict {
    if (t == n) return section_ok(n - 1) ? Verdict::Yes : Verdict::No;
    std::vector<std::size_t> p(a.verts[t].size());
    for (std::size_t v = 0; v < p.size(); ++v) p[v] = v;
    bool capped = false;
    do {
      if (++work > caps.scan) { capped = true; break; }
      phi[t] = p;
      if (t > 0 && !section_ok(t - 1)) continue;
      Verdict sub = self(self, t + 1);
      if (sub != Verdict::No) return sub;
    } while (std::next_permutation(p.begin(), p.end()));
    return capped ? Verdict::Unknown : Verdict::No;
  };
  return rec(rec, 0);
}

enum class MinimalityVerdict { Minimal, Dominated, Unknown };

struct MinimalityReport {
  MinimalityVerdict verdict = MinimalityVerdict::Unknown;
  std::vector<std::size_t> scp;                  // of the tested trellis
  std::vector<std::size_t> dominating_scp;       // set when Dominated
  std::vector<std::size_t> dominating_selection;  // row indices into X
};

// Minimality among all linear tail-biting trellises of C: every minimal
// trellis is a KV-trellis, so t is dominated exactly when some independent
// row selection of some characteristic matrix gives a componentwise smaller
// SCP.  Unknown only when the characteristic matrix enumeration was capped
// and no dominating selection was found among the enumerated part.
inline MinimalityReport is_minimal(const MatrixTrellis& t, const LinearCode& C,
                                   const Caps& caps = Caps::defaults()) {
  MinimalityReport rep;
  rep.scp = t.scp();
  FpMatrix code_basis = edge_label_code_basis(t);
  if (row_space_relation(code_basis, C.generator()) != SpaceRelation::Equal)
    throw std::invalid_argument("trellis does not represent the given code");

  CharMatrixEnumeration en = enumerate_characteristic_matrices(C, caps.enumeration, caps);
  SpanMatrix S = span_matrix(en.matrices[0].spans);
  std::size_t n = C.length(), k = C.dimension();

  std::vector<std::size_t> sel(k);
  for (std::size_t i = 0; i < k; ++i) sel[i] = i;
  auto next_combination = [&]() {
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (sel[i] + (k - i) < n) {
        ++sel[i];
        for (std::size_t j = i + 1; j < k; ++j) sel[j] = sel[j - 1] + 1;
        return true;
      }
    }
    return false;
  };

  bool any_combo = true;
  if (k == 0 || k > n) any_combo = (k == 0);
  while (any_combo && k > 0) {
    bool independent = false;
    for (const CharacteristicPair& cp : en.matrices) {
      std::vector<FpVector> rows;
      for (std::size_t r : sel) rows.push_back(cp.X.row(r));
      if (rank(FpMatrix::from_rows(C.field(), rows, n)) == k) {
        independent = true;
        break;
      }
    }
    if (independent) {
      std::vector<int> pick(n, 0);
      for (std::size_t r : sel) pick[r] = 1;
      std::vector<std::size_t> scp = kv_scp(S, pick);
      bool le = true, lt = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (scp[i] > rep.scp[i]) le = false;
        if (scp[i] < rep.scp[i]) lt = true;
      }
      if (le && lt) {
        rep.verdict = MinimalityVerdict::Dominated;
        rep.dominating_scp = scp;
        rep.dominating_selection.assign(sel.begin(), sel.end());
        return rep;
      }
    }
    any_combo = next_combination();
  }
  rep.verdict = en.truncated ? MinimalityVerdict::Unknown : MinimalityVerdict::Minimal;
  return rep;
}

}  // namespace tailbite
