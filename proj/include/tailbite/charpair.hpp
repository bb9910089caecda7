#pragma once
// Minimal-span generator matrices, characteristic pairs (X, T), span
// matrices, dual span lists and the (v)S vertex-complexity arithmetic.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tailbite/caps.hpp"
#include "tailbite/code.hpp"
#include "tailbite/galois.hpp"

namespace tailbite {

struct MsgmResult {
  FpMatrix matrix;
  std::vector<CircularInterval> spans;  // linear spans, same order as the rows
};

// Greedy reduction to a minimal-span generator matrix: repeatedly resolve a
// pair of rows whose linear spans share a start or an end by subtracting the
// appropriately scaled row from the one with the larger closed span.  Ties are
// broken by keeping the lower row index.  Deterministic; already-minimal
// inputs come back unchanged.
inline MsgmResult msgm(const FpMatrix& G) {
  if (rank(G) != G.rows()) throw std::invalid_argument("msgm needs a full-rank matrix");
  const PrimeField& f = G.field();
  std::vector<FpVector> rows = G.row_list();
  std::vector<CircularInterval> spans;
  spans.reserve(rows.size());
  for (const FpVector& r : rows) spans.push_back(linear_span_of(r));

  auto closed_len = [](const CircularInterval& iv) { return iv.b - iv.a + 1; };
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < rows.size() && !changed; ++i)
      for (std::size_t j = i + 1; j < rows.size() && !changed; ++j) {
        bool same_start = spans[i].a == spans[j].a;
        bool same_end = spans[i].b == spans[j].b;
        if (!same_start && !same_end) continue;
        std::size_t keep = i, mod = j;
        if (closed_len(spans[i]) > closed_len(spans[j])) std::swap(keep, mod);
        std::size_t pos = same_start ? spans[keep].a : spans[keep].b;
        int factor = f.div(rows[mod][pos], rows[keep][pos]);
        rows[mod] = rows[mod] - rows[keep].scaled(factor);
        spans[mod] = linear_span_of(rows[mod]);
        changed = true;
      }
  }
  return {FpMatrix::from_rows(f, rows, G.cols()), std::move(spans)};
}

struct CharacteristicPair {
  FpMatrix X;                           // n x n, rows ordered by span start
  std::vector<CircularInterval> spans;  // the characteristic span list T
  bool lex_fallback = false;  // true when a cap stopped the lex-first row choice
};

// Characteristic pair of a full-support code.  The span list is assembled from
// the MSGMs of all n cyclic shifts (each contributes its linear spans, shifted
// back); consistency across shifts is the uniqueness statement and is checked.
// Row for start a is the lexicographically first codeword attaining the span,
// falling back to the shifted MSGM row if the codeword listing is capped.
inline CharacteristicPair characteristic_pair(const LinearCode& C,
                                              const Caps& caps = Caps::defaults()) {
  std::size_t n = C.length(), k = C.dimension();
  if (!C.full_support())
    throw std::invalid_argument("characteristic pair needs a full-support code");
  std::vector<std::optional<CircularInterval>> span_at(n);
  std::vector<std::optional<FpVector>> fallback(n);

  for (std::size_t j = 0; j < n; ++j) {
    LinearCode Cj = C.shifted(j);
    MsgmResult m = msgm(row_space_basis(Cj.generator()));
    for (std::size_t l = 0; l < k; ++l) {
      CircularInterval unshifted((m.spans[l].a + j) % n, (m.spans[l].b + j) % n, n);
      FpVector word = cyclic_shift(m.matrix.row(l), n - (j % n));
      std::size_t a = unshifted.a;
      if (span_at[a]) {
        if (*span_at[a] != unshifted)
          throw std::logic_error("characteristic span list inconsistent across shifts");
      } else {
        span_at[a] = unshifted;
        fallback[a] = word;
      }
    }
  }

  std::vector<CircularInterval> spans;
  std::vector<FpVector> rows;
  bool fell_back = false;
  for (std::size_t a = 0; a < n; ++a) {
    if (!span_at[a]) throw std::logic_error("characteristic span list misses a start");
    spans.push_back(*span_at[a]);
    try {
      std::vector<FpVector> cands = codewords_with_span(C, *span_at[a], caps);
      if (cands.empty()) throw std::logic_error("characteristic span has no codeword");
      rows.push_back(cands.front());
    } catch (const CapExceeded&) {
      rows.push_back(*fallback[a]);
      fell_back = true;
    }
  }

  // checks (iii)/(iv) of the definition: distinct ends, every time index
  // covered by exactly n-k spans
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (spans[i].b == spans[j].b) throw std::logic_error("characteristic ends not distinct");
  for (std::size_t t = 0; t < n; ++t) {
    std::size_t cover = 0;
    for (const CircularInterval& iv : spans) cover += iv.contains(t);
    if (cover != n - k) throw std::logic_error("characteristic coverage violated");
  }

  CharacteristicPair out{FpMatrix::from_rows(C.field(), rows, n), std::move(spans), fell_back};
  if (rank(out.X) != k) throw std::logic_error("characteristic matrix does not span the code");
  return out;
}

struct CharMatrixEnumeration {
  std::vector<CharacteristicPair> matrices;  // index 0 is the lex-first matrix
  bool truncated = false;
};

// Cartesian product of the per-span candidate sets (each in lexicographic
// order, last row varies fastest), truncated at cap.
inline CharMatrixEnumeration enumerate_characteristic_matrices(
    const LinearCode& C, std::uint64_t cap, const Caps& caps = Caps::defaults()) {
  CharacteristicPair base = characteristic_pair(C, caps);
  std::size_t n = C.length();
  std::vector<std::vector<FpVector>> cands(n);
  for (std::size_t a = 0; a < n; ++a) cands[a] = codewords_with_span(C, base.spans[a], caps);

  CharMatrixEnumeration out;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    if (out.matrices.size() >= cap) {
      out.truncated = true;
      return out;
    }
    std::vector<FpVector> rows;
    rows.reserve(n);
    for (std::size_t a = 0; a < n; ++a) rows.push_back(cands[a][idx[a]]);
    out.matrices.push_back(
        CharacteristicPair{FpMatrix::from_rows(C.field(), rows, n), base.spans, false});
    std::size_t pos = n;
    while (pos > 0) {
      --pos;
      if (++idx[pos] < cands[pos].size()) break;
      idx[pos] = 0;
      if (pos == 0) return out;
    }
    if (n == 0) return out;
  }
}

// 0/1 indicator matrix: row l is the membership vector of span l.
using SpanMatrix = std::vector<std::vector<int>>;

inline SpanMatrix span_matrix(const std::vector<CircularInterval>& T) {
  SpanMatrix S;
  S.reserve(T.size());
  for (const CircularInterval& iv : T) {
    std::vector<int> row(iv.n, 0);
    for (std::size_t j : iv.members()) row[j] = 1;
    S.push_back(std::move(row));
  }
  return S;
}

// (a,b] -> (b,a] entrywise; an involution.
inline std::vector<CircularInterval> dual_span_list(const std::vector<CircularInterval>& T) {
  std::vector<CircularInterval> out;
  out.reserve(T.size());
  for (const CircularInterval& iv : T) out.push_back(CircularInterval(iv.b, iv.a, iv.n));
  return out;
}

// SCP of the product trellis for a row selection: (v)S.
// The selection must pick exactly k = n - (column sum) rows.
inline std::vector<std::size_t> kv_scp(const SpanMatrix& S, const std::vector<int>& selection) {
  if (S.empty()) throw std::invalid_argument("empty span matrix");
  std::size_t n = S[0].size();
  if (selection.size() != S.size()) throw std::invalid_argument("selection length mismatch");
  std::size_t colsum = 0;
  for (const auto& row : S) {
    if (row.size() != n) throw std::invalid_argument("ragged span matrix");
    colsum += row[0];
  }
  for (std::size_t c = 1; c < n; ++c) {
    std::size_t s = 0;
    for (const auto& row : S) s += row[c];
    if (s != colsum) throw std::invalid_argument("span matrix is not characteristic");
  }
  std::size_t weight = 0;
  for (int v : selection) {
    if (v != 0 && v != 1) throw std::invalid_argument("selection must be 0/1");
    weight += v;
  }
  if (weight != n - colsum)
    throw std::invalid_argument("selection must pick exactly k = n - (n-k) rows");
  std::vector<std::size_t> scp(n, 0);
  for (std::size_t l = 0; l < S.size(); ++l)
    if (selection[l])
      for (std::size_t c = 0; c < n; ++c) scp[c] += S[l][c];
  return scp;
}

}  // namespace tailbite
