#pragma once
// Dualization: the BCJR dual T_{(H,G,D^T)}, edge-space dualization under the
// bilinear form (v,a,w)x(vh,b,wh) |-> v.vh + ab - w.wh, the Koetter/Vardy
// duality-conjecture checker, and an exhaustive search harness over small
// codes with deterministic, resumable reporting.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "tailbite/caps.hpp"
#include "tailbite/charpair.hpp"
#include "tailbite/code.hpp"
#include "tailbite/construct.hpp"
#include "tailbite/galois.hpp"
#include "tailbite/trellis.hpp"

namespace tailbite {

// Dual BCJR trellis T_{(H,G,D^T)}: represents the dual code with the same
// SCP; its vertex matrices are exactly the transposes of the primal N_i.
inline MatrixTrellis bcjr_dual(const MatrixTrellis& t) {
  if (!t.parity || !t.displacement)
    throw std::invalid_argument("BCJR dual needs a trellis built by the BCJR construction");
  MatrixTrellis dual = bcjr_trellis(*t.parity, t.labels, t.displacement->transpose());
  for (std::size_t i = 0; i < t.depth; ++i)
    if (!(dual.vertex_at(i) + t.vertex_at(i).transpose().negated()).is_zero())
      throw std::logic_error("dual vertex matrices are not the transposes");
  return dual;
}

struct EdgeSpaceDual {
  ExplicitTrellis trellis;           // vertex sets im N^T_i, edge sets (E_i) annihilators
  std::vector<FpMatrix> edge_bases;  // per time: basis of (E_i)^o, triples (v^,b,w^)
  std::vector<std::size_t> ecp;      // dim (E_i)^o
  bool dims_ok = false;              // dim (E_i)^o == s_i + s_{i+1} + 1 - e_i for all i
  bool contains_bcjr_dual = false;   // E^_i subseteq (E_i)^o for all i
  bool reduced = false;
};

// Dualize the edge spaces: (E_i)^o is the annihilator of E_i inside
// im N^_i x F x im N^_{i+1} under Pi((v,a,w),(v^,b,w^)) = v.beta^T + ab - w.beta~^T
// for representatives v^ = beta N^_i, w^ = beta~ N^_{i+1}.  Concretely the
// annihilator coordinates (beta, b, beta~) form the right kernel of
// (N_i | G_i | -N_{i+1}), and are then mapped into dual vertex coordinates.
// The result can fail to be reduced; it is returned as-is.
inline EdgeSpaceDual edge_space_dual(const MatrixTrellis& t, const Caps& caps = Caps::defaults()) {
  MatrixTrellis hat = bcjr_dual(t);
  std::size_t n = t.depth;
  const PrimeField& f = t.field;
  std::vector<std::size_t> s = t.scp(), e = t.ecp();

  EdgeSpaceDual out{ExplicitTrellis(f, n), {}, {}, true, true, false};
  for (std::size_t i = 0; i < n; ++i)
    out.trellis.verts[i] = span_elements(row_space_basis(hat.vertex_at(i)), caps);
  for (std::size_t i = 0; i < n; ++i) {
    FpMatrix constraint =
        t.vertex_at(i).hstack(t.label_column(i)).hstack(t.vertex_at(i + 1).negated());
    FpMatrix kernel = left_kernel(constraint.transpose());  // rows (beta | b | beta~)
    std::size_t r0 = t.vertex_at(i).cols(), r1 = t.vertex_at(i + 1).cols();
    std::vector<FpVector> mapped;
    for (std::size_t row = 0; row < kernel.rows(); ++row) {
      FpVector beta = kernel.row(row).slice(0, r0);
      FpVector mid = kernel.row(row).slice(r0, 1);
      FpVector betat = kernel.row(row).slice(r0 + 1, r1);
      mapped.push_back(
          (beta * hat.vertex_at(i)).concat(mid).concat(betat * hat.vertex_at(i + 1)));
    }
    FpMatrix basis = row_space_basis(
        FpMatrix::from_rows(f, mapped, hat.vertex_at(i).cols() + 1 + hat.vertex_at(i + 1).cols()));
    out.edge_bases.push_back(basis);
    out.ecp.push_back(basis.rows());
    if (basis.rows() != s[i] + s[(i + 1) % n] + 1 - e[i]) out.dims_ok = false;
    SpaceRelation rel = row_space_relation(row_space_basis(hat.edge_matrix(i)), basis);
    if (rel != SpaceRelation::Equal && rel != SpaceRelation::ASubspaceOfB)
      out.contains_bcjr_dual = false;

    std::size_t w0 = hat.vertex_at(i).cols(), w1 = hat.vertex_at(i + 1).cols();
    for (const FpVector& triple : span_elements(basis, caps)) {
      FpVector from = triple.slice(0, w0);
      int label = triple[w0];
      FpVector to = triple.slice(w0 + 1, w1);
      out.trellis.edges[i].push_back(
          {out.trellis.vertex_index(i, from), label, out.trellis.vertex_index(i + 1, to)});
    }
    std::sort(out.trellis.edges[i].begin(), out.trellis.edges[i].end());
    out.trellis.edges[i].erase(
        std::unique(out.trellis.edges[i].begin(), out.trellis.edges[i].end()),
        out.trellis.edges[i].end());
  }
  out.reduced = is_reduced(out.trellis);
  return out;
}

struct DualMatrixVerdict {
  std::size_t matrix_index = 0;
  bool independent = false;
  std::vector<std::size_t> dual_scp;  // of the dual KV-trellis, when independent
  bool scp_matches = false;           // dual SCP == primal SCP
  Verdict iso_to_bcjr_dual = Verdict::Unknown;
};

struct DualityReport {
  std::vector<std::size_t> selection;        // primal row indices
  std::vector<CircularInterval> dual_spans;  // complementary spans (b_l, a_l], l unselected
  std::vector<std::size_t> dual_rows;        // their row indices in the dual pair
  std::vector<std::size_t> primal_scp;
  std::vector<std::size_t> bcjr_dual_scp, bcjr_dual_ecp;
  std::vector<DualMatrixVerdict> verdicts;  // one per enumerated dual characteristic matrix
  bool dual_enumeration_truncated = false;
  bool strong = false;  // the lex-first dual matrix gives independent rows
  bool weak = false;    // some dual matrix gives independent rows
};

// Koetter/Vardy duality check for one row selection: take the complementary
// dual spans (b_l, a_l] over the unselected rows, and test for each dual
// characteristic matrix whether the rows carrying those spans are linearly
// independent; when they are, build the dual KV-trellis and compare it with
// the BCJR dual.
inline DualityReport kv_duality_check(const LinearCode& C, const CharacteristicPair& pair,
                                      const std::vector<std::size_t>& selection,
                                      const Caps& caps = Caps::defaults()) {
  LinearCode dual_code = C.dual();
  if (!C.full_support() || !dual_code.full_support())
    throw std::invalid_argument("duality check needs full support of the code and its dual");

  DualityReport rep;
  rep.selection = selection;
  MatrixTrellis kv = kv_trellis(pair, selection);
  rep.primal_scp = kv.scp();

  std::vector<FpVector> grows;
  std::vector<CircularInterval> gspans;
  for (std::size_t l : selection) {
    grows.push_back(pair.X.row(l));
    gspans.push_back(pair.spans[l]);
  }
  FpMatrix Gsel = FpMatrix::from_rows(C.field(), grows, C.length());
  MatrixTrellis bcjr = bcjr_trellis_from_spans(Gsel, C.parity(), gspans);
  MatrixTrellis hat = bcjr_dual(bcjr);
  rep.bcjr_dual_scp = hat.scp();
  rep.bcjr_dual_ecp = hat.ecp();

  // complementary dual spans: reversals of the unselected primal spans
  std::vector<CircularInterval> excluded;
  for (std::size_t l : selection)
    excluded.push_back(interval_complement(pair.spans[l]));  // (a,b] -> (b,a]
  CharMatrixEnumeration dual_matrices =
      enumerate_characteristic_matrices(dual_code, caps.enumeration, caps);
  rep.dual_enumeration_truncated = dual_matrices.truncated;
  const CharacteristicPair& dual_pair = dual_matrices.matrices.at(0);
  {
    // the dual characteristic span list must be the reversed primal one
    std::vector<CircularInterval> reversed, dual_spans_sorted = dual_pair.spans;
    for (const CircularInterval& iv : pair.spans) reversed.push_back(interval_complement(iv));
    std::sort(reversed.begin(), reversed.end());
    std::sort(dual_spans_sorted.begin(), dual_spans_sorted.end());
    if (reversed != dual_spans_sorted)
      throw std::logic_error("dual characteristic span list is not the reversed primal list");
  }
  for (std::size_t l = 0; l < dual_pair.spans.size(); ++l)
    if (std::find(excluded.begin(), excluded.end(), dual_pair.spans[l]) == excluded.end()) {
      rep.dual_rows.push_back(l);
      rep.dual_spans.push_back(dual_pair.spans[l]);
    }
  if (rep.dual_rows.size() != C.length() - C.dimension())
    throw std::logic_error("complementary dual span count mismatch");

  for (std::size_t v = 0; v < dual_matrices.matrices.size(); ++v) {
    const CharacteristicPair& dp = dual_matrices.matrices[v];
    DualMatrixVerdict verdict;
    verdict.matrix_index = v;
    std::vector<FpVector> rows;
    for (std::size_t l : rep.dual_rows) rows.push_back(dp.X.row(l));
    FpMatrix sel = FpMatrix::from_rows(C.field(), rows, C.length());
    verdict.independent = rank(sel) == sel.rows();
    if (verdict.independent) {
      MatrixTrellis dual_kv = kv_trellis(dp, rep.dual_rows);
      verdict.dual_scp = dual_kv.scp();
      verdict.scp_matches = verdict.dual_scp == rep.primal_scp;
      verdict.iso_to_bcjr_dual = isomorphic(dual_kv, hat, caps).verdict;
      if (v == 0) rep.strong = true;
      rep.weak = true;
    }
    rep.verdicts.push_back(std::move(verdict));
  }
  return rep;
}

struct SearchOptions {
  int field = 2;
  std::size_t n_min = 2, n_max = 4;
  std::size_t k_min = 1, k_max = 0;  // 0: up to n-1
  bool cyclic_dedup = true;          // one representative per shift orbit
  bool perm_dedup = false;           // opt-in: dedup by coordinate permutation
  std::size_t workers = 1;
  std::string report_file;    // appended to as codes complete (canonical order)
  std::string progress_file;  // holds the last completed code index, for resume
};

struct SearchRecord {
  std::string line;                 // formatted report line
  bool counterexample = false;      // no dual matrix yields independence
  bool choice_dependent = false;    // lex-first fails but another succeeds
  bool minimal = false;             // the selection's KV-trellis is minimal
  Verdict minimal_iso = Verdict::Unknown;  // iso to BCJR dual, minimal selections only
};

struct SearchReport {
  std::size_t codes_processed = 0;
  std::size_t selections_checked = 0;
  std::vector<SearchRecord> records;  // canonical order
  bool truncated = false;             // some enumeration hit a cap
};

namespace detail {

inline std::string matrix_digits(const FpMatrix& m) {
  std::string s;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (r) s += ';';
    for (std::size_t c = 0; c < m.cols(); ++c) s += m.at(r, c) < 10 ? char('0' + m.at(r, c)) : 'x';
  }
  return s;
}

// canonical form of a code: RREF generator digits
inline std::string canonical_code_string(const FpMatrix& G) {
  return matrix_digits(row_space_basis(G));
}

inline FpMatrix shift_generator(const FpMatrix& G, std::size_t j) {
  FpMatrix out(G.field(), G.rows(), G.cols());
  for (std::size_t r = 0; r < G.rows(); ++r) {
    FpVector shifted = cyclic_shift(G.row(r), j);
    for (std::size_t c = 0; c < G.cols(); ++c) out.set(r, c, shifted[c]);
  }
  return out;
}

// all RREF matrices of shape k x n and rank k over the field
inline std::vector<FpMatrix> enumerate_rref_generators(const PrimeField& f, std::size_t k,
                                                       std::size_t n) {
  std::vector<FpMatrix> out;
  std::vector<std::size_t> pivots(k);
  for (std::size_t i = 0; i < k; ++i) pivots[i] = i;
  auto next_pivots = [&]() {
    std::size_t i = k;
    while (i > 0) {
      --i;
      if (pivots[i] + (k - i) < n) {
        ++pivots[i];
        for (std::size_t j = i + 1; j < k; ++j) pivots[j] = pivots[j - 1] + 1;
        return true;
      }
    }
    return false;
  };
  int q = f.modulus();
  do {
    // free positions: (r, c) with c > pivots[r] and c not a pivot column
    std::vector<std::pair<std::size_t, std::size_t>> free_pos;
    std::vector<bool> is_pivot(n, false);
    for (std::size_t p : pivots) is_pivot[p] = true;
    for (std::size_t r = 0; r < k; ++r)
      for (std::size_t c = pivots[r] + 1; c < n; ++c)
        if (!is_pivot[c]) free_pos.emplace_back(r, c);
    std::vector<int> digits(free_pos.size(), 0);
    while (true) {
      FpMatrix G(f, k, n);
      for (std::size_t r = 0; r < k; ++r) G.set(r, pivots[r], 1);
      for (std::size_t i = 0; i < free_pos.size(); ++i)
        G.set(free_pos[i].first, free_pos[i].second, digits[i]);
      out.push_back(G);
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
  } while (next_pivots());
  return out;
}

}  // namespace detail

// Exhaustive duality-conjecture explorer.  For every code in range (full
// support on both sides, deduplicated), every characteristic matrix, and
// every independent row selection, checks whether some dual characteristic
// matrix makes the complementary rows independent.  Records one line per
// (code, matrix, selection); any "counterexample" verdict refutes the
// existence form of the conjecture on that instance.
inline SearchReport conjecture_search(const SearchOptions& opts,
                                      const Caps& caps = Caps::defaults()) {
  PrimeField f(opts.field);
  // canonical ordered list of codes to process
  std::vector<FpMatrix> codes;
  for (std::size_t n = opts.n_min; n <= opts.n_max; ++n) {
    std::size_t khi = opts.k_max == 0 ? (n == 0 ? 0 : n - 1) : std::min(opts.k_max, n - 1);
    for (std::size_t k = opts.k_min; k <= khi; ++k) {
      for (FpMatrix& G : detail::enumerate_rref_generators(f, k, n)) {
        bool full = true;
        for (std::size_t c = 0; c < n && full; ++c)
          if (G.col(c).is_zero()) full = false;
        if (!full) continue;
        LinearCode C = LinearCode::from_generator(G);
        if (!C.dual().full_support()) continue;
        if (opts.cyclic_dedup) {
          std::string self = detail::matrix_digits(G), best = self;
          for (std::size_t j = 1; j < n; ++j)
            best = std::min(best, detail::canonical_code_string(detail::shift_generator(G, j)));
          if (best != self) continue;
        }
        if (opts.perm_dedup) {
          std::vector<std::size_t> perm(n);
          for (std::size_t i = 0; i < n; ++i) perm[i] = i;
          std::string self = detail::matrix_digits(G), best = self;
          while (std::next_permutation(perm.begin(), perm.end())) {
            FpMatrix P(f, G.rows(), n);
            for (std::size_t r = 0; r < G.rows(); ++r)
              for (std::size_t c = 0; c < n; ++c) P.set(r, c, G.at(r, perm[c]));
            best = std::min(best, detail::canonical_code_string(P));
          }
          if (best != self) continue;
        }
        codes.push_back(G);
      }
    }
  }

  std::size_t start_index = 0;
  if (!opts.progress_file.empty()) {
    std::ifstream in(opts.progress_file);
    std::size_t done;
    if (in >> done) start_index = done + 1;
  }

  SearchReport report;
  std::vector<std::vector<SearchRecord>> per_code(codes.size());
  std::vector<char> completed(codes.size(), 0);
  std::atomic<std::size_t> next{start_index};
  std::atomic<bool> truncated{false};
  std::mutex emit_mutex;
  std::size_t watermark = start_index;  // first index not yet flushed
  std::ofstream report_out;
  if (!opts.report_file.empty())
    report_out.open(opts.report_file, start_index == 0 ? std::ios::trunc : std::ios::app);

  auto process_code = [&](std::size_t idx) {
    const FpMatrix& G = codes[idx];
    std::size_t n = G.cols(), k = G.rows();
    LinearCode C = LinearCode::from_generator(G);
    std::vector<SearchRecord> records;
    try {
      CharMatrixEnumeration primal = enumerate_characteristic_matrices(C, caps.enumeration, caps);
      if (primal.truncated) truncated = true;
      // SCP of every independent selection of every matrix, for minimality
      std::vector<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> all_scps;
      std::vector<std::size_t> sel(k);
      for (std::size_t mi = 0; mi < primal.matrices.size(); ++mi) {
        const CharacteristicPair& cp = primal.matrices[mi];
        for (std::size_t i = 0; i < k; ++i) sel[i] = i;
        bool more = true;
        while (more) {
          std::vector<FpVector> rows;
          for (std::size_t l : sel) rows.push_back(cp.X.row(l));
          if (rank(FpMatrix::from_rows(f, rows, n)) == k) {
            std::vector<int> pick(n, 0);
            for (std::size_t l : sel) pick[l] = 1;
            all_scps.emplace_back(sel, kv_scp(span_matrix(cp.spans), pick));
          }
          std::size_t i = k;
          more = false;
          while (i > 0) {
            --i;
            if (sel[i] + (k - i) < n) {
              ++sel[i];
              for (std::size_t j = i + 1; j < k; ++j) sel[j] = sel[j - 1] + 1;
              more = true;
              break;
            }
          }
        }
      }
      auto dominated = [&](const std::vector<std::size_t>& scp) {
        for (const auto& [osel, oscp] : all_scps) {
          bool le = true, lt = false;
          for (std::size_t i = 0; i < n; ++i) {
            if (oscp[i] > scp[i]) le = false;
            if (oscp[i] < scp[i]) lt = true;
          }
          if (le && lt) return true;
        }
        return false;
      };
      for (std::size_t mi = 0; mi < primal.matrices.size(); ++mi) {
        const CharacteristicPair& cp = primal.matrices[mi];
        for (std::size_t i = 0; i < k; ++i) sel[i] = i;
        bool more = true;
        while (more) {
          std::vector<FpVector> rows;
          for (std::size_t l : sel) rows.push_back(cp.X.row(l));
          if (rank(FpMatrix::from_rows(f, rows, n)) == k) {
            DualityReport dr = kv_duality_check(C, cp, sel, caps);
            if (dr.dual_enumeration_truncated) truncated = true;
            SearchRecord rec;
            rec.counterexample = !dr.weak;
            rec.choice_dependent = dr.weak && !dr.strong;
            std::vector<int> pick(n, 0);
            for (std::size_t l : sel) pick[l] = 1;
            rec.minimal = !dominated(kv_scp(span_matrix(cp.spans), pick));
            long long ok_at = -1;
            for (const DualMatrixVerdict& v : dr.verdicts)
              if (v.independent) { ok_at = (long long)v.matrix_index; break; }
            if (rec.minimal && ok_at >= 0)
              rec.minimal_iso = dr.verdicts[std::size_t(ok_at)].iso_to_bcjr_dual;
            std::ostringstream line;
            line << "q=" << opts.field << " n=" << n << " k=" << k
                 << " G=" << detail::matrix_digits(G) << " X=" << mi << " sel=";
            for (std::size_t i = 0; i < k; ++i) line << (i ? "," : "") << sel[i];
            line << " minimal=" << (rec.minimal ? 1 : 0) << " verdict="
                 << (rec.counterexample ? "counterexample"
                                        : (rec.choice_dependent ? "choice-dependent" : "pass"))
                 << " dual_ok_matrix=" << ok_at << " iso=";
            if (!rec.minimal || ok_at < 0)
              line << "skip";
            else
              line << (rec.minimal_iso == Verdict::Yes
                           ? "yes"
                           : (rec.minimal_iso == Verdict::No ? "no" : "unknown"));
            rec.line = line.str();
            records.push_back(std::move(rec));
          }
          std::size_t i = k;
          more = false;
          while (i > 0) {
            --i;
            if (sel[i] + (k - i) < n) {
              ++sel[i];
              for (std::size_t j = i + 1; j < k; ++j) sel[j] = sel[j - 1] + 1;
              more = true;
              break;
            }
          }
        }
      }
    } catch (const CapExceeded&) {
      truncated = true;
      SearchRecord rec;
      rec.line = "q=" + std::to_string(opts.field) + " n=" + std::to_string(n) +
                 " k=" + std::to_string(k) + " G=" + detail::matrix_digits(G) +
                 " verdict=cap-exceeded";
      records.push_back(std::move(rec));
    }
    std::lock_guard<std::mutex> lock(emit_mutex);
    per_code[idx] = std::move(records);
    completed[idx] = 1;
    while (watermark < codes.size() && completed[watermark]) {
      if (report_out.is_open()) {
        for (const SearchRecord& r : per_code[watermark]) report_out << r.line << '\n';
        report_out.flush();
      }
      if (!opts.progress_file.empty()) {
        std::ofstream prog(opts.progress_file, std::ios::trunc);
        prog << watermark << '\n';
      }
      ++watermark;
    }
  };

  std::size_t nworkers = std::max<std::size_t>(1, opts.workers);
  if (nworkers == 1) {
    for (std::size_t idx = start_index; idx < codes.size(); ++idx) process_code(idx);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < nworkers; ++w)
      pool.emplace_back([&]() {
        while (true) {
          std::size_t idx = next.fetch_add(1);
          if (idx >= codes.size()) break;
          process_code(idx);
        }
      });
    for (std::thread& th : pool) th.join();
  }

  report.codes_processed = codes.size() - start_index;
  report.truncated = truncated;
  for (std::size_t idx = start_index; idx < codes.size(); ++idx)
    for (SearchRecord& r : per_code[idx]) {
      ++report.selections_checked;
      report.records.push_back(std::move(r));
    }
  return report;
}

}  // namespace tailbite
