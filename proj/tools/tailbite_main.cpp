// tailbite: build and analyze tail-biting trellis representations of linear
// block codes over prime fields.
//
// Exit codes: 0 success / property verified; 1 property violation (witness
// printed); 2 usage or input error; 3 enumeration cap exceeded.  The env var
// TAILBITE_CAP overrides the default caps.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "tailbite/caps.hpp"
#include "tailbite/charpair.hpp"
#include "tailbite/code.hpp"
#include "tailbite/construct.hpp"
#include "tailbite/dot.hpp"
#include "tailbite/duality.hpp"
#include "tailbite/galois.hpp"
#include "tailbite/io.hpp"
#include "tailbite/trellis.hpp"

using nlohmann::json;
using namespace tailbite;

namespace {

json vec_json(const FpVector& v) {
  json a = json::array();
  for (std::size_t i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json mat_json(const FpMatrix& m) {
  json a = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) a.push_back(vec_json(m.row(r)));
  return a;
}

json spans_json(const std::vector<CircularInterval>& spans) {
  json a = json::array();
  for (const CircularInterval& iv : spans) a.push_back(iv.to_string());
  return a;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Yes: return "yes";
    case Verdict::No: return "no";
    default: return "unknown";
  }
}

LinearCode load_code(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open code file: " + path);
  return parse_code(in);
}

std::vector<std::size_t> parse_selection(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t b = item.find_first_not_of(" \t");
    std::size_t e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw std::invalid_argument("empty selection entry");
    out.push_back(std::stoul(item.substr(b, e - b + 1)));
  }
  if (out.empty()) throw std::invalid_argument("empty selection");
  return out;
}

struct TrellisSpec {
  std::string code_file, kind, spans, select, span, displacement;
  std::size_t matrix = 0, row = 0;
};

// Options shared by every command that names a trellis.
void add_spec_options(CLI::App* cmd, TrellisSpec& spec, bool kind_fixed,
                      const std::string& suffix = "") {
  if (suffix.empty())
    cmd->add_option("code", spec.code_file, "code file (q/n/k/G)")->required();
  else
    cmd->add_option("--code" + suffix, spec.code_file, "code file (q/n/k/G)")->required();
  if (!kind_fixed)
    cmd->add_option("--kind" + suffix, spec.kind, "trellis construction")
        ->required()
        ->check(CLI::IsMember({"elementary", "product", "bcjr", "kv"}));
  cmd->add_option("--spans" + suffix, spec.spans,
                  "span per generator row, \"(a,b],(c,d]\" (default: linear spans)");
  cmd->add_option("--select" + suffix, spec.select,
                  "characteristic row selection for kv, e.g. \"2,3\"");
  cmd->add_option("--matrix" + suffix, spec.matrix,
                  "characteristic matrix index for kv (default 0, the lex-first)");
  cmd->add_option("--row" + suffix, spec.row, "generator row for elementary (default 0)");
  cmd->add_option("--span" + suffix, spec.span, "span for elementary, \"(a,b]\"");
  cmd->add_option("--displacement" + suffix, spec.displacement,
                  "displacement matrix for bcjr, rows ';'-separated: \"0;1\"");
}

MatrixTrellis build_trellis(const TrellisSpec& spec, const Caps& caps,
                            std::optional<LinearCode>& code_out) {
  LinearCode C = load_code(spec.code_file);
  code_out = C;
  std::size_t n = C.length();
  if (spec.kind == "elementary") {
    if (spec.row >= C.dimension()) throw std::invalid_argument("row index out of range");
    FpVector word = C.generator().row(spec.row);
    CircularInterval iv =
        spec.span.empty() ? linear_span_of(word) : parse_spans(spec.span, n).at(0);
    return elementary_trellis(word, iv);
  }
  if (spec.kind == "product" || spec.kind == "bcjr") {
    if (spec.kind == "bcjr" && !spec.displacement.empty())
      return bcjr_trellis(C.generator(), C.parity(),
                          parse_matrix(C.field(), spec.displacement));
    std::vector<CircularInterval> spans;
    if (!spec.spans.empty())
      spans = parse_spans(spec.spans, n);
    else
      for (std::size_t l = 0; l < C.dimension(); ++l)
        spans.push_back(linear_span_of(C.generator().row(l)));
    if (spec.kind == "product") return product_trellis(C.generator(), spans);
    return bcjr_trellis_from_spans(C.generator(), C.parity(), spans);
  }
  if (spec.kind == "kv") {
    if (spec.select.empty()) throw std::invalid_argument("kv trellis needs --select");
    CharMatrixEnumeration en = enumerate_characteristic_matrices(C, caps.enumeration, caps);
    if (spec.matrix >= en.matrices.size())
      throw std::invalid_argument("characteristic matrix index out of range");
    return kv_trellis(en.matrices[spec.matrix], parse_selection(spec.select));
  }
  throw std::invalid_argument("unknown trellis kind: " + spec.kind);
}

json trellis_json(const MatrixTrellis& t) {
  json j;
  j["field"] = t.field.modulus();
  j["depth"] = t.depth;
  j["coeff_dim"] = t.coeff_dim;
  json vm = json::array();
  for (std::size_t i = 0; i < t.depth; ++i) vm.push_back(mat_json(t.vertex_at(i)));
  j["vertex_matrices"] = vm;
  j["labels"] = mat_json(t.labels);
  j["scp"] = t.scp();
  j["ecp"] = t.ecp();
  if (t.spans) j["spans"] = spans_json(*t.spans);
  if (t.parity) j["parity"] = mat_json(*t.parity);
  if (t.displacement) j["displacement"] = mat_json(*t.displacement);
  j["rank_deficient"] = t.rank_deficient;
  return j;
}

void print_trellis_text(const MatrixTrellis& t) {
  std::cout << "GF(" << t.field.modulus() << "), depth " << t.depth << ", " << t.coeff_dim
            << " coefficient rows\n";
  if (t.rank_deficient) std::cout << "note: generator rows are linearly dependent\n";
  if (t.spans) std::cout << "spans: " << emit_spans(*t.spans) << "\n";
  std::cout << "labels:\n" << t.labels.to_string() << "\n";
  for (std::size_t i = 0; i < t.depth; ++i)
    std::cout << "A_" << i << ":\n" << t.vertex_at(i).to_string() << "\n";
  auto print_profile = [](const char* name, const std::vector<std::size_t>& v) {
    std::cout << name << ": (";
    for (std::size_t i = 0; i < v.size(); ++i) std::cout << (i ? "," : "") << v[i];
    std::cout << ")\n";
  };
  print_profile("scp", t.scp());
  print_profile("ecp", t.ecp());
}

json cycle_json(const VectorCycle& c) {
  json j;
  json vs = json::array();
  for (const FpVector& v : c.vertices) vs.push_back(vec_json(v));
  j["vertices"] = vs;
  j["labels"] = vec_json(c.labels);
  return j;
}

// Shared property-check runner; returns the process exit code.
int run_property_check(const MatrixTrellis& t, const std::string& prop,
                       const std::optional<LinearCode>& C, bool json_out, const Caps& caps) {
  json j;
  j["check"] = prop;
  int rc = 0;
  std::string note;
  if (prop == "one-to-one") {
    OneToOneReport r = is_one_to_one(t);
    j["holds"] = r.one_to_one;
    rc = r.one_to_one ? 0 : 1;
    if (!r.one_to_one && r.witness) {
      j["witness"] = {{"cycle_a", cycle_json(r.witness->first)},
                      {"cycle_b", cycle_json(r.witness->second)}};
      note = "two distinct cycles share the label word " + r.witness->first.labels.to_string();
    }
  } else if (prop == "reduced") {
    ExpandResult ex = expand(t, caps);
    bool holds = ex.pruned_vertices == 0 && ex.pruned_edges == 0;
    j["holds"] = holds;
    j["pruned_vertices"] = ex.pruned_vertices;
    j["pruned_edges"] = ex.pruned_edges;
    rc = holds ? 0 : 1;
    if (!holds)
      note = std::to_string(ex.pruned_vertices) + " vertices / " +
             std::to_string(ex.pruned_edges) + " edges lie on no cycle";
  } else if (prop == "biproper") {
    bool holds = is_biproper(t);
    j["holds"] = holds;
    rc = holds ? 0 : 1;
    if (!holds)
      for (std::size_t i = 0; i < t.depth; ++i) {
        std::size_t e = rank(t.edge_matrix(i));
        bool out_ok = rank(t.vertex_at(i).hstack(t.label_column(i))) == e;
        bool in_ok = rank(t.label_column(i).hstack(t.vertex_at(i + 1))) == e;
        if (!out_ok || !in_ok) {
          j["witness"] = {{"time", i}, {"side", out_ok ? "incoming" : "outgoing"}};
          note = "parallel equal-label edges at time " + std::to_string(i);
          break;
        }
      }
  } else if (prop == "non-mergeable") {
    MergeabilityReport r = is_non_mergeable(t, caps);
    j["holds"] = r.non_mergeable;
    rc = r.non_mergeable ? 0 : 1;
    if (!r.non_mergeable && r.witness) {
      j["witness"] = {{"time", r.witness->first}, {"vertex", vec_json(r.witness->second)}};
      note = "merging along " + r.witness->second.to_string() + " at time " +
             std::to_string(r.witness->first) + " preserves the label code";
    }
  } else if (prop == "minimal") {
    if (!C) throw std::invalid_argument("minimality check needs the code");
    MinimalityReport r = is_minimal(t, *C, caps);
    j["scp"] = r.scp;
    if (r.verdict == MinimalityVerdict::Minimal) {
      j["holds"] = true;
    } else if (r.verdict == MinimalityVerdict::Dominated) {
      j["holds"] = false;
      j["witness"] = {{"selection", r.dominating_selection}, {"scp", r.dominating_scp}};
      rc = 1;
      std::ostringstream os;
      os << "dominated by characteristic selection {";
      for (std::size_t i = 0; i < r.dominating_selection.size(); ++i)
        os << (i ? "," : "") << r.dominating_selection[i];
      os << "}";
      note = os.str();
    } else {
      j["holds"] = "unknown";
      rc = 3;
      note = "undecided: enumeration was capped";
    }
  } else {
    throw std::invalid_argument("unknown check: " + prop);
  }
  if (json_out) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << prop << ": " << (rc == 0 ? "holds" : (rc == 3 ? "unknown" : "violated")) << "\n";
    if (!note.empty()) std::cout << note << "\n";
  }
  return rc;
}

void emit_or_print(const json& j, bool json_out, const std::string& text) {
  if (json_out)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tail-biting trellis constructions and checks for linear block codes"};
  app.require_subcommand(1);
  int rc = 0;
  const Caps& caps = Caps::defaults();

  // ---- code ----
  CLI::App* code = app.add_subcommand("code", "inspect and transform code files");
  code->require_subcommand(1);
  {
    auto o = std::make_shared<std::pair<std::string, bool>>();
    CLI::App* c = code->add_subcommand("info", "length, dimension, generator, codewords");
    c->add_option("code", o->first, "code file")->required();
    c->add_flag("--json", o->second, "machine-readable output");
    c->callback([o, &rc, &caps]() {
      LinearCode C = load_code(o->first);
      json j;
      j["q"] = C.field().modulus();
      j["n"] = C.length();
      j["k"] = C.dimension();
      j["generator"] = mat_json(C.generator());
      j["parity"] = mat_json(C.parity());
      j["full_support"] = C.full_support();
      std::ostringstream text;
      text << "GF(" << C.field().modulus() << ") [" << C.length() << "," << C.dimension()
           << "] code\n";
      text << "generator:\n" << C.generator().to_string() << "\n";
      text << "parity check:\n" << C.parity().to_string() << "\n";
      try {
        std::vector<FpVector> words = C.codewords(caps);
        std::sort(words.begin(), words.end(), lex_less);
        json ws = json::array();
        text << "codewords (" << words.size() << "):\n";
        for (const FpVector& w : words) {
          ws.push_back(vec_json(w));
          text << "  " << w.to_string() << "\n";
        }
        j["codewords"] = ws;
      } catch (const CapExceeded&) {
        j["codewords"] = nullptr;
        text << "codewords: not listed (enumeration cap)\n";
      }
      emit_or_print(j, o->second, text.str());
      rc = 0;
    });
  }
  {
    auto o = std::make_shared<std::string>();
    CLI::App* c = code->add_subcommand("emit", "re-emit the code file in canonical form");
    c->add_option("code", *o, "code file")->required();
    c->callback([o, &rc]() {
      std::cout << emit_code(load_code(*o));
      rc = 0;
    });
  }
  {
    auto o = std::make_shared<std::string>();
    CLI::App* c = code->add_subcommand("dual", "emit the dual code as a code file");
    c->add_option("code", *o, "code file")->required();
    c->callback([o, &rc]() {
      std::cout << emit_code(load_code(*o).dual());
      rc = 0;
    });
  }
  {
    auto o = std::make_shared<std::pair<std::string, std::size_t>>("", 1);
    CLI::App* c = code->add_subcommand("shift", "emit the cyclically shifted code");
    c->add_option("code", o->first, "code file")->required();
    c->add_option("--by", o->second, "shift amount (default 1)");
    c->callback([o, &rc]() {
      std::cout << emit_code(load_code(o->first).shifted(o->second));
      rc = 0;
    });
  }

  // ---- charpair ----
  CLI::App* charp = app.add_subcommand("charpair", "characteristic pairs and span matrices");
  charp->require_subcommand(1);
  struct CharpairOpts {
    std::string code_file;
    bool json = false;
  };
  {
    auto o = std::make_shared<CharpairOpts>();
    CLI::App* c = charp->add_subcommand("compute", "lex-first characteristic pair (X, T)");
    c->add_option("code", o->code_file, "code file")->required();
    c->add_flag("--json", o->json, "machine-readable output");
    c->callback([o, &rc, &caps]() {
      LinearCode C = load_code(o->code_file);
      CharacteristicPair p = characteristic_pair(C, caps);
      SpanMatrix S = span_matrix(p.spans);
      json j;
      j["X"] = mat_json(p.X);
      j["spans"] = spans_json(p.spans);
      j["span_matrix"] = S;
      j["lex_fallback"] = p.lex_fallback;
      std::ostringstream text;
      text << "characteristic matrix X (rows annotated with spans):\n";
      for (std::size_t r = 0; r < p.X.rows(); ++r)
        text << "  " << p.X.row(r).to_string() << "  " << p.spans[r].to_string() << "\n";
      text << "span matrix S:\n";
      for (const auto& row : S) {
        text << "  [";
        for (std::size_t i = 0; i < row.size(); ++i) text << (i ? " " : "") << row[i];
        text << "]\n";
      }
      emit_or_print(j, o->json, text.str());
      rc = 0;
    });
  }
  {
    auto o = std::make_shared<CharpairOpts>();
    CLI::App* c = charp->add_subcommand("enumerate", "all characteristic matrices");
    c->add_option("code", o->code_file, "code file")->required();
    c->add_flag("--json", o->json, "machine-readable output");
    c->callback([o, &rc, &caps]() {
      LinearCode C = load_code(o->code_file);
      CharMatrixEnumeration en = enumerate_characteristic_matrices(C, caps.enumeration, caps);
      json j;
      j["count"] = en.matrices.size();
      j["truncated"] = en.truncated;
      j["spans"] = spans_json(en.matrices.at(0).spans);
      json ms = json::array();
      for (const CharacteristicPair& p : en.matrices) ms.push_back(mat_json(p.X));
      j["matrices"] = ms;
      std::ostringstream text;
      text << en.matrices.size() << " characteristic matrices"
           << (en.truncated ? " (truncated by cap)" : "") << "\n";
      text << "spans: " << emit_spans(en.matrices.at(0).spans) << "\n";
      for (std::size_t v = 0; v < en.matrices.size(); ++v)
        text << "matrix " << v << ":\n" << en.matrices[v].X.to_string() << "\n";
      emit_or_print(j, o->json, text.str());
      rc = 0;
    });
  }
  {
    auto o = std::make_shared<CharpairOpts>();
    CLI::App* c = charp->add_subcommand("spanmatrix", "characteristic span list and 0/1 matrix");
    c->add_option("code", o->code_file, "code file")->required();
    c->add_flag("--json", o->json, "machine-readable output");
    c->callback([o, &rc, &caps]() {
      LinearCode C = load_code(o->code_file);
      CharacteristicPair p = characteristic_pair(C, caps);
      SpanMatrix S = span_matrix(p.spans);
      json j;
      j["spans"] = spans_json(p.spans);
      j["span_matrix"] = S;
      std::ostringstream text;
      text << "spans: " << emit_spans(p.spans) << "\n";
      for (const auto& row : S) {
        text << "[";
        for (std::size_t i = 0; i < row.size(); ++i) text << (i ? " " : "") << row[i];
        text << "]\n";
      }
      emit_or_print(j, o->json, text.str());
      rc = 0;
    });
  }
  {
    auto o = std::make_shared<CharpairOpts>();
    CLI::App* c = charp->add_subcommand("dualspans",
                                        "dual characteristic span list (reversed intervals)");
    c->add_option("code", o->code_file, "code file")->required();
    c->add_flag("--json", o->json, "machine-readable output");
    c->callback([o, &rc, &caps]() {
      LinearCode C = load_code(o->code_file);
      CharacteristicPair p = characteristic_pair(C, caps);
      std::vector<CircularInterval> reversed = dual_span_list(p.spans);
      CharacteristicPair dp = characteristic_pair(C.dual(), caps);
      std::vector<CircularInterval> a = reversed, b = dp.spans;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      bool consistent = a == b;
      json j;
      j["spans"] = spans_json(p.spans);
      j["dual_spans"] = spans_json(reversed);
      j["dual_pair_spans"] = spans_json(dp.spans);
      j["consistent"] = consistent;
      std::ostringstream text;
      text << "primal spans: " << emit_spans(p.spans) << "\n";
      text << "reversed:     " << emit_spans(reversed) << "\n";
      text << "dual pair:    " << emit_spans(dp.spans) << "\n";
      text << (consistent ? "consistent\n" : "MISMATCH\n");
      emit_or_print(j, o->json, text.str());
      rc = consistent ? 0 : 1;
    });
  }

  // ---- trellis ----
  CLI::App* trellis = app.add_subcommand("trellis", "build and check trellises");
  trellis->require_subcommand(1);
  struct BuildOpts {
    TrellisSpec spec;
    std::string check;
    bool json = false;
  };
  auto add_builder = [&](const std::string& name, const std::string& desc) {
    auto o = std::make_shared<BuildOpts>();
    o->spec.kind = name;
    CLI::App* c = trellis->add_subcommand(name, desc);
    add_spec_options(c, o->spec, true);
    c->add_option("--check", o->check, "property to verify")
        ->check(CLI::IsMember({"one-to-one", "reduced", "biproper", "non-mergeable", "minimal"}));
    c->add_flag("--json", o->json, "machine-readable output");
    c->callback([o, &rc, &caps]() {
      std::optional<LinearCode> C;
      MatrixTrellis t = build_trellis(o->spec, caps, C);
      if (!o->check.empty()) {
        rc = run_property_check(t, o->check, C, o->json, caps);
        return;
      }
      if (o->json)
        std::cout << trellis_json(t).dump(2) << "\n";
      else
        print_trellis_text(t);
      rc = 0;
    });
  };
  add_builder("elementary", "elementary trellis of one generator row");
  add_builder("product", "product of the rows' elementary trellises");
  add_builder("bcjr", "tail-biting BCJR trellis");
  add_builder("kv", "KV-trellis from a characteristic row selection");
  {
    auto o = std::make_shared<BuildOpts>();
    CLI::App* c = trellis->add_subcommand("check", "verify a property of a trellis");
    add_spec_options(c, o->spec, false);
    c->add_option("--check", o->check, "property to verify")
        ->required()
        ->check(CLI::IsMember({"one-to-one", "reduced", "biproper", "non-mergeable", "minimal"}));
    c->add_flag("--json", o->json, "machine-readable output");
    c->callback([o, &rc, &caps]() {
      std::optional<LinearCode> C;
      MatrixTrellis t = build_trellis(o->spec, caps, C);
      rc = run_property_check(t, o->check, C, o->json, caps);
    });
  }
  {
    struct CompareOpts {
      TrellisSpec a, b;
      bool structural = false, explicit_graph = false, json = false;
    };
    auto o = std::make_shared<CompareOpts>();
    CLI::App* c = trellis->add_subcommand("compare", "decide isomorphism of two trellises");
    add_spec_options(c, o->a, false, "-a");
    add_spec_options(c, o->b, false, "-b");
    c->add_flag("--structural", o->structural,
                "structural isomorphism (ignore labels and coefficient coordinates)");
    c->add_flag("--explicit", o->explicit_graph,
                "compare the expanded graphs instead of the linear form");
    c->add_flag("--json", o->json, "machine-readable output");
    c->callback([o, &rc, &caps]() {
      std::optional<LinearCode> Ca, Cb;
      MatrixTrellis ta = build_trellis(o->a, caps, Ca);
      MatrixTrellis tb = build_trellis(o->b, caps, Cb);
      Verdict v;
      if (o->explicit_graph)
        v = explicit_isomorphic(expand(ta, caps).trellis, expand(tb, caps).trellis, caps);
      else if (o->structural)
        v = structurally_isomorphic(ta, tb, caps).verdict;
      else
        v = isomorphic(ta, tb, caps).verdict;
      json j;
      j["isomorphic"] = verdict_name(v);
      j["scp_a"] = ta.scp();
      j["scp_b"] = tb.scp();
      emit_or_print(j, o->json, "isomorphic: " + verdict_name(v) + "\n");
      rc = v == Verdict::Yes ? 0 : (v == Verdict::No ? 1 : 3);
    });
  }
  {
    struct ShiftOpts {
      TrellisSpec spec;
      std::size_t by = 1;
      bool json = false;
    };
    auto o = std::make_shared<ShiftOpts>();
    CLI::App* c = trellis->add_subcommand("shift", "shift the time axis one period forward");
    add_spec_options(c, o->spec, false);
    c->add_option("--by", o->by, "number of single-step shifts (default 1)");
    c->add_flag("--json", o->json, "machine-readable output");
    c->callback([o, &rc, &caps]() {
      std::optional<LinearCode> C;
      MatrixTrellis t = build_trellis(o->spec, caps, C);
      std::size_t steps = o->by % t.depth;
      for (std::size_t i = 0; i < steps; ++i) t = shift_trellis(t);
      FpMatrix shifted_basis = edge_label_code_basis(t);
      // each step advances the time origin, rotating every label word one
      // place to the left -- exactly what LinearCode::shifted applies per step
      bool consistent =
          row_space_relation(shifted_basis, C->shifted(steps).generator()) ==
          SpaceRelation::Equal;
      if (o->json) {
        json j = trellis_json(t);
        j["label_code_is_shifted_code"] = consistent;
        std::cout << j.dump(2) << "\n";
      } else {
        print_trellis_text(t);
        std::cout << "label code equals the shifted code: " << (consistent ? "yes" : "NO") << "\n";
      }
      rc = consistent ? 0 : 1;
    });
  }
  {
    struct MergeOpts {
      std::string code_file, spans;
      bool json = false;
    };
    auto o = std::make_shared<MergeOpts>();
    CLI::App* c = trellis->add_subcommand(
        "quotient-merge", "merge the product trellis onto its BCJR counterpart");
    c->add_option("code", o->code_file, "code file")->required();
    c->add_option("--spans", o->spans, "span per generator row (default: linear spans)");
    c->add_flag("--json", o->json, "machine-readable output");
    c->callback([o, &rc, &caps]() {
      LinearCode C = load_code(o->code_file);
      std::vector<CircularInterval> spans;
      if (!o->spans.empty())
        spans = parse_spans(o->spans, C.length());
      else
        for (std::size_t l = 0; l < C.dimension(); ++l)
          spans.push_back(linear_span_of(C.generator().row(l)));
      MergeReport r = merge_product_to_bcjr(C.generator(), C.parity(), spans, caps);
      json j;
      json ws = json::array();
      for (const FpMatrix& w : r.w) ws.push_back(mat_json(w));
      j["merge_subspaces"] = ws;
      j["psi_verified"] = r.psi_verified;
      j["graph_isomorphic"] = verdict_name(r.graph_isomorphic);
      std::ostringstream text;
      for (std::size_t i = 0; i < r.w.size(); ++i)
        text << "W_" << i << " dimension " << r.w[i].rows() << "\n";
      text << "coefficient map onto the BCJR trellis verified: "
           << (r.psi_verified ? "yes" : "NO") << "\n";
      text << "expanded graphs isomorphic: " << verdict_name(r.graph_isomorphic) << "\n";
      emit_or_print(j, o->json, text.str());
      rc = r.psi_verified && r.graph_isomorphic != Verdict::No ? 0 : 1;
    });
  }
  {
    auto o = std::make_shared<TrellisSpec>();
    CLI::App* c = trellis->add_subcommand("export-dot", "emit the expanded trellis as DOT");
    add_spec_options(c, *o, false);
    c->callback([o, &rc, &caps]() {
      std::optional<LinearCode> C;
      MatrixTrellis t = build_trellis(*o, caps, C);
      std::cout << export_dot(expand(t, caps).trellis, caps);
      rc = 0;
    });
  }

  // ---- dualize ----
  CLI::App* dualize = app.add_subcommand("dualize", "dual trellises");
  dualize->require_subcommand(1);
  struct DualizeOpts {
    std::string code_file, spans, displacement;
    bool json = false, prune = false;
  };
  auto build_bcjr_for_dual = [&caps](const DualizeOpts& o, std::optional<LinearCode>& C) {
    TrellisSpec spec;
    spec.kind = "bcjr";
    spec.code_file = o.code_file;
    spec.spans = o.spans;
    spec.displacement = o.displacement;
    return build_trellis(spec, caps, C);
  };
  {
    auto o = std::make_shared<DualizeOpts>();
    CLI::App* c = dualize->add_subcommand("bcjr", "BCJR dual: swap generator and parity roles");
    c->add_option("code", o->code_file, "code file")->required();
    c->add_option("--spans", o->spans, "span per generator row (default: linear spans)");
    c->add_option("--displacement", o->displacement, "displacement matrix, rows ';'-separated");
    c->add_flag("--json", o->json, "machine-readable output");
    c->callback([o, &rc, &caps, &build_bcjr_for_dual]() {
      std::optional<LinearCode> C;
      MatrixTrellis primal = build_bcjr_for_dual(*o, C);
      MatrixTrellis dual = bcjr_dual(primal);
      bool represents_dual =
          row_space_relation(edge_label_code_basis(dual), C->parity()) == SpaceRelation::Equal;
      bool scp_equal = primal.scp() == dual.scp();
      if (o->json) {
        json j = trellis_json(dual);
        j["represents_dual_code"] = represents_dual;
        j["scp_equals_primal"] = scp_equal;
        std::cout << j.dump(2) << "\n";
      } else {
        print_trellis_text(dual);
        std::cout << "represents the dual code: " << (represents_dual ? "yes" : "NO") << "\n";
        std::cout << "same state complexity profile as the primal: " << (scp_equal ? "yes" : "NO")
                  << "\n";
      }
      rc = represents_dual && scp_equal ? 0 : 1;
    });
  }
  {
    auto o = std::make_shared<DualizeOpts>();
    CLI::App* c = dualize->add_subcommand("edgespace",
                                          "dualize the edge spaces under the canonical form");
    c->add_option("code", o->code_file, "code file")->required();
    c->add_option("--spans", o->spans, "span per generator row (default: linear spans)");
    c->add_option("--displacement", o->displacement, "displacement matrix, rows ';'-separated");
    c->add_flag("--prune", o->prune, "also report the trellis with off-cycle parts removed");
    c->add_flag("--json", o->json, "machine-readable output");
    c->callback([o, &rc, &caps, &build_bcjr_for_dual]() {
      std::optional<LinearCode> C;
      MatrixTrellis primal = build_bcjr_for_dual(*o, C);
      EdgeSpaceDual esd = edge_space_dual(primal, caps);
      json j;
      json bases = json::array();
      for (const FpMatrix& b : esd.edge_bases) bases.push_back(mat_json(b));
      j["edge_space_bases"] = bases;
      j["ecp"] = esd.ecp;
      j["dimension_formula_holds"] = esd.dims_ok;
      j["contains_bcjr_dual_edges"] = esd.contains_bcjr_dual;
      j["reduced"] = esd.reduced;
      std::ostringstream text;
      text << "dualized edge space dimensions: (";
      for (std::size_t i = 0; i < esd.ecp.size(); ++i) text << (i ? "," : "") << esd.ecp[i];
      text << ")\n";
      text << "dimension formula s_i + s_{i+1} + 1 - e_i: "
           << (esd.dims_ok ? "holds" : "VIOLATED") << "\n";
      text << "contains the BCJR dual's edges: " << (esd.contains_bcjr_dual ? "yes" : "NO")
           << "\n";
      text << "reduced: " << (esd.reduced ? "yes" : "no") << "\n";
      if (o->prune) {
        PruneResult pr = prune_unreduced(esd.trellis);
        j["pruned"] = {{"removed_vertices", pr.removed_vertices},
                       {"removed_edges", pr.removed_edges}};
        text << "pruning removes " << pr.removed_vertices << " vertices and " << pr.removed_edges
             << " edges\n";
      }
      emit_or_print(j, o->json, text.str());
      rc = esd.dims_ok && esd.contains_bcjr_dual ? 0 : 1;
    });
  }

  // ---- conjecture ----
  CLI::App* conj = app.add_subcommand("conjecture", "Koetter/Vardy duality conjecture");
  conj->require_subcommand(1);
  {
    struct CheckOpts {
      std::string code_file, select;
      std::size_t matrix = 0;
      bool json = false;
    };
    auto o = std::make_shared<CheckOpts>();
    CLI::App* c = conj->add_subcommand("check", "check one row selection");
    c->add_option("code", o->code_file, "code file")->required();
    c->add_option("--select", o->select, "characteristic row selection, e.g. \"2,3\"")
        ->required();
    c->add_option("--matrix", o->matrix, "characteristic matrix index (default 0)");
    c->add_flag("--json", o->json, "machine-readable output");
    c->callback([o, &rc, &caps]() {
      LinearCode C = load_code(o->code_file);
      CharMatrixEnumeration en = enumerate_characteristic_matrices(C, caps.enumeration, caps);
      if (o->matrix >= en.matrices.size())
        throw std::invalid_argument("characteristic matrix index out of range");
      DualityReport r =
          kv_duality_check(C, en.matrices[o->matrix], parse_selection(o->select), caps);
      json j;
      j["selection"] = r.selection;
      j["dual_spans"] = spans_json(r.dual_spans);
      j["dual_rows"] = r.dual_rows;
      j["primal_scp"] = r.primal_scp;
      j["bcjr_dual_scp"] = r.bcjr_dual_scp;
      j["bcjr_dual_ecp"] = r.bcjr_dual_ecp;
      j["strong"] = r.strong;
      j["weak"] = r.weak;
      j["dual_enumeration_truncated"] = r.dual_enumeration_truncated;
      json vs = json::array();
      for (const DualMatrixVerdict& v : r.verdicts) {
        json jv;
        jv["matrix"] = v.matrix_index;
        jv["independent"] = v.independent;
        if (v.independent) {
          jv["dual_scp"] = v.dual_scp;
          jv["scp_matches"] = v.scp_matches;
          jv["iso_to_bcjr_dual"] = verdict_name(v.iso_to_bcjr_dual);
        }
        vs.push_back(jv);
      }
      j["dual_matrices"] = vs;
      std::ostringstream text;
      text << "complementary dual spans: " << emit_spans(r.dual_spans) << "\n";
      for (const DualMatrixVerdict& v : r.verdicts) {
        text << "dual matrix " << v.matrix_index << ": rows "
             << (v.independent ? "independent" : "dependent");
        if (v.independent)
          text << ", scp " << (v.scp_matches ? "matches" : "DIFFERS") << ", iso to BCJR dual: "
               << verdict_name(v.iso_to_bcjr_dual);
        text << "\n";
      }
      text << "lex-first dual matrix works: " << (r.strong ? "yes" : "no") << "\n";
      text << "some dual matrix works: " << (r.weak ? "yes" : "no") << "\n";
      emit_or_print(j, o->json, text.str());
      rc = r.weak ? 0 : 1;
    });
  }
  {
    struct SearchCliOpts {
      SearchOptions so;
      bool json = false, no_cyclic = false;
    };
    auto o = std::make_shared<SearchCliOpts>();
    CLI::App* c = conj->add_subcommand("search", "exhaustive search over small codes");
    c->add_option("--field", o->so.field, "field size (prime, default 2)");
    c->add_option("--min-n", o->so.n_min, "smallest length (default 2)");
    c->add_option("--max-n", o->so.n_max, "largest length (default 4)");
    c->add_option("--min-k", o->so.k_min, "smallest dimension (default 1)");
    c->add_option("--max-k", o->so.k_max, "largest dimension (default n-1)");
    c->add_option("--workers", o->so.workers, "worker threads (default 1)");
    c->add_option("--report", o->so.report_file, "append report lines to this file");
    c->add_option("--progress", o->so.progress_file, "progress file for resuming");
    c->add_flag("--perm-dedup", o->so.perm_dedup, "deduplicate by coordinate permutation");
    c->add_flag("--no-cyclic-dedup", o->no_cyclic, "keep all cyclic shifts");
    c->add_flag("--json", o->json, "machine-readable output");
    c->callback([o, &rc]() {
      o->so.cyclic_dedup = !o->no_cyclic;
      SearchReport r = conjecture_search(o->so, Caps::defaults());
      std::size_t counterexamples = 0, choice_dependent = 0, minimal_iso_failures = 0;
      for (const SearchRecord& rec : r.records) {
        counterexamples += rec.counterexample;
        choice_dependent += rec.choice_dependent;
        if (rec.minimal && rec.minimal_iso == Verdict::No) ++minimal_iso_failures;
      }
      if (o->json) {
        json j;
        j["codes"] = r.codes_processed;
        j["records"] = r.records.size();
        j["counterexamples"] = counterexamples;
        j["choice_dependent"] = choice_dependent;
        j["minimal_iso_failures"] = minimal_iso_failures;
        j["truncated"] = r.truncated;
        if (o->so.report_file.empty()) {
          json lines = json::array();
          for (const SearchRecord& rec : r.records) lines.push_back(rec.line);
          j["lines"] = lines;
        }
        std::cout << j.dump(2) << "\n";
      } else {
        if (o->so.report_file.empty())
          for (const SearchRecord& rec : r.records) std::cout << rec.line << "\n";
        std::cout << "codes: " << r.codes_processed << "  selections: " << r.records.size()
                  << "  counterexamples: " << counterexamples
                  << "  choice-dependent: " << choice_dependent
                  << (r.truncated ? "  (truncated)" : "") << "\n";
      }
      rc = counterexamples || minimal_iso_failures ? 1 : (r.truncated ? 3 : 0);
    });
  }

  // ---- oracle ----
  CLI::App* oracle = app.add_subcommand("oracle", "brute-force ground truth");
  oracle->require_subcommand(1);
  {
    struct OracleOpts {
      TrellisSpec spec;
      bool json = false;
    };
    auto o = std::make_shared<OracleOpts>();
    CLI::App* c = oracle->add_subcommand("cycles", "enumerate every cycle of the expanded graph");
    add_spec_options(c, o->spec, false);
    c->add_flag("--json", o->json, "machine-readable output");
    c->callback([o, &rc, &caps]() {
      std::optional<LinearCode> C;
      MatrixTrellis t = build_trellis(o->spec, caps, C);
      ExpandResult ex = expand(t, caps);
      std::vector<Cycle> cs = cycles(ex.trellis, caps);
      std::vector<FpVector> labels;
      for (const Cycle& cyc : cs) labels.push_back(cycle_label_vector(ex.trellis, cyc));
      std::sort(labels.begin(), labels.end(), lex_less);
      json j;
      j["count"] = cs.size();
      json ls = json::array();
      std::ostringstream text;
      text << cs.size() << " cycles\n";
      for (const FpVector& l : labels) {
        ls.push_back(vec_json(l));
        text << "  " << l.to_string() << "\n";
      }
      j["labels"] = ls;
      emit_or_print(j, o->json, text.str());
      rc = 0;
    });
    auto o2 = std::make_shared<OracleOpts>();
    CLI::App* c2 = oracle->add_subcommand("labelcode", "label code of the cycles, brute force");
    add_spec_options(c2, o2->spec, false);
    c2->add_flag("--json", o2->json, "machine-readable output");
    c2->callback([o2, &rc, &caps]() {
      std::optional<LinearCode> C;
      MatrixTrellis t = build_trellis(o2->spec, caps, C);
      ExpandResult ex = expand(t, caps);
      std::vector<FpVector> words = edge_label_code(ex.trellis, caps);
      FpMatrix brute = row_space_basis(FpMatrix::from_rows(t.field, words, t.depth));
      FpMatrix linear = edge_label_code_basis(t);
      bool agrees = row_space_relation(brute, linear) == SpaceRelation::Equal;
      json j;
      j["dimension"] = brute.rows();
      j["words"] = std::size_t(words.size());
      j["matches_linear_computation"] = agrees;
      json ws = json::array();
      std::ostringstream text;
      text << words.size() << " distinct label words, dimension " << brute.rows() << "\n";
      for (const FpVector& w : words) {
        ws.push_back(vec_json(w));
        text << "  " << w.to_string() << "\n";
      }
      j["word_list"] = ws;
      text << "matches the linear computation: " << (agrees ? "yes" : "NO") << "\n";
      emit_or_print(j, o2->json, text.str());
      rc = agrees ? 0 : 1;
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const CapExceeded& e) {
    std::cerr << "cap exceeded: " << e.what() << "\n";
    return 3;
  } catch (const PathPreconditionError& e) {
    std::cerr << "precondition: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "invariant violated: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}
