#pragma once
// Graphviz export of an explicit trellis, unrolled over one period: one rank
// per time index 0..n, where rank n repeats the time-0 vertices so the
// tail-biting closure is visible.  Output is deterministic byte-for-byte.

#include <cstddef>
#include <sstream>
#include <string>

#include "tailbite/caps.hpp"
#include "tailbite/trellis.hpp"

namespace tailbite {

namespace detail {

inline std::string vertex_digits(const FpVector& v, int q) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (q > 10 && i) s += '_';
    s += std::to_string(v[i]);
  }
  return s;
}

}  // namespace detail

// Vertex names are `t<i>_<vector digits>`.  Over GF(2) the label is encoded
// in the line style (1 solid, 0 dashed); over larger fields it is printed.
inline std::string export_dot(const ExplicitTrellis& t, const Caps& caps = Caps::defaults()) {
  std::size_t size = 0;
  for (std::size_t i = 0; i < t.depth; ++i) size += t.verts[i].size() + t.edges[i].size();
  size += t.verts.empty() ? 0 : t.verts[0].size();
  if (size > caps.scan) throw CapExceeded("dot export exceeds size cap");

  int q = t.field.modulus();
  std::ostringstream out;
  out << "digraph trellis {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=circle fontsize=10];\n";
  for (std::size_t i = 0; i <= t.depth; ++i) {
    std::size_t src = i % t.depth;
    out << "  { rank=same;";
    for (const FpVector& v : t.verts[src]) out << " t" << i << "_" << detail::vertex_digits(v, q) << ";";
    out << " }\n";
  }
  for (std::size_t i = 0; i < t.depth; ++i)
    for (const ExplicitTrellis::Edge& e : t.edges[i]) {
      out << "  t" << i << "_" << detail::vertex_digits(t.verts[i][e.from], q) << " -> t"
          << (i + 1) << "_" << detail::vertex_digits(t.verts[(i + 1) % t.depth][e.to], q);
      if (q == 2)
        out << " [style=" << (e.label ? "solid" : "dashed") << "];\n";
      else
        out << " [label=\"" << e.label << "\"];\n";
    }
  out << "}\n";
  return out.str();
}

}  // namespace tailbite
