#pragma once
// Text formats: the code file (q/n/k/G header plus k rows of digits), span
// lists in "(a,b],(c,d]" notation, and small inline matrices.  `emit` and
// `parse` round-trip exactly.

#include <cctype>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tailbite/code.hpp"
#include "tailbite/galois.hpp"

namespace tailbite {

// Lines: `q <p>`, `n <len>`, `k <dim>`, `G`, then k lines of n digits.
// The parity check is always recomputed.  '#' starts a comment.
inline LinearCode parse_code(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  std::size_t pos = 0;
  auto expect = [&](const std::string& key) {
    if (pos >= tokens.size() || tokens[pos] != key)
      throw std::invalid_argument("code file: expected '" + key + "'");
    ++pos;
  };
  auto number = [&]() {
    if (pos >= tokens.size()) throw std::invalid_argument("code file: truncated");
    long v;
    try {
      v = std::stol(tokens[pos]);
    } catch (const std::exception&) {
      throw std::invalid_argument("code file: bad number '" + tokens[pos] + "'");
    }
    if (v < 0) throw std::invalid_argument("code file: negative number");
    ++pos;
    return std::size_t(v);
  };
  expect("q");
  std::size_t q = number();
  expect("n");
  std::size_t n = number();
  expect("k");
  std::size_t k = number();
  expect("G");
  PrimeField f{int(q)};
  FpMatrix G(f, k, n);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t v = number();
      if (v >= q) throw std::invalid_argument("code file: entry out of field range");
      G.set(r, c, int(v));
    }
  if (pos != tokens.size()) throw std::invalid_argument("code file: trailing content");
  return LinearCode::from_generator(G);
}

inline LinearCode parse_code(const std::string& text) {
  std::istringstream in(text);
  return parse_code(in);
}

inline std::string emit_code(const LinearCode& C) {
  std::ostringstream out;
  out << "q " << C.field().modulus() << "\n";
  out << "n " << C.length() << "\n";
  out << "k " << C.dimension() << "\n";
  out << "G\n";
  for (std::size_t r = 0; r < C.dimension(); ++r) {
    for (std::size_t c = 0; c < C.length(); ++c) {
      if (c) out << ' ';
      out << C.generator().at(r, c);
    }
    out << "\n";
  }
  return out.str();
}

// "(a,b],(c,d],..." with optional whitespace.
inline std::vector<CircularInterval> parse_spans(const std::string& text, std::size_t n) {
  std::vector<CircularInterval> out;
  std::size_t pos = 0;
  auto skip_ws = [&]() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto expect = [&](char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c)
      throw std::invalid_argument(std::string("span list: expected '") + c + "'");
    ++pos;
  };
  auto number = [&]() {
    skip_ws();
    std::size_t start = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == start) throw std::invalid_argument("span list: expected a number");
    std::size_t v = std::stoul(text.substr(start, pos - start));
    if (v >= n) throw std::invalid_argument("span list: index out of range");
    return v;
  };
  while (true) {
    expect('(');
    std::size_t a = number();
    expect(',');
    std::size_t b = number();
    expect(']');
    out.push_back(CircularInterval{a, b, n});
    skip_ws();
    if (pos == text.size()) break;
    expect(',');
  }
  return out;
}

inline std::string emit_span(const CircularInterval& iv) {
  return "(" + std::to_string(iv.a) + "," + std::to_string(iv.b) + "]";
}

inline std::string emit_spans(const std::vector<CircularInterval>& spans) {
  std::string out;
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (i) out += ',';
    out += emit_span(spans[i]);
  }
  return out;
}

// Rows separated by ';', entries by whitespace: "1 0; 0 1".
inline FpMatrix parse_matrix(const PrimeField& f, const std::string& text) {
  std::vector<std::vector<int>> rows;
  std::istringstream in(text);
  std::string row_text;
  while (std::getline(in, row_text, ';')) {
    std::istringstream rs(row_text);
    std::vector<int> row;
    long v;
    while (rs >> v) {
      if (v < 0 || v >= f.modulus())
        throw std::invalid_argument("matrix: entry out of field range");
      row.push_back(int(v));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("matrix: empty");
  for (const auto& row : rows)
    if (row.size() != rows[0].size()) throw std::invalid_argument("matrix: ragged rows");
  FpMatrix m(f, rows.size(), rows[0].size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[0].size(); ++c) m.set(r, c, rows[r][c]);
  return m;
}

}  // namespace tailbite
