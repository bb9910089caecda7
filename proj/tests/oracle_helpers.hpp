#pragma once
// Brute-force oracles for the test suite.  Everything here is deliberately
// naive and independent of the library's linear algebra: set arithmetic,
// exhaustive enumeration, and literal transcriptions of the definitions.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "tailbite/code.hpp"
#include "tailbite/duality.hpp"
#include "tailbite/galois.hpp"
#include "tailbite/io.hpp"

namespace oracle {

using tailbite::CircularInterval;
using tailbite::FpMatrix;
using tailbite::FpVector;
using tailbite::LinearCode;
using tailbite::PrimeField;

inline std::string data_dir() {
  if (const char* env = std::getenv("TAILBITE_DATA_DIR")) return env;
  return "data";
}

inline LinearCode load_fixture(const std::string& name) {
  std::ifstream in(data_dir() + "/" + name);
  if (!in) throw std::runtime_error("fixture not found: " + name);
  return tailbite::parse_code(in);
}

// (a,b] members straight from the case split in the definition.
inline std::vector<std::size_t> interval_members(std::size_t a, std::size_t b, std::size_t n) {
  std::vector<std::size_t> out;
  if (a == b) return out;
  if (a < b)
    for (std::size_t j = a + 1; j <= b; ++j) out.push_back(j);
  else {
    for (std::size_t j = a + 1; j < n; ++j) out.push_back(j);
    for (std::size_t j = 0; j <= b; ++j) out.push_back(j);
  }
  return out;
}

// rank via the size of the row space: |rowspace| = q^rank.
inline std::size_t rank(const FpMatrix& m) {
  const PrimeField& f = m.field();
  int q = f.modulus();
  std::set<std::vector<int>> space;
  std::vector<int> alpha(m.rows(), 0);
  while (true) {
    FpVector acc = FpVector::zeros(f, m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r) acc = acc + m.row(r).scaled(alpha[r]);
    std::vector<int> key;
    for (std::size_t i = 0; i < acc.size(); ++i) key.push_back(acc[i]);
    space.insert(key);
    std::size_t pos = m.rows();
    bool done = true;
    while (pos > 0) {
      --pos;
      if (alpha[pos] + 1 < q) {
        ++alpha[pos];
        done = false;
        break;
      }
      alpha[pos] = 0;
    }
    if (done) break;
  }
  std::size_t rank = 0, size = 1;
  while (size < space.size()) {
    size *= std::size_t(q);
    ++rank;
  }
  return rank;
}

// All codewords by coefficient enumeration (no lexicographic guarantees).
inline std::vector<FpVector> codewords(const FpMatrix& G) {
  const PrimeField& f = G.field();
  int q = f.modulus();
  std::vector<FpVector> out;
  std::vector<int> alpha(G.rows(), 0);
  while (true) {
    FpVector acc = FpVector::zeros(f, G.cols());
    for (std::size_t r = 0; r < G.rows(); ++r) acc = acc + G.row(r).scaled(alpha[r]);
    out.push_back(acc);
    std::size_t pos = G.rows();
    bool done = true;
    while (pos > 0) {
      --pos;
      if (alpha[pos] + 1 < q) {
        ++alpha[pos];
        done = false;
        break;
      }
      alpha[pos] = 0;
    }
    if (done) break;
  }
  std::sort(out.begin(), out.end(), tailbite::lex_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Characteristic span list by definition: for each start a, the shortest span
// (a, b] attained by any nonzero codeword.
inline std::vector<CircularInterval> characteristic_spans(const LinearCode& C) {
  std::size_t n = C.length();
  std::vector<CircularInterval> out;
  for (std::size_t a = 0; a < n; ++a) {
    bool found = false;
    CircularInterval best(0, 0, n);
    for (const FpVector& w : codewords(C.generator())) {
      if (w.is_zero()) continue;
      for (const CircularInterval& iv : tailbite::spans_of(w)) {
        if (iv.a != a) continue;
        if (!found || iv.length() < best.length()) {
          best = iv;
          found = true;
        }
      }
    }
    if (!found) throw std::runtime_error("no span starts at " + std::to_string(a));
    out.push_back(best);
  }
  return out;
}

inline std::mt19937& rng() {
  static std::mt19937 gen(0x7a11b17e);
  return gen;
}

inline FpVector random_vector(const PrimeField& f, std::size_t n) {
  std::uniform_int_distribution<int> d(0, f.modulus() - 1);
  std::vector<int> e(n);
  for (int& x : e) x = d(rng());
  return FpVector(f, std::move(e));
}

inline FpMatrix random_matrix(const PrimeField& f, std::size_t rows, std::size_t cols) {
  std::vector<FpVector> r;
  for (std::size_t i = 0; i < rows; ++i) r.push_back(random_vector(f, cols));
  return FpMatrix::from_rows(f, r, cols);
}

// Random matrix of full row rank (retries until the rank oracle agrees).
inline FpMatrix random_full_rank(const PrimeField& f, std::size_t rows, std::size_t cols) {
  while (true) {
    FpMatrix m = random_matrix(f, rows, cols);
    if (tailbite::rank(m) == rows) return m;
  }
}

inline FpMatrix random_invertible(const PrimeField& f, std::size_t n) {
  return random_full_rank(f, n, n);
}

// Every RREF generator matrix of rank k (thin wrapper kept here so tests can
// enumerate codes without touching library internals).
inline std::vector<FpMatrix> all_codes(const PrimeField& f, std::size_t k, std::size_t n,
                                       bool full_support_only) {
  std::vector<FpMatrix> out;
  for (const FpMatrix& G : tailbite::detail::enumerate_rref_generators(f, k, n)) {
    if (full_support_only) {
      bool full = true;
      for (std::size_t c = 0; c < n && full; ++c)
        if (G.col(c).is_zero()) full = false;
      if (!full) continue;
    }
    out.push_back(G);
  }
  return out;
}

}  // namespace oracle
