#include <catch2/catch_amalgamated.hpp>

#include <algorithm>

#include "oracle_helpers.hpp"
#include "tailbite/construct.hpp"

using namespace tailbite;

namespace {

// The (3,5) worked example: G, its span list, and the parity check used there.
struct Fixture5 {
  LinearCode C = oracle::load_fixture("kv5.code");
  std::vector<CircularInterval> spans{CircularInterval(1, 3, 5), CircularInterval(3, 0, 5),
                                      CircularInterval(2, 1, 5)};
  FpMatrix H = FpMatrix::from_rows(PrimeField{2},
                                   std::vector<std::vector<int>>{{1, 0, 1, 1, 1}, {0, 1, 1, 0, 0}},
                                   5);
};

std::vector<std::vector<int>> rows_of(const FpMatrix& m) {
  std::vector<std::vector<int>> out;
  for (std::size_t r = 0; r < m.rows(); ++r) out.push_back(m.row(r).entries());
  return out;
}

}  // namespace

TEST_CASE("elementary trellis", "[construct]") {
  PrimeField f2{2};

  SECTION("vertex spaces follow the span") {
    FpVector w(f2, {1, 0, 1, 1});
    MatrixTrellis t = elementary_trellis(w, CircularInterval(2, 0, 4));
    REQUIRE(t.coeff_dim == 1);
    CHECK(t.vertex_at(0).at(0, 0) == 1);  // members of (2,0] are 3 and 0
    CHECK(t.vertex_at(1).at(0, 0) == 0);
    CHECK(t.vertex_at(2).at(0, 0) == 0);
    CHECK(t.vertex_at(3).at(0, 0) == 1);
    CHECK(t.labels.row(0) == w);
    CHECK(row_space_relation(edge_label_code_basis(t),
                             FpMatrix::from_rows(f2, std::vector<FpVector>{w}, 4)) ==
          SpaceRelation::Equal);
  }

  SECTION("weight-one word with an empty span") {
    FpVector e2(f2, {0, 0, 1, 0});
    MatrixTrellis t = elementary_trellis(e2, CircularInterval(2, 2, 4));
    for (std::size_t i = 0; i < 4; ++i) CHECK(t.vertex_at(i).is_zero());
    CHECK(t.scp() == std::vector<std::size_t>{0, 0, 0, 0});
    CHECK(row_space_relation(edge_label_code_basis(t),
                             FpMatrix::from_rows(f2, std::vector<FpVector>{e2}, 4)) ==
          SpaceRelation::Equal);
  }

  SECTION("interval must be a span of the word") {
    FpVector w(f2, {1, 0, 1, 1});
    CHECK_THROWS_AS(elementary_trellis(w, CircularInterval(1, 0, 4)), std::invalid_argument);
    CHECK_THROWS_AS(elementary_trellis(w, CircularInterval(2, 0, 5)), std::invalid_argument);
  }

  SECTION("generalized spans only need to cover the support") {
    FpVector w(f2, {0, 1, 0, 0});
    MatrixTrellis t = elementary_trellis(w, CircularInterval(0, 2, 4), true);
    CHECK(t.scp() == std::vector<std::size_t>{0, 1, 1, 0});
    CHECK_THROWS_AS(elementary_trellis(w, CircularInterval(2, 0, 4), true),
                    std::invalid_argument);
  }
}

TEST_CASE("product trellis of the (3,5) example", "[construct]") {
  Fixture5 fx;
  MatrixTrellis t = product_trellis(fx.C.generator(), fx.spans);

  SECTION("vertex matrices are the raw diagonal projections") {
    CHECK(rows_of(t.vertex_at(0)) ==
          std::vector<std::vector<int>>{{0, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    CHECK(rows_of(t.vertex_at(1)) ==
          std::vector<std::vector<int>>{{0, 0, 0}, {0, 0, 0}, {0, 0, 1}});
    CHECK(rows_of(t.vertex_at(2)) ==
          std::vector<std::vector<int>>{{1, 0, 0}, {0, 0, 0}, {0, 0, 0}});
    CHECK(rows_of(t.vertex_at(3)) ==
          std::vector<std::vector<int>>{{1, 0, 0}, {0, 0, 0}, {0, 0, 1}});
    CHECK(rows_of(t.vertex_at(4)) ==
          std::vector<std::vector<int>>{{0, 0, 0}, {0, 1, 0}, {0, 0, 1}});
    CHECK(t.scp() == std::vector<std::size_t>{2, 1, 1, 2, 2});
    CHECK(t.ecp() == std::vector<std::size_t>{2, 2, 2, 3, 2});
    CHECK_FALSE(t.rank_deficient);
  }

  SECTION("label code is the row space of G") {
    CHECK(row_space_relation(edge_label_code_basis(t), fx.C.generator()) ==
          SpaceRelation::Equal);
  }

  SECTION("span count and validity are enforced") {
    CHECK_THROWS_AS(product_trellis(fx.C.generator(), {fx.spans[0], fx.spans[1]}),
                    std::invalid_argument);
    auto bad = fx.spans;
    bad[0] = CircularInterval(0, 3, 5);  // not a span of row 0
    CHECK_THROWS_AS(product_trellis(fx.C.generator(), bad), std::invalid_argument);
  }

  SECTION("dependent label rows set the flag") {
    auto C4 = oracle::load_fixture("kv4.code");
    CharacteristicPair pair = characteristic_pair(C4);
    MatrixTrellis full = product_trellis(pair.X, pair.spans);
    CHECK(full.rank_deficient);
  }
}

TEST_CASE("profile formulas from the span list", "[construct]") {
  Fixture5 fx;
  ComplexityProfile p = scp_ecp_formulas(fx.spans);

  CHECK(p.scp == std::vector<std::size_t>{2, 1, 1, 2, 2});
  CHECK(p.ecp == std::vector<std::size_t>{2, 2, 2, 3, 2});
  CHECK(p.starts_distinct);  // starts 1, 3, 2
  CHECK(p.ends_distinct);    // ends 3, 0, 1
  CHECK(p.recurrence_ok);

  SECTION("e = s + indicator(starts) and e_i = s_{i+1} + indicator(ends)") {
    std::vector<std::size_t> starts{1, 2, 3}, ends{0, 1, 3};
    for (std::size_t i = 0; i < 5; ++i) {
      std::size_t ia = std::count(starts.begin(), starts.end(), i) ? 1 : 0;
      std::size_t ib = std::count(ends.begin(), ends.end(), i) ? 1 : 0;
      CHECK(p.ecp[i] == p.scp[i] + ia);
      CHECK(p.ecp[i] == p.scp[(i + 1) % 5] + ib);
    }
  }

  SECTION("formulas agree with matrix ranks") {
    MatrixTrellis t = product_trellis(fx.C.generator(), fx.spans);
    CHECK(p.scp == t.scp());
    CHECK(p.ecp == t.ecp());
  }
}

TEST_CASE("displacement matrix", "[construct]") {
  SECTION("(3,2) worked example") {
    auto C = oracle::load_fixture("bcjr3.code");
    FpMatrix H = FpMatrix::from_rows(PrimeField{2}, std::vector<std::vector<int>>{{1, 1, 1}}, 3);
    FpMatrix D = bcjr_displacement(
        C.generator(), H, {CircularInterval(0, 2, 3), CircularInterval(1, 0, 3)});
    CHECK(rows_of(D) == std::vector<std::vector<int>>{{0}, {1}});
  }

  SECTION("(3,5) worked example") {
    Fixture5 fx;
    FpMatrix D = bcjr_displacement(fx.C.generator(), fx.H, fx.spans);
    CHECK(rows_of(D) == std::vector<std::vector<int>>{{0, 0}, {1, 0}, {0, 1}});
    // rows with linear spans displace to zero
    CHECK(D.row(0).is_zero());  // span (1,3] is linear
    CHECK(D.row(1).is_zero() == false);
  }

  SECTION("orthogonality is required") {
    Fixture5 fx;
    FpMatrix wrong = FpMatrix::from_rows(
        PrimeField{2}, std::vector<std::vector<int>>{{1, 0, 0, 0, 0}}, 5);
    CHECK_THROWS_AS(bcjr_displacement(fx.C.generator(), wrong, fx.spans),
                    std::invalid_argument);
  }
}

TEST_CASE("tail-biting recursion trellis of the (3,5) example", "[construct]") {
  Fixture5 fx;
  MatrixTrellis t = bcjr_trellis_from_spans(fx.C.generator(), fx.H, fx.spans);

  SECTION("vertex matrices match the printed recursion") {
    CHECK(rows_of(t.vertex_at(0)) == std::vector<std::vector<int>>{{0, 0}, {1, 0}, {0, 1}});
    CHECK(rows_of(t.vertex_at(1)) == std::vector<std::vector<int>>{{0, 0}, {0, 0}, {0, 1}});
    CHECK(rows_of(t.vertex_at(2)) == std::vector<std::vector<int>>{{0, 1}, {0, 0}, {0, 0}});
    CHECK(rows_of(t.vertex_at(3)) == std::vector<std::vector<int>>{{1, 0}, {0, 0}, {1, 1}});
    CHECK(rows_of(t.vertex_at(4)) == std::vector<std::vector<int>>{{0, 0}, {1, 0}, {1, 1}});
    CHECK(t.scp() == std::vector<std::size_t>{2, 1, 1, 2, 2});
    CHECK(t.ecp() == std::vector<std::size_t>{2, 2, 2, 3, 2});
  }

  SECTION("rows vanish outside their spans") {
    for (std::size_t l = 0; l < 3; ++l)
      for (std::size_t i = 0; i < 5; ++i)
        if (!fx.spans[l].contains(i)) CHECK(t.vertex_at(i).row(l).is_zero());
  }

  SECTION("label code is the full code") {
    CHECK(row_space_relation(edge_label_code_basis(t), fx.C.generator()) ==
          SpaceRelation::Equal);
  }

  SECTION("closure is equivalent to orthogonality") {
    // a non-orthogonal H is rejected up front
    FpMatrix wrong = FpMatrix::from_rows(
        PrimeField{2}, std::vector<std::vector<int>>{{1, 0, 0, 0, 0}, {0, 1, 1, 0, 0}}, 5);
    CHECK_THROWS_AS(bcjr_trellis(fx.C.generator(), wrong, FpMatrix(PrimeField{2}, 3, 2)),
                    std::invalid_argument);
    // and N_n - N_0 = G H^T vanishes exactly when G H^T does
    FpMatrix closure = fx.C.generator() * fx.H.transpose();
    CHECK(closure.is_zero());
  }

  SECTION("displacement shape is checked") {
    CHECK_THROWS_AS(bcjr_trellis(fx.C.generator(), fx.H, FpMatrix(PrimeField{2}, 2, 2)),
                    std::invalid_argument);
  }
}

TEST_CASE("parity basis change transforms the displacement covariantly", "[construct]") {
  Fixture5 fx;
  FpMatrix D = bcjr_displacement(fx.C.generator(), fx.H, fx.spans);
  MatrixTrellis base = bcjr_trellis(fx.C.generator(), fx.H, D);

  for (int trial = 0; trial < 5; ++trial) {
    FpMatrix V = oracle::random_invertible(PrimeField{2}, 2);
    FpMatrix Hprime = V * fx.H;
    FpMatrix Dprime = bcjr_displacement(fx.C.generator(), Hprime, fx.spans);
    CHECK(Dprime == D * V.transpose());
    MatrixTrellis moved = bcjr_trellis(fx.C.generator(), Hprime, Dprime);
    CHECK(moved.scp() == base.scp());
    CHECK(moved.ecp() == base.ecp());
    CHECK(isomorphic(moved, base).verdict == Verdict::Yes);
  }
}

TEST_CASE("shifting a trellis", "[construct]") {
  Fixture5 fx;
  MatrixTrellis t = bcjr_trellis_from_spans(fx.C.generator(), fx.H, fx.spans);

  SECTION("depth-many shifts give back the original") {
    MatrixTrellis round = t;
    for (std::size_t i = 0; i < t.depth; ++i) round = shift_trellis(round);
    CHECK(round.labels == t.labels);
    for (std::size_t i = 0; i < t.depth; ++i) CHECK(round.vertex_at(i) == t.vertex_at(i));
    REQUIRE(round.spans.has_value());
    CHECK(*round.spans == *t.spans);
  }

  SECTION("the label code shifts with the trellis") {
    MatrixTrellis s = shift_trellis(t);
    // one step moves time 1 to time 0, i.e. words shift left by one place
    LinearCode left = fx.C.shifted(1);
    CHECK(row_space_relation(edge_label_code_basis(s), left.generator()) ==
          SpaceRelation::Equal);
    REQUIRE(s.displacement.has_value());
    CHECK(*s.displacement == t.vertex_at(1));
  }
}

TEST_CASE("walking any vertex to zero", "[construct]") {
  auto C = oracle::load_fixture("bcjr3.code");
  FpMatrix H = FpMatrix::from_rows(PrimeField{2}, std::vector<std::vector<int>>{{1, 1, 1}}, 3);
  std::vector<CircularInterval> spans{CircularInterval(0, 2, 3), CircularInterval(1, 0, 3)};
  MatrixTrellis t = bcjr_trellis_from_spans(C.generator(), H, spans);

  SECTION("from the nonzero vertex") {
    ZeroPath path = path_to_zero(t, FpVector(PrimeField{2}, {1}));
    CHECK(path.labels.entries() == std::vector<int>{1, 0, 0});
    CHECK(path.vertices.front().entries() == std::vector<int>{1});
    CHECK(path.vertices.back().is_zero());
    // the walk is not a closed cycle: its word is outside the code
    CHECK_FALSE(cycle_criterion(t, path.alphas));
  }

  SECTION("from the zero vertex") {
    ZeroPath path = path_to_zero(t, FpVector::zeros(PrimeField{2}, 1));
    CHECK(path.labels.is_zero());
    CHECK(cycle_criterion(t, path.alphas));
  }

  SECTION("vertices outside V_0 are rejected") {
    MatrixTrellis small = product_trellis(C.generator(), spans);
    CHECK_THROWS_AS(path_to_zero(small, FpVector(PrimeField{2}, {1, 1})),
                    std::invalid_argument);
  }
}

TEST_CASE("cycle criterion needs a recursion trellis", "[construct]") {
  auto C = oracle::load_fixture("bcjr3.code");
  std::vector<CircularInterval> spans{CircularInterval(0, 2, 3), CircularInterval(1, 0, 3)};
  MatrixTrellis prod = product_trellis(C.generator(), spans);
  FpMatrix H = FpMatrix::from_rows(PrimeField{2}, std::vector<std::vector<int>>{{1, 1, 1}}, 3);
  MatrixTrellis rec = bcjr_trellis_from_spans(C.generator(), H, spans);

  PrimeField f2{2};
  std::vector<FpVector> constant(3, FpVector(f2, {1, 0}));
  CHECK(cycle_criterion(rec, constant));  // codeword 101
  CHECK_THROWS_AS(cycle_criterion(prod, constant), std::invalid_argument);
}

TEST_CASE("merging the product trellis onto the recursion trellis", "[construct]") {
  SECTION("(3,2) example merges exactly at time 2") {
    auto C = oracle::load_fixture("bcjr3.code");
    FpMatrix H = FpMatrix::from_rows(PrimeField{2}, std::vector<std::vector<int>>{{1, 1, 1}}, 3);
    std::vector<CircularInterval> spans{CircularInterval(0, 2, 3), CircularInterval(1, 0, 3)};
    MergeReport rep = merge_product_to_bcjr(C.generator(), H, spans);
    REQUIRE(rep.w.size() == 3);
    CHECK(rep.w[0].rows() == 0);
    CHECK(rep.w[1].rows() == 0);
    REQUIRE(rep.w[2].rows() == 1);
    CHECK(rep.w[2].row(0).entries() == std::vector<int>{1, 1});
    CHECK(rep.psi_verified);
    CHECK(rep.graph_isomorphic == Verdict::Yes);
    CHECK(rep.quotient.verts[2].size() == 2);
  }

  SECTION("(3,5) example needs no merging at all") {
    Fixture5 fx;
    MergeReport rep = merge_product_to_bcjr(fx.C.generator(), fx.H, fx.spans);
    for (const FpMatrix& w : rep.w) CHECK(w.rows() == 0);
    CHECK(rep.psi_verified);
    CHECK(rep.graph_isomorphic == Verdict::Yes);
  }
}

TEST_CASE("selection trellis", "[construct]") {
  auto C = oracle::load_fixture("kv4.code");
  auto en = enumerate_characteristic_matrices(C, 100);
  REQUIRE(en.matrices.size() == 2);

  SECTION("profiles match the span matrix arithmetic") {
    CHECK(kv_trellis(en.matrices[0], {2, 3}).scp() == std::vector<std::size_t>{2, 1, 1, 1});
    CHECK(kv_trellis(en.matrices[0], {0, 1}).scp() == std::vector<std::size_t>{0, 1, 1, 1});
  }

  SECTION("dependent selections are rejected") {
    CHECK_THROWS_AS(kv_trellis(en.matrices[1], {2, 3}), DependentSelection);
    CHECK_THROWS_AS(kv_trellis(en.matrices[0], {0, 7}), std::invalid_argument);
  }
}
