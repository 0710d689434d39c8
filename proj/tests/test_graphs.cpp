#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "majorize/errors.hpp"
#include "majorize/graphs.hpp"
#include "majorize/oracles.hpp"

using namespace majorize;

namespace {

Scalar q(long long n, long long d = 1) { return Scalar::ratio(n, d); }

SetFamily triangle() {
  return SetFamily::explicit_family({{"g1", "g2"}, {"g2", "g3"}, {"g3", "g1"}}, {0, 1, 2});
}

Weight half_triangle() {
  Weight w;
  w.set("g1", q(1, 2));
  w.set("g2", q(1, 2));
  w.set("g3", q(1, 2));
  return w;
}

Weight matrix_weight(const std::vector<std::vector<Scalar>>& m) {
  Weight w;
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m[i].size(); ++j)
      if (m[i][j].sign() != 0) w.set(cell_id(i + 1, j + 1), m[i][j]);
  return w;
}

// Independent validity check of a split: exact average and both halves pass.
void check_split(const Weight& w, const SetFamily& f, const SplitResult& s) {
  REQUIRE(s.outcome == SplitResult::Outcome::Split);
  std::set<VertexId> keys;
  for (const auto& [v, x] : w.values) keys.insert(v);
  for (const auto& [v, x] : s.w_plus.values) keys.insert(v);
  for (const auto& [v, x] : s.w_minus.values) keys.insert(v);
  bool differ = false;
  for (const auto& v : keys) {
    Scalar avg = (s.w_plus.at(v) + s.w_minus.at(v)) / q(2);
    CHECK(avg == w.at(v));
    if (s.w_plus.at(v) != s.w_minus.at(v)) differ = true;
  }
  CHECK(differ);
  CHECK(validate_stochastic(s.w_plus, f).ok);
  CHECK(validate_stochastic(s.w_minus, f).ok);
}

}  // namespace

TEST_CASE("build_graph on the 2x2 matrix family gives a 4-cycle") {
  auto f = matrix_to_family(2, 2);
  auto g = build_graph(f);
  CHECK(g.names.size() == 4);
  for (std::size_t v = 0; v < 4; ++v) CHECK(g.neighbors(static_cast<int>(v)).size() == 2);
}

TEST_CASE("build_graph: one set is a complete subgraph, disjoint sets disconnect") {
  auto f = SetFamily::explicit_family({{"a", "b", "c"}});
  auto g = build_graph(f);
  CHECK(g.names.size() == 3);
  for (int v = 0; v < 3; ++v) CHECK(g.neighbors(v).size() == 2);

  auto d = SetFamily::explicit_family({{"a", "b"}, {"c", "d"}});
  auto gd = build_graph(d);
  CHECK(!admissible_path(gd, "a", "c").has_value());

  CHECK_THROWS_AS(build_graph(SetFamily::explicit_family({{"a", "a"}})), MalformedFamily);
}

TEST_CASE("check_g1") {
  CHECK(check_g1(matrix_to_family(3, 3)).ok);
  auto bad = check_g1(SetFamily::explicit_family({{"a", "b"}, {"b", "c"}, {"b", "d"}}));
  CHECK(!bad.ok);
  CHECK(*bad.violator == "b");
  CHECK(check_g1(SetFamily::explicit_family({})).ok);
}

TEST_CASE("check_g2: matrix bipartition and the odd triangle") {
  auto m = check_g2(matrix_to_family(2, 3));
  REQUIRE(m.ok);
  CHECK(m.side == std::vector<int>{0, 0, 1, 1, 1});

  auto t = check_g2(triangle());
  CHECK(!t.ok);
  CHECK(t.odd_cycle.size() == 3);
  CHECK(t.odd_cycle.size() % 2 == 1);

  auto single = check_g2(SetFamily::explicit_family({{"a", "b"}}));
  REQUIRE(single.ok);
  CHECK(single.side == std::vector<int>{0});
}

TEST_CASE("check_g3") {
  CHECK(check_g3(matrix_to_family(3, 2)).ok);
  CHECK(check_g3(SetFamily::explicit_family({{"a"}, {"a"}, {"a"}})).ok);  // finite always
  auto bad = check_g3(SetFamily::repeat_subset(), 40);
  CHECK(!bad.ok);
  CHECK(!bad.reason.empty());
}

TEST_CASE("admissible paths") {
  auto f = matrix_to_family(2, 2);
  auto g = build_graph(f);
  auto self = admissible_path(g, cell_id(1, 1), cell_id(1, 1));
  REQUIRE(self.has_value());
  CHECK(self->size() == 1);

  // opposite corners of the 4-cycle: 3 vertices through a shared row/column
  auto p = admissible_path(g, cell_id(1, 1), cell_id(2, 2));
  REQUIRE(p.has_value());
  CHECK(p->size() == 3);

  // no three consecutive vertices of a shortest path share a set
  auto f2 = matrix_to_family(4, 4);
  auto g2 = build_graph(f2);
  auto p2 = admissible_path(g2, cell_id(1, 2), cell_id(4, 3));
  REQUIRE(p2.has_value());
  for (std::size_t i = 0; i + 2 < p2->size(); ++i) {
    auto [a1, b1] = parse_cell((*p2)[i]);
    auto [a2, b2] = parse_cell((*p2)[i + 1]);
    auto [a3, b3] = parse_cell((*p2)[i + 2]);
    bool same_row = a1 == a2 && a2 == a3;
    bool same_col = b1 == b2 && b2 == b3;
    CHECK(!same_row);
    CHECK(!same_col);
  }
}

TEST_CASE("admissible cycles") {
  auto f = matrix_to_family(2, 2);
  auto g = build_graph(f);
  Weight w = matrix_weight({{q(1, 2), q(1, 2)}, {q(1, 2), q(1, 2)}});
  auto c = find_admissible_cycle(g, f, &w);
  REQUIRE(c.has_value());
  CHECK(c->size() == 4);

  Weight perm = matrix_weight({{q(1), q(0)}, {q(0), q(1)}});
  CHECK(!find_admissible_cycle(g, f, &perm).has_value());

  auto tf = triangle();
  auto tg = build_graph(tf);
  Weight tw = half_triangle();
  auto tc = find_admissible_cycle(tg, tf, &tw);
  REQUIRE(tc.has_value());
  CHECK(tc->size() == 3);
}

TEST_CASE("even cycles under (g1)+(g2)") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t nr = 2 + rng() % 3, nc = 2 + rng() % 3;
    auto f = matrix_to_family(nr, nc);
    auto g = build_graph(f);
    Weight w;
    for (std::size_t i = 1; i <= nr; ++i)
      for (std::size_t j = 1; j <= nc; ++j)
        if (rng() % 2) w.set(cell_id(i, j), q(1 + rng() % 3, 7));
    auto c = find_admissible_cycle(g, f, &w);
    if (c) CHECK(c->size() % 2 == 0);
  }
}

TEST_CASE("validate_stochastic") {
  auto f = matrix_to_family(2, 2);
  Weight perm = matrix_weight({{q(0), q(1)}, {q(1), q(0)}});
  CHECK(validate_stochastic(perm, f).ok);

  auto f3 = matrix_to_family(3, 3);
  Weight allhalf;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) allhalf.set(cell_id(i, j), q(1, 2));
  auto v = validate_stochastic(allhalf, f3);
  CHECK(!v.ok);
  CHECK(v.offenders.size() == 6);  // all rows and columns sum to 3/2

  CHECK(validate_stochastic(half_triangle(), triangle()).ok);
}

TEST_CASE("is_pattern") {
  auto f = matrix_to_family(2, 2);
  CHECK(is_pattern(matrix_weight({{q(1), q(0)}, {q(0), q(1)}}), f));
  CHECK(!is_pattern(half_triangle(), triangle()));
  Weight zero;
  CHECK(!is_pattern(zero, f));  // G1 sets demand a 1
  auto fnone = matrix_to_family(2, 2, SetFamily::G1Mode::None);
  CHECK(is_pattern(zero, fnone));
}

TEST_CASE("seminorms") {
  auto tf = triangle();
  Weight tw = half_triangle();
  for (std::uint64_t k = 0; k < 3; ++k) CHECK(seminorm_pk(tw, tf, k) == q(1));

  auto f = matrix_to_family(2, 2);
  Weight perm = matrix_weight({{q(1), q(0)}, {q(0), q(1)}});
  for (std::uint64_t k = 0; k < 4; ++k) CHECK(seminorm_pk(perm, f, k) == q(1));

  // the k^-1 block weight: p_k = 1 for every k
  auto bf = SetFamily::blocks();
  Weight bw;
  for (std::uint64_t k = 1; k <= 6; ++k)
    for (std::uint64_t i = 1; i <= k; ++i)
      bw.set(block_id(k, i), Scalar(Rational(1, static_cast<long long>(k))));
  CHECK(seminorm_pk(bw, bf, 3) == q(1));
  auto ns = norm_s(bw, bf, 6);
  CHECK(ns.value == q(1));
  CHECK(!ns.exact);  // infinite family: sup over a prefix of sets
}

TEST_CASE("extreme_split: pattern certificate") {
  auto f = matrix_to_family(3, 3);
  Weight perm = matrix_weight({{q(0), q(1), q(0)}, {q(1), q(0), q(0)}, {q(0), q(0), q(1)}});
  auto r = extreme_split(perm, f);
  CHECK(r.outcome == SplitResult::Outcome::PatternCertificate);
}

TEST_CASE("extreme_split: constant-half 2x2 splits along the 4-cycle") {
  auto f = matrix_to_family(2, 2);
  Weight w = matrix_weight({{q(1, 2), q(1, 2)}, {q(1, 2), q(1, 2)}});
  auto r = extreme_split(w, f);
  check_split(w, f, r);
  CHECK(r.method == SplitResult::Method::AlternatingCycle);
}

TEST_CASE("extreme_split: triangle regime is NotApplicable with odd witness") {
  auto r = extreme_split(half_triangle(), triangle());
  CHECK(r.outcome == SplitResult::Outcome::NotApplicable);
  CHECK(r.odd_cycle.size() % 2 == 1);
  CHECK(r.odd_cycle.size() >= 3);
}

TEST_CASE("extreme_split: duplicate intersection case") {
  // two sets sharing two vertices
  auto f = SetFamily::explicit_family({{"a", "b"}, {"a", "b", "c"}}, {});
  Weight w;
  w.set("a", q(1, 4));
  w.set("b", q(1, 4));
  w.set("c", q(1, 3));
  auto r = extreme_split(w, f);
  check_split(w, f, r);
  CHECK(r.method == SplitResult::Method::DuplicateIntersection);
}

TEST_CASE("extreme_split: tree recursion on forests") {
  // a path family: no cycles, no duplicates
  auto f = SetFamily::explicit_family({{"a", "b"}, {"b", "c"}, {"c", "d"}}, {});
  Weight w;
  w.set("a", q(1, 3));
  w.set("b", q(1, 2));
  w.set("c", q(1, 4));
  w.set("d", q(1, 5));
  auto r = extreme_split(w, f);
  check_split(w, f, r);
  CHECK(r.method == SplitResult::Method::TreeRecursion);

  // G1 sums stay exactly 1 under the tree shift
  auto f1 = SetFamily::explicit_family({{"a", "b"}, {"b", "c"}}, {0});
  Weight w1;
  w1.set("a", q(2, 3));
  w1.set("b", q(1, 3));
  w1.set("c", q(1, 3));
  auto r1 = extreme_split(w1, f1);
  check_split(w1, f1, r1);
  CHECK(r1.w_plus.set_sum(f1, 0, 0) == q(1));
  CHECK(r1.w_minus.set_sum(f1, 0, 0) == q(1));
}

TEST_CASE("extreme_split decides membership in the pattern set (Thm 2.4)") {
  // random small (g1)+(g2) families with random stochastic weights
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    std::size_t nr = 1 + rng() % 3, nc = 1 + rng() % 3;
    auto f = matrix_to_family(nr, nc, SetFamily::G1Mode::None);
    Weight w;
    for (std::size_t i = 1; i <= nr; ++i) {
      // random substochastic row, sometimes a 0/1 pattern row
      if (rng() % 3 == 0) {
        if (rng() % 2) w.set(cell_id(i, 1 + rng() % nc), q(1));
      } else {
        long long den = 6 + static_cast<long long>(rng() % 6);
        for (std::size_t j = 1; j <= nc; ++j) {
          long long num = static_cast<long long>(rng() % 3);
          if (num) w.set(cell_id(i, j), q(num, den));
        }
      }
    }
    // repair columns: scale down if any column exceeds 1
    for (std::size_t j = 1; j <= nc; ++j) {
      Scalar colsum(0);
      for (std::size_t i = 1; i <= nr; ++i) colsum += w.at(cell_id(i, j));
      if (colsum > q(1))
        for (std::size_t i = 1; i <= nr; ++i)
          if (w.at(cell_id(i, j)).sign() != 0)
            w.set(cell_id(i, j), w.at(cell_id(i, j)) / colsum);
    }
    auto r = extreme_split(w, f);
    if (is_pattern(w, f)) {
      CHECK(r.outcome == SplitResult::Outcome::PatternCertificate);
    } else {
      check_split(w, f, r);
    }
  }
}

TEST_CASE("matrix family invariants") {
  auto f = matrix_to_family(2, 2);
  CHECK(f.set_count() == 4);
  CHECK(check_g1(f).ok);
  CHECK(check_g2(f).ok);
  CHECK(check_g3(f).ok);

  auto one = matrix_to_family(1, 1);
  auto g = build_graph(one);
  CHECK(g.names.size() == 1);
  CHECK(g.vertex_sets[0].size() == 2);

  // rows of an n x infinity matrix: membership spot checks
  auto wide = SetFamily::matrix(2, 0);
  auto row1 = wide.set_members(0, 5);
  CHECK(row1.size() == 5);
  CHECK(row1[3] == cell_id(1, 4));
  CHECK(wide.set_is_infinite(0));
  CHECK(!wide.set_is_infinite(2));  // a column has 2 entries
}

TEST_CASE("no pattern implies no stochastic weight (Remark 2.6 transfer)") {
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 40; ++trial) {
    // random small family under (g1)
    std::size_t nv = 2 + rng() % 4;
    std::vector<VertexId> verts;
    for (std::size_t i = 0; i < nv; ++i) verts.push_back("v" + std::to_string(i));
    std::size_t ns = 1 + rng() % 3;
    std::vector<std::vector<VertexId>> sets(ns);
    std::vector<int> uses(nv, 0);
    for (std::size_t k = 0; k < ns; ++k)
      for (std::size_t i = 0; i < nv; ++i)
        if (uses[i] < 2 && rng() % 2) {
          sets[k].push_back(verts[i]);
          ++uses[i];
        }
    std::vector<std::uint64_t> g1;
    for (std::size_t k = 0; k < ns; ++k)
      if (!sets[k].empty() && rng() % 2) g1.push_back(k);
    for (auto& s : sets)
      if (s.empty()) s.push_back("pad" + std::to_string(rng() % 100));
    auto f = SetFamily::explicit_family(sets, g1);
    if (!check_g1(f).ok || !check_g2(f).ok) continue;
    ++checked;

    // exhaustive pattern search
    std::size_t total = f.explicit_sets.size();
    bool pattern_exists = false;
    std::vector<VertexId> all;
    for (const auto& s : f.explicit_sets)
      for (const auto& v : s)
        if (std::find(all.begin(), all.end(), v) == all.end()) all.push_back(v);
    for (std::uint64_t mask = 0; mask < (1ull << all.size()) && !pattern_exists; ++mask) {
      Weight w;
      for (std::size_t i = 0; i < all.size(); ++i)
        if (mask & (1ull << i)) w.set(all[i], q(1));
      pattern_exists = is_pattern(w, f);
    }

    // LP feasibility of the stochastic constraints
    LPInstance lp;
    lp.nvars = all.size();
    for (std::size_t k = 0; k < total; ++k) {
      LPConstraint c;
      c.a.assign(all.size(), Rational(0));
      for (std::size_t i = 0; i < all.size(); ++i) {
        const auto& s = f.explicit_sets[k];
        if (std::find(s.begin(), s.end(), all[i]) != s.end()) c.a[i] = 1;
      }
      c.rel = f.in_g1(k) ? 0 : -1;
      c.b = 1;
      lp.rows.push_back(c);
    }
    bool lp_feasible = solve_lp(lp).feasible();
    CHECK(pattern_exists == lp_feasible);
  }
  CHECK(checked >= 30);
}
