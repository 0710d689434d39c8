#include "doctest.h"

#include <algorithm>
#include <random>
#include <vector>

#include "majorize/errors.hpp"
#include "majorize/sequences.hpp"

using namespace majorize;

namespace {

SeqDescriptor seq(std::vector<Scalar> prefix, std::vector<Tail> tails = {}) {
  SeqDescriptor d;
  d.prefix = std::move(prefix);
  d.tails = std::move(tails);
  return d;
}

Scalar q(long long n, long long d = 1) { return Scalar::ratio(n, d); }

// Exhaustive oracle: extreme m-subset sums of a finite vector.
std::pair<Scalar, Scalar> brute_extreme_sums(const std::vector<Scalar>& v, std::size_t m) {
  REQUIRE(m <= v.size());
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  bool first = true;
  Scalar lo(0), hi(0);
  while (true) {
    Scalar s(0);
    for (std::size_t i : idx) s += v[i];
    if (first) { lo = hi = s; first = false; }
    if (s < lo) lo = s;
    if (s > hi) hi = s;
    // next combination
    std::size_t k = m;
    while (k > 0 && idx[k - 1] == v.size() - m + k - 1) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t i = k; i < m; ++i) idx[i] = idx[i - 1] + 1;
  }
  return {lo, hi};
}

// Literal all-subset check of the envelope inequalities on finite data.
bool brute_q_finite(const std::vector<Scalar>& y, const std::vector<Scalar>& x) {
  if (y.size() > x.size()) return false;
  for (std::size_t m = 1; m <= y.size(); ++m) {
    auto [ylo, yhi] = brute_extreme_sums(y, m);
    auto [xlo, xhi] = brute_extreme_sums(x, m);
    if (yhi > xhi || ylo < xlo) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("entry readout") {
  auto x = seq({q(3), q(1)});
  CHECK(x.entry(2) == q(1));

  auto g = seq({}, {Tail::geometric(q(0), +1, q(1), q(1, 2))});
  CHECK(g.entry(3) == q(1, 8));

  auto p = seq({q(5)}, {Tail::geometric(q(0), +1, q(1), q(1, 2))});
  CHECK(p.entry(1) == q(5));
  CHECK(p.entry(2) == q(1, 2));
}

TEST_CASE("round-robin interleaving is deterministic") {
  auto x = seq({q(9)}, {Tail::constant(q(1)), Tail::constant(q(2))});
  CHECK(x.entry(1) == q(9));
  CHECK(x.entry(2) == q(1));
  CHECK(x.entry(3) == q(2));
  CHECK(x.entry(4) == q(1));
  CHECK(x.entry(5) == q(2));
}

TEST_CASE("partial sums on finite data match exhaustive enumeration") {
  auto x = seq({q(3), q(1), q(2)});
  auto [lo, hi] = brute_extreme_sums(x.prefix, 2);
  CHECK(partial_sum_max(x, 2) == XReal(hi));
  CHECK(partial_sum_min(x, 2) == XReal(lo));
  CHECK(hi == q(5));
  CHECK(lo == q(3));

  auto single = seq({q(7)});
  CHECK(partial_sum_max(single, 1) == XReal(q(7)));
  CHECK(partial_sum_min(single, 1) == XReal(q(7)));
}

TEST_CASE("partial sums with a geometric tail (greedy vs truncated brute)") {
  // x = {5} followed by 1/2, 1/4, ...
  auto x = seq({q(5)}, {Tail::geometric(q(0), +1, q(1), q(1, 2))});
  CHECK(partial_sum_max(x, 2) == XReal(q(11, 2)));

  // brute on the first 20 entries; the tail beyond adds less than 2^-17
  auto v = x.realize(20);
  auto [lo, hi] = brute_extreme_sums(v, 2);
  CHECK(hi == q(11, 2));
  // the infimum 0 is approached but never attained
  CHECK(partial_sum_min(x, 2) == XReal(q(0)));
  CHECK(lo - q(1, 1 << 17) <= q(0));
}

TEST_CASE("divergent tails give infinite envelopes") {
  auto x = seq({}, {Tail::divergent(+1, q(1))});
  CHECK(partial_sum_max(x, 3).is_pos_inf());
  CHECK(partial_sum_min(x, 1) == XReal(q(2)));

  auto d = seq({}, {Tail::divergent(-1, q(1))});
  CHECK(partial_sum_min(d, 2).is_neg_inf());
  CHECK(partial_sum_max(d, 2) == XReal(q(-6)));
}

TEST_CASE("empty sequence is rejected") {
  SeqDescriptor empty;
  CHECK_THROWS_AS(partial_sum_max(empty, 1), EmptySequence);
}

TEST_CASE("permutation symmetry of envelopes") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t n = 2 + rng() % 6;
    std::vector<Scalar> v;
    for (std::size_t i = 0; i < n; ++i)
      v.push_back(q(static_cast<long long>(rng() % 41) - 20, 1 + rng() % 7));
    auto p = v;
    std::shuffle(p.begin(), p.end(), rng);
    for (std::size_t m = 1; m <= n; ++m) {
      CHECK(partial_sum_max(seq(v), m) == partial_sum_max(seq(p), m));
      CHECK(partial_sum_min(seq(v), m) == partial_sum_min(seq(p), m));
    }
  }
}

TEST_CASE("q_membership examples") {
  auto v1 = q_membership(seq({q(2), q(2)}), seq({q(1), q(3)}), 2);
  CHECK(v1.ok());

  auto v2 = q_membership(seq({q(4)}), seq({q(1), q(3)}), 4);
  CHECK(!v2.ok());
  REQUIRE(v2.witness.has_value());
  CHECK(v2.witness->m == 1);
  CHECK(v2.witness->upper);
  CHECK(v2.witness->lhs == q(4));
  CHECK(v2.witness->bound == XReal(q(3)));

  // x = hat of (1, 1/2, 1/4, ... -> 0): R_2^-(xhat) = 0, R_2^+ = 3/2
  auto g = seq({}, {Tail::geometric(q(0), +1, q(2), q(1, 2))});
  auto xh = hat_extension(g);
  CHECK(partial_sum_min(xh, 2) == XReal(q(0)));
  CHECK(partial_sum_max(xh, 2) == XReal(q(3, 2)));
  auto v3 = q_membership(seq({q(1, 2), q(1, 2)}), xh, 30);
  CHECK(v3.ok());
}

TEST_CASE("q_membership witness replays the violation") {
  // y's extremal subset uses virtual (limit) entries: increasing tail to 10
  auto y = seq({}, {Tail::geometric(q(10), -1, q(1), q(1, 2))});
  auto x = seq({q(9), q(9), q(9)});
  auto v = q_membership(y, x, 2);
  CHECK(!v.ok());
  REQUIRE(v.witness.has_value());
  const auto& w = *v.witness;
  Scalar s(0);
  for (auto pos : w.indices) s += y.entry(pos);
  CHECK(s == w.lhs);
  CHECK(w.upper);
  CHECK(XReal(s) > w.bound);
  CHECK(w.indices.size() == w.m);
}

TEST_CASE("q_membership shortcut equals brute force on random finite instances") {
  std::mt19937_64 rng(2024);
  int disagreements = 0;
  for (int trial = 0; trial < 600; ++trial) {
    std::size_t nx = 1 + rng() % 8, ny = 1 + rng() % 8;
    std::vector<Scalar> xv, yv;
    for (std::size_t i = 0; i < nx; ++i)
      xv.push_back(q(static_cast<long long>(rng() % 21) - 10, 1 + rng() % 4));
    for (std::size_t i = 0; i < ny; ++i)
      yv.push_back(q(static_cast<long long>(rng() % 21) - 10, 1 + rng() % 4));
    // make ties likely too
    if (trial % 3 == 0 && ny <= nx) yv = std::vector<Scalar>(xv.begin(), xv.begin() + ny);
    bool brute = brute_q_finite(yv, xv);
    bool fast = q_membership(seq(yv), seq(xv), 10).ok();
    if (brute != fast) ++disagreements;
  }
  CHECK(disagreements == 0);
}

TEST_CASE("hat extension") {
  auto c = seq({}, {Tail::constant(q(1))});
  auto ch = hat_extension(c);
  CHECK(ch.tails.size() == 1);  // already attained infinitely often

  auto g = seq({}, {Tail::geometric(q(0), +1, q(1), q(1, 2))});
  auto gh = hat_extension(g);
  REQUIRE(gh.tails.size() == 2);
  CHECK(gh.tails[1].kind == Tail::Kind::Constant);
  CHECK(gh.tails[1].limit == q(0));

  auto d = seq({}, {Tail::divergent(+1, q(1))});
  auto dh = hat_extension(d);
  CHECK(dh.tails.size() == 1);  // nothing finite accumulates
}

TEST_CASE("hat extension is idempotent entry-for-entry as multisets") {
  auto g = seq({q(5)}, {Tail::geometric(q(1), +1, q(1), q(1, 3)),
                        Tail::geometric(q(2), -1, q(1), q(1, 2))});
  auto h1 = hat_extension(g);
  auto h2 = hat_extension(h1);
  REQUIRE(h1.tails.size() == h2.tails.size());
  for (std::uint64_t d : {1ull, 5ull, 23ull, 64ull}) {
    auto a = h1.realize(d), b = h2.realize(d);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
  }
}

TEST_CASE("lorentz norm against the harmonic weight") {
  auto x = seq({}, {Tail::powerlaw(q(0), +1, q(1), q(1))});  // 1, 1/2, 1/3, ...
  CHECK(classify_space(x) == 3);

  auto r1 = lorentz_norm(seq({q(1), q(1)}), x, 50);
  CHECK(r1.value == q(3, 2));
  CHECK(r1.remainder_bound == q(0));

  auto r2 = lorentz_norm(seq({q(0), q(0)}), x, 50);
  CHECK(r2.value == q(0));

  auto r3 = lorentz_norm(seq({q(0), q(0), q(0), q(0), q(1)}), x, 50);
  CHECK(r3.value == q(1));  // best rearrangement pairs the 1 with x_1 = 1

  auto bad = seq({}, {Tail::constant(q(2))});
  CHECK_THROWS_AS(lorentz_norm(seq({q(1)}), bad, 10), ClassMismatch);
}

TEST_CASE("abel identity (1.6) on finite data") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    std::size_t n = 2 + rng() % 6;
    std::vector<double> y(n), xp(n);
    for (auto& v : y) v = static_cast<double>(rng() % 100) / 10.0;
    for (auto& v : xp) v = static_cast<double>(rng() % 100) / 10.0 - 5.0;
    std::sort(y.begin(), y.end(), std::greater<>());
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = std::abs(xp[i]);
    std::sort(a.begin(), a.end(), std::greater<>());
    double lhs = 0;
    for (std::size_t i = 0; i < n; ++i) lhs += y[i] * a[i];
    double rhs = 0, acc = 0;
    for (std::size_t m = 0; m < n; ++m) {
      acc += y[m];
      double next = m + 1 < n ? a[m + 1] : 0.0;
      rhs += (a[m] - next) * acc;
    }
    CHECK(std::abs(lhs - rhs) < 1e-12);
  }
}

TEST_CASE("marcinkiewicz norm") {
  auto x = seq({}, {Tail::powerlaw(q(0), +1, q(1), q(1))});

  auto r1 = marcinkiewicz_norm(x, x, 40);
  CHECK(r1.value == q(1));
  CHECK(r1.exact);

  auto r2 = marcinkiewicz_norm(seq({q(1)}), x, 100);
  CHECK(r2.value == q(1));  // ratio 1/H_m is maximal at m = 1
  CHECK(r2.exact);

  SeqDescriptor x2 = x;
  x2.tails[0].scale = q(2);
  auto r3 = marcinkiewicz_norm(x2, x, 40);
  CHECK(r3.value == q(2));
  CHECK(r3.exact);
}

TEST_CASE("duality: |<y,xp>| <= M(y,x) L(xp,x) on finite truncations") {
  auto x = seq({}, {Tail::powerlaw(q(0), +1, q(1), q(1))});
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 1 + rng() % 5;
    std::vector<Scalar> yv, pv;
    for (std::size_t i = 0; i < n; ++i) {
      yv.push_back(q(static_cast<long long>(rng() % 9) - 4, 1 + rng() % 3));
      pv.push_back(q(static_cast<long long>(rng() % 9) - 4, 1 + rng() % 3));
    }
    Scalar inner(0);
    for (std::size_t i = 0; i < n; ++i) inner += yv[i] * pv[i];
    auto M = marcinkiewicz_norm(seq(yv), x, 60);
    auto L = lorentz_norm(seq(pv), x, 60);
    CHECK(inner.abs() <= M.value * L.value + Scalar(1e-12));
  }
}

TEST_CASE("classification of the five regimes") {
  CHECK(classify_space(seq({}, {Tail::divergent(+1, q(1))})) == 1);
  CHECK(classify_space(seq({q(1)}, {Tail::constant(q(3))})) == 2);
  CHECK(classify_space(seq({}, {Tail::geometric(q(5), -1, q(1), q(1, 2))})) == 2);
  CHECK(classify_space(seq({}, {Tail::powerlaw(q(0), +1, q(1), q(1))})) == 3);
  CHECK(classify_space(seq({}, {Tail::geometric(q(0), +1, q(1), q(1, 2))})) == 4);
  CHECK(classify_space(seq({}, {Tail::powerlaw(q(0), +1, q(1), q(2))})) == 4);
  CHECK(classify_space(seq({q(1), q(2)})) == 5);
  CHECK(classify_space(seq({q(1)}, {Tail::constant(q(0))})) == 5);
}
