#include "majorize/oracles.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <set>
#include <thread>

namespace majorize {

// ---------------------------------------------------------------------------
// Simplex

namespace {

struct Tableau {
  std::vector<std::vector<Rational>> a;  // m x ncols
  std::vector<Rational> rhs;             // m
  std::vector<int> basis;                // m
  std::size_t ncols = 0;

  void pivot(std::size_t r, std::size_t c) {
    Rational p = a[r][c];
    for (auto& v : a[r]) v /= p;
    rhs[r] /= p;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == r) continue;
      Rational f = a[i][c];
      if (f == 0) continue;
      for (std::size_t j = 0; j < ncols; ++j) a[i][j] -= f * a[r][j];
      rhs[i] -= f * rhs[r];
    }
    basis[r] = static_cast<int>(c);
  }
};

// Bland's rule maximization over the given cost vector; columns in `banned`
// never enter. Returns false when unbounded.
bool run_simplex(Tableau& t, const std::vector<Rational>& cost,
                 const std::vector<bool>& banned) {
  const std::size_t m = t.a.size();
  while (true) {
    // reduced costs: c_j - c_B . column_j
    int enter = -1;
    for (std::size_t j = 0; j < t.ncols; ++j) {
      if (banned[j]) continue;
      Rational red = cost[j];
      for (std::size_t i = 0; i < m; ++i) {
        const Rational& cb = cost[t.basis[i]];
        if (cb != 0 && t.a[i][j] != 0) red -= cb * t.a[i][j];
      }
      if (red > 0) { enter = static_cast<int>(j); break; }  // Bland: first index
    }
    if (enter < 0) return true;
    int leave = -1;
    Rational best;
    for (std::size_t i = 0; i < m; ++i) {
      if (t.a[i][enter] <= 0) continue;
      Rational ratio = t.rhs[i] / t.a[i][enter];
      if (leave < 0 || ratio < best ||
          (ratio == best && t.basis[i] < t.basis[leave])) {
        leave = static_cast<int>(i);
        best = ratio;
      }
    }
    if (leave < 0) return false;  // unbounded
    t.pivot(leave, enter);
  }
}

}  // namespace

LPResult solve_lp(const LPInstance& lp) {
  const std::size_t n = lp.nvars;
  const std::size_t m = lp.rows.size();

  // column layout: original | slack/surplus | artificial
  std::size_t nslack = 0;
  for (const auto& r : lp.rows)
    if (r.rel != 0) ++nslack;

  Tableau t;
  t.ncols = n + nslack + m;  // one artificial slot per row (not all used)
  t.a.assign(m, std::vector<Rational>(t.ncols, Rational(0)));
  t.rhs.assign(m, Rational(0));
  t.basis.assign(m, -1);

  std::vector<bool> artificial(t.ncols, false);
  std::size_t slack_at = n, art_at = n + nslack;

  for (std::size_t i = 0; i < m; ++i) {
    const LPConstraint& row = lp.rows[i];
    if (row.a.size() != n) throw std::invalid_argument("LP row width mismatch");
    int rel = row.rel;
    Rational b = row.b;
    Rational sgn = 1;
    if (b < 0) { sgn = -1; b = -b; rel = -rel; }
    for (std::size_t j = 0; j < n; ++j) t.a[i][j] = sgn * row.a[j];
    t.rhs[i] = b;
    if (rel == -1) {
      t.a[i][slack_at] = 1;
      t.basis[i] = static_cast<int>(slack_at);
      ++slack_at;
    } else if (rel == +1) {
      t.a[i][slack_at] = -1;
      ++slack_at;
      t.a[i][art_at] = 1;
      artificial[art_at] = true;
      t.basis[i] = static_cast<int>(art_at);
      ++art_at;
    } else {
      t.a[i][art_at] = 1;
      artificial[art_at] = true;
      t.basis[i] = static_cast<int>(art_at);
      ++art_at;
    }
  }

  std::vector<bool> banned(t.ncols, false);
  for (std::size_t j = 0; j < t.ncols; ++j)
    if (artificial[j]) banned[j] = false;  // artificials may move in phase 1

  // phase 1: maximize -(sum of artificials)
  std::vector<Rational> c1(t.ncols, Rational(0));
  bool any_art = false;
  for (std::size_t j = 0; j < t.ncols; ++j)
    if (artificial[j]) { c1[j] = -1; any_art = true; }

  LPResult res;
  if (any_art) {
    run_simplex(t, c1, banned);
    Rational infeas = 0;
    for (std::size_t i = 0; i < m; ++i)
      if (artificial[t.basis[i]]) infeas += t.rhs[i];
    if (infeas != 0) {
      res.status = LPResult::Status::Infeasible;
      return res;
    }
    // drive remaining artificials out of the basis (degenerate rows)
    for (std::size_t i = 0; i < t.a.size();) {
      if (!artificial[t.basis[i]]) { ++i; continue; }
      int col = -1;
      for (std::size_t j = 0; j < t.ncols; ++j)
        if (!artificial[j] && t.a[i][j] != 0) { col = static_cast<int>(j); break; }
      if (col >= 0) {
        t.pivot(i, col);
        ++i;
      } else {
        t.a.erase(t.a.begin() + i);    // redundant constraint
        t.rhs.erase(t.rhs.begin() + i);
        t.basis.erase(t.basis.begin() + i);
      }
    }
  }

  for (std::size_t j = 0; j < t.ncols; ++j)
    if (artificial[j]) banned[j] = true;

  if (!lp.objective.empty()) {
    if (lp.objective.size() != n) throw std::invalid_argument("LP objective width mismatch");
    std::vector<Rational> c2(t.ncols, Rational(0));
    for (std::size_t j = 0; j < n; ++j)
      c2[j] = lp.maximize ? lp.objective[j] : -lp.objective[j];
    if (!run_simplex(t, c2, banned)) {
      res.status = LPResult::Status::Unbounded;
      return res;
    }
  }

  res.status = LPResult::Status::Optimal;
  res.x.assign(n, Rational(0));
  for (std::size_t i = 0; i < t.a.size(); ++i)
    if (t.basis[i] >= 0 && t.basis[i] < static_cast<int>(n))
      res.x[t.basis[i]] = t.rhs[i];
  if (!lp.objective.empty()) {
    Rational v = 0;
    for (std::size_t j = 0; j < n; ++j) v += lp.objective[j] * res.x[j];
    res.value = v;
  }
  return res;
}

// ---------------------------------------------------------------------------
// DS polytope vertices

namespace {

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
  bool join(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    p[a] = b;
    return true;
  }
};

}  // namespace

std::vector<std::vector<Rational>> enumerate_ds_vertices(std::size_t n) {
  if (n == 0 || n > 5) throw std::invalid_argument("enumerate_ds_vertices supports 1 <= n <= 5");
  const std::size_t cells = n * n;
  const std::size_t need = 2 * n - 1;  // spanning tree of the bipartite constraint graph
  std::set<std::vector<Rational>> vertices;

  std::vector<std::size_t> pick(need);
  for (std::size_t i = 0; i < need; ++i) pick[i] = i;

  auto process = [&](const std::vector<std::size_t>& sel) {
    UnionFind uf(static_cast<int>(2 * n));
    for (std::size_t e : sel) {
      int r = static_cast<int>(e / n), c = static_cast<int>(n + e % n);
      if (!uf.join(r, c)) return;  // cycle: dependent basis
    }
    // spanning tree: solve by leaf elimination
    std::vector<Rational> demand(2 * n, Rational(1));
    std::vector<std::vector<std::size_t>> inc(2 * n);
    for (std::size_t e : sel) {
      inc[e / n].push_back(e);
      inc[n + e % n].push_back(e);
    }
    std::vector<int> deg(2 * n);
    for (std::size_t v = 0; v < 2 * n; ++v) deg[v] = static_cast<int>(inc[v].size());
    std::vector<bool> used(cells, false);
    std::vector<Rational> val(cells, Rational(0));
    std::vector<std::size_t> queue;
    for (std::size_t v = 0; v < 2 * n; ++v)
      if (deg[v] == 1) queue.push_back(v);
    std::size_t done = 0;
    while (!queue.empty()) {
      std::size_t v = queue.back();
      queue.pop_back();
      if (deg[v] != 1) continue;
      std::size_t edge = cells;
      for (std::size_t e : inc[v])
        if (!used[e]) { edge = e; break; }
      if (edge == cells) continue;
      used[edge] = true;
      ++done;
      val[edge] = demand[v];
      std::size_t r = edge / n, c = n + edge % n;
      std::size_t other = (v == r) ? c : r;
      demand[v] = 0;
      demand[other] -= val[edge];
      --deg[v];
      if (--deg[other] == 1) queue.push_back(other);
    }
    if (done != need) return;
    for (std::size_t e = 0; e < cells; ++e)
      if (val[e] < 0) return;
    vertices.insert(val);
  };

  while (true) {
    process(pick);
    std::size_t k = need;
    while (k > 0 && pick[k - 1] == cells - need + k - 1) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t i = k; i < need; ++i) pick[i] = pick[i - 1] + 1;
  }
  return {vertices.begin(), vertices.end()};
}

// ---------------------------------------------------------------------------
// brute_q

bool brute_q(const std::vector<Scalar>& y, const std::vector<Scalar>& x) {
  if (y.size() > x.size()) return false;
  auto extremes = [](const std::vector<Scalar>& v, std::size_t m) {
    std::vector<std::size_t> idx(m);
    for (std::size_t i = 0; i < m; ++i) idx[i] = i;
    Scalar lo(0), hi(0);
    bool first = true;
    while (true) {
      Scalar s(0);
      for (std::size_t i : idx) s += v[i];
      if (first) { lo = hi = s; first = false; }
      if (s < lo) lo = s;
      if (s > hi) hi = s;
      std::size_t k = m;
      while (k > 0 && idx[k - 1] == v.size() - m + k - 1) --k;
      if (k == 0) break;
      ++idx[k - 1];
      for (std::size_t i = k; i < m; ++i) idx[i] = idx[i - 1] + 1;
    }
    return std::make_pair(lo, hi);
  };
  for (std::size_t mm = 1; mm <= y.size(); ++mm) {
    auto [ylo, yhi] = extremes(y, mm);
    auto [xlo, xhi] = extremes(x, mm);
    if (yhi > xhi || ylo < xlo) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Haar frames

std::mt19937_64 rng_for(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                   static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                   0x9e3779b9u};
  return std::mt19937_64(sq);
}

unsigned sampling_threads() {
  const char* env = std::getenv("MAJORIZE_THREADS");
  if (!env) return 1;
  long v = std::strtol(env, nullptr, 10);
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (v < 1) return 1;
  return static_cast<unsigned>(std::min<long>(v, hw));
}

FrameSample sample_rayleigh(const std::vector<double>& x, std::size_t m,
                            std::size_t count, std::uint64_t seed) {
  const std::size_t n = x.size();
  if (m > n) throw std::invalid_argument("frame size exceeds ambient dimension");
  FrameSample out;
  out.seed = seed;
  out.m = m;
  out.n = n;
  out.rayleigh.assign(count, {});
  std::vector<double> gram_err(count, 0.0);

  auto work = [&](std::size_t lo, std::size_t hi) {
    std::vector<std::vector<double>> u(m, std::vector<double>(n));
    for (std::size_t s = lo; s < hi; ++s) {
      auto rng = rng_for(seed, s);
      std::normal_distribution<double> gauss(0.0, 1.0);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) u[i][j] = gauss(rng);
      // modified Gram-Schmidt, two passes
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t k = 0; k < i; ++k) {
            double dot = 0;
            for (std::size_t j = 0; j < n; ++j) dot += u[i][j] * u[k][j];
            for (std::size_t j = 0; j < n; ++j) u[i][j] -= dot * u[k][j];
          }
          double norm = 0;
          for (std::size_t j = 0; j < n; ++j) norm += u[i][j] * u[i][j];
          norm = std::sqrt(norm);
          for (std::size_t j = 0; j < n; ++j) u[i][j] /= norm;
        }
      }
      double err = 0;
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t k = 0; k <= i; ++k) {
          double dot = 0;
          for (std::size_t j = 0; j < n; ++j) dot += u[i][j] * u[k][j];
          err = std::max(err, std::abs(dot - (i == k ? 1.0 : 0.0)));
        }
      gram_err[s] = err;
      std::vector<double> y(m, 0.0);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) y[i] += u[i][j] * u[i][j] * x[j];
      out.rayleigh[s] = std::move(y);
    }
  };

  unsigned nt = sampling_threads();
  if (nt <= 1 || count < 2 * nt) {
    work(0, count);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (count + nt - 1) / nt;
    for (unsigned t = 0; t < nt; ++t) {
      std::size_t lo = t * chunk, hi = std::min(count, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  for (double e : gram_err) out.max_gram_error = std::max(out.max_gram_error, e);
  return out;
}

// ---------------------------------------------------------------------------
// Hull membership

HullVerdict hull_membership(const std::vector<Scalar>& point,
                            const std::vector<std::vector<Scalar>>& generators,
                            const Scalar& tol) {
  const std::size_t d = point.size();
  const std::size_t k = generators.size();
  HullVerdict out;
  if (k == 0) return out;
  for (const auto& g : generators)
    if (g.size() != d) throw std::invalid_argument("generator dimension mismatch");

  Rational tolr = tol.to_rational();

  LPInstance lp;
  lp.nvars = k;
  for (std::size_t j = 0; j < d; ++j) {
    LPConstraint up, dn;
    up.a.resize(k);
    for (std::size_t i = 0; i < k; ++i) up.a[i] = generators[i][j].to_rational();
    up.b = point[j].to_rational();
    if (tolr == 0) {
      up.rel = 0;
      lp.rows.push_back(up);
    } else {
      dn = up;
      up.rel = -1;
      up.b += tolr;
      dn.rel = +1;
      dn.b -= tolr;
      lp.rows.push_back(up);
      lp.rows.push_back(dn);
    }
  }
  LPConstraint sum;
  sum.a.assign(k, Rational(1));
  sum.rel = 0;
  sum.b = 1;
  lp.rows.push_back(sum);

  LPResult r = solve_lp(lp);
  if (r.feasible()) {
    out.feasible = true;
    out.coefficients = r.x;
    return out;
  }

  // separation LP: maximize t s.t. <a, g_i - p> + t <= 0, a in [-1,1]^d
  // variables: a+ (d), a- (d), t+ , t-
  LPInstance sep;
  sep.nvars = 2 * d + 2;
  for (std::size_t i = 0; i < k; ++i) {
    LPConstraint c;
    c.a.assign(sep.nvars, Rational(0));
    for (std::size_t j = 0; j < d; ++j) {
      Rational diff = generators[i][j].to_rational() - point[j].to_rational();
      c.a[j] = diff;
      c.a[d + j] = -diff;
    }
    c.a[2 * d] = 1;
    c.a[2 * d + 1] = -1;
    c.rel = -1;
    c.b = 0;
    sep.rows.push_back(c);
  }
  for (std::size_t j = 0; j < 2 * d; ++j) {
    LPConstraint box;
    box.a.assign(sep.nvars, Rational(0));
    box.a[j] = 1;
    box.rel = -1;
    box.b = 1;
    sep.rows.push_back(box);
  }
  sep.objective.assign(sep.nvars, Rational(0));
  sep.objective[2 * d] = 1;
  sep.objective[2 * d + 1] = -1;
  sep.maximize = true;
  LPResult s = solve_lp(sep);
  if (s.status == LPResult::Status::Optimal && s.value > 0) {
    out.hyperplane.resize(d);
    for (std::size_t j = 0; j < d; ++j) out.hyperplane[j] = s.x[j] - s.x[d + j];
    out.hyperplane_gap = s.value;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Markus evidence

MarkusReport markus_evidence(std::uint64_t samples, std::uint64_t seed) {
  using C = std::complex<double>;
  MarkusReport rep;
  rep.samples = samples;
  if (samples == 0) return rep;
  const C z[3] = {C(0, 0), C(0, 1), C(1, 0)};
  const C target[3] = {C(0, 0.5), C(0.5, 0.5), C(0.5, 0)};

  double best = -1;
  std::uint64_t best_at = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    auto rng = rng_for(seed, s);
    std::normal_distribution<double> gauss(0.0, 1.0);
    C u[3][3];
    for (auto& row : u)
      for (auto& v : row) v = C(gauss(rng), gauss(rng));
    // Gram-Schmidt rows
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < i; ++k) {
        C dot(0, 0);
        for (int j = 0; j < 3; ++j) dot += u[i][j] * std::conj(u[k][j]);
        for (int j = 0; j < 3; ++j) u[i][j] -= dot * u[k][j];
      }
      double norm = 0;
      for (int j = 0; j < 3; ++j) norm += std::norm(u[i][j]);
      norm = std::sqrt(norm);
      for (int j = 0; j < 3; ++j) u[i][j] /= norm;
    }
    C y[3] = {C(0, 0), C(0, 0), C(0, 0)};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) y[i] += std::norm(u[i][j]) * z[j];
    double dist = 0;
    for (int i = 0; i < 3; ++i) dist += std::norm(y[i] - target[i]);
    dist = std::sqrt(dist);
    if (best < 0 || dist < best) { best = dist; best_at = s; }
  }
  rep.min_distance = best;
  rep.argmin = best_at;
  return rep;
}

}  // namespace majorize
