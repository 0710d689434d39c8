#include "majorize/birkhoff.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "majorize/errors.hpp"

namespace majorize {

// ---------------------------------------------------------------------------
// decompose_finite

DenseMatrix MatrixDecomposition::reconstruct(std::size_t n) const {
  DenseMatrix m(n, n);
  for (const auto& t : terms)
    for (std::size_t i = 0; i < n; ++i)
      if (t.cols[i] >= 0) m.at(i, t.cols[i]) += t.alpha;
  return m;
}

Scalar MatrixDecomposition::coefficient_sum() const {
  Scalar s(0);
  for (const auto& t : terms) s += t.alpha;
  return s;
}

namespace {

bool kuhn_augment(int row, const std::vector<std::vector<int>>& adj,
                  std::vector<char>& seen, std::vector<int>& col_owner) {
  for (int c : adj[row]) {
    if (seen[c]) continue;
    seen[c] = 1;
    if (col_owner[c] < 0 || kuhn_augment(col_owner[c], adj, seen, col_owner)) {
      col_owner[c] = row;
      return true;
    }
  }
  return false;
}

// Perfect matching on the support; on failure writes a Hall violator.
std::optional<std::vector<int>> perfect_matching(const std::vector<std::vector<int>>& adj,
                                                 std::size_t n, std::string* hall) {
  std::vector<int> col_owner(n, -1);
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<char> seen(n, 0);
    if (!kuhn_augment(static_cast<int>(r), adj, seen, col_owner)) {
      if (hall) {
        std::set<int> rows{static_cast<int>(r)}, cols;
        bool grew = true;
        while (grew) {
          grew = false;
          for (int rr : std::set<int>(rows))
            for (int c : adj[rr])
              if (cols.insert(c).second) {
                grew = true;
                if (col_owner[c] >= 0) rows.insert(col_owner[c]);
              }
        }
        std::ostringstream os;
        os << "Hall violation: rows {";
        for (int rr : rows) os << " " << rr + 1;
        os << " } reach only columns {";
        for (int c : cols) os << " " << c + 1;
        os << " }";
        *hall = os.str();
      }
      return std::nullopt;
    }
  }
  std::vector<int> row_to_col(n, -1);
  for (std::size_t c = 0; c < n; ++c)
    if (col_owner[c] >= 0) row_to_col[col_owner[c]] = static_cast<int>(c);
  return row_to_col;
}

// Permutation matrices span a space of affine dimension (n-1)^2, so any
// decomposition with more than (n-1)^2 + 1 terms carries an affine
// dependence; stepping along it eliminates a term without changing the
// combination.  Exact arithmetic: the reconstruction is untouched.
bool prune_terms(MatrixDecomposition& dec, std::size_t n) {
  const std::size_t R = dec.terms.size();
  const std::size_t rows = n * n + 1;
  std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(R, Rational(0)));
  for (std::size_t t = 0; t < R; ++t) {
    for (std::size_t i = 0; i < n; ++i)
      if (dec.terms[t].cols[i] >= 0) a[i * n + dec.terms[t].cols[i]][t] = 1;
    a[n * n][t] = 1;
  }
  std::size_t rr = 0;
  std::vector<int> pivot_row_of_col(R, -1);
  for (std::size_t c = 0; c < R && rr < rows; ++c) {
    std::size_t p = rr;
    while (p < rows && a[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[rr]);
    Rational inv = a[rr][c];
    for (std::size_t j = c; j < R; ++j) a[rr][j] /= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == rr || a[i][c] == 0) continue;
      Rational f = a[i][c];
      for (std::size_t j = c; j < R; ++j) a[i][j] -= f * a[rr][j];
    }
    pivot_row_of_col[c] = static_cast<int>(rr);
    ++rr;
  }
  int free_col = -1;
  for (std::size_t c = 0; c < R; ++c)
    if (pivot_row_of_col[c] < 0) { free_col = static_cast<int>(c); break; }
  if (free_col < 0) return false;

  std::vector<Rational> dir(R, Rational(0));
  dir[free_col] = 1;
  for (std::size_t c = 0; c < R; ++c)
    if (pivot_row_of_col[c] >= 0) dir[c] = -a[pivot_row_of_col[c]][free_col];

  auto step_limit = [&](int sign) -> std::optional<Rational> {
    std::optional<Rational> t;
    for (std::size_t i = 0; i < R; ++i) {
      Rational d = sign * dir[i];
      if (d >= 0) continue;
      Rational lim = dec.terms[i].alpha.to_rational() / -d;
      if (!t || lim < *t) t = lim;
    }
    return t;
  };
  int sgn = 1;
  auto tstar = step_limit(sgn);
  if (!tstar) {
    sgn = -1;
    tstar = step_limit(sgn);
  }
  if (!tstar) return false;  // dir identically zero: cannot happen

  bool exact = true;
  for (const auto& t : dec.terms) exact = exact && t.alpha.is_exact();
  std::vector<PermTerm> out;
  for (std::size_t i = 0; i < R; ++i) {
    Rational na = dec.terms[i].alpha.to_rational() + *tstar * sgn * dir[i];
    if (na == 0) continue;
    PermTerm nt = dec.terms[i];
    nt.alpha = exact ? Scalar(na) : Scalar(static_cast<double>(na));
    out.push_back(std::move(nt));
  }
  if (out.size() >= dec.terms.size()) return false;
  dec.terms = std::move(out);
  return true;
}

}  // namespace

MatrixDecomposition decompose_finite(const DenseMatrix& w, const Scalar& tol) {
  if (w.nrows != w.ncols) throw std::invalid_argument("decompose_finite needs a square matrix");
  const std::size_t n = w.nrows;
  if (n == 0) throw std::invalid_argument("empty matrix");
  const bool exact = w.exact();
  const Scalar eps = exact ? Scalar(0) : tol;

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j)
      if (w.at(i, j).sign() < 0)
        throw NotDoublyStochastic("negative entry at (" + std::to_string(i + 1) + "," +
                                  std::to_string(j + 1) + ")");
    if ((w.row_sum(i) - Scalar(1)).abs() > eps)
      throw NotDoublyStochastic("row " + std::to_string(i + 1) + " sums to " +
                                w.row_sum(i).str());
  }
  for (std::size_t j = 0; j < n; ++j)
    if ((w.col_sum(j) - Scalar(1)).abs() > eps)
      throw NotDoublyStochastic("column " + std::to_string(j + 1) + " sums to " +
                                w.col_sum(j).str());

  DenseMatrix r = w;
  const Scalar support_floor = exact ? Scalar(0) : Scalar(1e-13);
  const Scalar stop = exact ? Scalar(0) : Scalar(2e-11);
  Scalar theta(1);
  MatrixDecomposition dec;
  const std::size_t max_rounds = 2 * n * n + 4;

  while (theta > stop) {
    if (dec.terms.size() > max_rounds)
      throw NotDoublyStochastic("extraction did not converge; input too far from doubly stochastic");
    std::vector<std::vector<int>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (r.at(i, j) > support_floor) adj[i].push_back(static_cast<int>(j));
    std::string hall;
    auto match = perfect_matching(adj, n, &hall);
    if (!match) throw NotDoublyStochastic(hall);
    Scalar alpha = r.at(0, (*match)[0]);
    for (std::size_t i = 1; i < n; ++i) alpha = min(alpha, r.at(i, (*match)[i]));
    if (alpha > theta) alpha = theta;
    if (alpha.sign() <= 0) break;
    for (std::size_t i = 0; i < n; ++i) {
      Scalar& cell = r.at(i, (*match)[i]);
      cell -= alpha;
      if (!exact && cell <= support_floor) cell = Scalar(0);
    }
    PermTerm t;
    t.alpha = alpha;
    t.cols = *match;
    dec.terms.push_back(std::move(t));
    theta -= alpha;
  }

  if (!exact) {
    Scalar s = dec.coefficient_sum();
    for (auto& t : dec.terms) t.alpha = t.alpha / s;
  }
  const std::size_t bound = n * n - 2 * n + 2;
  while (dec.terms.size() > bound)
    if (!prune_terms(dec, n)) break;
  return dec;
}

// ---------------------------------------------------------------------------
// complete_pattern

namespace {

// Set index of row/column number t in the enumeration order of a matrix
// family (see SetFamily::set_members).
std::uint64_t row_set_index(const SetFamily& f, std::uint64_t t) {
  if (f.nrows > 0) return t - 1;
  if (f.ncols == 0) return 2 * (t - 1);
  return f.ncols + t - 1;
}
std::uint64_t col_set_index(const SetFamily& f, std::uint64_t t) {
  if (f.nrows > 0 && f.ncols > 0) return f.nrows + t - 1;
  if (f.nrows == 0 && f.ncols == 0) return 2 * (t - 1) + 1;
  if (f.nrows > 0) return f.nrows + t - 1;
  return t - 1;
}

void validate_partial(const Weight& partial, const SetFamily& f, std::uint64_t n,
                      std::uint64_t check_sets) {
  if (partial.tail != Weight::TailRule::None)
    throw PreconditionFailed("the prescription must have finite support");
  for (const auto& [v, val] : partial.values)
    if (val.sign() != 0 && val != Scalar(1))
      throw PreconditionFailed("prescription value at " + v + " is not 0/1");
  for (std::uint64_t k = 0; k < check_sets; ++k) {
    Scalar s = partial.set_sum(f, k, 0);
    if (s > Scalar(1))
      throw PreconditionFailed("two 1s inside set " + std::to_string(k));
    if (k < n && f.in_g1(k) && s != Scalar(1))
      throw PreconditionFailed("prescribed G1 set " + std::to_string(k) +
                               " does not sum to 1");
  }
  // support must lie inside the prescribed region
  for (const auto& [v, val] : partial.values) {
    if (val.sign() == 0) continue;
    bool inside = false;
    for (std::uint64_t k = 0; k < n && !inside; ++k) inside = f.set_contains(k, v);
    if (!inside)
      throw PreconditionFailed("prescription touches " + v + " outside the first " +
                               std::to_string(n) + " sets");
  }
}

Weight complete_explicit(const Weight& partial, const SetFamily& f, std::uint64_t n) {
  const std::uint64_t count = f.set_count();
  validate_partial(partial, f, n, count);
  Weight out = partial;

  auto sets_of = [&](const VertexId& v) {
    std::vector<std::uint64_t> ks;
    for (std::uint64_t k = 0; k < count; ++k)
      if (f.set_contains(k, v)) ks.push_back(k);
    return ks;
  };

  for (std::uint64_t k = n; k < count; ++k) {
    if (!f.in_g1(k)) continue;
    if (out.set_sum(f, k, 0).sign() != 0) continue;
    const auto members = f.set_members(k, 0);
    const VertexId* fallback = nullptr;
    const VertexId* fresh = nullptr;
    for (const VertexId& v : members) {
      bool in_region = false;
      for (std::uint64_t j = 0; j < n && !in_region; ++j) in_region = f.set_contains(j, v);
      if (in_region) continue;
      bool conflict = false;
      bool earlier = false;
      for (std::uint64_t j : sets_of(v)) {
        if (j != k && out.set_sum(f, j, 0).sign() != 0) conflict = true;
        if (j < k) earlier = true;
      }
      if (conflict) continue;
      if (!earlier && !fresh) fresh = &v;
      if (!fallback) fallback = &v;
    }
    const VertexId* pick = fresh ? fresh : fallback;
    if (!pick)
      throw CompletionImpossible("no usable vertex for G1 set " + std::to_string(k));
    out.set(*pick, Scalar(1));
  }
  return out;
}

Weight complete_matrix(const Weight& partial, const SetFamily& f, std::uint64_t n) {
  // sanity: n does not exceed the family size
  if (f.finite() && n > f.set_count()) throw std::invalid_argument("n exceeds the set count");
  validate_partial(partial, f, n, n);

  std::map<std::uint64_t, int> row_cnt, col_cnt;
  std::uint64_t touched = 0;
  for (const auto& [v, val] : partial.values) {
    if (val.sign() == 0) continue;
    auto [i, j] = parse_cell(v);
    if (++row_cnt[i] > 1)
      throw PreconditionFailed("two 1s inside row " + std::to_string(i));
    if (++col_cnt[j] > 1)
      throw PreconditionFailed("two 1s inside column " + std::to_string(j));
    touched = std::max({touched, i, j});
  }
  auto row_fixed = [&](std::uint64_t t) {
    return (f.nrows == 0 || t <= f.nrows) && row_set_index(f, t) < n;
  };
  auto col_fixed = [&](std::uint64_t t) {
    return (f.ncols == 0 || t <= f.ncols) && col_set_index(f, t) < n;
  };
  for (std::uint64_t t = 1; (f.nrows == 0 || t <= f.nrows) && row_fixed(t); ++t)
    touched = std::max(touched, t);
  for (std::uint64_t t = 1; (f.ncols == 0 || t <= f.ncols) && col_fixed(t); ++t)
    touched = std::max(touched, t);
  const std::uint64_t d0 = touched + 1;

  bool rows_g1_beyond = false, cols_g1_beyond = false;
  if (f.nrows == 0)
    rows_g1_beyond = f.g1_mode == SetFamily::G1Mode::All ||
                     f.g1_mode == SetFamily::G1Mode::Rows;
  if (f.ncols == 0)
    cols_g1_beyond = f.g1_mode == SetFamily::G1Mode::All ||
                     f.g1_mode == SetFamily::G1Mode::Cols;

  Weight out = partial;
  auto place = [&](std::uint64_t i, std::uint64_t j) {
    out.set(cell_id(i, j), Scalar(1));
    ++row_cnt[i];
    ++col_cnt[j];
  };

  // demand & supply among the finitely many numbers below the untouched zone
  std::vector<std::uint64_t> rows_demand, cols_demand;
  std::vector<std::uint64_t> rows_supply, cols_supply;  // zero, placeable
  std::uint64_t row_hi = f.nrows ? f.nrows : d0 - 1;
  std::uint64_t col_hi = f.ncols ? f.ncols : d0 - 1;
  for (std::uint64_t t = 1; t <= row_hi; ++t) {
    if (row_fixed(t) || row_cnt.count(t)) continue;
    rows_supply.push_back(t);
    if (f.in_g1(row_set_index(f, t))) rows_demand.push_back(t);
  }
  for (std::uint64_t t = 1; t <= col_hi; ++t) {
    if (col_fixed(t) || col_cnt.count(t)) continue;
    cols_supply.push_back(t);
    if (f.in_g1(col_set_index(f, t))) cols_demand.push_back(t);
  }

  auto pop_value = [](std::vector<std::uint64_t>& v, std::uint64_t x) {
    v.erase(std::remove(v.begin(), v.end(), x), v.end());
  };

  // pair demand rows with demand columns first
  while (!rows_demand.empty() && !cols_demand.empty()) {
    std::uint64_t r = rows_demand.front(), c = cols_demand.front();
    place(r, c);
    pop_value(rows_demand, r);
    pop_value(cols_demand, c);
    pop_value(rows_supply, r);
    pop_value(cols_supply, c);
  }
  std::uint64_t fresh_row = f.nrows ? row_hi + 1 : d0;
  std::uint64_t fresh_col = f.ncols ? col_hi + 1 : d0;
  auto next_fresh_col = [&]() -> std::optional<std::uint64_t> {
    if (f.ncols && fresh_col > f.ncols) return std::nullopt;
    if (f.ncols == 0) return fresh_col++;
    return std::nullopt;  // finite side: no numbers beyond the supply lists
  };
  auto next_fresh_row = [&]() -> std::optional<std::uint64_t> {
    if (f.nrows == 0) return fresh_row++;
    return std::nullopt;
  };

  for (std::uint64_t r : std::vector<std::uint64_t>(rows_demand)) {
    std::optional<std::uint64_t> c;
    if (!cols_supply.empty()) {
      c = cols_supply.front();
      pop_value(cols_supply, *c);
    } else {
      c = next_fresh_col();
    }
    if (!c) throw CompletionImpossible("no free column for row " + std::to_string(r));
    place(r, *c);
    pop_value(rows_demand, r);
    pop_value(rows_supply, r);
  }
  for (std::uint64_t c : std::vector<std::uint64_t>(cols_demand)) {
    std::optional<std::uint64_t> r;
    if (!rows_supply.empty()) {
      r = rows_supply.front();
      pop_value(rows_supply, *r);
    } else {
      r = next_fresh_row();
    }
    if (!r) throw CompletionImpossible("no free row for column " + std::to_string(c));
    place(*r, c);
    pop_value(cols_demand, c);
    pop_value(cols_supply, c);
  }

  // infinite remainder: a shifted diagonal serves rows and columns at once
  if (rows_g1_beyond || cols_g1_beyond) {
    if ((rows_g1_beyond && f.ncols != 0) || (cols_g1_beyond && f.nrows != 0))
      throw CompletionImpossible("a finite side cannot serve infinitely many G1 sets");
    out.tail = Weight::TailRule::MatrixDiagonal;
    out.tail_from = fresh_row;
    out.diag_shift = static_cast<std::int64_t>(fresh_col) - static_cast<std::int64_t>(fresh_row);
  }
  return out;
}

Weight complete_blocks(const Weight& partial, const SetFamily& f, std::uint64_t n) {
  validate_partial(partial, f, n, std::max<std::uint64_t>(n, 64) + 64);
  Weight out = partial;
  if (f.g1_mode == SetFamily::G1Mode::None) return out;
  if (f.g1_mode != SetFamily::G1Mode::All)
    throw CompletionImpossible("unsupported G1 designation for block families");

  std::uint64_t touched = 0;
  std::map<std::uint64_t, bool> has;
  for (const auto& [v, val] : partial.values) {
    if (val.sign() == 0) continue;
    auto colon = v.find(':');
    std::uint64_t k = std::stoull(v.substr(1, colon - 1));
    has[k] = true;
    touched = std::max(touched, k);
  }
  std::uint64_t explicit_upto = std::max<std::uint64_t>(touched, n);
  for (std::uint64_t k = n; k < explicit_upto; ++k)
    if (!has.count(k + 1)) out.set(block_id(k + 1, 1), Scalar(1));
  out.tail = Weight::TailRule::BlockFirst;
  out.tail_from = explicit_upto + 1;
  return out;
}

}  // namespace

Weight complete_pattern(const Weight& partial, const SetFamily& f, std::uint64_t n,
                        std::uint64_t depth) {
  (void)depth;
  switch (f.gen) {
    case SetFamily::Gen::Explicit:
      return complete_explicit(partial, f, n);
    case SetFamily::Gen::Matrix:
      if (f.finite()) {
        // finite matrices go through the generic explicit path
        SetFamily fin = f.truncated(f.set_count(), 0);
        return complete_explicit(partial, fin, n);
      }
      return complete_matrix(partial, f, n);
    case SetFamily::Gen::Blocks:
      return complete_blocks(partial, f, n);
    case SetFamily::Gen::RepeatSubset:
      if (f.g1_mode == SetFamily::G1Mode::None) return partial;
      throw CompletionImpossible("unsupported family");
  }
  throw std::logic_error("unreachable");
}

// ---------------------------------------------------------------------------
// RuleWeight

Scalar RuleWeight::value(const SetFamily& f, const VertexId& v) const {
  switch (kind) {
    case Kind::Explicit:
      return w.at(v);
    case Kind::TridiagonalHalf: {
      auto [i, j] = parse_cell(v);
      if (f.nrows && i > f.nrows) return Scalar(0);
      if (f.ncols && j > f.ncols) return Scalar(0);
      if ((i == 1 && j == 1) || j == i + 1 || i == j + 1) return Scalar::ratio(1, 2);
      return Scalar(0);
    }
    case Kind::BlockUniform: {
      auto colon = v.find(':');
      std::uint64_t k = std::stoull(v.substr(1, colon - 1));
      return Scalar(Rational(1, static_cast<unsigned long>(k)));
    }
  }
  return Scalar(0);
}

std::vector<VertexId> RuleWeight::support_in_set(const SetFamily& f, std::uint64_t k,
                                                 std::uint64_t horizon) const {
  std::vector<VertexId> out;
  switch (kind) {
    case Kind::Explicit: {
      for (const auto& [v, val] : w.values)
        if (val.sign() != 0 && f.set_contains(k, v)) out.push_back(v);
      if (out.size() > horizon) out.resize(horizon);
      return out;
    }
    case Kind::TridiagonalHalf: {
      auto probe = [&](std::uint64_t i, std::uint64_t j) {
        if (i < 1 || j < 1) return;
        VertexId v = cell_id(i, j);
        if (f.set_contains(k, v) && value(f, v).sign() != 0) out.push_back(v);
      };
      // identify the set (row or column) by probing the first members;
      // the support cells of either are local to the diagonal
      auto members = f.set_members(k, 3);
      if (members.empty()) return out;
      auto [i0, j0] = parse_cell(members[0]);
      if (members.size() > 1) {
        auto [i1, j1] = parse_cell(members[1]);
        if (i0 == i1) {  // row i0
          probe(i0, i0 - 1);
          probe(i0, i0);
          probe(i0, i0 + 1);
        } else {  // column j0
          probe(j0 - 1, j0);
          probe(j0, j0);
          probe(j0 + 1, j0);
        }
      } else {
        probe(i0, j0);
      }
      return out;
    }
    case Kind::BlockUniform: {
      for (std::uint64_t i = 1; i <= k + 1 && i <= horizon; ++i) out.push_back(block_id(k + 1, i));
      return out;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Family weight decomposition via the bipartite matrix embedding

std::vector<ConvexTerm> decompose_family_weight(const Weight& w, const SetFamily& f,
                                                std::uint64_t depth) {
  if (w.tail != Weight::TailRule::None)
    throw PreconditionFailed("finite-support weights only");
  auto g1r = check_g1(f, depth);
  if (!g1r.ok) throw PreconditionFailed("(g1) fails at " + *g1r.violator);
  auto g2r = check_g2(f, depth);
  if (!g2r.ok) throw NotApplicable("(g2) fails: odd admissible cycle present");

  IncidenceGraph g = build_graph(f, depth);
  const std::size_t nsets = g.set_members.size();

  // side of each set; rows from G+, columns from G-
  std::vector<int> row_of_set(nsets, -1), col_of_set(nsets, -1);
  std::size_t R = 0, C = 0;
  for (std::size_t k = 0; k < nsets; ++k) {
    if (g2r.side[k] == 0) row_of_set[k] = static_cast<int>(R++);
    else col_of_set[k] = static_cast<int>(C++);
  }
  std::map<VertexId, std::pair<int, int>> cell_of;
  for (const auto& [v, val] : w.values) {
    if (val.sign() == 0) continue;
    auto it = g.index.find(v);
    if (it == g.index.end())
      throw PreconditionFailed("support vertex " + v + " missing from the family");
    const auto& ks = g.vertex_sets[it->second];
    int row = -1, col = -1;
    for (int k : ks) {
      if (row_of_set[k] >= 0) row = row_of_set[k];
      if (col_of_set[k] >= 0) col = col_of_set[k];
    }
    if (row < 0) row = static_cast<int>(R++);  // private row
    if (col < 0) col = static_cast<int>(C++);  // private column
    cell_of[v] = {row, col};
  }

  DenseMatrix W(R, C);
  std::map<std::pair<int, int>, VertexId> vertex_of;
  for (const auto& [v, rc] : cell_of) {
    W.at(rc.first, rc.second) = w.at(v);
    vertex_of[rc] = v;
  }

  // doubly stochastic embedding [[W, diag(1-r)], [diag(1-c), W^T]]
  const std::size_t N = R + C;
  DenseMatrix E(N, N);
  for (std::size_t i = 0; i < R; ++i)
    for (std::size_t j = 0; j < C; ++j) {
      E.at(i, j) = W.at(i, j);
      E.at(R + j, C + i) = W.at(i, j);
    }
  for (std::size_t i = 0; i < R; ++i) E.at(i, C + i) = Scalar(1) - W.row_sum(i);
  for (std::size_t j = 0; j < C; ++j) E.at(R + j, j) = Scalar(1) - W.col_sum(j);

  auto dec = decompose_finite(E, Scalar(1e-10));

  std::map<std::vector<VertexId>, std::size_t> seen;
  std::vector<ConvexTerm> terms;
  for (const auto& t : dec.terms) {
    std::vector<VertexId> support;
    for (std::size_t i = 0; i < R; ++i) {
      int j = t.cols[i];
      if (j < 0 || j >= static_cast<int>(C)) continue;  // slack
      auto it = vertex_of.find({static_cast<int>(i), j});
      if (it == vertex_of.end())
        throw std::logic_error("permutation left the support of the embedding");
      support.push_back(it->second);
    }
    std::sort(support.begin(), support.end());
    auto it = seen.find(support);
    if (it != seen.end()) {
      terms[it->second].alpha += t.alpha;
      continue;
    }
    ConvexTerm ct;
    ct.alpha = t.alpha;
    for (const VertexId& v : support) ct.pattern.set(v, Scalar(1));
    seen[support] = terms.size();
    terms.push_back(std::move(ct));
  }
  return terms;
}

// ---------------------------------------------------------------------------
// approximate_decompose

Scalar ConvexDecomposition::coefficient_sum() const {
  Scalar s(0);
  for (const auto& t : terms) s += t.alpha;
  return s;
}

Scalar residual_seminorm(const RuleWeight& w, const SetFamily& f,
                         const ConvexDecomposition& dec, std::uint64_t k) {
  std::map<VertexId, Scalar> diff;
  for (const VertexId& v : w.support_in_set(f, k)) diff[v] = w.value(f, v);
  for (const auto& t : dec.terms) {
    for (const auto& [v, val] : t.pattern.values)
      if (val.sign() != 0 && f.set_contains(k, v)) diff[v] -= t.alpha;
    if (auto rc = t.pattern.rule_cell_in_set(f, k)) diff[*rc] -= t.alpha;
  }
  Scalar s(0);
  for (const auto& [v, d] : diff) s += d.abs();
  return s;
}

ConvexDecomposition approximate_decompose(const RuleWeight& w, const SetFamily& f,
                                          std::uint64_t K, const Scalar& eps,
                                          const ApproxOptions& opt) {
  if (K == 0) throw std::invalid_argument("K must be >= 1");
  const std::uint64_t base_sets = std::max<std::uint64_t>(K + 2, 6);

  std::vector<Scalar> last_profile;
  for (std::uint64_t attempt = 0;; ++attempt) {
    const std::uint64_t nsets =
        f.finite() ? f.set_count() : std::min<std::uint64_t>(base_sets << attempt, opt.max_sets);
    const std::uint64_t per_set =
        std::min<std::uint64_t>(opt.max_per_set, (nsets + 8) << attempt);
    const std::uint64_t m = per_set;
    const bool at_cap = (f.finite() || nsets >= opt.max_sets) && per_set >= opt.max_per_set;
    auto give_up = [&](const char* what) {
      std::ostringstream os;
      os << what;
      for (const auto& p : last_profile) os << " " << p.str();
      throw BudgetExceeded(os.str());
    };

    // truncation to the leading sets with far-tail mass consolidation
    Weight wnm;
    bool consolidation_ok = true;
    for (std::uint64_t k = 0; k < nsets && consolidation_ok; ++k) {
      auto support = w.support_in_set(f, k, 1u << 20);
      if (support.size() <= m) {
        for (const auto& v : support) wnm.set(v, w.value(f, v));
        continue;
      }
      // v_n: entries whose other set lies beyond the truncation carry that
      // set's in-range mass (consolidating onto them must not overflow it)
      auto vn_of = [&](const VertexId& v) -> Scalar {
        for (std::uint64_t l : f.sets_of_vertex(v)) {
          if (l == k || l < nsets) continue;
          Scalar s(0);
          for (const VertexId& g : w.support_in_set(f, l, 1u << 20)) {
            for (std::uint64_t e : f.sets_of_vertex(g))
              if (e != l && e < nsets) { s += w.value(f, g); break; }
          }
          return s;
        }
        return w.value(f, v);
      };
      std::vector<Scalar> vals, vn;
      for (const auto& v : support) {
        vals.push_back(w.value(f, v));
        vn.push_back(vn_of(v));
      }
      std::vector<Scalar> suffix(support.size() + 1, Scalar(0));
      for (std::size_t j = support.size(); j > 0; --j)
        suffix[j - 1] = suffix[j] + vals[j - 1];
      std::optional<std::size_t> jk;
      for (std::size_t j = 0; j < support.size(); ++j) {
        if (vn[j] + suffix[j + 1] > Scalar(1)) continue;
        bool clean = true;
        for (std::size_t i = j; i < support.size() && clean; ++i)
          for (std::uint64_t l : f.sets_of_vertex(support[i]))
            if (l != k && l < nsets) { clean = false; break; }
        if (!clean) continue;
        jk = j;
        break;
      }
      if (!jk || *jk >= m) { consolidation_ok = false; break; }
      for (std::size_t j = 0; j < support.size() && j < m; ++j) {
        if (j == *jk)
          wnm.set(support[j], vals[j] + suffix[m]);
        else
          wnm.set(support[j], vals[j]);
      }
    }
    if (!consolidation_ok) {
      if (at_cap) give_up("consolidation impossible within the caps; profile:");
      continue;
    }

    SetFamily trunc = f.truncated(nsets, per_set);
    auto sv = validate_stochastic(wnm, trunc, Scalar(1e-10), nsets);
    if (!sv.ok) throw PreconditionFailed("input weight is not G1-stochastic at depth");

    auto terms = decompose_family_weight(wnm, trunc, per_set);

    ConvexDecomposition out;
    out.sets_used = nsets;
    out.per_set_used = per_set;
    for (auto& t : terms) {
      ConvexTerm ct;
      ct.alpha = t.alpha;
      ct.pattern = complete_pattern(t.pattern, f, nsets);
      out.terms.push_back(std::move(ct));
    }

    bool good = true;
    out.residual_pk.clear();
    for (std::uint64_t k = 0; k < K; ++k) {
      Scalar r = residual_seminorm(w, f, out, k);
      out.residual_pk.push_back(r);
      if (!(r < eps)) good = false;
    }
    last_profile = out.residual_pk;
    if (good) return out;
    if (at_cap) give_up("seminorm target not reached; achieved profile:");
  }
}

}  // namespace majorize
