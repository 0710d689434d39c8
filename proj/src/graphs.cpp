#include "majorize/graphs.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "majorize/errors.hpp"

namespace majorize {

// ---------------------------------------------------------------------------
// Vertex naming

VertexId cell_id(std::uint64_t i, std::uint64_t j) {
  return std::to_string(i) + ":" + std::to_string(j);
}

std::pair<std::uint64_t, std::uint64_t> parse_cell(const VertexId& id) {
  auto colon = id.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("not a cell id: " + id);
  return {std::stoull(id.substr(0, colon)), std::stoull(id.substr(colon + 1))};
}

VertexId block_id(std::uint64_t k, std::uint64_t i) {
  return "b" + std::to_string(k) + ":" + std::to_string(i);
}

static std::pair<std::uint64_t, std::uint64_t> parse_block(const VertexId& id) {
  auto colon = id.find(':');
  if (id.empty() || id[0] != 'b' || colon == std::string::npos)
    throw std::invalid_argument("not a block id: " + id);
  return {std::stoull(id.substr(1, colon - 1)), std::stoull(id.substr(colon + 1))};
}

// ---------------------------------------------------------------------------
// SetFamily

SetFamily SetFamily::explicit_family(std::vector<std::vector<VertexId>> sets,
                                     std::vector<std::uint64_t> g1) {
  SetFamily f;
  f.gen = Gen::Explicit;
  f.explicit_sets = std::move(sets);
  f.g1_mode = G1Mode::Explicit;
  f.g1_indices = std::move(g1);
  for (std::uint64_t k : f.g1_indices)
    if (k >= f.explicit_sets.size()) throw MalformedFamily("G1 index out of range");
  return f;
}

SetFamily SetFamily::matrix(std::uint64_t nrows, std::uint64_t ncols, G1Mode g1) {
  SetFamily f;
  f.gen = Gen::Matrix;
  f.nrows = nrows;
  f.ncols = ncols;
  f.g1_mode = g1;
  return f;
}

SetFamily SetFamily::blocks(G1Mode g1) {
  SetFamily f;
  f.gen = Gen::Blocks;
  f.g1_mode = g1;
  return f;
}

SetFamily SetFamily::repeat_subset() {
  SetFamily f;
  f.gen = Gen::RepeatSubset;
  f.g1_mode = G1Mode::None;
  return f;
}

bool SetFamily::finite() const {
  switch (gen) {
    case Gen::Explicit: return true;
    case Gen::Matrix: return nrows > 0 && ncols > 0;
    default: return false;
  }
}

std::uint64_t SetFamily::set_count() const {
  if (gen == Gen::Explicit) return explicit_sets.size();
  if (gen == Gen::Matrix && finite()) return nrows + ncols;
  throw std::domain_error("set_count on an infinite family");
}

namespace {

// Matrix set layout: is set k a row, and which one (1-based)?
struct MatrixSet {
  bool is_row = true;
  std::uint64_t index = 0;  // 1-based row/column number
};

MatrixSet matrix_set_of(const SetFamily& f, std::uint64_t k) {
  MatrixSet s;
  if (f.nrows > 0 && f.ncols > 0) {
    if (k < f.nrows) { s.is_row = true; s.index = k + 1; }
    else { s.is_row = false; s.index = k - f.nrows + 1; }
  } else if (f.nrows == 0 && f.ncols == 0) {
    s.is_row = (k % 2 == 0);
    s.index = k / 2 + 1;
  } else if (f.nrows > 0) {  // finitely many rows, infinitely many columns
    if (k < f.nrows) { s.is_row = true; s.index = k + 1; }
    else { s.is_row = false; s.index = k - f.nrows + 1; }
  } else {  // finitely many columns
    if (k < f.ncols) { s.is_row = false; s.index = k + 1; }
    else { s.is_row = true; s.index = k - f.ncols + 1; }
  }
  return s;
}

}  // namespace

bool SetFamily::set_is_infinite(std::uint64_t k) const {
  switch (gen) {
    case Gen::Explicit: return false;
    case Gen::Matrix: {
      MatrixSet s = matrix_set_of(*this, k);
      return s.is_row ? ncols == 0 : nrows == 0;
    }
    case Gen::Blocks: return false;
    case Gen::RepeatSubset: return k == 0;
  }
  return false;
}

std::vector<VertexId> SetFamily::set_members(std::uint64_t k, std::uint64_t per_set) const {
  std::vector<VertexId> out;
  switch (gen) {
    case Gen::Explicit:
      if (k >= explicit_sets.size()) throw std::out_of_range("set index");
      return explicit_sets[k];
    case Gen::Matrix: {
      MatrixSet s = matrix_set_of(*this, k);
      std::uint64_t span = s.is_row ? ncols : nrows;
      if (span == 0) span = per_set;
      for (std::uint64_t t = 1; t <= span; ++t)
        out.push_back(s.is_row ? cell_id(s.index, t) : cell_id(t, s.index));
      return out;
    }
    case Gen::Blocks: {
      for (std::uint64_t i = 1; i <= k + 1; ++i) out.push_back(block_id(k + 1, i));
      return out;
    }
    case Gen::RepeatSubset: {
      if (k == 0) {
        for (std::uint64_t i = 1; i <= per_set; ++i) out.push_back("a" + std::to_string(i));
      } else if (k % 2 == 1) {
        std::uint64_t j = (k + 1) / 2;
        out.push_back("a" + std::to_string(2 * j));
        out.push_back("a" + std::to_string(2 * j + 1));
      } else {
        out.push_back("c" + std::to_string(k / 2));
      }
      return out;
    }
  }
  return out;
}

bool SetFamily::in_g1(std::uint64_t k) const {
  switch (g1_mode) {
    case G1Mode::None: return false;
    case G1Mode::All: return true;
    case G1Mode::Rows:
      return gen == Gen::Matrix && matrix_set_of(*this, k).is_row;
    case G1Mode::Cols:
      return gen == Gen::Matrix && !matrix_set_of(*this, k).is_row;
    case G1Mode::Explicit:
      return std::find(g1_indices.begin(), g1_indices.end(), k) != g1_indices.end();
  }
  return false;
}

SetFamily SetFamily::truncated(std::uint64_t nsets, std::uint64_t per_set) const {
  if (gen == Gen::Explicit) return *this;
  if (finite()) nsets = std::min<std::uint64_t>(nsets, set_count());
  std::vector<std::vector<VertexId>> sets;
  std::vector<std::uint64_t> g1;
  for (std::uint64_t k = 0; k < nsets; ++k) {
    sets.push_back(set_members(k, per_set));
    if (in_g1(k)) g1.push_back(k);
  }
  return explicit_family(std::move(sets), std::move(g1));
}

// ---------------------------------------------------------------------------
// IncidenceGraph

int IncidenceGraph::require(const VertexId& v) const {
  auto it = index.find(v);
  if (it == index.end()) throw std::invalid_argument("unknown vertex: " + v);
  return it->second;
}

std::vector<int> IncidenceGraph::neighbors(int v) const {
  std::set<int> out;
  for (int s : vertex_sets[v])
    for (int u : set_members[s])
      if (u != v) out.insert(u);
  return {out.begin(), out.end()};
}

IncidenceGraph build_graph(const SetFamily& f, std::uint64_t depth) {
  SetFamily fin = f.gen == SetFamily::Gen::Explicit
                      ? f
                      : f.truncated(f.finite() ? f.set_count() : depth, depth);
  IncidenceGraph g;
  g.set_members.resize(fin.explicit_sets.size());
  for (std::size_t k = 0; k < fin.explicit_sets.size(); ++k) {
    std::set<VertexId> seen;
    for (const VertexId& v : fin.explicit_sets[k]) {
      if (!seen.insert(v).second)
        throw MalformedFamily("duplicate vertex '" + v + "' inside set " + std::to_string(k));
      auto it = g.index.find(v);
      int idx;
      if (it == g.index.end()) {
        idx = static_cast<int>(g.names.size());
        g.index.emplace(v, idx);
        g.names.push_back(v);
        g.vertex_sets.emplace_back();
      } else {
        idx = it->second;
      }
      g.vertex_sets[idx].push_back(static_cast<int>(k));
      g.set_members[k].push_back(idx);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Weight

Scalar Weight::at(const VertexId& v) const {
  auto it = values.find(v);
  if (it != values.end()) return it->second;
  if (tail == TailRule::MatrixDiagonal) {
    auto [i, j] = parse_cell(v);
    if (i >= tail_from && static_cast<std::int64_t>(j) ==
                              static_cast<std::int64_t>(i) + diag_shift)
      return Scalar(1);
  } else if (tail == TailRule::BlockFirst) {
    auto [k, i] = parse_block(v);
    if (i == 1 && k >= tail_from) return Scalar(1);
  }
  return Scalar(0);
}

void Weight::set(const VertexId& v, const Scalar& s) {
  if (s.sign() == 0) values.erase(v);
  else values[v] = s;
}

bool Weight::exact() const {
  for (const auto& [v, s] : values)
    if (!s.is_exact()) return false;
  return true;
}

bool SetFamily::set_contains(std::uint64_t k, const VertexId& v) const {
  switch (gen) {
    case Gen::Explicit: {
      const auto& s = explicit_sets.at(k);
      return std::find(s.begin(), s.end(), v) != s.end();
    }
    case Gen::Matrix: {
      auto [i, j] = parse_cell(v);
      MatrixSet s = matrix_set_of(*this, k);
      if (s.is_row) return i == s.index && (ncols == 0 || j <= ncols);
      return j == s.index && (nrows == 0 || i <= nrows);
    }
    case Gen::Blocks: {
      auto [bk, bi] = parse_block(v);
      return bk == k + 1 && bi <= k + 1;
    }
    case Gen::RepeatSubset: {
      auto members = set_members(k, 0);
      if (k == 0) return !v.empty() && v[0] == 'a';
      return std::find(members.begin(), members.end(), v) != members.end();
    }
  }
  return false;
}

std::vector<std::uint64_t> SetFamily::sets_of_vertex(const VertexId& v) const {
  std::vector<std::uint64_t> out;
  switch (gen) {
    case Gen::Explicit:
      for (std::uint64_t k = 0; k < explicit_sets.size(); ++k)
        if (set_contains(k, v)) out.push_back(k);
      return out;
    case Gen::Matrix: {
      auto [i, j] = parse_cell(v);
      if ((nrows && i > nrows) || (ncols && j > ncols)) return out;
      // row i
      if (nrows > 0) out.push_back(i - 1);
      else if (ncols == 0) out.push_back(2 * (i - 1));
      else out.push_back(ncols + i - 1);
      // column j
      if (nrows > 0 && ncols > 0) out.push_back(nrows + j - 1);
      else if (nrows == 0 && ncols == 0) out.push_back(2 * (j - 1) + 1);
      else if (nrows > 0) out.push_back(nrows + j - 1);
      else out.push_back(j - 1);
      return out;
    }
    case Gen::Blocks: {
      auto colon = v.find(':');
      out.push_back(std::stoull(v.substr(1, colon - 1)) - 1);
      return out;
    }
    case Gen::RepeatSubset: {
      if (v[0] == 'c') {
        out.push_back(2 * std::stoull(v.substr(1)));
        return out;
      }
      std::uint64_t i = std::stoull(v.substr(1));
      out.push_back(0);
      if (i >= 2) out.push_back(i % 2 == 0 ? i - 1 : i - 2);
      return out;
    }
  }
  return out;
}

std::optional<VertexId> Weight::rule_cell_in_set(const SetFamily& f, std::uint64_t k) const {
  if (tail == TailRule::None) return std::nullopt;
  if (tail == TailRule::MatrixDiagonal) {
    if (f.gen != SetFamily::Gen::Matrix) return std::nullopt;
    MatrixSet s = matrix_set_of(f, k);
    if (s.is_row) {
      if (s.index < tail_from) return std::nullopt;
      std::int64_t j = static_cast<std::int64_t>(s.index) + diag_shift;
      if (j < 1) return std::nullopt;
      return cell_id(s.index, static_cast<std::uint64_t>(j));
    }
    std::int64_t t = static_cast<std::int64_t>(s.index) - diag_shift;
    if (t < 1 || static_cast<std::uint64_t>(t) < tail_from) return std::nullopt;
    return cell_id(static_cast<std::uint64_t>(t), s.index);
  }
  if (f.gen != SetFamily::Gen::Blocks) return std::nullopt;
  if (k + 1 < tail_from) return std::nullopt;
  return block_id(k + 1, 1);
}

namespace {

// Tail-rule contribution to the sum over set k.
Scalar tail_sum(const Weight& w, const SetFamily& f, std::uint64_t k) {
  return w.rule_cell_in_set(f, k) ? Scalar(1) : Scalar(0);
}

}  // namespace

Scalar Weight::set_sum(const SetFamily& f, std::uint64_t k, std::uint64_t) const {
  Scalar s(0);
  for (const auto& [v, val] : values)
    if (f.set_contains(k, v)) s += val;
  return s + tail_sum(*this, f, k);
}

Scalar Weight::set_abs_sum(const SetFamily& f, std::uint64_t k, std::uint64_t) const {
  Scalar s(0);
  for (const auto& [v, val] : values)
    if (f.set_contains(k, v)) s += val.abs();
  return s + tail_sum(*this, f, k);
}

// ---------------------------------------------------------------------------
// (g1)

G1Result check_g1(const SetFamily& f, std::uint64_t depth) {
  G1Result res;
  if (f.gen != SetFamily::Gen::Explicit) return res;  // generators satisfy (g1) by shape
  std::map<VertexId, int> count;
  for (const auto& s : f.explicit_sets) {
    std::set<VertexId> seen;
    for (const VertexId& v : s) {
      if (!seen.insert(v).second) throw MalformedFamily("duplicate vertex in one set: " + v);
      if (++count[v] > 2) {
        res.ok = false;
        res.violator = v;
        return res;
      }
    }
  }
  (void)depth;
  return res;
}

// ---------------------------------------------------------------------------
// (g2)

namespace {

G2Result g2_explicit(const SetFamily& f) {
  G2Result res;
  const std::size_t n = f.explicit_sets.size();
  // meta-graph: sets sharing a vertex
  std::map<VertexId, std::vector<int>> owner;
  for (std::size_t k = 0; k < n; ++k)
    for (const VertexId& v : f.explicit_sets[k]) owner[v].push_back(static_cast<int>(k));
  std::vector<std::set<int>> adj(n);
  for (const auto& [v, ks] : owner)
    for (std::size_t a = 0; a < ks.size(); ++a)
      for (std::size_t b = a + 1; b < ks.size(); ++b) {
        adj[ks[a]].insert(ks[b]);
        adj[ks[b]].insert(ks[a]);
      }

  std::vector<int> color(n, -1), parent(n, -1);
  for (std::size_t root = 0; root < n; ++root) {
    if (color[root] >= 0) continue;
    color[root] = 0;  // single-set components default to G+
    std::deque<int> bfs{static_cast<int>(root)};
    while (!bfs.empty()) {
      int u = bfs.front();
      bfs.pop_front();
      for (int v : adj[u]) {
        if (color[v] < 0) {
          color[v] = 1 - color[u];
          parent[v] = u;
          bfs.push_back(v);
        } else if (color[v] == color[u]) {
          // odd set-cycle: paths to the least common ancestor
          std::set<int> anc;
          for (int t = u; t >= 0; t = parent[t]) anc.insert(t);
          int lca = v;
          while (!anc.count(lca)) { lca = parent[lca]; }
          std::vector<int> cyc;
          for (int t = u; t != lca; t = parent[t]) cyc.push_back(t);
          cyc.push_back(lca);
          std::vector<int> side;
          for (int t = v; t != lca; t = parent[t]) side.push_back(t);
          std::reverse(side.begin(), side.end());
          for (int t : side) cyc.push_back(t);
          // vertex cycle: shared vertices between consecutive sets
          std::vector<VertexId> vcyc;
          for (std::size_t i = 0; i < cyc.size(); ++i) {
            int a = cyc[i], b = cyc[(i + 1) % cyc.size()];
            for (const VertexId& w : f.explicit_sets[a]) {
              const auto& sb = f.explicit_sets[b];
              if (std::find(sb.begin(), sb.end(), w) != sb.end()) {
                vcyc.push_back(w);
                break;
              }
            }
          }
          // drop consecutive duplicates (closed)
          std::vector<VertexId> clean;
          for (const auto& w : vcyc)
            if (clean.empty() || clean.back() != w) clean.push_back(w);
          while (clean.size() > 1 && clean.front() == clean.back()) clean.pop_back();
          res.ok = false;
          res.odd_cycle = clean;
          return res;
        }
      }
    }
  }
  res.ok = true;
  res.side = color;
  return res;
}

}  // namespace

G2Result check_g2(const SetFamily& f, std::uint64_t depth) {
  G2Result res;
  switch (f.gen) {
    case SetFamily::Gen::Explicit:
      return g2_explicit(f);
    case SetFamily::Gen::Matrix: {
      res.ok = true;
      std::uint64_t n = f.finite() ? f.set_count() : depth;
      for (std::uint64_t k = 0; k < n; ++k)
        res.side.push_back(matrix_set_of(f, k).is_row ? 0 : 1);
      return res;
    }
    case SetFamily::Gen::Blocks:
      res.ok = true;
      res.side.assign(depth, 0);  // disjoint sets: all default to G+
      return res;
    case SetFamily::Gen::RepeatSubset: {
      res.ok = true;
      for (std::uint64_t k = 0; k < depth; ++k)
        res.side.push_back(k % 2 == 1 ? 1 : 0);  // pairs oppose the big set
      return res;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// (g3)

G3Result check_g3(const SetFamily& f, std::uint64_t depth) {
  G3Result res;
  res.depth = depth;
  switch (f.gen) {
    case SetFamily::Gen::Matrix:
    case SetFamily::Gen::Blocks: {
      res.ok = true;
      std::uint64_t n = f.finite() ? f.set_count() : depth;
      for (std::uint64_t k = 0; k < n; ++k) res.order.push_back(k);
      return res;
    }
    case SetFamily::Gen::RepeatSubset:
      res.ok = false;
      res.reason =
          "infinitely many sets lie inside the union of earlier ones while fresh "
          "vertices keep arriving; no enumeration satisfies the condition";
      return res;
    case SetFamily::Gen::Explicit: {
      const std::size_t n = f.explicit_sets.size();
      std::set<VertexId> covered;
      std::vector<bool> used(n, false);
      for (std::size_t step = 0; step < n; ++step) {
        int pick = -1;
        for (std::size_t k = 0; k < n; ++k) {
          if (used[k]) continue;
          for (const VertexId& v : f.explicit_sets[k])
            if (!covered.count(v)) { pick = static_cast<int>(k); break; }
          if (pick >= 0) break;
        }
        if (pick < 0) {
          // remaining sets add nothing: the union is already complete
          for (std::size_t k = 0; k < n; ++k)
            if (!used[k]) res.order.push_back(k);
          break;
        }
        used[pick] = true;
        res.order.push_back(pick);
        for (const VertexId& v : f.explicit_sets[pick]) covered.insert(v);
      }
      res.ok = true;
      return res;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Admissible paths and cycles

std::optional<std::vector<VertexId>> admissible_path(const IncidenceGraph& g,
                                                     const VertexId& u, const VertexId& v) {
  int s = g.require(u), t = g.require(v);
  if (s == t) return std::vector<VertexId>{u};
  std::vector<int> parent(g.names.size(), -2);
  parent[s] = -1;
  std::deque<int> bfs{s};
  while (!bfs.empty()) {
    int a = bfs.front();
    bfs.pop_front();
    for (int b : g.neighbors(a)) {
      if (parent[b] != -2) continue;
      parent[b] = a;
      if (b == t) {
        std::vector<VertexId> path;
        for (int c = t; c != -1; c = parent[c]) path.push_back(g.names[c]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      bfs.push_back(b);
    }
  }
  return std::nullopt;
}

namespace {

// Meta-multigraph over sets: every support vertex lying in exactly two sets
// is an edge.  Simple cycles of length >= 3 here are admissible cycles in G.
struct MetaGraph {
  struct Edge {
    int a = 0, b = 0;
    int vertex = 0;  // graph vertex index realizing the edge
  };
  std::vector<Edge> edges;
  std::vector<std::vector<int>> inc;  // set -> edge ids

  MetaGraph(const IncidenceGraph& g, const Weight* w, std::size_t nsets) {
    inc.resize(nsets);
    for (std::size_t v = 0; v < g.names.size(); ++v) {
      if (w && w->at(g.names[v]).sign() == 0) continue;
      if (g.vertex_sets[v].size() != 2) continue;
      Edge e;
      e.a = g.vertex_sets[v][0];
      e.b = g.vertex_sets[v][1];
      e.vertex = static_cast<int>(v);
      inc[e.a].push_back(static_cast<int>(edges.size()));
      inc[e.b].push_back(static_cast<int>(edges.size()));
      edges.push_back(e);
    }
  }

  // DFS cycle of length >= 3 (as a list of edge ids); parallel 2-cycles are
  // ignored here.
  std::optional<std::vector<int>> cycle() const {
    std::vector<int> state(inc.size(), 0), parent_edge(inc.size(), -1), parent(inc.size(), -1);
    std::vector<int> depth(inc.size(), 0);
    for (std::size_t root = 0; root < inc.size(); ++root) {
      if (state[root]) continue;
      std::vector<int> stack{static_cast<int>(root)};
      state[root] = 1;
      while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int eid : inc[u]) {
          const Edge& e = edges[eid];
          int v = e.a == u ? e.b : e.a;
          if (eid == parent_edge[u]) continue;
          if (state[v] == 0) {
            state[v] = 1;
            parent[v] = u;
            parent_edge[v] = eid;
            depth[v] = depth[u] + 1;
            stack.push_back(v);
          } else {
            // cycle via eid: walk both endpoints up to the common ancestor
            std::vector<int> pu, pv;
            int a = u, b = v;
            while (depth[a] > depth[b]) { pu.push_back(parent_edge[a]); a = parent[a]; }
            while (depth[b] > depth[a]) { pv.push_back(parent_edge[b]); b = parent[b]; }
            while (a != b) {
              pu.push_back(parent_edge[a]);
              a = parent[a];
              pv.push_back(parent_edge[b]);
              b = parent[b];
            }
            std::vector<int> cyc = pu;
            std::reverse(pv.begin(), pv.end());
            cyc.insert(cyc.end(), pv.begin(), pv.end());
            cyc.push_back(eid);
            if (cyc.size() >= 3) return cyc;
          }
        }
      }
    }
    return std::nullopt;
  }

  // Two support vertices sharing the same pair of sets (case (1) of the
  // split constructions).
  std::optional<std::pair<int, int>> duplicate_pair() const {
    std::map<std::pair<int, int>, int> seen;
    for (const Edge& e : edges) {
      auto key = std::minmax(e.a, e.b);
      auto it = seen.find(key);
      if (it != seen.end()) return std::make_pair(edges[it->second].vertex, e.vertex);
      seen[key] = static_cast<int>(&e - edges.data());
    }
    return std::nullopt;
  }
};

}  // namespace

std::optional<std::vector<VertexId>> find_admissible_cycle(const IncidenceGraph& g,
                                                           const SetFamily& f,
                                                           const Weight* w) {
  std::size_t nsets = g.set_members.size();
  (void)f;
  MetaGraph mg(g, w, nsets);
  auto cyc = mg.cycle();
  if (!cyc) return std::nullopt;
  std::vector<VertexId> out;
  for (int eid : *cyc) out.push_back(g.names[mg.edges[eid].vertex]);
  return out;
}

// ---------------------------------------------------------------------------
// Stochastic validation / patterns / seminorms

StochasticVerdict validate_stochastic(const Weight& w, const SetFamily& f,
                                      const Scalar& tol, std::uint64_t depth) {
  StochasticVerdict out;
  for (const auto& [v, val] : w.values)
    if (val.sign() < 0) throw PreconditionFailed("negative weight at " + v);
  Scalar eps = w.exact() ? Scalar(0) : tol;
  std::uint64_t n = f.finite() ? f.set_count() : depth;
  out.depth = n;
  out.ok = true;
  for (std::uint64_t k = 0; k < n; ++k) {
    Scalar s = w.set_sum(f, k, depth);
    if (s > Scalar(1) + eps) {
      out.ok = false;
      out.offenders.push_back({k, s, false});
    } else if (f.in_g1(k) && (s - Scalar(1)).abs() > eps) {
      out.ok = false;
      out.offenders.push_back({k, s, true});
    }
  }
  return out;
}

bool is_pattern(const Weight& w, const SetFamily& f, const Scalar& tol, std::uint64_t depth) {
  Scalar eps = w.exact() ? Scalar(0) : tol;
  for (const auto& [v, val] : w.values) {
    if (val.abs() <= eps) continue;
    if ((val - Scalar(1)).abs() > eps) return false;
  }
  std::uint64_t n = f.finite() ? f.set_count() : depth;
  for (std::uint64_t k = 0; k < n; ++k) {
    Scalar s = w.set_sum(f, k, depth);
    bool zero = s.abs() <= eps;
    bool one = (s - Scalar(1)).abs() <= eps;
    if (!zero && !one) return false;
    if (f.in_g1(k) && !one) return false;
  }
  if (!f.finite() && w.tail == Weight::TailRule::None) {
    // no rule to serve G1 sets beyond the checked range
    for (std::uint64_t k = n; k < n + 2; ++k)
      if (f.in_g1(k)) return false;
  }
  return true;
}

Scalar seminorm_pk(const Weight& w, const SetFamily& f, std::uint64_t k) {
  return w.set_abs_sum(f, k, 0);
}

NormSResult norm_s(const Weight& w, const SetFamily& f, std::uint64_t depth) {
  NormSResult res;
  res.value = Scalar(0);
  std::uint64_t n = f.finite() ? f.set_count() : depth;
  for (std::uint64_t k = 0; k < n; ++k) res.value = max(res.value, seminorm_pk(w, f, k));
  res.exact = f.finite();
  return res;
}

// ---------------------------------------------------------------------------
// extreme_split

SplitResult extreme_split(const Weight& w, const SetFamily& f, const Scalar& tol,
                          std::uint64_t depth) {
  if (w.tail != Weight::TailRule::None)
    throw PreconditionFailed("extreme_split needs a finite-support weight");
  auto g1 = check_g1(f, depth);
  if (!g1.ok) throw PreconditionFailed("(g1) fails at vertex " + *g1.violator);
  auto sv = validate_stochastic(w, f, tol, depth);
  if (!sv.ok) throw PreconditionFailed("weight is not G1-stochastic");

  SplitResult res;
  if (is_pattern(w, f, tol, depth)) {
    res.outcome = SplitResult::Outcome::PatternCertificate;
    return res;
  }

  auto g2 = check_g2(f, depth);
  if (!g2.ok) {
    res.outcome = SplitResult::Outcome::NotApplicable;
    res.odd_cycle = g2.odd_cycle;
    return res;
  }

  IncidenceGraph g = build_graph(f, depth);
  res.outcome = SplitResult::Outcome::Split;

  auto make_halves = [&](const std::map<VertexId, Scalar>& delta) {
    // additive shift: w+- = w +- delta
    res.w_plus = w;
    res.w_minus = w;
    for (const auto& [v, d] : delta) {
      res.w_plus.set(v, w.at(v) + d);
      res.w_minus.set(v, w.at(v) - d);
    }
  };

  // (1) two support vertices inside the same pair of sets
  MetaGraph mg(g, &w, g.set_members.size());
  if (auto dup = mg.duplicate_pair()) {
    Scalar w1 = w.at(g.names[dup->first]);
    Scalar w2 = w.at(g.names[dup->second]);
    Scalar eps = min(w1, w2) / Scalar(2);
    std::map<VertexId, Scalar> delta;
    delta[g.names[dup->first]] = -eps;
    delta[g.names[dup->second]] = eps;
    make_halves(delta);
    res.method = SplitResult::Method::DuplicateIntersection;
    return res;
  }

  // (2) alternating shift along an admissible cycle in the support
  if (auto cyc = find_admissible_cycle(g, f, &w)) {
    Scalar eps;
    bool first = true;
    for (const VertexId& v : *cyc) {
      Scalar wv = w.at(v);
      if (first || wv < eps) eps = wv;
      first = false;
    }
    eps /= Scalar(2);
    std::map<VertexId, Scalar> delta;
    int sgn = 1;
    for (const VertexId& v : *cyc) {
      delta[v] = Scalar(sgn) * eps;
      sgn = -sgn;
    }
    make_halves(delta);
    res.method = SplitResult::Method::AlternatingCycle;
    return res;
  }

  // (3) multiplicative tree recursion from a fractional root
  int root = -1;
  for (std::size_t v = 0; v < g.names.size(); ++v) {
    Scalar wv = w.at(g.names[v]);
    if (wv.sign() > 0 && wv < Scalar(1)) { root = static_cast<int>(v); break; }
  }
  if (root < 0) throw std::logic_error("no fractional vertex in a non-pattern weight");

  std::vector<int> layer(g.names.size(), -1);
  std::map<int, Scalar> epsv;
  std::map<int, int> sgnv;
  Scalar w0 = w.at(g.names[root]);
  epsv[root] = min(Scalar::ratio(1, 2), (Scalar(1) - w0) / (Scalar(2) * w0));
  sgnv[root] = 1;
  layer[root] = 0;
  std::deque<int> bfs{root};
  std::vector<bool> set_done(g.set_members.size(), false);
  while (!bfs.empty()) {
    int u = bfs.front();
    bfs.pop_front();
    Scalar wu = w.at(g.names[u]);
    Scalar eu = epsv[u];
    for (int s : g.vertex_sets[u]) {
      if (set_done[s]) continue;
      set_done[s] = true;
      Scalar child_eps = eu * wu / (Scalar(1) - wu);
      for (int v : g.set_members[s]) {
        if (v == u) continue;
        if (w.at(g.names[v]).sign() == 0) continue;
        if (layer[v] >= 0) throw std::logic_error("support is not a forest after cycle removal");
        layer[v] = layer[u] + 1;
        epsv[v] = child_eps;
        sgnv[v] = -sgnv[u];
        bfs.push_back(v);
      }
    }
  }

  res.w_plus = w;
  res.w_minus = w;
  for (const auto& [v, e] : epsv) {
    Scalar wv = w.at(g.names[v]);
    Scalar shift = Scalar(sgnv[v]) * e;
    res.w_plus.set(g.names[v], (Scalar(1) + shift) * wv);
    res.w_minus.set(g.names[v], (Scalar(1) - shift) * wv);
  }
  res.method = SplitResult::Method::TreeRecursion;
  return res;
}

SetFamily matrix_to_family(std::uint64_t nrows, std::uint64_t ncols, SetFamily::G1Mode g1) {
  return SetFamily::matrix(nrows, ncols, g1);
}

}  // namespace majorize
