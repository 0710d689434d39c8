#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "majorize/scalar.hpp"

namespace majorize {

using VertexId = std::string;

/// Cell naming for matrix families: row i, column j (1-based).
VertexId cell_id(std::uint64_t i, std::uint64_t j);
std::pair<std::uint64_t, std::uint64_t> parse_cell(const VertexId& id);
/// Element naming for block families: block k, slot i (1-based).
VertexId block_id(std::uint64_t k, std::uint64_t i);

/// A family of countable sets G = {G_1, G_2, ...}.  Finite families are
/// explicit; infinite ones come from one of the closed generator rules
/// below, truncatable to any depth.
struct SetFamily {
  enum class Gen {
    Explicit,      // finitely many explicit sets
    Matrix,        // rows and columns of an (nrows x ncols) matrix; 0 = infinite
    Blocks,        // mutually disjoint blocks, |G_k| = k (k = 1, 2, ...)
    RepeatSubset,  // one infinite set, pairs inside it, and fresh singletons
  };
  enum class G1Mode { None, All, Rows, Cols, Explicit };

  Gen gen = Gen::Explicit;
  std::uint64_t nrows = 0, ncols = 0;
  std::vector<std::vector<VertexId>> explicit_sets;
  G1Mode g1_mode = G1Mode::None;
  std::vector<std::uint64_t> g1_indices;  // for G1Mode::Explicit

  static SetFamily explicit_family(std::vector<std::vector<VertexId>> sets,
                                   std::vector<std::uint64_t> g1 = {});
  static SetFamily matrix(std::uint64_t nrows, std::uint64_t ncols,
                          G1Mode g1 = G1Mode::All);
  static SetFamily blocks(G1Mode g1 = G1Mode::None);
  static SetFamily repeat_subset();

  bool finite() const;
  /// Number of sets for finite families; throws for infinite ones.
  std::uint64_t set_count() const;

  /// Set enumeration order (fixed, documented):
  ///   Matrix finite: R_1..R_nr, C_1..C_nc.
  ///   Matrix with infinite rows and columns: R_1, C_1, R_2, C_2, ...
  ///   Matrix with one infinite side: finite sets first, then the rest.
  ///   Blocks / RepeatSubset: natural order G_1, G_2, ...
  /// Members of set k, at most `per_set` of them for infinite sets.
  std::vector<VertexId> set_members(std::uint64_t k, std::uint64_t per_set) const;
  bool set_is_infinite(std::uint64_t k) const;
  bool in_g1(std::uint64_t k) const;

  /// Explicit finite family with the first `nsets` sets, each cut to
  /// `per_set` members.
  SetFamily truncated(std::uint64_t nsets, std::uint64_t per_set) const;

  /// Exact membership of a vertex in set k (id-based for generators).
  bool set_contains(std::uint64_t k, const VertexId& v) const;

  /// Indices of the sets containing v (at most two under (g1)).
  std::vector<std::uint64_t> sets_of_vertex(const VertexId& v) const;
};

/// Interned finite incidence structure: vertices indexed densely, with
/// vertex->sets and set->vertices maps.  Two vertices are adjacent iff
/// they share a set (each G_k spans a complete subgraph).
struct IncidenceGraph {
  std::vector<VertexId> names;
  std::map<VertexId, int> index;
  std::vector<std::vector<int>> vertex_sets;
  std::vector<std::vector<int>> set_members;

  int require(const VertexId& v) const;
  std::vector<int> neighbors(int v) const;
};

/// Builds the incidence graph of a finite (or truncated) family.
/// Throws MalformedFamily on a duplicate vertex inside one set.
IncidenceGraph build_graph(const SetFamily& f, std::uint64_t depth = 64);

// ---------------------------------------------------------------------------
// Weights

/// Nonnegative function on vertices: finite explicit support plus an
/// optional rule tail (used by pattern completions on infinite families).
struct Weight {
  /// MatrixDiagonal: value 1 at the cells (t, t + diag_shift) for every
  /// t >= tail_from.  BlockFirst: value 1 at the first slot of every block
  /// k >= tail_from (1-based block numbers).
  enum class TailRule { None, MatrixDiagonal, BlockFirst };

  std::map<VertexId, Scalar> values;
  TailRule tail = TailRule::None;
  std::uint64_t tail_from = 0;
  std::int64_t diag_shift = 0;

  Scalar at(const VertexId& v) const;
  void set(const VertexId& v, const Scalar& s);
  bool exact() const;  // all stored values exact

  /// Sum of |w| over the members of set k (rule tail included).
  Scalar set_abs_sum(const SetFamily& f, std::uint64_t k, std::uint64_t per_set) const;
  Scalar set_sum(const SetFamily& f, std::uint64_t k, std::uint64_t per_set) const;
  /// The rule-tail cell inside set k, if any.
  std::optional<VertexId> rule_cell_in_set(const SetFamily& f, std::uint64_t k) const;
};

// ---------------------------------------------------------------------------
// Structure checks

struct G1Result {
  bool ok = true;
  std::optional<VertexId> violator;
};
G1Result check_g1(const SetFamily& f, std::uint64_t depth = 64);

struct G2Result {
  bool ok = false;
  std::vector<int> side;              // per set (truncated order): 0 = G+, 1 = G-
  std::vector<VertexId> odd_cycle;    // odd admissible cycle on failure
};
G2Result check_g2(const SetFamily& f, std::uint64_t depth = 64);

struct G3Result {
  bool ok = false;
  std::vector<std::uint64_t> order;   // set enumeration achieving (g3)
  std::string reason;                 // failure explanation
  std::uint64_t depth = 0;
};
G3Result check_g3(const SetFamily& f, std::uint64_t depth = 64);

/// Shortest path between two vertices; shortest paths never keep three
/// consecutive vertices in one set, hence are admissible.
std::optional<std::vector<VertexId>> admissible_path(const IncidenceGraph& g,
                                                     const VertexId& u, const VertexId& v);

/// An admissible cycle within the support of w (all of g when w is null).
std::optional<std::vector<VertexId>> find_admissible_cycle(const IncidenceGraph& g,
                                                           const SetFamily& f,
                                                           const Weight* w = nullptr);

struct StochasticVerdict {
  bool ok = false;
  std::uint64_t depth = 0;
  struct Offender {
    std::uint64_t set = 0;
    Scalar sum;
    bool equality_violation = false;  // G1 set missing sum == 1
  };
  std::vector<Offender> offenders;
};

/// Per-set sums <= 1 (== 1 on G1 sets) within tol; exact when the weight
/// carries only exact values.
StochasticVerdict validate_stochastic(const Weight& w, const SetFamily& f,
                                      const Scalar& tol = Scalar(1e-10),
                                      std::uint64_t depth = 64);

bool is_pattern(const Weight& w, const SetFamily& f, const Scalar& tol = Scalar(1e-10),
                std::uint64_t depth = 64);

/// p_k(w) = l1 norm of w restricted to G_k (exact: the support is finite).
Scalar seminorm_pk(const Weight& w, const SetFamily& f, std::uint64_t k);

struct NormSResult {
  Scalar value;
  bool exact = false;  // family finite: the sup ranges over all sets
};
NormSResult norm_s(const Weight& w, const SetFamily& f, std::uint64_t depth = 64);

// ---------------------------------------------------------------------------
// Extreme split (the three constructions)

struct SplitResult {
  enum class Outcome { PatternCertificate, Split, NotApplicable };
  enum class Method { None, DuplicateIntersection, AlternatingCycle, TreeRecursion };

  Outcome outcome = Outcome::PatternCertificate;
  Method method = Method::None;
  Weight w_plus, w_minus;
  std::vector<VertexId> odd_cycle;  // NotApplicable witness
};

/// Decides extremality of w in S^{G1} constructively: a pattern certificate,
/// or a strict split w = (w+ + w-)/2 with both halves stochastic.  Requires
/// (g1); when (g2) fails the verdict is NotApplicable with the odd-cycle
/// witness.  Finite-support weights only.
SplitResult extreme_split(const Weight& w, const SetFamily& f,
                          const Scalar& tol = Scalar(1e-10), std::uint64_t depth = 64);

/// Rows-and-columns family of an nrows x ncols matrix (Example adapter).
SetFamily matrix_to_family(std::uint64_t nrows, std::uint64_t ncols,
                           SetFamily::G1Mode g1 = SetFamily::G1Mode::All);

}  // namespace majorize
