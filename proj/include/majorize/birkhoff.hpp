#pragma once

#include <cstdint>
#include <vector>

#include "majorize/graphs.hpp"
#include "majorize/matrix.hpp"

namespace majorize {

// ---------------------------------------------------------------------------
// Finite Birkhoff-von Neumann decomposition

struct PermTerm {
  Scalar alpha;
  std::vector<int> cols;  // cols[i]: column of the 1 in row i; -1 for none
};

struct MatrixDecomposition {
  std::vector<PermTerm> terms;

  DenseMatrix reconstruct(std::size_t n) const;
  Scalar coefficient_sum() const;
};

/// Decomposes an n x n doubly stochastic matrix into a convex combination of
/// permutation matrices by repeated augmenting-path matchings on the support,
/// subtracting the minimum matched entry each round.  At most n^2 - 2n + 2
/// terms.  Throws NotDoublyStochastic (with a Hall-violation witness in the
/// message) when the input is not doubly stochastic within tol.
MatrixDecomposition decompose_finite(const DenseMatrix& w, const Scalar& tol = Scalar(1e-10));

// ---------------------------------------------------------------------------
// Pattern completion (finite prescription extended across the family)

/// Extends a 0/1 sub-stochastic weight prescribed on the first n sets to a
/// full pattern in P^{G1}, choosing fresh vertices beyond the prescribed
/// region.  The result agrees with `partial` there.  Infinite matrix/block
/// families receive a closed tail rule.  Throws PreconditionFailed when
/// `partial` is not a valid prescription, CompletionImpossible when no fresh
/// vertex can serve a G1 set.
Weight complete_pattern(const Weight& partial, const SetFamily& f, std::uint64_t n,
                        std::uint64_t depth = 64);

// ---------------------------------------------------------------------------
// Seminorm-convergent approximate decomposition

/// Weights with closed descriptions used by the infinite exemplars.
struct RuleWeight {
  enum class Kind {
    Explicit,         // finite support
    TridiagonalHalf,  // 1/2 at (1,1) and on both first off-diagonals
    BlockUniform,     // 1/k on every vertex of block k
  };
  Kind kind = Kind::Explicit;
  Weight w;  // Kind::Explicit payload

  Scalar value(const SetFamily& f, const VertexId& v) const;
  /// Support of the weight inside set k (exact; finite for these rules).
  std::vector<VertexId> support_in_set(const SetFamily& f, std::uint64_t k,
                                       std::uint64_t horizon = 1u << 20) const;
};

struct ConvexTerm {
  Scalar alpha;
  Weight pattern;
};

struct ConvexDecomposition {
  std::vector<ConvexTerm> terms;
  std::uint64_t sets_used = 0;        // truncation: number of leading sets
  std::uint64_t per_set_used = 0;     // truncation: entries kept per set
  std::vector<Scalar> residual_pk;    // p_k(w - w~) for k = 1..K

  Scalar coefficient_sum() const;
};

struct ApproxOptions {
  std::uint64_t max_sets = 512;
  std::uint64_t max_per_set = 4096;
};

/// Finite convex combination of P^{G1} patterns with p_k(w - w~) < eps for
/// all k <= K: truncation to the leading sets, far-tail mass consolidation
/// per the minimal-index rule, exact finite decomposition, and pattern
/// completion of every term.  Throws BudgetExceeded (with the achieved
/// profile in the message) when eps is not reached within the caps.
ConvexDecomposition approximate_decompose(const RuleWeight& w, const SetFamily& f,
                                          std::uint64_t K, const Scalar& eps,
                                          const ApproxOptions& opt = {});

/// p_k(w - w~) evaluated exactly for a rule weight and a finite combination.
Scalar residual_seminorm(const RuleWeight& w, const SetFamily& f,
                         const ConvexDecomposition& dec, std::uint64_t k);

/// Decomposes a finite G1-stochastic weight on a (g1)+(g2) family into a
/// convex combination of patterns via the bipartite matrix embedding.
std::vector<ConvexTerm> decompose_family_weight(const Weight& w, const SetFamily& f,
                                                std::uint64_t depth = 64);

}  // namespace majorize
