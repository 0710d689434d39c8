#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "majorize/matrix.hpp"
#include "majorize/sequences.hpp"

namespace majorize {

// ---------------------------------------------------------------------------
// Orthonormal realizations with exactly checkable coordinates

/// Vector over the eigenbasis, coordinates stored as signed squares
/// c = sign * sqrt(sq).  Two-point rotations and their deflations produce
/// exactly such coordinates with rational sq.
struct RealVector {
  std::map<std::uint64_t, SqCoeff> comps;  // 1-based eigenbasis position

  Scalar norm_sq() const;
  Scalar rayleigh(const SeqDescriptor& x) const;  // sum sq_j * x_j
  double dot(const RealVector& o) const;
  /// Exact inner product zero/one test via square-ratio classes; only
  /// meaningful when every sq is exact.
  bool exact() const;
  Scalar inner_exact(const RealVector& o, bool* decided) const;
};

struct OrthonormalRealization {
  std::vector<RealVector> vectors;
  std::vector<Scalar> rayleigh;
  std::uint64_t x_depth = 0;  // how many entries of x were materialized

  /// Row-stochastic witness w_ij = c_ij^2 restricted to the used positions.
  DenseMatrix weight_witness(std::uint64_t ncols) const;
};

struct GramReport {
  double max_gram_error = 0.0;
  double max_rayleigh_error = 0.0;
  bool exact_checked = false;   // the exact route ran on all pairs
  bool exact_orthonormal = false;
  bool exact_rayleigh = false;
};

GramReport check_realization(const OrthonormalRealization& r, const SeqDescriptor& x,
                             const std::vector<Scalar>& expected);

// ---------------------------------------------------------------------------
// Operator action of a weight matrix on a sequence

struct ApplyResult {
  bool ok = false;
  SeqDescriptor y;        // computed rows (finite prefix)
  std::uint64_t bad_row = 0;  // 1-based row whose series diverges
  std::string detail;
};

/// y_i = sum_j w_ij x_j for a finite matrix; every row series of a finite
/// matrix converges, so this never fails.
ApplyResult apply_weight(const DenseMatrix& w, const SeqDescriptor& x);

/// A row with finitely many explicit coefficients plus an optional geometric
/// coefficient tail aligned with the sequence positions.
struct GeometricRow {
  std::vector<Scalar> prefix;   // coefficients of positions 1..p
  bool has_tail = false;
  Scalar tail_scale = Scalar(0);
  Scalar tail_ratio = Scalar(0);  // coefficient at position p + n: scale * ratio^n
};

/// Row-wise action with certified convergence analysis: the coefficient
/// tail against the sequence tails decides convergence in closed form;
/// values are summed to a 1e-14 remainder bound.
ApplyResult apply_weight(const std::vector<GeometricRow>& rows, const SeqDescriptor& x);

// ---------------------------------------------------------------------------
// Two-point and deflation constructions

struct TwoPointResult {
  Scalar alpha;
  RealVector u;  // sqrt(alpha) e_j + sqrt(1-alpha) e_k
};

/// alpha = (y - xk)/(xj - xk); requires y between xj and xk (Infeasible
/// otherwise).  Positions j,k index the eigenbasis.
TwoPointResult realize_two_point(const Scalar& y, const Scalar& xj, const Scalar& xk,
                                 std::uint64_t j = 1, std::uint64_t k = 2);

enum class DeflationCase { A, B };

/// The one-accumulation-point constructions: case A (infinitely many entries
/// on the high side, multiplicity bound at the limit), case B (finitely many,
/// positive slack).  Emits the first `depth` vectors.
OrthonormalRealization realize_deflation(const SeqDescriptor& y, const SeqDescriptor& x,
                                         DeflationCase c, std::uint64_t depth);

// ---------------------------------------------------------------------------
// Membership with realization (Theorem-level driver)

struct InfeasibleWitness {
  enum class Kind { QViolation, BoundaryCount };
  Kind kind = Kind::QViolation;
  std::optional<MembershipWitness> q_witness;
  bool upper_side = true;       // which of x^+- fired the count condition
  std::uint64_t y_count = 0;    // entries of y pinned at the boundary value
  std::uint64_t x_count = 0;    // entries of x available there
};

struct SideCaseReport {
  int case_id = 0;         // 1..6 per side, 0 when the side is void
  bool gap = false;        // envelope difference bounded away from zero
  Scalar gap_value;        // observed infimum of the difference at depth
};

struct RealizeOutcome {
  enum class Status { Realized, Infeasible, UndecidedAtDepth };
  Status status = Status::UndecidedAtDepth;
  OrthonormalRealization realization;
  std::optional<InfeasibleWitness> witness;
  SideCaseReport upper, lower;
  std::uint64_t depth = 0;
};

/// Decides y in S_x^r constructively to depth: envelope membership first,
/// boundary multiplicity checks at limsup/liminf, then the bracketing
/// deflation on the materialized entries; the side reports carry the
/// closed-form classification of the pieces above/below the limits.
RealizeOutcome realize_diagonal(const SeqDescriptor& y, const SeqDescriptor& x,
                                std::uint64_t depth = 64);

struct SrVerdict {
  enum class Status { MemberWithCertificate, NonMemberWithWitness, UndecidedAtDepth };
  Status status = Status::UndecidedAtDepth;
  RealizeOutcome outcome;
};

SrVerdict sr_membership(const SeqDescriptor& y, const SeqDescriptor& x,
                        std::uint64_t depth = 64);

// ---------------------------------------------------------------------------
// l1 approximation inside the rearrangement class

struct PxrApproximation {
  SeqDescriptor x_eps;
  Scalar l1_bound;  // certified bound on the construction pairing
};

/// Rearranged subsequence of x within l1 distance eps of the hat extension,
/// built by swapping tail entries toward the limits (closed forms require
/// geometric approach to the limits; finite sequences return x itself).
PxrApproximation approx_in_pxr(const SeqDescriptor& x, const Scalar& eps);

// ---------------------------------------------------------------------------
// Ladder matrices and extreme points of S_{x,(m)}

struct LadderMatrix {
  DenseMatrix mat;           // kept rows followed by extension rows
  std::size_t kept_rows = 0;
  bool extended = false;
  /// per equal-value block: the column indices and the nonzero cells
  struct Block {
    Scalar value;
    std::vector<std::size_t> cols;
  };
  std::vector<Block> blocks;
};

/// Consolidates mass within equal-value column blocks into ladder shape,
/// preserving the first m entries of w x exactly; appends extension rows
/// raising every column sum to 1 when `extend` is set.
LadderMatrix ladder_matrix(const DenseMatrix& w, const SeqDescriptor& x, std::size_t m,
                           bool extend = true);

bool ladder_shape_ok(const LadderMatrix& lm, const SeqDescriptor& x);

enum class G1Span { Rows, RowsAndColumns };

struct ExtremeVerdict {
  enum class Status { Extreme, NotExtreme, NotMember, NotApplicable };
  Status status = Status::NotApplicable;
  std::optional<DenseMatrix> pattern_witness;       // 0/1 matrix with (w0 x)^(m) = y
  std::vector<Scalar> split_plus, split_minus;      // halves averaging to y
  std::string reason;
};

/// Decides y in ex S_{x,(m)}^{G1} for finite m against a finite x: builds a
/// realization, ladder-shapes it, and searches admissible cycles / tree
/// perturbations.  x with zero entries under the distinct-values regime is
/// refused (NotApplicable), matching the theorem's hypotheses.
ExtremeVerdict extreme_in_sxm(const std::vector<Scalar>& y, const SeqDescriptor& x,
                              G1Span g1, std::uint64_t depth = 64);

}  // namespace majorize
