#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "majorize/scalar.hpp"

namespace majorize {

// ---------------------------------------------------------------------------
// Exact rational linear programming (dense tableau, Bland's rule).
// Intentionally simple and slow; this is the independent oracle side.

struct LPConstraint {
  std::vector<Rational> a;
  int rel = 0;  // -1: <=, 0: ==, +1: >=
  Rational b = 0;
};

struct LPInstance {
  std::size_t nvars = 0;
  std::vector<LPConstraint> rows;
  std::vector<Rational> objective;  // empty => feasibility only
  bool maximize = true;
};

struct LPResult {
  enum class Status { Optimal, Infeasible, Unbounded };
  Status status = Status::Infeasible;
  std::vector<Rational> x;  // basic solution (a vertex of the feasible set)
  Rational value = 0;

  bool feasible() const { return status != Status::Infeasible; }
};

LPResult solve_lp(const LPInstance& lp);

// ---------------------------------------------------------------------------
// Doubly stochastic polytope vertices by exhaustive basis enumeration.

/// All vertices of the n x n doubly stochastic polytope, found by solving
/// every spanning-tree equality basis of the transportation system.
/// Exponential; intended for n <= 5.
std::vector<std::vector<Rational>> enumerate_ds_vertices(std::size_t n);

// ---------------------------------------------------------------------------
// Literal envelope check on finite data.

/// All-subset check of the two-sided envelope inequalities; |x|,|y| <= 20ish.
bool brute_q(const std::vector<Scalar>& y, const std::vector<Scalar>& x);

// ---------------------------------------------------------------------------
// Haar frame sampling.

struct FrameSample {
  std::uint64_t seed = 0;
  std::size_t m = 0;  // frame size
  std::size_t n = 0;  // ambient dimension
  std::vector<std::vector<double>> rayleigh;   // count x m values
  double max_gram_error = 0.0;                 // orthonormality defect over all frames
};

/// `count` Haar-random orthonormal m-frames in R^n (Gaussian + Gram-Schmidt)
/// against the diagonal model x; emits the Rayleigh vectors (u_i^T diag(x) u_i).
/// Deterministic per (seed, index); honors MAJORIZE_THREADS for parallel
/// sampling without changing results.
FrameSample sample_rayleigh(const std::vector<double>& x, std::size_t m,
                            std::size_t count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Convex hull membership.

struct HullVerdict {
  bool feasible = false;
  std::vector<Rational> coefficients;       // convex weights when feasible
  std::vector<Rational> hyperplane;         // separating normal when infeasible
  Rational hyperplane_gap = 0;              // <a,p> - max_i <a,g_i> > 0
};

/// Exact LP feasibility of p in conv{generators}; a separating hyperplane
/// certificate on infeasibility.  `tol` only relaxes the verdict for
/// double-lane inputs carrying roundoff: points within tol of the hull in
/// the l-inf sense are accepted.
HullVerdict hull_membership(const std::vector<Scalar>& point,
                            const std::vector<std::vector<Scalar>>& generators,
                            const Scalar& tol = Scalar(0));

// ---------------------------------------------------------------------------
// Markus sampling evidence (non-convexity of unistochastic images).

struct MarkusReport {
  std::uint64_t samples = 0;
  double min_distance = 0.0;   // to the half-sum target
  std::uint64_t argmin = 0;    // sample index attaining it
};

/// Samples 3x3 unistochastic images of z = (0, i, 1) and reports the minimal
/// distance to the half-sum of two permuted copies; evidence only.
MarkusReport markus_evidence(std::uint64_t samples, std::uint64_t seed);

/// Deterministic per-index RNG stream used by all sampling oracles.
std::mt19937_64 rng_for(std::uint64_t seed, std::uint64_t index);

/// Worker-thread cap taken from MAJORIZE_THREADS (>=1); results never
/// depend on it.
unsigned sampling_threads();

}  // namespace majorize
