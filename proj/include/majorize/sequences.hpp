#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "majorize/scalar.hpp"

namespace majorize {

/// Analytic tail of a sequence.  The n-th tail entry (n = 1,2,...) is
///   constant:   limit
///   geometric:  limit + sign * scale * ratio^n          (0 < ratio < 1)
///   powerlaw:   limit + sign * scale * n^(-p)           (p > 0)
///   divergent:  sign * scale * 2^n
struct Tail {
  enum class Kind { Constant, Geometric, PowerLaw, Divergent };

  Kind kind = Kind::Constant;
  Scalar limit = Scalar(0);    // unused for Divergent
  int sign = 0;                // +1 / -1; 0 for Constant
  Scalar scale = Scalar(1);
  Scalar param = Scalar(0);    // ratio (Geometric) or exponent p (PowerLaw)

  static Tail constant(Scalar value);
  static Tail geometric(Scalar limit, int sign, Scalar scale, Scalar ratio);
  static Tail powerlaw(Scalar limit, int sign, Scalar scale, Scalar exponent);
  static Tail divergent(int sign, Scalar scale);

  Scalar entry(std::uint64_t n) const;
  /// Limit of the entries (+-inf for divergent tails).
  XReal limit_value() const;
  void validate() const;
};

/// A real sequence given as an explicit prefix followed by finitely many
/// analytic tails.  Tail entries are interleaved round-robin after the
/// prefix: position P+1 is tail 0 entry 1, P+2 is tail 1 entry 1, ...,
/// P+T+1 is tail 0 entry 2, and so on (P = prefix size, T = tail count).
struct SeqDescriptor {
  std::vector<Scalar> prefix;
  std::vector<Tail> tails;

  bool finite() const { return tails.empty(); }
  std::optional<std::uint64_t> size() const {
    if (!finite()) return std::nullopt;
    return prefix.size();
  }

  /// n-th entry, n >= 1.  Throws std::out_of_range past the end of a
  /// finite sequence.
  Scalar entry(std::uint64_t n) const;

  /// First n entries in sequence order.
  std::vector<Scalar> realize(std::uint64_t n) const;

  /// liminf / limsup of the realized sequence; nullopt for finite
  /// sequences (no tail entries exist).
  std::optional<XReal> liminf() const;
  std::optional<XReal> limsup() const;

  SeqDescriptor negated() const;
  SeqDescriptor absolute() const;  // |x| tail-wise; splits sign-crossing tails

  void validate() const;
};

/// R_m^+(x): supremum of sums over all m-element entry subsets.
XReal partial_sum_max(const SeqDescriptor& x, std::uint64_t m);
/// R_m^-(x): infimum of sums over all m-element entry subsets.
XReal partial_sum_min(const SeqDescriptor& x, std::uint64_t m);

/// All R_k^+ for k = 1..m in one merge pass (R[k-1] = R_k^+).
std::vector<XReal> partial_sum_max_profile(const SeqDescriptor& x, std::uint64_t m);
std::vector<XReal> partial_sum_min_profile(const SeqDescriptor& x, std::uint64_t m);

struct MembershipWitness {
  std::uint64_t m = 0;
  bool upper = true;                    // which side of (3.3) failed
  std::vector<std::uint64_t> indices;   // positions in y (1-based)
  Scalar lhs = Scalar(0);               // sum over the witness subset
  XReal bound;                          // violated envelope value of x
};

struct MembershipVerdict {
  enum class Status { VerifiedToDepth, Violated };
  Status status = Status::VerifiedToDepth;
  std::uint64_t depth = 0;
  std::optional<MembershipWitness> witness;

  bool ok() const { return status == Status::VerifiedToDepth; }
};

/// Checks the two-sided envelope inequalities for every m <= depth:
/// each m-entry sum of y lies within [R_m^-(x), R_m^+(x)].
MembershipVerdict q_membership(const SeqDescriptor& y, const SeqDescriptor& x,
                               std::uint64_t depth);

/// Appends constant tails at liminf/limsup when these are finite and not
/// already represented by a constant tail (idempotent normalization).
SeqDescriptor hat_extension(const SeqDescriptor& x);

struct LorentzResult {
  Scalar value;
  Scalar remainder_bound;  // bound on the mass beyond the pairing depth
};

/// Sum of products of non-increasing rearrangements of |x| and |xp|,
/// truncated at `depth` with an analytic remainder bound.
LorentzResult lorentz_norm(const SeqDescriptor& xp, const SeqDescriptor& x,
                           std::uint64_t depth);

struct MarcinkiewiczResult {
  Scalar value;
  bool exact = false;  // true when tail analysis proves the sup is attained
};

MarcinkiewiczResult marcinkiewicz_norm(const SeqDescriptor& y, const SeqDescriptor& x,
                                       std::uint64_t depth);

/// The five regimes of a real sequence:
///   1 unbounded, 2 bounded not converging to zero, 3 null but not
///   absolutely summable, 4 absolutely summable with infinite support,
///   5 finite support.
int classify_space(const SeqDescriptor& x);

/// Total of |entries| as an extended real; exact where closed forms
/// exist, +inf when divergent, and an upper bound for power-law tails
/// (integral estimate).  Used for remainder bounds.
XReal total_abs_upper(const SeqDescriptor& x);

/// Lower bound companion of total_abs_upper (equal to it when exact).
XReal total_abs_lower(const SeqDescriptor& x);

namespace detail {

/// One monotone non-increasing value stream used by the greedy merges.
struct EntryStream;

/// Enumerates the entries of x in non-increasing order.  When
/// `allow_virtual` is set, tails that increase toward a finite limit
/// contribute "virtual" entries equal to the limit (the supremum view);
/// otherwise such tails make the enumeration fail.
class DescMerge {
 public:
  struct Item {
    Scalar value;
    bool virt = false;
    int tail = -1;                 // -1 for prefix entries
    std::uint64_t pos = 0;         // 1-based sequence position (actual only)
    std::uint64_t occurrence = 0;  // tail-local index (actual tail entries)
  };

  DescMerge(const SeqDescriptor& x, bool allow_virtual, bool absolute);
  ~DescMerge();
  DescMerge(const DescMerge&) = delete;
  DescMerge& operator=(const DescMerge&) = delete;

  bool unbounded_above() const { return unbounded_; }
  bool exhausted() const;
  Item pop();

 private:
  const SeqDescriptor* x_ = nullptr;
  std::vector<EntryStream> streams_;
  bool unbounded_ = false;
};

}  // namespace detail

}  // namespace majorize
