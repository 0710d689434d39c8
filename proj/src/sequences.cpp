#include "majorize/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "majorize/errors.hpp"

namespace majorize {

// ---------------------------------------------------------------------------
// Tail

Tail Tail::constant(Scalar value) {
  Tail t;
  t.kind = Kind::Constant;
  t.limit = value;
  return t;
}

Tail Tail::geometric(Scalar limit, int sign, Scalar scale, Scalar ratio) {
  Tail t;
  t.kind = Kind::Geometric;
  t.limit = limit;
  t.sign = sign;
  t.scale = scale;
  t.param = ratio;
  t.validate();
  return t;
}

Tail Tail::powerlaw(Scalar limit, int sign, Scalar scale, Scalar exponent) {
  Tail t;
  t.kind = Kind::PowerLaw;
  t.limit = limit;
  t.sign = sign;
  t.scale = scale;
  t.param = exponent;
  t.validate();
  return t;
}

Tail Tail::divergent(int sign, Scalar scale) {
  Tail t;
  t.kind = Kind::Divergent;
  t.sign = sign;
  t.scale = scale;
  t.validate();
  return t;
}

void Tail::validate() const {
  switch (kind) {
    case Kind::Constant:
      break;
    case Kind::Geometric:
      if (sign != 1 && sign != -1) throw std::invalid_argument("geometric tail needs sign +-1");
      if (scale.sign() <= 0) throw std::invalid_argument("tail scale must be positive");
      if (param <= Scalar(0) || param >= Scalar(1))
        throw std::invalid_argument("geometric ratio must lie in (0,1)");
      break;
    case Kind::PowerLaw:
      if (sign != 1 && sign != -1) throw std::invalid_argument("powerlaw tail needs sign +-1");
      if (scale.sign() <= 0) throw std::invalid_argument("tail scale must be positive");
      if (param <= Scalar(0)) throw std::invalid_argument("powerlaw exponent must be positive");
      break;
    case Kind::Divergent:
      if (sign != 1 && sign != -1) throw std::invalid_argument("divergent tail needs sign +-1");
      if (scale.sign() <= 0) throw std::invalid_argument("tail scale must be positive");
      break;
  }
}

Scalar Tail::entry(std::uint64_t n) const {
  switch (kind) {
    case Kind::Constant:
      return limit;
    case Kind::Geometric:
      return limit + Scalar(sign) * scale * param.pow_int(n);
    case Kind::PowerLaw: {
      // n^(-p): exact when p is a positive integer in the exact lane.
      if (param.is_exact() && denominator(param.to_rational()) == 1) {
        std::uint64_t p = static_cast<std::uint64_t>(numerator(param.to_rational()));
        return limit + Scalar(sign) * scale / Scalar(n).pow_int(p);
      }
      return limit + Scalar(sign) * scale *
                         Scalar(std::pow(static_cast<double>(n), -param.to_double()));
    }
    case Kind::Divergent:
      return Scalar(sign) * scale * Scalar(2).pow_int(n);
  }
  throw std::logic_error("unreachable");
}

XReal Tail::limit_value() const {
  if (kind == Kind::Divergent) return sign > 0 ? XReal::pos_inf() : XReal::neg_inf();
  return XReal(limit);
}

// ---------------------------------------------------------------------------
// SeqDescriptor

void SeqDescriptor::validate() const {
  for (const Tail& t : tails) t.validate();
}

Scalar SeqDescriptor::entry(std::uint64_t n) const {
  if (n == 0) throw std::out_of_range("sequence positions start at 1");
  const std::uint64_t P = prefix.size();
  if (n <= P) return prefix[n - 1];
  if (tails.empty()) throw std::out_of_range("past the end of a finite sequence");
  const std::uint64_t off = n - P - 1;
  const std::uint64_t T = tails.size();
  return tails[off % T].entry(off / T + 1);
}

std::vector<Scalar> SeqDescriptor::realize(std::uint64_t n) const {
  std::vector<Scalar> out;
  if (finite()) n = std::min<std::uint64_t>(n, prefix.size());
  out.reserve(n);
  for (std::uint64_t i = 1; i <= n; ++i) out.push_back(entry(i));
  return out;
}

std::optional<XReal> SeqDescriptor::liminf() const {
  if (tails.empty()) return std::nullopt;
  XReal lo = tails[0].limit_value();
  for (const Tail& t : tails)
    if (t.limit_value() < lo) lo = t.limit_value();
  return lo;
}

std::optional<XReal> SeqDescriptor::limsup() const {
  if (tails.empty()) return std::nullopt;
  XReal hi = tails[0].limit_value();
  for (const Tail& t : tails)
    if (t.limit_value() > hi) hi = t.limit_value();
  return hi;
}

SeqDescriptor SeqDescriptor::negated() const {
  SeqDescriptor y;
  y.prefix.reserve(prefix.size());
  for (const Scalar& v : prefix) y.prefix.push_back(-v);
  for (const Tail& t : tails) {
    Tail nt = t;
    nt.limit = -t.limit;
    nt.sign = -t.sign;
    y.tails.push_back(nt);
  }
  return y;
}

SeqDescriptor SeqDescriptor::absolute() const {
  // Used only for documentation/JSON purposes; the norm computations work
  // on absolute-value streams directly.
  SeqDescriptor y;
  for (const Scalar& v : prefix) y.prefix.push_back(v.abs());
  for (const Tail& t : tails) {
    if (t.kind == Tail::Kind::Constant) {
      y.tails.push_back(Tail::constant(t.limit.abs()));
    } else if (t.kind == Tail::Kind::Divergent) {
      y.tails.push_back(Tail::divergent(+1, t.scale));
    } else if (t.limit.sign() >= 0 && t.sign > 0) {
      y.tails.push_back(t);
    } else if (t.limit.sign() > 0 && t.sign < 0) {
      // entries may dip below zero early on; push those into the prefix
      Tail nt = t;
      std::uint64_t n = 1;
      while (nt.entry(n).sign() < 0) {
        y.prefix.push_back(nt.entry(n).abs());
        ++n;
      }
      if (n > 1) {
        nt.scale = nt.scale * nt.param.pow_int(n - 1);
      }
      y.tails.push_back(nt);
    } else {
      // negative limit: mirror
      Tail mt = t;
      mt.limit = -t.limit;
      mt.sign = -t.sign;
      SeqDescriptor one;
      one.tails.push_back(mt);
      SeqDescriptor a = one.absolute();
      for (const Scalar& v : a.prefix) y.prefix.push_back(v);
      for (const Tail& u : a.tails) y.tails.push_back(u);
    }
  }
  return y;
}

// ---------------------------------------------------------------------------
// Descending entry streams

namespace detail {

struct EntryStream {
  enum class Type { List, TailDesc, ConstActual, Virtual };
  Type type = Type::List;
  int tail = -1;
  bool absolute = false;

  // List
  std::vector<std::pair<Scalar, std::uint64_t>> list;  // (value, position) desc
  std::size_t li = 0;

  // TailDesc / ConstActual / Virtual
  const SeqDescriptor* x = nullptr;
  std::uint64_t n = 1;     // next occurrence
  Scalar value = Scalar(0);  // Const/Virtual value

  std::optional<Scalar> head() const {
    switch (type) {
      case Type::List:
        if (li >= list.size()) return std::nullopt;
        return list[li].first;
      case Type::TailDesc:
        return current_tail_value();
      case Type::ConstActual:
      case Type::Virtual:
        return value;
    }
    return std::nullopt;
  }

  Scalar current_tail_value() const {
    Scalar v = x->tails[tail].entry(n);
    return absolute ? v.abs() : v;
  }

  DescMerge::Item pop_item(const SeqDescriptor& seq) {
    DescMerge::Item it;
    it.tail = tail;
    switch (type) {
      case Type::List:
        it.value = list[li].first;
        it.pos = list[li].second;
        ++li;
        break;
      case Type::TailDesc:
        it.value = current_tail_value();
        it.occurrence = n;
        it.pos = seq.prefix.size() + (n - 1) * seq.tails.size() + tail + 1;
        ++n;
        break;
      case Type::ConstActual:
        it.value = value;
        it.occurrence = n;
        it.pos = seq.prefix.size() + (n - 1) * seq.tails.size() + tail + 1;
        ++n;
        break;
      case Type::Virtual:
        it.value = value;
        it.virt = true;
        break;
    }
    return it;
  }
};

DescMerge::DescMerge(const SeqDescriptor& x, bool allow_virtual, bool absolute) {
  x_ = &x;
  EntryStream pfx;
  pfx.type = EntryStream::Type::List;
  for (std::uint64_t i = 0; i < x.prefix.size(); ++i) {
    Scalar v = absolute ? x.prefix[i].abs() : x.prefix[i];
    pfx.list.emplace_back(v, i + 1);
  }
  std::sort(pfx.list.begin(), pfx.list.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });
  if (!pfx.list.empty()) streams_.push_back(std::move(pfx));

  for (int t = 0; t < static_cast<int>(x.tails.size()); ++t) {
    const Tail& tl = x.tails[t];
    auto add_virtual = [&](Scalar v) {
      if (!allow_virtual) throw PairingDiverges("tail " + std::to_string(t) +
                                                " has no non-increasing actual enumeration");
      EntryStream s;
      s.type = EntryStream::Type::Virtual;
      s.tail = t;
      s.value = v;
      s.x = &x;
      s.absolute = absolute;
      streams_.push_back(std::move(s));
    };
    auto add_tail_desc = [&](std::uint64_t from) {
      EntryStream s;
      s.type = EntryStream::Type::TailDesc;
      s.tail = t;
      s.n = from;
      s.x = &x;
      s.absolute = absolute;
      streams_.push_back(std::move(s));
    };
    auto add_head_list = [&](std::uint64_t upto) {
      // |entries| for occurrences 1..upto, in descending order of value
      EntryStream s;
      s.type = EntryStream::Type::List;
      s.tail = t;
      for (std::uint64_t n = 1; n <= upto; ++n) {
        Scalar v = tl.entry(n);
        if (absolute) v = v.abs();
        std::uint64_t pos = x.prefix.size() + (n - 1) * x.tails.size() + t + 1;
        s.list.emplace_back(v, pos);
      }
      std::sort(s.list.begin(), s.list.end(),
                [](const auto& a, const auto& b) { return a.first > b.first; });
      streams_.push_back(std::move(s));
    };

    switch (tl.kind) {
      case Tail::Kind::Constant: {
        EntryStream s;
        s.type = EntryStream::Type::ConstActual;
        s.tail = t;
        s.value = absolute ? tl.limit.abs() : tl.limit;
        s.x = &x;
        s.absolute = absolute;
        streams_.push_back(std::move(s));
        break;
      }
      case Tail::Kind::Divergent: {
        if (!absolute && tl.sign > 0) { unbounded_ = true; break; }
        if (absolute) { unbounded_ = true; break; }
        add_tail_desc(1);  // negative divergent: entries descend
        break;
      }
      case Tail::Kind::Geometric:
      case Tail::Kind::PowerLaw: {
        if (!absolute) {
          if (tl.sign > 0) add_tail_desc(1);     // decreasing to the limit
          else add_virtual(tl.limit);            // increasing: supremum view
          break;
        }
        // absolute-value enumeration
        int ls = tl.limit.sign();
        if (ls == 0) {
          add_tail_desc(1);  // |limit +- s q^n| = s q^n descending either way
          break;
        }
        if (ls > 0 && tl.sign > 0) { add_tail_desc(1); break; }
        if (ls < 0 && tl.sign < 0) { add_tail_desc(1); break; }
        if (ls > 0 && tl.sign < 0) {
          // increasing toward a positive limit; early entries may be negative
          std::uint64_t n0 = 0;
          while (tl.entry(n0 + 1).sign() < 0) ++n0;
          if (n0 > 0) add_head_list(n0);
          add_virtual(tl.limit.abs());
          break;
        }
        // ls < 0, sign > 0: decreasing toward a negative limit
        std::uint64_t n0 = 0;
        while (tl.entry(n0 + 1).sign() > 0) ++n0;
        if (n0 > 0) add_head_list(n0);
        add_virtual(tl.limit.abs());
        break;
      }
    }
  }
}

DescMerge::~DescMerge() = default;

bool DescMerge::exhausted() const {
  if (unbounded_) return false;
  for (const auto& s : streams_)
    if (s.head()) return false;
  return true;
}

DescMerge::Item DescMerge::pop() {
  int best = -1;
  Scalar bv;
  for (int i = 0; i < static_cast<int>(streams_.size()); ++i) {
    auto h = streams_[i].head();
    if (!h) continue;
    bool virt = streams_[i].type == EntryStream::Type::Virtual;
    if (best < 0 || *h > bv ||
        (*h == bv && !virt && streams_[best].type == EntryStream::Type::Virtual)) {
      best = i;
      bv = *h;
    }
  }
  if (best < 0) throw std::logic_error("pop from exhausted merge");
  return streams_[best].pop_item(*x_);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Envelopes

static void require_nonempty(const SeqDescriptor& x) {
  if (x.prefix.empty() && x.tails.empty())
    throw EmptySequence("R_m^+- undefined for a sequence with no entries");
}

std::vector<XReal> partial_sum_max_profile(const SeqDescriptor& x, std::uint64_t m) {
  require_nonempty(x);
  if (m == 0) throw std::invalid_argument("m must be >= 1");
  detail::DescMerge mg(x, /*allow_virtual=*/true, /*absolute=*/false);
  std::vector<XReal> out;
  out.reserve(m);
  if (mg.unbounded_above()) {
    out.assign(m, XReal::pos_inf());
    return out;
  }
  Scalar acc(0);
  for (std::uint64_t k = 0; k < m; ++k) {
    if (mg.exhausted()) {
      // fewer than k+1 entries exist: sup over the empty collection
      out.push_back(XReal::neg_inf());
      continue;
    }
    acc += mg.pop().value;
    out.push_back(XReal(acc));
  }
  return out;
}

std::vector<XReal> partial_sum_min_profile(const SeqDescriptor& x, std::uint64_t m) {
  auto neg = partial_sum_max_profile(x.negated(), m);
  for (auto& v : neg) v = -v;
  return neg;
}

XReal partial_sum_max(const SeqDescriptor& x, std::uint64_t m) {
  return partial_sum_max_profile(x, m).back();
}

XReal partial_sum_min(const SeqDescriptor& x, std::uint64_t m) {
  return partial_sum_min_profile(x, m).back();
}

// ---------------------------------------------------------------------------
// Q membership

namespace {

// Replaces virtual items in a greedy extremal subset with far actual tail
// entries so that the witness subset still violates the bound.
std::optional<MembershipWitness> build_witness(const SeqDescriptor& y, std::uint64_t m,
                                               bool upper, const XReal& bound) {
  // Re-run the merge on y (or -y for the lower side) keeping items.
  SeqDescriptor yy = upper ? y : y.negated();
  XReal b = upper ? bound : -bound;
  // b finite here unless y unbounded with finite bound.
  detail::DescMerge mg(yy, true, false);
  MembershipWitness w;
  w.m = m;
  w.upper = upper;

  std::vector<detail::DescMerge::Item> items;
  if (mg.unbounded_above()) {
    // pick m huge entries from a divergent-up tail of yy
    int t = -1;
    for (int i = 0; i < static_cast<int>(yy.tails.size()); ++i)
      if (yy.tails[i].kind == Tail::Kind::Divergent && yy.tails[i].sign > 0) t = i;
    if (t < 0) return std::nullopt;
    std::uint64_t n = 1;
    Scalar acc(0);
    std::vector<std::uint64_t> pos;
    // ensure the final sum exceeds the bound even if b is finite and large
    while (pos.size() < m) {
      Scalar v = yy.tails[t].entry(n);
      acc += v;
      pos.push_back(yy.prefix.size() + (n - 1) * yy.tails.size() + t + 1);
      ++n;
    }
    while (b.finite() && !(acc > b.value())) {
      // slide the last chosen entry further out
      Scalar v = yy.tails[t].entry(n);
      acc += v - yy.tails[t].entry(n - m);
      pos.erase(pos.begin());
      pos.push_back(yy.prefix.size() + (n - 1) * yy.tails.size() + t + 1);
      ++n;
    }
    w.indices = pos;
    w.lhs = upper ? acc : -acc;
    w.bound = bound;
    return w;
  }

  Scalar acc(0);
  for (std::uint64_t k = 0; k < m; ++k) {
    if (mg.exhausted()) return std::nullopt;
    items.push_back(mg.pop());
    acc += items.back().value;
  }
  // acc > b strictly (the caller established violation). Replace virtual
  // entries with actual far occurrences, spending less than acc - b.
  if (!b.finite()) {
    // bound -inf on the upper side cannot be violated; bound +inf likewise
    return std::nullopt;
  }
  Scalar budget = acc - b.value();
  std::size_t virt_count = 0;
  for (const auto& it : items) virt_count += it.virt ? 1 : 0;
  std::map<int, std::uint64_t> next_occ;
  Scalar spent(0);
  for (auto& it : items) {
    if (!it.virt) continue;
    const Tail& tl = yy.tails[it.tail];
    Scalar per = budget / Scalar(static_cast<long long>(2 * virt_count));
    std::uint64_t n = next_occ.count(it.tail) ? next_occ[it.tail] : 1;
    while (true) {
      Scalar v = tl.entry(n);
      Scalar deficit = it.value - v;  // >= 0: virtual value is the supremum
      if (deficit < per) {
        it.value = v;
        it.virt = false;
        it.occurrence = n;
        it.pos = yy.prefix.size() + (n - 1) * yy.tails.size() + it.tail + 1;
        spent += deficit;
        next_occ[it.tail] = n + 1;
        break;
      }
      n = n < 8 ? n + 1 : n * 2;
    }
  }
  Scalar total(0);
  for (const auto& it : items) {
    total += it.value;
    w.indices.push_back(it.pos);
  }
  w.lhs = upper ? total : -total;
  w.bound = bound;
  return w;
}

}  // namespace

MembershipVerdict q_membership(const SeqDescriptor& y, const SeqDescriptor& x,
                               std::uint64_t depth) {
  if (depth == 0) throw std::invalid_argument("depth must be >= 1");
  require_nonempty(x);
  require_nonempty(y);

  auto xup = partial_sum_max_profile(x, depth);
  auto xlo = partial_sum_min_profile(x, depth);
  auto yup = partial_sum_max_profile(y, depth);
  auto ylo = partial_sum_min_profile(y, depth);

  MembershipVerdict v;
  v.depth = depth;
  for (std::uint64_t m = 1; m <= depth; ++m) {
    // No m-element subsets of y exist once y is exhausted.
    if (yup[m - 1].is_neg_inf()) break;
    if (XReal::cmp(yup[m - 1], xup[m - 1]) > 0) {
      v.status = MembershipVerdict::Status::Violated;
      v.witness = build_witness(y, m, true, xup[m - 1]);
      if (v.witness) return v;
      // fall back: report without an explicit index set
      MembershipWitness w;
      w.m = m;
      w.upper = true;
      w.lhs = yup[m - 1].finite() ? yup[m - 1].value() : Scalar(0);
      w.bound = xup[m - 1];
      v.witness = w;
      return v;
    }
    if (XReal::cmp(ylo[m - 1], xlo[m - 1]) < 0) {
      v.status = MembershipVerdict::Status::Violated;
      v.witness = build_witness(y, m, false, xlo[m - 1]);
      if (v.witness) return v;
      MembershipWitness w;
      w.m = m;
      w.upper = false;
      w.lhs = ylo[m - 1].finite() ? ylo[m - 1].value() : Scalar(0);
      w.bound = xlo[m - 1];
      v.witness = w;
      return v;
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Hat extension

SeqDescriptor hat_extension(const SeqDescriptor& x) {
  SeqDescriptor out = x;
  auto lo = x.liminf();
  auto hi = x.limsup();
  if (!lo) return out;  // finite sequence: nothing accumulates

  auto has_const_at = [&](const Scalar& v) {
    for (const Tail& t : x.tails)
      if (t.kind == Tail::Kind::Constant && t.limit == v) return true;
    return false;
  };
  if (lo->finite() && !has_const_at(lo->value())) out.tails.push_back(Tail::constant(lo->value()));
  if (*hi != *lo && hi->finite() && !has_const_at(hi->value()))
    out.tails.push_back(Tail::constant(hi->value()));
  return out;
}

// ---------------------------------------------------------------------------
// Totals

XReal total_abs_upper(const SeqDescriptor& x) {
  Scalar total(0);
  for (const Scalar& v : x.prefix) total += v.abs();
  for (const Tail& t : x.tails) {
    switch (t.kind) {
      case Tail::Kind::Constant:
        if (t.limit.sign() != 0) return XReal::pos_inf();
        break;
      case Tail::Kind::Divergent:
        return XReal::pos_inf();
      case Tail::Kind::Geometric:
        if (t.limit.sign() != 0) return XReal::pos_inf();
        total += t.scale * t.param / (Scalar(1) - t.param);
        break;
      case Tail::Kind::PowerLaw: {
        if (t.limit.sign() != 0) return XReal::pos_inf();
        if (t.param <= Scalar(1)) return XReal::pos_inf();
        // sum n^-p <= 1 + 1/(p-1)
        total += t.scale * (Scalar(1) + Scalar(1) / (t.param - Scalar(1)));
        break;
      }
    }
  }
  return XReal(total);
}

XReal total_abs_lower(const SeqDescriptor& x) {
  Scalar total(0);
  for (const Scalar& v : x.prefix) total += v.abs();
  for (const Tail& t : x.tails) {
    switch (t.kind) {
      case Tail::Kind::Constant:
        if (t.limit.sign() != 0) return XReal::pos_inf();
        break;
      case Tail::Kind::Divergent:
        return XReal::pos_inf();
      case Tail::Kind::Geometric:
        if (t.limit.sign() != 0) return XReal::pos_inf();
        total += t.scale * t.param / (Scalar(1) - t.param);
        break;
      case Tail::Kind::PowerLaw:
        if (t.limit.sign() != 0) return XReal::pos_inf();
        if (t.param <= Scalar(1)) return XReal::pos_inf();
        total += t.scale / (t.param - Scalar(1));  // integral lower bound
        break;
    }
  }
  return XReal(total);
}

// ---------------------------------------------------------------------------
// Classification (the five regimes)

int classify_space(const SeqDescriptor& x) {
  bool any_div = false, nonzero_limit = false, heavy_power = false, infinite_support = false;
  for (const Tail& t : x.tails) {
    switch (t.kind) {
      case Tail::Kind::Divergent:
        any_div = true;
        break;
      case Tail::Kind::Constant:
        if (t.limit.sign() != 0) nonzero_limit = true;
        break;
      case Tail::Kind::Geometric:
        if (t.limit.sign() != 0) nonzero_limit = true;
        else infinite_support = true;
        break;
      case Tail::Kind::PowerLaw:
        if (t.limit.sign() != 0) nonzero_limit = true;
        else {
          infinite_support = true;
          if (t.param <= Scalar(1)) heavy_power = true;
        }
        break;
    }
  }
  if (any_div) return 1;
  if (nonzero_limit) return 2;
  if (heavy_power) return 3;
  if (infinite_support) return 4;
  return 5;
}

// ---------------------------------------------------------------------------
// Lorentz norm

LorentzResult lorentz_norm(const SeqDescriptor& xp, const SeqDescriptor& x,
                           std::uint64_t depth) {
  require_nonempty(x);
  if (classify_space(x) != 3)
    throw ClassMismatch("lorentz_norm: weight sequence must be null but not summable (class 3)");

  // Descending |x| and |xp| streams must be actual (no virtual entries);
  // in class 3 all tail limits are zero, so they are.
  detail::DescMerge ax(x, /*allow_virtual=*/false, /*absolute=*/true);
  detail::DescMerge ab(xp, /*allow_virtual=*/true, /*absolute=*/true);
  if (ab.unbounded_above())
    throw PairingDiverges("lorentz_norm: |xp| unbounded, pairing diverges");

  Scalar value(0);
  Scalar last_a(0);
  std::uint64_t paired = 0;
  bool b_done = false, a_done = false;
  for (std::uint64_t j = 0; j < depth; ++j) {
    if (ax.exhausted()) { a_done = true; break; }
    if (ab.exhausted()) { b_done = true; break; }
    auto ia = ax.pop();
    auto ib = ab.pop();
    if (ib.virt)
      throw PairingDiverges("lorentz_norm: xp does not converge to zero, pairing diverges");
    last_a = ia.value;
    if (ib.value.sign() == 0) { b_done = true; break; }
    value += ia.value * ib.value;
    ++paired;
  }

  LorentzResult res;
  res.value = value;
  if (a_done || b_done) {
    res.remainder_bound = Scalar(0);
    return res;
  }
  // remaining mass of |xp| beyond the paired entries
  XReal totB = total_abs_upper(xp);
  if (totB.finite()) {
    Scalar restB(0);
    {
      detail::DescMerge again(xp, true, true);
      Scalar seen(0);
      for (std::uint64_t j = 0; j < paired && !again.exhausted(); ++j) seen += again.pop().value;
      restB = totB.value() - seen;
      if (restB.sign() < 0) restB = Scalar(0);
    }
    res.remainder_bound = last_a * restB;
    return res;
  }
  throw PairingDiverges("lorentz_norm: remainder of |xp| is not summable");
}

// ---------------------------------------------------------------------------
// Marcinkiewicz norm

namespace {

// y == c*x structurally (prefix multisets and tail multisets scale by c)?
std::optional<Scalar> proportionality_constant(const SeqDescriptor& y, const SeqDescriptor& x) {
  if (y.prefix.size() != x.prefix.size() || y.tails.size() != x.tails.size())
    return std::nullopt;

  auto try_c = [&](const Scalar& c) -> bool {
    if (c.sign() == 0) return false;
    std::vector<Scalar> xs, ys;
    for (const Scalar& v : x.prefix) xs.push_back(v * c);
    for (const Scalar& v : y.prefix) ys.push_back(v);
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    if (xs != ys) return false;

    auto key = [](const Tail& t) {
      return std::make_tuple(static_cast<int>(t.kind), t.limit, t.sign, t.scale, t.param);
    };
    std::vector<decltype(key(x.tails[0]))> xt, yt;
    for (const Tail& t : x.tails) {
      Tail s = t;
      s.limit = t.limit * c;
      s.scale = t.scale * c.abs();
      if (c.sign() < 0) s.sign = -t.sign;
      xt.push_back(key(s));
    }
    for (const Tail& t : y.tails) yt.push_back(key(t));
    std::sort(xt.begin(), xt.end());
    std::sort(yt.begin(), yt.end());
    return xt == yt;
  };

  // candidate c from the leading absolute entries
  detail::DescMerge ax(x, true, true), ay(y, true, true);
  if (ax.unbounded_above() || ay.unbounded_above()) return std::nullopt;
  if (ax.exhausted() || ay.exhausted()) return std::nullopt;
  Scalar a0 = ax.pop().value, b0 = ay.pop().value;
  if (a0.sign() == 0) return std::nullopt;
  Scalar c = b0 / a0;
  if (try_c(c)) return c;
  if (try_c(-c)) return -c;
  return std::nullopt;
}

}  // namespace

MarcinkiewiczResult marcinkiewicz_norm(const SeqDescriptor& y, const SeqDescriptor& x,
                                       std::uint64_t depth) {
  require_nonempty(x);
  require_nonempty(y);
  if (classify_space(x) != 3)
    throw ClassMismatch("marcinkiewicz_norm: weight sequence must be of class 3");

  detail::DescMerge ax(x, true, true);
  detail::DescMerge ay(y, true, true);
  if (ay.unbounded_above())
    throw ClassMismatch("marcinkiewicz_norm: |y| unbounded, norm infinite");

  MarcinkiewiczResult res;
  res.value = Scalar(0);

  Scalar Ra(0), Ry(0);
  std::uint64_t m = 0;
  for (; m < depth; ++m) {
    if (ay.exhausted() || ax.exhausted()) break;
    Ry += ay.pop().value;
    Ra += ax.pop().value;
    if (Ra.sign() == 0) {
      if (Ry.sign() != 0) throw ClassMismatch("marcinkiewicz_norm: R_m(|x|) vanishes");
      continue;
    }
    Scalar ratio = Ry / Ra;
    if (ratio > res.value) res.value = ratio;
  }
  // exactness analysis
  if (ay.exhausted() && !ax.exhausted()) {
    // finitely many y entries: ratios only decrease beyond exhaustion
    res.exact = true;
    return res;
  }
  auto c = proportionality_constant(y, x);
  if (c && res.value == c->abs()) {
    res.exact = true;
    return res;
  }
  XReal totY = total_abs_upper(y);
  if (totY.finite() && !ax.exhausted()) {
    Scalar Rnext = Ra + ax.pop().value;
    if (Rnext.sign() > 0 && totY.value() / Rnext <= res.value) res.exact = true;
  }
  return res;
}

}  // namespace majorize
