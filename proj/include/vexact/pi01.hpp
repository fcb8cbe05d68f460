#ifndef VEXACT_PI01_HPP
#define VEXACT_PI01_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vexact/rational.hpp"

namespace vexact {

/// Staged producer of raw open rational intervals (possibly overlapping,
/// possibly sticking out of [0,1]). Stages are numbered from 1. Must be a
/// pure function of the stage.
class IntervalGenerator {
 public:
  virtual ~IntervalGenerator() = default;
  virtual std::vector<RationalInterval> emit(std::uint64_t stage) const = 0;
  /// Last stage that can emit anything, for generators known to exhaust.
  virtual std::optional<std::uint64_t> last_stage() const { return std::nullopt; }
  virtual std::string name() const = 0;
};

/// Closed piece [q, r] of the normalized complement enumeration.
struct Piece {
  Rational q;
  Rational r;
  std::uint64_t stage = 0;  ///< t(n)

  Rational width() const { return r - q; }
  bool interior_contains(const Rational& x) const { return q < x && x < r; }
  bool contains(const Rational& x) const { return q <= x && x <= r; }
};

struct InU {
  std::size_t piece = 0;
  Rational offset;  ///< (x - q) / (r - q)
};
struct ConsistentWithV {
  std::uint64_t stage = 0;
};
using MembershipVerdict = std::variant<InU, ConsistentWithV>;

struct BoundaryReport {
  std::uint64_t stage = 0;
  bool in_emitted_u = false;
  /// meets[j]: the open 2^-j neighbourhood of x meets an emitted interior.
  std::vector<bool> meets;
  bool consistent() const {
    return !in_emitted_u && std::all_of(meets.begin(), meets.end(), [](bool b) { return b; });
  }
};

/// A Pi^0_1 class V = [0,1] \ U with U enumerated through a generator.
///
/// Each stage merges the new raw intervals into the raw union R (kept as
/// maximal open intervals; (a,b) and (b,c) stay separate) and emits the
/// closures of the parts of R not yet covered by earlier pieces. Emitted
/// pieces have disjoint interiors and satisfy R <= E <= closure(R) for their
/// union E.
class Pi01Class {
 public:
  explicit Pi01Class(std::shared_ptr<const IntervalGenerator> gen) : gen_(std::move(gen)) {}

  /// Same generator, no stages run.
  Pi01Class fresh() const { return Pi01Class(gen_); }

  const IntervalGenerator& generator() const { return *gen_; }
  std::uint64_t stage() const { return stage_; }
  bool exhausted() const {
    auto last = gen_->last_stage();
    return last && stage_ >= *last;
  }
  const std::vector<Piece>& pieces() const { return pieces_; }
  std::size_t pieces_by_stage(std::uint64_t s) const {
    return static_cast<std::size_t>(
        std::count_if(pieces_.begin(), pieces_.end(), [s](const Piece& p) { return p.stage <= s; }));
  }
  const std::vector<RationalInterval>& raw_union() const { return raw_; }

  /// Runs one more generator stage; returns the indices of the new pieces.
  std::vector<std::size_t> normalize_step() {
    const std::uint64_t s = ++stage_;
    for (RationalInterval iv : gen_->emit(s)) {
      iv.lo = std::max(iv.lo, Rational(0));
      iv.hi = std::min(iv.hi, Rational(1));
      if (iv.empty()) continue;
      raw_log_.push_back({iv, s});
      add_raw(iv);
    }
    std::vector<std::size_t> fresh_ids;
    for (const RationalInterval& c : raw_) {
      // walk the existing pieces overlapping c, collect uncovered gaps
      Rational cursor = c.lo;
      auto it = by_left_.upper_bound(cursor);
      if (it != by_left_.begin()) {
        auto prev = std::prev(it);
        if (pieces_[prev->second].r > cursor) cursor = pieces_[prev->second].r;
      }
      for (; it != by_left_.end() && it->first < c.hi; ++it) {
        const Piece& p = pieces_[it->second];
        if (p.q > cursor) emit_piece(cursor, p.q, s, fresh_ids);
        cursor = std::max(cursor, p.r);
      }
      if (cursor < c.hi) emit_piece(cursor, c.hi, s, fresh_ids);
    }
    for (std::size_t id : fresh_ids) by_left_.emplace(pieces_[id].q, id);
    return fresh_ids;
  }

  void advance_to(std::uint64_t s) {
    while (stage_ < s && !exhausted()) normalize_step();
    // an exhausted generator still counts stages
    if (stage_ < s) stage_ = s;
  }

  /// Runs stages until n pieces exist or the generator exhausts; throws
  /// BudgetExhausted once `budget` total stages have run without success.
  void ensure_pieces(std::size_t n, std::uint64_t budget) {
    while (pieces_.size() < n && !exhausted()) {
      if (stage_ >= budget)
        throw BudgetExhausted("waiting for piece " + std::to_string(n - 1) + " of " + gen_->name(),
                              stage_);
      normalize_step();
    }
  }

  /// Piece among those emitted by stage s whose closure contains x, if any.
  /// Among two pieces sharing the endpoint x, the right one is returned.
  std::optional<std::size_t> locate(const Rational& x, std::uint64_t s) const {
    auto it = by_left_.upper_bound(x);
    if (it == by_left_.begin()) return std::nullopt;
    for (auto cand = std::prev(it);; --cand) {
      const Piece& p = pieces_[cand->second];
      if (p.stage <= s && p.contains(x)) return cand->second;
      if (p.r < x || cand == by_left_.begin()) break;
    }
    return std::nullopt;
  }

  /// Semi-decision of x in U at stage s. An endpoint of an emitted piece
  /// counts as in U when the raw union already covers it.
  MembershipVerdict membership(const Rational& x, std::uint64_t s) {
    advance_to(s);
    if (auto id = locate(x, s)) {
      const Piece& p = pieces_[*id];
      Rational z = (x - p.q) / p.width();
      if (p.interior_contains(x) || raw_covers(x, s)) return InU{*id, z};
    }
    return ConsistentWithV{s};
  }

  /// Distances at scales j = 0..max_scale from x to the stage-s emitted U.
  BoundaryReport boundary_consistency(const Rational& x, std::uint64_t s,
                                      std::optional<std::uint64_t> max_scale = std::nullopt) {
    advance_to(s);
    BoundaryReport rep;
    rep.stage = s;
    std::optional<Rational> dist;
    for (const Piece& p : pieces_) {
      if (p.stage > s) continue;
      Rational d = p.interior_contains(x) ? Rational(0) : (x <= p.q ? p.q - x : x - p.r);
      if (p.interior_contains(x)) rep.in_emitted_u = true;
      if (!dist || d < *dist) dist = d;
    }
    const std::uint64_t J = max_scale.value_or(s);
    rep.meets.assign(J + 1, false);
    for (std::uint64_t j = 0; j <= J && dist; ++j) {
      Rational radius(mpz_class(1), mpz_class(1) << static_cast<mp_bitcnt_t>(j));
      if (*dist < radius) rep.meets[j] = true;
    }
    return rep;
  }

 private:
  struct LoggedRaw {
    RationalInterval iv;
    std::uint64_t stage;
  };

  bool raw_covers(const Rational& x, std::uint64_t s) const {
    return std::any_of(raw_log_.begin(), raw_log_.end(), [&](const LoggedRaw& r) {
      return r.stage <= s && r.iv.lo < x && x < r.iv.hi;
    });
  }

  void add_raw(RationalInterval iv) {
    std::vector<RationalInterval> next;
    next.reserve(raw_.size() + 1);
    for (const RationalInterval& c : raw_) {
      if (c.hi <= iv.lo || iv.hi <= c.lo) {
        next.push_back(c);
      } else {
        iv.lo = std::min(iv.lo, c.lo);
        iv.hi = std::max(iv.hi, c.hi);
      }
    }
    next.push_back(iv);
    std::sort(next.begin(), next.end(),
              [](const RationalInterval& a, const RationalInterval& b) { return a.lo < b.lo; });
    raw_ = std::move(next);
  }

  void emit_piece(const Rational& q, const Rational& r, std::uint64_t s,
                  std::vector<std::size_t>& ids) {
    ids.push_back(pieces_.size());
    pieces_.push_back({q, r, s});
  }

  std::shared_ptr<const IntervalGenerator> gen_;
  std::uint64_t stage_ = 0;
  std::vector<RationalInterval> raw_;
  std::vector<LoggedRaw> raw_log_;
  std::vector<Piece> pieces_;
  std::map<Rational, std::size_t> by_left_;
};

// ---------------------------------------------------------------------------
// Builtin generators

namespace generators {

/// Explicit list; group g is emitted at stage g+1.
class Finite final : public IntervalGenerator {
 public:
  explicit Finite(std::vector<std::vector<RationalInterval>> groups) : groups_(std::move(groups)) {}
  /// One interval per stage.
  static std::shared_ptr<Finite> one_per_stage(const std::vector<RationalInterval>& ivs) {
    std::vector<std::vector<RationalInterval>> groups;
    for (const auto& iv : ivs) groups.push_back({iv});
    return std::make_shared<Finite>(std::move(groups));
  }

  std::vector<RationalInterval> emit(std::uint64_t stage) const override {
    if (stage == 0 || stage > groups_.size()) return {};
    return groups_[stage - 1];
  }
  std::optional<std::uint64_t> last_stage() const override { return groups_.size(); }
  std::string name() const override { return "finite"; }

 private:
  std::vector<std::vector<RationalInterval>> groups_;
};

/// Middle thirds removed in breadth-first order, one per stage.
class CantorComplement final : public IntervalGenerator {
 public:
  std::vector<RationalInterval> emit(std::uint64_t stage) const override {
    if (stage == 0) return {};
    unsigned level = 0;
    while ((std::uint64_t{2} << level) <= stage) ++level;
    const std::uint64_t index = stage - (std::uint64_t{1} << level);
    mpz_class three_pow;
    mpz_ui_pow_ui(three_pow.get_mpz_t(), 3, level);
    // left end: ternary digits 0/2 read from the bits of index
    mpz_class num = 0;
    for (unsigned d = 0; d < level; ++d) {
      num *= 3;
      if ((index >> (level - 1 - d)) & 1U) num += 2;
    }
    Rational a(num, three_pow);
    Rational len(mpz_class(1), three_pow);
    a.canonicalize();
    len.canonicalize();
    return {{a + len / 3, a + 2 * len / 3}};
  }
  std::string name() const override { return "cantor-middle-thirds-complement"; }
};

/// Intervals accumulating at `point`: stage t emits (the middle half of) the
/// dyadic cylinder of length t that agrees with point's first t-1 bits and
/// differs at bit t.
class AccumulateAt final : public IntervalGenerator {
 public:
  explicit AccumulateAt(Rational point, bool shrink = true)
      : point_(std::move(point)), shrink_(shrink) {
    if (point_ < 0 || point_ > 1) throw InvalidInput("accumulation point outside [0,1]");
  }

  std::vector<RationalInterval> emit(std::uint64_t stage) const override {
    if (stage == 0) return {};
    const mpz_class scale = mpz_class(1) << static_cast<mp_bitcnt_t>(stage);
    mpz_class k = floor_rational(point_ * Rational(scale)).get_num();
    if (k == scale) k -= 1;  // point = 1
    k ^= 1;                   // flip bit t
    Rational lo(k, scale), width(mpz_class(1), scale);
    lo.canonicalize();
    width.canonicalize();
    if (!shrink_) return {{lo, lo + width}};
    return {{lo + width / 4, lo + 3 * width / 4}};
  }
  std::string name() const override { return "accumulate-at"; }

 private:
  Rational point_;
  bool shrink_;
};

/// Emits its intervals at stage 1 and then nothing, without ever reporting
/// exhaustion.
class Stalling final : public IntervalGenerator {
 public:
  explicit Stalling(std::vector<RationalInterval> ivs) : ivs_(std::move(ivs)) {}
  std::vector<RationalInterval> emit(std::uint64_t stage) const override {
    return stage == 1 ? ivs_ : std::vector<RationalInterval>{};
  }
  std::string name() const override { return "stalling"; }

 private:
  std::vector<RationalInterval> ivs_;
};

/// A single interval emitted at a fixed stage.
class Delayed final : public IntervalGenerator {
 public:
  Delayed(RationalInterval iv, std::uint64_t at) : iv_(std::move(iv)), at_(at) {
    if (at_ == 0) throw InvalidInput("stages start at 1");
  }
  std::vector<RationalInterval> emit(std::uint64_t stage) const override {
    return stage == at_ ? std::vector<RationalInterval>{iv_} : std::vector<RationalInterval>{};
  }
  std::optional<std::uint64_t> last_stage() const override { return at_; }
  std::string name() const override { return "delayed"; }

 private:
  RationalInterval iv_;
  std::uint64_t at_;
};

}  // namespace generators

inline Pi01Class finite_class(const std::vector<RationalInterval>& ivs) {
  return Pi01Class(generators::Finite::one_per_stage(ivs));
}

}  // namespace vexact

#endif  // VEXACT_PI01_HPP
