#ifndef VEXACT_VOLTERRA_HPP
#define VEXACT_VOLTERRA_HPP

#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <variant>
#include <vector>

#include "vexact/comp_func.hpp"
#include "vexact/pi01.hpp"

namespace vexact {

inline constexpr std::uint64_t kDefaultStepBudget = 1'000'000;

namespace detail {

/// Bits needed to represent 1/x for x > 0 (0 when x >= 1).
inline std::int64_t inverse_bits(const Dyadic& x) {
  return x.sign() > 0 ? std::max<std::int64_t>(0, -x.msb()) : 0;
}

inline std::int64_t inverse_bits(const Rational& q) {
  if (q <= 0) return 0;
  auto nb = static_cast<std::int64_t>(mpz_sizeinbase(q.get_num_mpz_t(), 2));
  auto db = static_cast<std::int64_t>(mpz_sizeinbase(q.get_den_mpz_t(), 2));
  return std::max<std::int64_t>(0, db - nb + 1);
}

/// sin/cos of a narrow interval: point evaluation at the midpoint widened by
/// the radius. Wide intervals fall back to the exact range enclosure.
inline DyInterval narrow_sin(const DyInterval& u, std::int64_t bits) {
  if (!u.width_at_most(bits - 2)) return sin_enclosure(u, Precision{bits});
  return clip_unit(sin_enclosure(DyInterval::point(u.mid()), Precision{bits}).widen(u.radius()));
}
inline DyInterval narrow_cos(const DyInterval& u, std::int64_t bits) {
  if (!u.width_at_most(bits - 2)) return cos_enclosure(u, Precision{bits});
  return clip_unit(cos_enclosure(DyInterval::point(u.mid()), Precision{bits}).widen(u.radius()));
}

/// h(x) = x^2 sin(1/x^2), h(0) = 0.
inline DyInterval h_ext(const DyInterval& x, Precision p) {
  if (x.lo().sign() <= 0) {
    Dyadic c = x.hi() * x.hi();
    return DyInterval(-c, c);
  }
  return refine(x, p, [&](std::int64_t w) {
    const std::int64_t b = w + 4;
    DyInterval u = div_interval(DyInterval::point(Dyadic(1)), x.square(), b);
    return (x.square() * narrow_sin(u, b)).round_out(w + 2);
  });
}

/// h'(x) = 2x sin(1/x^2) - (2/x) cos(1/x^2), h'(0) = 0.
inline DyInterval h_prime_ext(const DyInterval& x, Precision p) {
  if (x == DyInterval()) return DyInterval();
  if (x.lo().sign() <= 0) throw DomainError("h' is unbounded on intervals reaching 0");
  return refine(x, p, [&](std::int64_t w) {
    const std::int64_t b = w + 4 + inverse_bits(x.lo());
    const DyInterval one = DyInterval::point(Dyadic(1));
    DyInterval u = div_interval(one, x.square(), b);
    DyInterval inv = div_interval(one, x, b);
    DyInterval v = (x * narrow_sin(u, b)).mul_pow2(1) - (inv * narrow_cos(u, b)).mul_pow2(1);
    return v.round_out(w + 2);
  });
}

/// Sign of h' at a dyadic point other than a root.
inline int h_prime_sign(const Dyadic& x) {
  for (std::int64_t w = 8;; w *= 2) {
    require_within_cap(w);
    DyInterval v = h_prime_ext(DyInterval::point(x), Precision{w});
    if (v.is_positive()) return 1;
    if (v.is_negative()) return -1;
  }
}

/// Memoized certified bisection for the root of h' in [15/32, 1/2]. On this
/// bracket u = 1/x^2 stays in (pi, 3 pi / 2), where h' = 0 means tan u = u
/// and tan u - u is increasing, so the root is unique.
class RootBracket {
 public:
  RootBracket() : lo_(Dyadic(15, -5)), hi_(Dyadic(1, -1)) {}

  DyInterval operator()(Precision p) {
    require_within_cap(p);
    std::lock_guard lock(mu_);
    if (!checked_) {
      if (h_prime_sign(lo_) >= 0 || h_prime_sign(hi_) <= 0)
        throw Error("no certified sign change of h' on the root bracket");
      checked_ = true;
    }
    const Dyadic target = Dyadic::pow2(-p.bits);
    while (hi_ - lo_ > target) {
      Dyadic m = (lo_ + hi_).half();
      (h_prime_sign(m) < 0 ? lo_ : hi_) = m;
    }
    return DyInterval(lo_, hi_);
  }

 private:
  std::mutex mu_;
  bool checked_ = false;
  Dyadic lo_;
  Dyadic hi_;
};

}  // namespace detail

/// h, g, their derivatives and the root x0 they are glued at.
struct VolterraIngredients {
  CompReal x0;
  CompReal one_minus_x0;
  CompReal h_at_x0;
  CompFunc h;
  CompFunc h_prime;
  CompFunc g;
  CompFunc g_prime;
};

/// Independent ingredient set with its own root cache.
inline std::shared_ptr<const VolterraIngredients> make_ingredients() {
  auto bracket = std::make_shared<detail::RootBracket>();
  CompReal x0([bracket](Precision p) { return (*bracket)(p); });
  CompReal one_minus_x0(
      [x0](Precision p) { return DyInterval::point(Dyadic(1)) - x0(p); });
  CompFunc h(detail::h_ext);
  CompFunc h_prime(detail::h_prime_ext);
  CompReal h_at_x0([x0](Precision p) {
    for (std::int64_t w = p.bits + 4;; w += std::max<std::int64_t>(4, w / 4)) {
      require_within_cap(w);
      DyInterval v = detail::h_ext(x0(Precision{w}), Precision{w});
      if (v.width_at_most(p.bits)) return v;
    }
  });
  CompFunc mirror([](const DyInterval& x, Precision) { return DyInterval::point(Dyadic(1)) - x; });

  CompFunc g = piecewise({x0, one_minus_x0}, {h, constant(h_at_x0), compose(h, mirror)});
  CompFunc g_prime = piecewise({x0, one_minus_x0},
                               {h_prime, constant(Dyadic()), scale(Dyadic(-1), compose(h_prime, mirror))});
  return std::make_shared<const VolterraIngredients>(
      VolterraIngredients{x0, one_minus_x0, h_at_x0, h, h_prime, g, g_prime});
}

inline const std::shared_ptr<const VolterraIngredients>& default_ingredients() {
  static const std::shared_ptr<const VolterraIngredients> ing = make_ingredients();
  return ing;
}

/// Enclosure of width <= 2^-p of the largest root of h' in (0, 1/2].
inline DyInterval find_x0(Precision p) { return default_ingredients()->x0(p); }

inline DyInterval g_prime_eval(const Dyadic& z, Precision p) {
  return default_ingredients()->g_prime.eval(z, p);
}

/// g' at a rational offset, through shrinking dyadic enclosures of z.
inline DyInterval g_prime_eval(const CompFunc& g_prime, const Rational& z, Precision p) {
  if (auto d = Dyadic::try_from_rational(z)) return g_prime.eval(*d, p);
  for (std::int64_t w = p.bits + 8 + 3 * detail::inverse_bits(z);; w += std::max<std::int64_t>(8, w / 2)) {
    require_within_cap(w);
    try {
      auto zi = enclose(z, Precision{w}).intersect(CompFunc::unit());
      DyInterval v = g_prime(*zi, p);
      if (v.width_at_most(p.bits)) return v;
    } catch (const DomainError&) {
      // enclosure still reaches 0
    }
  }
}

inline DyInterval g_prime_eval(const Rational& z, Precision p) {
  return g_prime_eval(default_ingredients()->g_prime, z, p);
}

enum class Schedule { ByIndex, ByStage };

/// f'(x) = 0 if x is in V; not certifiable at a finite stage.
struct ConsistentZero {
  std::uint64_t stage = 0;
};
using DerivativeValue = std::variant<DyInterval, ConsistentZero>;

struct QuotientReport {
  std::uint64_t stage = 0;
  unsigned m = 0;
  std::size_t samples = 0;          ///< all certified samples
  std::size_t samples_in_tail = 0;  ///< samples inside pieces with weight exponent > m
  std::size_t tail_pieces = 0;
  std::size_t violations = 0;
  Rational bound_lo;     ///< certified lower bound of 1/(2^m (1 - x0))
  Rational worst_ratio;  ///< largest certified upper bound of |tail(y)/(y-x)|
  std::optional<Rational> worst_y;
};

struct Witness {
  std::size_t piece = 0;
  unsigned k = 0;
  bool mirrored = false;  ///< from the family near the right end of the bump
  Dyadic y;
  DyInterval fprime;
};
struct NotFoundAtStage {
  std::uint64_t stage = 0;
};
using WitnessResult = std::variant<Witness, NotFoundAtStage>;

/// f = sum_n w_n (r_n - q_n) g((x - q_n)/(r_n - q_n)) over the pieces of a
/// Pi01Class, with w_n = 2^-n (ByIndex) or 2^-t(n) (ByStage).
///
/// Copies share the underlying class; stage advancement is serialized.
class VolterraFunction {
 public:
  VolterraFunction(Pi01Class cls, Schedule schedule, std::uint64_t budget = kDefaultStepBudget,
                   std::shared_ptr<const VolterraIngredients> ing = default_ingredients())
      : st_(std::make_shared<Shared>(std::move(cls))),
        schedule_(schedule),
        budget_(budget),
        ing_(std::move(ing)) {}

  Schedule schedule() const { return schedule_; }
  std::uint64_t budget() const { return budget_; }
  const VolterraIngredients& ingredients() const { return *ing_; }

  /// Copy of the class in its current state.
  Pi01Class snapshot() const {
    std::lock_guard lock(st_->mu);
    return st_->cls;
  }

  std::int64_t weight_exponent(std::size_t index, const Piece& p) const {
    return schedule_ == Schedule::ByIndex ? static_cast<std::int64_t>(index)
                                          : static_cast<std::int64_t>(p.stage);
  }

  /// f_n on the offsets [zlo, zhi] of piece n (a point when zlo == zhi).
  DyInterval bump(const Piece& piece, std::int64_t exponent, const Rational& zlo,
                  const Rational& zhi, Precision p) const {
    const Rational width = piece.width();
    const bool point = zlo == zhi;
    const std::int64_t extra =
        std::max(detail::inverse_bits(zlo), detail::inverse_bits(Rational(1) - zhi));
    auto at = [&](std::int64_t w) {
      const std::int64_t b = w + 4 + extra;
      DyInterval z = point ? enclose(zlo, Precision{b})
                           : DyInterval(detail::rational_floor(zlo, b), detail::rational_ceil(zhi, b));
      z = *z.intersect(CompFunc::unit());
      DyInterval gz = ing_->g(z, Precision{w + 2});
      return (gz * enclose(width, Precision{w + 4})).mul_pow2(-exponent).round_out(w + 2);
    };
    if (!point) return at(p.bits + 2);
    for (std::int64_t w = p.bits + 2;; w += std::max<std::int64_t>(4, w / 4)) {
      require_within_cap(w);
      DyInterval v = at(w);
      if (v.width_at_most(p.bits)) return v;
    }
  }

  DyInterval f_eval(const Dyadic& x, Precision p) const { return f_eval(DyInterval::point(x), p); }

  /// Enclosure of f over x; width <= 2^-p on points.
  DyInterval f_eval(const DyInterval& x, Precision p) const {
    if (!CompFunc::unit().contains(x)) throw DomainError("f is defined on [0,1]");
    require_within_cap(p);
    Selection sel = select(x, p);
    const Rational xlo = x.lo().to_rational(), xhi = x.hi().to_rational();
    std::optional<DyInterval> out;
    bool inside_one = false;
    for (const auto& [index, piece] : sel.pieces) {
      Rational lo = std::max(xlo, piece.q), hi = std::min(xhi, piece.r);
      if (lo > hi) continue;
      if (piece.q <= xlo && xhi <= piece.r) inside_one = true;
      DyInterval v = bump(piece, weight_exponent(index, piece), (lo - piece.q) / piece.width(),
                          (hi - piece.q) / piece.width(), p + 1);
      out = out ? DyInterval::hull(*out, v) : v;
    }
    DyInterval v = out ? *out : DyInterval();
    if (!inside_one) v = DyInterval::hull(v, DyInterval());
    if (sel.tail_exponent) v = v.widen(Dyadic::pow2(-*sel.tail_exponent));
    return v;
  }

  CompFunc as_comp_func() const {
    VolterraFunction self = *this;
    return CompFunc([self](const DyInterval& x, Precision p) { return self.f_eval(x, p); });
  }

  /// f'(x): certified inside emitted pieces, ConsistentZero elsewhere.
  DerivativeValue f_prime_eval(const Dyadic& x, Precision p, std::uint64_t s) const {
    if (!CompFunc::unit().contains(x)) throw DomainError("f' is defined on [0,1]");
    std::int64_t exponent = 0;
    Rational z;
    {
      std::lock_guard lock(st_->mu);
      MembershipVerdict mv = st_->cls.membership(x.to_rational(), s);
      const InU* in = std::get_if<InU>(&mv);
      if (!in) return ConsistentZero{s};
      exponent = weight_exponent(in->piece, st_->cls.pieces()[in->piece]);
      z = in->offset;
    }
    return g_prime_eval(ing_->g_prime, z, p).mul_pow2(-exponent);
  }

  /// Certifies |T_m(y) / (y - x)| <= 1/(2^m (1 - x0)) where T_m is the sum of
  /// the bumps with weight exponent > m, on deterministic samples: `samples`
  /// points spread over those bumps (or over [0,1] when there are none) plus
  /// points approaching x geometrically. x must lie outside every emitted
  /// interior at stage s.
  QuotientReport quotient_bound_check(const Rational& x, unsigned m, std::size_t samples,
                                      std::uint64_t s) const {
    std::vector<std::pair<std::size_t, Piece>> tail;
    {
      std::lock_guard lock(st_->mu);
      st_->cls.advance_to(s);
      const auto& ps = st_->cls.pieces();
      for (std::size_t i = 0; i < ps.size(); ++i) {
        if (ps[i].stage > s) continue;
        if (ps[i].interior_contains(x))
          throw InvalidInput("quotient bound needs x outside the emitted pieces");
        if (weight_exponent(i, ps[i]) > static_cast<std::int64_t>(m)) tail.emplace_back(i, ps[i]);
      }
    }
    std::sort(tail.begin(), tail.end(),
              [](const auto& a, const auto& b) { return a.second.q < b.second.q; });

    QuotientReport rep;
    rep.stage = s;
    rep.m = m;
    rep.tail_pieces = tail.size();
    const Rational x0_lo = ing_->x0(Precision{64}).lo().to_rational();
    rep.bound_lo = Rational(1) / (Rational(mpz_class(1) << m) * (Rational(1) - x0_lo));

    std::vector<Rational> ys;
    if (!tail.empty()) {
      const std::size_t per = std::max<std::size_t>(2, (samples + tail.size() - 1) / tail.size());
      for (const auto& [index, piece] : tail) {
        for (std::size_t i = 1; i <= per; ++i)
          ys.push_back(piece.q + piece.width() * Rational(i) / Rational(per + 1));
        // geometric approach to both ends
        for (unsigned j = 2; j <= 24; j += 2) {
          Rational eps = piece.width() / Rational(mpz_class(1) << j);
          ys.push_back(piece.q + eps);
          ys.push_back(piece.r - eps);
        }
      }
    } else {
      for (std::size_t i = 1; i <= samples; ++i) ys.push_back(Rational(i) / Rational(samples + 1));
    }
    for (unsigned j = 1; j <= 48; ++j) {
      Rational eps(mpz_class(3), mpz_class(1) << (j + 2));
      if (x + eps <= 1) ys.push_back(x + eps);
      if (x - eps >= 0) ys.push_back(x - eps);
    }

    for (const Rational& y : ys) {
      if (y == x) continue;
      ++rep.samples;
      auto it = std::upper_bound(tail.begin(), tail.end(), y,
                                 [](const Rational& v, const auto& e) { return v < e.second.q; });
      if (it == tail.begin()) continue;
      const auto& [index, piece] = *std::prev(it);
      if (!(piece.q < y && y < piece.r)) continue;
      ++rep.samples_in_tail;
      Rational dist = abs(y - x);
      Rational z = (y - piece.q) / piece.width();
      Precision prec{64 + detail::inverse_bits(dist)};
      DyInterval v = bump(piece, weight_exponent(index, piece), z, z, prec);
      Rational ratio = v.mag().to_rational() / dist;
      if (ratio > rep.bound_lo) ++rep.violations;
      if (ratio > rep.worst_ratio) {
        rep.worst_ratio = ratio;
        rep.worst_y = y;
      }
    }
    return rep;
  }

  /// Looks for y in the open interval I with certified f'(y) <= -target.
  ///
  /// Emitted pieces are scanned in emission order. Inside a piece with weight
  /// 2^-e the offsets 1/(2^k sqrt(pi)) give g' = -2^(k+1) sqrt(pi), and the
  /// mirrored offsets 1 - 1/sqrt((4^k+1) pi) give g' = -2 sqrt((4^k+1) pi);
  /// the smallest k >= max(1, e) landing in I with a large enough value wins.
  WitnessResult oscillation_witness(const RationalInterval& I, std::uint64_t s,
                                    const Rational& target, Precision p = Precision{40}) const {
    if (!(I.lo < I.hi) || I.lo < 0 || I.hi > 1) throw InvalidInput("witness interval must be inside [0,1]");
    if (target <= 0) throw InvalidInput("witness target must be positive");
    std::vector<std::pair<std::size_t, Piece>> cands;
    {
      std::lock_guard lock(st_->mu);
      st_->cls.advance_to(s);
      const auto& ps = st_->cls.pieces();
      for (std::size_t i = 0; i < ps.size(); ++i)
        if (ps[i].stage <= s && ps[i].q < I.hi && I.lo < ps[i].r) cands.emplace_back(i, ps[i]);
    }
    const double log_target = std::log2(target.get_d());
    const double log_sqrt_pi = 0.5 * std::log2(M_PI);
    for (const auto& [index, piece] : cands) {
      const std::int64_t e = weight_exponent(index, piece);
      const Rational width = piece.width();
      const double zl = Rational((std::max(I.lo, piece.q) - piece.q) / width).get_d();
      const double zr = Rational((std::min(I.hi, piece.r) - piece.q) / width).get_d();
      bool left_open = true, right_open = true;
      for (std::int64_t k = std::max<std::int64_t>(1, e); left_open || right_open; ++k) {
        const double zk = std::exp2(-static_cast<double>(k) - log_sqrt_pi);
        const double tk = 1.0 / std::sqrt((std::exp2(2.0 * static_cast<double>(k)) + 1.0) * M_PI);
        // both families drift out of range monotonically in k
        if (zk <= zl * (1 - 1e-9)) left_open = false;
        if (1.0 - tk >= zr + (1.0 - zr) * 1e-9 && zr < 1.0) right_open = false;
        if (zr >= 1.0 && 1.0 - tk >= 1.0) right_open = false;
        const bool strong = static_cast<double>(k + 1 - e) + log_sqrt_pi >= log_target + 1e-9;
        if (!strong) continue;
        const std::int64_t P =
            p.bits + 4 * k + 16 + detail::inverse_bits(width) + std::max<std::int64_t>(0, e);
        if (P > precision_cap()) break;
        for (bool mirrored : {false, true}) {
          if (mirrored ? !right_open : !left_open) continue;
          if (!mirrored && zk >= zr * (1 + 1e-9) + 1e-300) continue;
          if (mirrored && 1.0 - tk <= zl) continue;
          Dyadic z = witness_offset(k, mirrored, P);
          Rational yr = piece.q + z.to_rational() * width;
          Dyadic y = detail::rational_floor(yr, P);
          Rational yq = y.to_rational();
          if (!(I.lo < yq && yq < I.hi && piece.q < yq && yq < piece.r)) continue;
          DerivativeValue d = f_prime_eval(y, p, s);
          const DyInterval* enc = std::get_if<DyInterval>(&d);
          if (enc && compare(enc->hi(), -target) <= 0)
            return Witness{index, static_cast<unsigned>(k), mirrored, y, *enc};
        }
      }
    }
    return NotFoundAtStage{s};
  }

 private:
  struct Shared {
    explicit Shared(Pi01Class c) : cls(std::move(c)) {}
    std::mutex mu;
    Pi01Class cls;
  };

  struct Selection {
    std::vector<std::pair<std::size_t, Piece>> pieces;
    std::optional<std::int64_t> tail_exponent;  ///< bound 2^-e on the excluded bumps
  };

  /// Pieces that count at precision p and meet x, plus the tail bound.
  /// Every bump is at most w_n (r_n - q_n) max|g| < w_n / 4.
  Selection select(const DyInterval& x, Precision p) const {
    Selection sel;
    const Rational xlo = x.lo().to_rational(), xhi = x.hi().to_rational();
    std::lock_guard lock(st_->mu);
    Pi01Class& cls = st_->cls;
    std::function<bool(std::size_t, const Piece&)> counts;
    if (schedule_ == Schedule::ByIndex) {
      const std::size_t n = static_cast<std::size_t>(p.bits) + 1;
      cls.ensure_pieces(n, budget_);
      if (!(cls.exhausted() && cls.pieces().size() <= n))
        sel.tail_exponent = static_cast<std::int64_t>(n) + 2;
      counts = [n](std::size_t i, const Piece&) { return i < n; };
    } else {
      const std::uint64_t t = static_cast<std::uint64_t>(p.bits) + 1;
      cls.advance_to(t);
      auto last = cls.generator().last_stage();
      bool later = !last || *last > t;
      if (later) sel.tail_exponent = static_cast<std::int64_t>(t) + 3;
      counts = [t](std::size_t, const Piece& pc) { return pc.stage <= t; };
    }
    if (x.is_point()) {
      if (auto id = cls.locate(xlo, UINT64_MAX); id && counts(*id, cls.pieces()[*id]))
        sel.pieces.emplace_back(*id, cls.pieces()[*id]);
      return sel;
    }
    const auto& ps = cls.pieces();
    for (std::size_t i = 0; i < ps.size(); ++i)
      if (counts(i, ps[i]) && ps[i].q <= xhi && xlo <= ps[i].r) sel.pieces.emplace_back(i, ps[i]);
    return sel;
  }

  static Dyadic witness_offset(std::int64_t k, bool mirrored, std::int64_t P) {
    const DyInterval one = DyInterval::point(Dyadic(1));
    if (!mirrored) {
      DyInterval zk = div_interval(one, sqrt_pi_enclosure(Precision{P + 2}).mul_pow2(k), P + 2);
      return zk.mid();
    }
    mpz_class c = (mpz_class(1) << static_cast<mp_bitcnt_t>(2 * k)) + 1;
    DyInterval pi = pi_enclosure(Precision{P + 2 * k + 8});
    DyInterval root = sqrt_enclosure(pi * Dyadic(c, 0), Precision{P + 4});
    DyInterval tk = div_interval(one, root, P + 2);
    return (one - tk).mid();
  }

  std::shared_ptr<Shared> st_;
  Schedule schedule_;
  std::uint64_t budget_;
  std::shared_ptr<const VolterraIngredients> ing_;
};

}  // namespace vexact

#endif  // VEXACT_VOLTERRA_HPP
