#ifndef VEXACT_ENCLOSURES_HPP
#define VEXACT_ENCLOSURES_HPP

// Rigorous enclosures of quotients, pi, sin, cos and square roots.
//
// Point results come out as "canonical cells": the unique closed interval
// [k 2^-p, (k+1) 2^-p] holding the value (or the exact point when the value
// is dyadic). Cells at level p+1 lie inside the cell at level p, which is what
// makes refinement monotone without any cache.

#include <algorithm>
#include <mutex>
#include <utility>

#include "vexact/interval.hpp"
#include "vexact/rational.hpp"

namespace vexact {

/// Guard bits added on top of the magnitude of a sine argument when reducing
/// it modulo 2 pi.
inline constexpr std::int64_t kReductionGuardBits = 16;

namespace detail {

inline void charge(const mpz_class& a) { ops::charge(mpz_size(a.get_mpz_t())); }

inline DyInterval cell(const mpz_class& k, std::int64_t p) {
  return DyInterval(Dyadic(k, -p), Dyadic(k + 1, -p));
}

/// Canonical cell at level p of a real given by a sequence of enclosures:
/// approx(w) must contain the value and shrink as w grows.
template <class Approx>
DyInterval cell_of(Precision p, Approx&& approx) {
  for (std::int64_t w = p.bits + 8;; w += std::max<std::int64_t>(8, w / 4)) {
    require_within_cap(w);
    DyInterval j = approx(w);
    mpz_class k = j.lo().floor_scaled(p.bits);
    Dyadic upper(k + 1, -p.bits);
    if (j.hi() <= upper) return DyInterval(Dyadic(k, -p.bits), upper);
  }
}

/// floor(q 2^bits) 2^-bits and the matching ceiling.
inline Dyadic rational_floor(const Rational& q, std::int64_t bits) {
  mpz_class n = q.get_num();
  mpz_class d = q.get_den();
  if (bits >= 0)
    mpz_mul_2exp(n.get_mpz_t(), n.get_mpz_t(), static_cast<mp_bitcnt_t>(bits));
  else
    mpz_mul_2exp(d.get_mpz_t(), d.get_mpz_t(), static_cast<mp_bitcnt_t>(-bits));
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), n.get_mpz_t(), d.get_mpz_t());
  charge(f);
  return Dyadic(f, -bits);
}
inline Dyadic rational_ceil(const Rational& q, std::int64_t bits) {
  return -rational_floor(-q, bits);
}

/// Interval / positive integer with outward rounding at 2^-bits.
inline DyInterval div_int_out(const DyInterval& x, unsigned long k, std::int64_t bits) {
  mpz_class lo = x.lo().floor_scaled(bits);
  mpz_class hi = x.hi().ceil_scaled(bits);
  mpz_fdiv_q_ui(lo.get_mpz_t(), lo.get_mpz_t(), k);
  mpz_cdiv_q_ui(hi.get_mpz_t(), hi.get_mpz_t(), k);
  charge(lo);
  return DyInterval(Dyadic(lo, -bits), Dyadic(hi, -bits));
}

}  // namespace detail

/// Enclosure of a/b of width <= 2^-p; the exact point when a/b is dyadic.
inline DyInterval div_enclosure(const Dyadic& a, const Dyadic& b, Precision p) {
  if (b.is_zero()) throw InvalidInput("division by zero");
  require_within_cap(p);
  if (a.is_zero()) return DyInterval();
  detail::charge(a.mantissa());
  if (mpz_divisible_p(a.mantissa().get_mpz_t(), b.mantissa().get_mpz_t())) {
    mpz_class q;
    mpz_divexact(q.get_mpz_t(), a.mantissa().get_mpz_t(), b.mantissa().get_mpz_t());
    return DyInterval::point(Dyadic(q, a.exponent() - b.exponent()));
  }
  std::int64_t shift = a.exponent() - b.exponent() + p.bits;
  mpz_class num = a.mantissa();
  mpz_class den = b.mantissa();
  if (shift >= 0)
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
  else
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(-shift));
  if (den < 0) {
    num = -num;
    den = -den;
  }
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  detail::charge(num);
  return detail::cell(q, p.bits);
}

/// Enclosure of a rational of width <= 2^-p (exact for dyadic rationals).
inline DyInterval enclose(const Rational& q, Precision p) {
  if (auto d = Dyadic::try_from_rational(q)) return DyInterval::point(*d);
  return DyInterval(detail::rational_floor(q, p.bits), detail::rational_ceil(q, p.bits));
}

/// Interval quotient x / y for y bounded away from zero, rounded outward at
/// 2^-bits.
inline DyInterval div_interval(const DyInterval& x, const DyInterval& y, std::int64_t bits) {
  if (y.lo().sign() <= 0 && y.hi().sign() >= 0)
    throw DomainError("interval division by an interval containing zero");
  Rational candidates[4] = {
      x.lo().to_rational() / y.lo().to_rational(), x.lo().to_rational() / y.hi().to_rational(),
      x.hi().to_rational() / y.lo().to_rational(), x.hi().to_rational() / y.hi().to_rational()};
  auto [mn, mx] = std::minmax_element(std::begin(candidates), std::end(candidates));
  return DyInterval(detail::rational_floor(*mn, bits), detail::rational_ceil(*mx, bits));
}

namespace detail {

/// atan(1/n) * 2^W = s +- e (integers).
inline std::pair<mpz_class, mpz_class> atan_inv_fixed(unsigned long n, std::int64_t W) {
  mpz_class u(1);
  mpz_mul_2exp(u.get_mpz_t(), u.get_mpz_t(), static_cast<mp_bitcnt_t>(W));
  mpz_fdiv_q_ui(u.get_mpz_t(), u.get_mpz_t(), n);
  const unsigned long n2 = n * n;
  mpz_class sum(0), term;
  unsigned long k = 0;
  unsigned long terms = 0;
  while (u != 0) {
    mpz_fdiv_q_ui(term.get_mpz_t(), u.get_mpz_t(), 2 * k + 1);
    if (k % 2 == 0)
      sum += term;
    else
      sum -= term;
    mpz_fdiv_q_ui(u.get_mpz_t(), u.get_mpz_t(), n2);
    charge(u);
    ++k;
    ++terms;
  }
  // each truncated term is off by < 3 ulps; the omitted tail is < 2 ulps
  return {sum, mpz_class(3 * terms + 2)};
}

struct PiCache {
  std::mutex mu;
  std::int64_t bits = -1;  // enclosure below has width <= 2^-bits
  DyInterval value;
};

inline PiCache& pi_cache() {
  static PiCache cache;
  return cache;
}

inline DyInterval compute_pi(std::int64_t w) {
  for (std::int64_t W = w + 32;; W += 16) {
    auto [s5, e5] = atan_inv_fixed(5, W);
    auto [s239, e239] = atan_inv_fixed(239, W);
    mpz_class centre = 16 * s5 - 4 * s239;
    mpz_class err = 16 * e5 + 4 * e239;
    DyInterval enc(Dyadic(centre - err, -W), Dyadic(centre + err, -W));
    if (enc.width_at_most(w)) return enc;
  }
}

/// pi enclosure of width <= 2^-w, Machin's formula in fixed point.
inline DyInterval pi_raw(std::int64_t w) {
  require_within_cap(w);
  PiCache& c = pi_cache();
  std::lock_guard<std::mutex> lock(c.mu);
  if (c.bits < w + 1) {
    c.value = compute_pi(std::max<std::int64_t>(w + 1, c.bits + c.bits / 2));
    c.bits = std::max<std::int64_t>(w + 1, c.bits + c.bits / 2);
  }
  return c.value.round_out(w + 3);
}

}  // namespace detail

/// Drops memoized constants so cost measurements start cold.
inline void reset_constant_caches() {
  detail::PiCache& c = detail::pi_cache();
  std::lock_guard<std::mutex> lock(c.mu);
  c.bits = -1;
  c.value = DyInterval();
}

/// pi inside a cell of width 2^-p; nested in p.
inline DyInterval pi_enclosure(Precision p) {
  require_within_cap(p);
  return detail::cell_of(p, [](std::int64_t w) { return detail::pi_raw(w); });
}

namespace detail {

struct SinCos {
  DyInterval sin;
  DyInterval cos;
};

/// Taylor series for sin and cos at a point with |m| <= 4, each enclosure of
/// width about 2^-w. Truncation is covered by the Lagrange remainder.
inline SinCos sincos_series(const Dyadic& m, std::int64_t w) {
  const std::int64_t b = w + 16;
  const DyInterval x2 = DyInterval::point(m * m).round_out(b);
  const Dyadic tiny = Dyadic::pow2(-b);

  auto run = [&](DyInterval term, unsigned long first) {
    DyInterval sum = term;
    for (unsigned long n = first;; n += 2) {
      // term_{next} = -term * x^2 / ((n+1)(n+2))
      DyInterval next = detail::div_int_out((term * x2).round_out(b), (n + 1) * (n + 2), b);
      next = -next;
      if (next.mag() <= tiny && (n + 1) * (n + 2) > 32) {
        // alternating with decreasing magnitude from here on
        return sum.widen(next.mag());
      }
      sum = sum + next;
      term = next;
    }
  };
  return {run(DyInterval::point(m), 1), run(DyInterval::point(Dyadic(1)), 0)};
}

/// x - 2 pi N for a suitable integer N, as an interval of width <= 2^-w.
inline DyInterval reduce_mod_2pi(const Dyadic& x, std::int64_t w) {
  if (x.abs() <= Dyadic(4)) return DyInterval::point(x);
  const std::int64_t mag = std::max<std::int64_t>(0, x.msb() + 1);
  const std::int64_t pw = w + mag + kReductionGuardBits;
  require_within_cap(pw);
  DyInterval pi = pi_raw(pw);
  Rational ratio = x.to_rational() / (2 * pi.mid().to_rational()) + Rational(1, 2);
  mpz_class n;
  mpz_fdiv_q(n.get_mpz_t(), ratio.get_num_mpz_t(), ratio.get_den_mpz_t());
  return (DyInterval::point(x) - pi * Dyadic(mpz_class(2 * n), 0)).round_out(pw + 2);
}

inline SinCos sincos_approx(const Dyadic& x, std::int64_t w) {
  DyInterval r = reduce_mod_2pi(x, w + 2);
  SinCos sc = sincos_series(r.mid().round_down(w + 4), w + 2);
  // both functions are 1-Lipschitz
  Dyadic slack = (r.mid() - r.mid().round_down(w + 4)) + r.radius();
  return {sc.sin.widen(slack), sc.cos.widen(slack)};
}

inline DyInterval clip_unit(const DyInterval& v) {
  return DyInterval(std::max(v.lo(), Dyadic(-1)), std::min(v.hi(), Dyadic(1)));
}

inline DyInterval sin_point(const Dyadic& x, Precision p) {
  if (x.is_zero()) return DyInterval();
  return cell_of(p, [&](std::int64_t w) { return sincos_approx(x, w).sin; });
}

inline DyInterval cos_point(const Dyadic& x, Precision p) {
  if (x.is_zero()) return DyInterval::point(Dyadic(1));
  return cell_of(p, [&](std::int64_t w) { return sincos_approx(x, w).cos; });
}

/// Whether [lo, hi] contains c*pi + 2k*pi for some integer k (c in quarters
/// of a turn, i.e. c = quarter/2). Decided exactly by refining pi.
inline bool contains_phase(const DyInterval& x, long quarter) {
  const Rational shift(quarter, 4);  // (c pi) / (2 pi) = quarter / 4
  for (std::int64_t w = 64;; w *= 2) {
    require_within_cap(w);
    DyInterval pi = pi_raw(w);
    Rational two_pi_lo = 2 * pi.lo().to_rational();
    Rational two_pi_hi = 2 * pi.hi().to_rational();
    auto bounds = [&](const Dyadic& v) {
      Rational q = v.to_rational();
      Rational a = q / two_pi_hi - shift, b = q / two_pi_lo - shift;
      if (a > b) std::swap(a, b);
      return std::pair{a, b};
    };
    auto ceil_q = [](const Rational& q) {
      mpz_class c;
      mpz_cdiv_q(c.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
      return c;
    };
    auto floor_q = [](const Rational& q) {
      mpz_class f;
      mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
      return f;
    };
    auto [alo, ahi] = bounds(x.lo());
    auto [blo, bhi] = bounds(x.hi());
    if (ceil_q(alo) != ceil_q(ahi) || floor_q(blo) != floor_q(bhi)) continue;
    return ceil_q(alo) <= floor_q(blo);
  }
}

}  // namespace detail

/// Enclosure of sin over x. Point inputs give a canonical cell (width 2^-p);
/// the result always lies in [-1, 1].
inline DyInterval sin_enclosure(const DyInterval& x, Precision p) {
  require_within_cap(p);
  if (x.is_point()) return detail::sin_point(x.lo(), p);
  if (x.width() >= Dyadic(7)) return DyInterval(Dyadic(-1), Dyadic(1));
  DyInterval out = DyInterval::hull(detail::sin_point(x.lo(), p), detail::sin_point(x.hi(), p));
  if (detail::contains_phase(x, 1)) out = DyInterval::hull(out, DyInterval::point(Dyadic(1)));
  if (detail::contains_phase(x, -1)) out = DyInterval::hull(out, DyInterval::point(Dyadic(-1)));
  return detail::clip_unit(out);
}

inline DyInterval cos_enclosure(const DyInterval& x, Precision p) {
  require_within_cap(p);
  if (x.is_point()) return detail::cos_point(x.lo(), p);
  if (x.width() >= Dyadic(7)) return DyInterval(Dyadic(-1), Dyadic(1));
  DyInterval out = DyInterval::hull(detail::cos_point(x.lo(), p), detail::cos_point(x.hi(), p));
  if (detail::contains_phase(x, 0)) out = DyInterval::hull(out, DyInterval::point(Dyadic(1)));
  if (detail::contains_phase(x, 2)) out = DyInterval::hull(out, DyInterval::point(Dyadic(-1)));
  return detail::clip_unit(out);
}

namespace detail {

/// sqrt of a nonnegative dyadic: the exact point if it is a dyadic square,
/// otherwise the canonical cell at level p.
inline DyInterval sqrt_point(const Dyadic& x, Precision p) {
  if (x.is_zero()) return DyInterval();
  mpz_class m = x.mantissa();
  std::int64_t e = x.exponent();
  if (e % 2 != 0) {
    m *= 2;
    e -= 1;
  }
  if (mpz_perfect_square_p(m.get_mpz_t())) {
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), m.get_mpz_t());
    return DyInterval::point(Dyadic(r, e / 2));
  }
  // floor(sqrt(x) 2^p) = isqrt(floor(x 2^{2p}))
  mpz_class scaled = x.floor_scaled(2 * p.bits);
  mpz_class k;
  mpz_sqrt(k.get_mpz_t(), scaled.get_mpz_t());
  charge(scaled);
  return cell(k, p.bits);
}

}  // namespace detail

inline DyInterval sqrt_enclosure(const DyInterval& x, Precision p) {
  require_within_cap(p);
  if (x.lo().sign() < 0) throw InvalidInput("square root of a negative interval " + x.to_string());
  if (x.is_point()) return detail::sqrt_point(x.lo(), p);
  return DyInterval(detail::sqrt_point(x.lo(), p).lo(), detail::sqrt_point(x.hi(), p).hi());
}

/// sqrt(pi) inside a cell of width 2^-p.
inline DyInterval sqrt_pi_enclosure(Precision p) {
  return detail::cell_of(p, [](std::int64_t w) {
    return sqrt_enclosure(detail::pi_raw(w + 2), Precision{w + 2});
  });
}

}  // namespace vexact

#endif  // VEXACT_ENCLOSURES_HPP
