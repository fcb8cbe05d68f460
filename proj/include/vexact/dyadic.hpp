#ifndef VEXACT_DYADIC_HPP
#define VEXACT_DYADIC_HPP

#include <gmpxx.h>

#include <cmath>
#include <compare>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>

#include "vexact/errors.hpp"
#include "vexact/precision.hpp"

namespace vexact {

using Rational = mpq_class;

/// Exact binary rational mantissa * 2^exponent.
///
/// Canonical form: the mantissa is odd, or the value is zero with exponent 0.
/// Addition, subtraction, multiplication and scaling by powers of two are
/// exact; anything else goes through the enclosure routines.
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(long value) : mant_(value) { canonicalize(); }  // NOLINT(implicit)
  Dyadic(mpz_class mantissa, std::int64_t exponent)
      : mant_(std::move(mantissa)), exp_(exponent) {
    canonicalize();
  }

  static Dyadic pow2(std::int64_t e) { return Dyadic(mpz_class(1), e); }

  /// Exact conversion; throws InvalidInput when the denominator is not a
  /// power of two.
  static Dyadic from_rational(const Rational& q) {
    auto d = try_from_rational(q);
    if (!d) throw InvalidInput("rational " + q.get_str() + " is not dyadic");
    return *d;
  }

  static std::optional<Dyadic> try_from_rational(const Rational& q) {
    const mpz_class& den = q.get_den();
    if (mpz_popcount(den.get_mpz_t()) != 1) return std::nullopt;
    auto shift = static_cast<std::int64_t>(mpz_scan1(den.get_mpz_t(), 0));
    return Dyadic(q.get_num(), -shift);
  }

  const mpz_class& mantissa() const { return mant_; }
  std::int64_t exponent() const { return exp_; }

  bool is_zero() const { return mant_ == 0; }
  int sign() const { return sgn(mant_); }

  /// floor(log2 |x|); undefined for zero (returns INT64_MIN).
  std::int64_t msb() const {
    if (is_zero()) return INT64_MIN;
    return exp_ + static_cast<std::int64_t>(mpz_sizeinbase(mant_.get_mpz_t(), 2)) - 1;
  }

  Dyadic operator-() const { return Dyadic(-mant_, exp_, Canonical{}); }
  Dyadic abs() const { return sign() < 0 ? -*this : *this; }

  /// x * 2^k, exact.
  Dyadic mul_pow2(std::int64_t k) const {
    if (is_zero()) return {};
    return Dyadic(mant_, exp_ + k, Canonical{});
  }
  Dyadic half() const { return mul_pow2(-1); }

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    ops::charge(limbs(a) + limbs(b));
    if (a.exp_ == b.exp_) return Dyadic(a.mant_ + b.mant_, a.exp_);
    const Dyadic& lo = a.exp_ < b.exp_ ? a : b;
    const Dyadic& hi = a.exp_ < b.exp_ ? b : a;
    mpz_class shifted;
    mpz_mul_2exp(shifted.get_mpz_t(), hi.mant_.get_mpz_t(),
                 static_cast<mp_bitcnt_t>(hi.exp_ - lo.exp_));
    return Dyadic(shifted + lo.mant_, lo.exp_);
  }
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b) {
    if (a.is_zero() || b.is_zero()) return {};
    ops::charge(limbs(a) * limbs(b));
    // product of odd mantissas is odd
    return Dyadic(a.mant_ * b.mant_, a.exp_ + b.exp_, Canonical{});
  }
  Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
  Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }
  Dyadic& operator*=(const Dyadic& o) { return *this = *this * o; }

  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
    int c = compare(a, b);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.exp_ == b.exp_ && a.mant_ == b.mant_;
  }

  /// floor(x * 2^bits) and ceil(x * 2^bits).
  mpz_class floor_scaled(std::int64_t bits) const { return scaled(bits, false); }
  mpz_class ceil_scaled(std::int64_t bits) const { return scaled(bits, true); }

  /// Largest multiple of 2^-bits that is <= x (resp. smallest >=).
  Dyadic round_down(std::int64_t bits) const {
    if (is_zero() || exp_ >= -bits) return *this;
    return Dyadic(floor_scaled(bits), -bits);
  }
  Dyadic round_up(std::int64_t bits) const {
    if (is_zero() || exp_ >= -bits) return *this;
    return Dyadic(ceil_scaled(bits), -bits);
  }

  Rational to_rational() const {
    Rational q;
    if (exp_ >= 0) {
      mpz_class n;
      mpz_mul_2exp(n.get_mpz_t(), mant_.get_mpz_t(), static_cast<mp_bitcnt_t>(exp_));
      q = Rational(n);
    } else {
      mpz_class d(1);
      mpz_mul_2exp(d.get_mpz_t(), d.get_mpz_t(), static_cast<mp_bitcnt_t>(-exp_));
      q = Rational(mant_, d);
      q.canonicalize();
    }
    return q;
  }

  /// Lossy; for diagnostics and plotting only.
  double to_double() const {
    long e = 0;
    double m = mpz_get_d_2exp(&e, mant_.get_mpz_t());
    return std::ldexp(m, static_cast<int>(e + exp_));
  }

  /// "m*2^e" form, parseable by parse_rational.
  std::string to_string() const {
    if (exp_ == 0) return mant_.get_str();
    return mant_.get_str() + "*2^" + std::to_string(exp_);
  }

  /// "num/den" form with den a power of two.
  std::string to_fraction_string() const {
    Rational q = to_rational();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Dyadic& d) {
    return os << d.to_string();
  }

 private:
  struct Canonical {};
  Dyadic(mpz_class m, std::int64_t e, Canonical) : mant_(std::move(m)), exp_(e) {}

  static std::uint64_t limbs(const Dyadic& d) { return mpz_size(d.mant_.get_mpz_t()); }

  void canonicalize() {
    if (mant_ == 0) {
      exp_ = 0;
      return;
    }
    auto tz = mpz_scan1(mant_.get_mpz_t(), 0);
    if (tz) {
      mpz_fdiv_q_2exp(mant_.get_mpz_t(), mant_.get_mpz_t(), tz);
      exp_ += static_cast<std::int64_t>(tz);
    }
  }

  static int compare(const Dyadic& a, const Dyadic& b) {
    int sa = a.sign(), sb = b.sign();
    if (sa != sb) return sa < sb ? -1 : 1;
    if (sa == 0) return 0;
    // same sign: compare magnitudes via msb first
    std::int64_t ma = a.msb(), mb = b.msb();
    if (ma != mb) return (ma < mb ? -1 : 1) * sa;
    if (a.exp_ == b.exp_) return cmp(a.mant_, b.mant_);
    const bool a_coarse = a.exp_ > b.exp_;
    const Dyadic& coarse = a_coarse ? a : b;
    const Dyadic& fine = a_coarse ? b : a;
    mpz_class shifted;
    mpz_mul_2exp(shifted.get_mpz_t(), coarse.mant_.get_mpz_t(),
                 static_cast<mp_bitcnt_t>(coarse.exp_ - fine.exp_));
    int c = cmp(shifted, fine.mant_);
    return a_coarse ? c : -c;
  }

  mpz_class scaled(std::int64_t bits, bool up) const {
    mpz_class out;
    std::int64_t shift = exp_ + bits;
    if (shift >= 0) {
      mpz_mul_2exp(out.get_mpz_t(), mant_.get_mpz_t(), static_cast<mp_bitcnt_t>(shift));
    } else if (up) {
      mpz_cdiv_q_2exp(out.get_mpz_t(), mant_.get_mpz_t(), static_cast<mp_bitcnt_t>(-shift));
    } else {
      mpz_fdiv_q_2exp(out.get_mpz_t(), mant_.get_mpz_t(), static_cast<mp_bitcnt_t>(-shift));
    }
    return out;
  }

  mpz_class mant_{0};
  std::int64_t exp_ = 0;
};

/// Exact comparisons between dyadics and general rationals.
inline int compare(const Dyadic& d, const Rational& q) { return cmp(d.to_rational(), q); }

}  // namespace vexact

#endif  // VEXACT_DYADIC_HPP
