#ifndef VEXACT_INTERVAL_HPP
#define VEXACT_INTERVAL_HPP

#include <algorithm>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <string>

#include "vexact/dyadic.hpp"

namespace vexact {

/// Closed interval [lo, hi] with dyadic endpoints, lo <= hi.
class DyInterval {
 public:
  DyInterval() = default;
  DyInterval(Dyadic lo, Dyadic hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
    if (hi_ < lo_) {
      throw InvalidInput("interval endpoints out of order: [" + lo_.to_string() + ", " +
                         hi_.to_string() + "]");
    }
  }
  static DyInterval point(const Dyadic& x) { return DyInterval(x, x); }

  /// Smallest interval containing all the given values.
  static DyInterval hull_of(std::initializer_list<Dyadic> values) {
    auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    return DyInterval(*mn, *mx);
  }

  const Dyadic& lo() const { return lo_; }
  const Dyadic& hi() const { return hi_; }

  Dyadic width() const { return hi_ - lo_; }
  Dyadic mid() const { return (lo_ + hi_).half(); }
  Dyadic radius() const { return width().half(); }
  /// max(|lo|, |hi|)
  Dyadic mag() const { return std::max(lo_.abs(), hi_.abs()); }
  /// min |x| over the interval
  Dyadic mig() const {
    if (lo_.sign() <= 0 && hi_.sign() >= 0) return Dyadic();
    return std::min(lo_.abs(), hi_.abs());
  }

  bool is_point() const { return lo_ == hi_; }
  bool contains(const Dyadic& x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Rational& x) const { return compare(lo_, x) <= 0 && compare(hi_, x) >= 0; }
  bool contains(const DyInterval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool subset_of(const DyInterval& o) const { return o.contains(*this); }
  bool intersects(const DyInterval& o) const { return lo_ <= o.hi_ && o.lo_ <= hi_; }
  /// Entirely strictly below / above zero.
  bool is_negative() const { return hi_.sign() < 0; }
  bool is_positive() const { return lo_.sign() > 0; }

  /// width <= 2^-bits
  bool width_at_most(std::int64_t bits) const {
    if (is_point()) return true;
    return width() <= Dyadic::pow2(-bits);
  }

  std::optional<DyInterval> intersect(const DyInterval& o) const {
    if (!intersects(o)) return std::nullopt;
    return DyInterval(std::max(lo_, o.lo_), std::min(hi_, o.hi_));
  }

  static DyInterval hull(const DyInterval& a, const DyInterval& b) {
    return DyInterval(std::min(a.lo_, b.lo_), std::max(a.hi_, b.hi_));
  }

  /// Outward rounding of both endpoints onto the 2^-bits grid.
  DyInterval round_out(std::int64_t bits) const {
    return DyInterval(lo_.round_down(bits), hi_.round_up(bits));
  }

  DyInterval widen(const Dyadic& r) const { return DyInterval(lo_ - r, hi_ + r); }

  DyInterval mul_pow2(std::int64_t k) const {
    return DyInterval(lo_.mul_pow2(k), hi_.mul_pow2(k));
  }

  DyInterval operator-() const { return DyInterval(-hi_, -lo_); }

  friend DyInterval operator+(const DyInterval& a, const DyInterval& b) {
    return DyInterval(a.lo_ + b.lo_, a.hi_ + b.hi_);
  }
  friend DyInterval operator-(const DyInterval& a, const DyInterval& b) {
    return DyInterval(a.lo_ - b.hi_, a.hi_ - b.lo_);
  }
  friend DyInterval operator*(const DyInterval& a, const DyInterval& b) {
    if (a.is_point() && b.is_point()) return point(a.lo_ * b.lo_);
    if (b.is_point()) return a.scaled(b.lo_);
    if (a.is_point()) return b.scaled(a.lo_);
    Dyadic p1 = a.lo_ * b.lo_, p2 = a.lo_ * b.hi_, p3 = a.hi_ * b.lo_, p4 = a.hi_ * b.hi_;
    return hull_of({p1, p2, p3, p4});
  }
  friend DyInterval operator+(const DyInterval& a, const Dyadic& b) {
    return DyInterval(a.lo_ + b, a.hi_ + b);
  }
  friend DyInterval operator-(const DyInterval& a, const Dyadic& b) {
    return DyInterval(a.lo_ - b, a.hi_ - b);
  }
  friend DyInterval operator*(const DyInterval& a, const Dyadic& c) { return a.scaled(c); }

  /// Exact square: nonnegative, tight when the interval straddles zero.
  DyInterval square() const {
    Dyadic a = lo_ * lo_, b = hi_ * hi_;
    if (lo_.sign() >= 0) return DyInterval(a, b);
    if (hi_.sign() <= 0) return DyInterval(b, a);
    return DyInterval(Dyadic(), std::max(a, b));
  }

  friend bool operator==(const DyInterval& a, const DyInterval& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

  std::string to_string() const {
    return "[" + lo_.to_string() + ", " + hi_.to_string() + "]";
  }
  friend std::ostream& operator<<(std::ostream& os, const DyInterval& i) {
    return os << i.to_string();
  }

 private:
  DyInterval scaled(const Dyadic& c) const {
    Dyadic a = lo_ * c, b = hi_ * c;
    return c.sign() >= 0 ? DyInterval(a, b) : DyInterval(b, a);
  }

  Dyadic lo_;
  Dyadic hi_;
};

}  // namespace vexact

#endif  // VEXACT_INTERVAL_HPP
