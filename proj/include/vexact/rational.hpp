#ifndef VEXACT_RATIONAL_HPP
#define VEXACT_RATIONAL_HPP

#include <cctype>
#include <string>
#include <string_view>

#include "vexact/dyadic.hpp"
#include "vexact/errors.hpp"

namespace vexact {

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

inline bool signed_digits(std::string_view s) {
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) s.remove_prefix(1);
  return all_digits(s);
}

inline mpz_class parse_integer(std::string_view s) {
  if (!signed_digits(s)) throw InvalidInput("malformed integer '" + std::string(s) + "'");
  if (s.front() == '+') s.remove_prefix(1);
  return mpz_class(std::string(s), 10);
}

}  // namespace detail

/// Parses "a/b", decimal strings ("-0.125", "3") and "m*2^e" exactly.
/// Anything else is rejected with InvalidInput.
inline Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw InvalidInput("empty rational literal");

  if (auto star = s.find("*2^"); star != std::string_view::npos) {
    mpz_class m = detail::parse_integer(s.substr(0, star));
    mpz_class e = detail::parse_integer(s.substr(star + 3));
    if (!e.fits_slong_p()) throw InvalidInput("exponent out of range in '" + std::string(s) + "'");
    return Dyadic(m, e.get_si()).to_rational();
  }
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    mpz_class num = detail::parse_integer(s.substr(0, slash));
    std::string_view den_text = s.substr(slash + 1);
    if (!detail::all_digits(den_text))
      throw InvalidInput("malformed denominator in '" + std::string(s) + "'");
    mpz_class den(std::string(den_text), 10);
    if (den == 0) throw InvalidInput("zero denominator in '" + std::string(s) + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view whole = s.substr(0, dot);
    std::string_view frac = s.substr(dot + 1);
    bool negative = !whole.empty() && whole.front() == '-';
    if (!whole.empty() && (whole.front() == '-' || whole.front() == '+')) whole.remove_prefix(1);
    if ((!whole.empty() && !detail::all_digits(whole)) || (!frac.empty() && !detail::all_digits(frac)) ||
        (whole.empty() && frac.empty())) {
      throw InvalidInput("malformed decimal '" + std::string(s) + "'");
    }
    mpz_class num(std::string(whole.empty() ? "0" : whole) + std::string(frac), 10);
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, frac.size());
    Rational q(negative ? mpz_class(-num) : num, den);
    q.canonicalize();
    return q;
  }
  return Rational(detail::parse_integer(s));
}

/// "num/den" with den >= 1.
inline std::string to_fraction_string(Rational q) {
  q.canonicalize();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

/// Endpoint pair of a rational interval; openness is up to the user.
struct RationalInterval {
  Rational lo;
  Rational hi;

  bool empty() const { return lo >= hi; }
  friend bool operator==(const RationalInterval& a, const RationalInterval& b) {
    return a.lo == b.lo && a.hi == b.hi;
  }
};

inline Rational floor_rational(const Rational& q) {
  mpz_class f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return Rational(f);
}

}  // namespace vexact

#endif  // VEXACT_RATIONAL_HPP
