#ifndef VEXACT_BAIRE1_HPP
#define VEXACT_BAIRE1_HPP

#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "vexact/comp_func.hpp"
#include "vexact/volterra.hpp"

namespace vexact {

/// slice n: x -> 2^n (F(x + 2^-n) - F(x)) with F the reflected extension of
/// f to [0,2]. Slice n evaluates F at precision p + n + 2.
inline UniformSequence derivative_sequence(const CompFunc& f) {
  CompFunc ext = reflect_extend(f);
  return UniformSequence([ext](std::size_t n, const DyInterval& x, Precision p) {
    const auto k = static_cast<std::int64_t>(n);
    const Precision inner{p.bits + k + 2};
    require_within_cap(inner);
    DyInterval ahead = ext(x + Dyadic::pow2(-k), inner);
    DyInterval here = ext(x, inner);
    return (ahead - here).mul_pow2(k).round_out(p.bits + 2);
  });
}

struct NoStabilization {
  std::size_t longest_tail = 0;  ///< length of the longest tail that did agree
};
using LimitProbe = std::variant<DyInterval, NoStabilization>;

/// Shortest tail length accepted as stabilization.
inline constexpr std::size_t kMinStableTail = 3;

/// Hull of slices n0..budget at x, for the smallest n0 keeping the hull
/// within 2^-p; NoStabilization when fewer than kMinStableTail slices agree.
inline LimitProbe limit_probe(const UniformSequence& seq, const Dyadic& x, Precision p,
                              std::size_t budget) {
  const DyInterval point = DyInterval::point(x);
  std::optional<DyInterval> hull;
  std::size_t length = 0;
  for (std::size_t n = budget + 1; n-- > 0;) {
    DyInterval v = seq(n, point, p + 2);
    DyInterval next = hull ? DyInterval::hull(*hull, v) : v;
    if (!next.width_at_most(p.bits)) break;
    hull = next;
    ++length;
  }
  if (length < std::min(kMinStableTail, budget + 1)) return NoStabilization{length};
  return *hull;
}

/// (f(x+h) + f(x-h) - 2 f(x)) / h^2
inline DyInterval second_difference(const CompFunc& f, const Dyadic& x, const Dyadic& h, Precision p) {
  if (h.is_zero()) throw InvalidInput("second difference needs h != 0");
  const Dyadic h2 = h * h;
  const std::int64_t amp = std::max<std::int64_t>(0, -h2.msb()) + 4;
  for (std::int64_t w = p.bits + amp;; w += std::max<std::int64_t>(4, w / 4)) {
    require_within_cap(w);
    const Precision wp{w};
    DyInterval num = f.eval(x + h, wp) + f.eval(x - h, wp) - f.eval(x, wp).mul_pow2(1);
    DyInterval q = num.is_point() ? div_enclosure(num.lo(), h2, p + 2)
                                  : div_interval(num, DyInterval::point(h2), p.bits + 2);
    if (q.width_at_most(p.bits)) return q;
  }
}

struct OscillationRow {
  unsigned scale = 0;  ///< j: neighbourhood radius 2^-j
  std::size_t values = 0;
  Dyadic inf;         ///< smallest certified upper endpoint seen
  Dyadic sup;         ///< largest certified lower endpoint seen
  Dyadic oscillation;  ///< max(0, sup - inf): certified lower bound
};

/// Certified value at a point, or nothing when unavailable there.
using PointValues = std::function<std::optional<DyInterval>(const Dyadic&)>;

/// For j = 1..J, samples the open 2^-j neighbourhood of x (intersected with
/// `domain`) on a grid of step 2^-(j + grid_bits) plus the probes inside it,
/// and bounds the oscillation of the values from below.
inline std::vector<OscillationRow> discontinuity_scan(const PointValues& values, const Dyadic& x,
                                                      unsigned J, unsigned grid_bits = 4,
                                                      const std::vector<Dyadic>& probes = {},
                                                      const DyInterval& domain = CompFunc::unit()) {
  std::vector<OscillationRow> rows;
  for (unsigned j = 1; j <= J; ++j) {
    const Dyadic radius = Dyadic::pow2(-static_cast<std::int64_t>(j));
    std::vector<Dyadic> pts;
    const Dyadic step = radius.mul_pow2(-static_cast<std::int64_t>(grid_bits));
    const long half = 1L << grid_bits;
    for (long i = -half + 1; i < half; ++i) pts.push_back(x + step * Dyadic(i));
    for (const Dyadic& p : probes)
      if ((p - x).abs() < radius) pts.push_back(p);
    OscillationRow row;
    row.scale = j;
    std::optional<Dyadic> inf, sup;
    for (const Dyadic& p : pts) {
      if (!domain.contains(p) || (p - x).abs() >= radius) continue;
      std::optional<DyInterval> v = values(p);
      if (!v) continue;
      ++row.values;
      if (!inf || v->hi() < *inf) inf = v->hi();
      if (!sup || v->lo() > *sup) sup = v->lo();
    }
    if (inf) {
      row.inf = *inf;
      row.sup = *sup;
      row.oscillation = std::max(Dyadic(), *sup - *inf);
    }
    rows.push_back(row);
  }
  return rows;
}

inline std::string oscillation_csv(const std::vector<OscillationRow>& rows) {
  std::ostringstream os;
  os << "j,inf,sup,oscillation\n";
  for (const auto& r : rows)
    os << r.scale << ',' << r.inf.to_fraction_string() << ',' << r.sup.to_fraction_string() << ','
       << r.oscillation.to_fraction_string() << '\n';
  return os.str();
}

/// Point values of a CompFunc; domain errors count as unavailable.
inline PointValues values_of(const CompFunc& f, Precision p) {
  return [f, p](const Dyadic& x) -> std::optional<DyInterval> {
    try {
      return f.eval(x, p);
    } catch (const DomainError&) {
      return std::nullopt;
    }
  };
}

/// Certified values of f' at stage s: only points inside emitted pieces.
inline PointValues derivative_values(const VolterraFunction& F, Precision p, std::uint64_t s) {
  return [F, p, s](const Dyadic& x) -> std::optional<DyInterval> {
    DerivativeValue d = F.f_prime_eval(x, p, s);
    if (const auto* v = std::get_if<DyInterval>(&d)) return *v;
    return std::nullopt;
  };
}

}  // namespace vexact

#endif  // VEXACT_BAIRE1_HPP
