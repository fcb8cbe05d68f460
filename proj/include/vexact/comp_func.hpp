#ifndef VEXACT_COMP_FUNC_HPP
#define VEXACT_COMP_FUNC_HPP

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vexact/enclosures.hpp"

namespace vexact {

/// A computable real: approx(p) contains the value and has width <= 2^-p.
class CompReal {
 public:
  using Approx = std::function<DyInterval(Precision)>;

  CompReal() : CompReal(Dyadic()) {}
  explicit CompReal(Approx approx) : approx_(std::make_shared<Approx>(std::move(approx))) {}
  explicit CompReal(const Dyadic& exact)
      : CompReal([exact](Precision) { return DyInterval::point(exact); }) {}

  DyInterval operator()(Precision p) const {
    require_within_cap(p);
    return (*approx_)(p);
  }

 private:
  std::shared_ptr<const Approx> approx_;
};

/// A computable function as a certified interval extension.
///
/// extension(I, p) must contain f(x) for every x in I, have width <= 2^-p
/// when I is a point, and grow (up to 2^-p padding) with I. The callable has
/// to be pure and reentrant.
class CompFunc {
 public:
  using Extension = std::function<DyInterval(const DyInterval&, Precision)>;

  CompFunc(Extension ext, DyInterval domain = unit(), Dyadic lipschitz_hint = Dyadic())
      : ext_(std::make_shared<Extension>(std::move(ext))),
        domain_(std::move(domain)),
        lipschitz_hint_(std::move(lipschitz_hint)) {}

  static DyInterval unit() { return DyInterval(Dyadic(0), Dyadic(1)); }

  DyInterval operator()(const DyInterval& x, Precision p) const {
    if (!domain_.contains(x))
      throw DomainError("query " + x.to_string() + " outside domain " + domain_.to_string());
    require_within_cap(p);
    return (*ext_)(x, p);
  }
  DyInterval eval(const Dyadic& x, Precision p) const { return (*this)(DyInterval::point(x), p); }

  const DyInterval& domain() const { return domain_; }
  /// Advisory only; zero means unknown.
  const Dyadic& lipschitz_hint() const { return lipschitz_hint_; }

 private:
  std::shared_ptr<const Extension> ext_;
  DyInterval domain_;
  Dyadic lipschitz_hint_;
};

inline DyInterval eval(const CompFunc& f, const DyInterval& x, Precision p) { return f(x, p); }
inline DyInterval eval(const CompFunc& f, const Dyadic& x, Precision p) { return f.eval(x, p); }

namespace detail {

/// Runs at(w) with growing working precision until a point query meets the
/// 2^-p width target. Non-point queries get a single pass.
template <class At>
DyInterval refine(const DyInterval& x, Precision p, At&& at) {
  if (!x.is_point()) return at(p.bits + 2);
  for (std::int64_t w = p.bits + 2;; w += std::max<std::int64_t>(4, w / 4)) {
    require_within_cap(w);
    DyInterval r = at(w);
    if (r.width_at_most(p.bits)) return r;
  }
}

inline std::int64_t magnitude_bits(const Dyadic& c) {
  return c.is_zero() ? 0 : std::max<std::int64_t>(0, c.msb() + 1);
}

}  // namespace detail

inline CompFunc constant(const Dyadic& c, DyInterval domain = CompFunc::unit()) {
  return CompFunc([c](const DyInterval&, Precision) { return DyInterval::point(c); },
                  std::move(domain));
}

inline CompFunc constant(const CompReal& c, DyInterval domain = CompFunc::unit()) {
  return CompFunc([c](const DyInterval&, Precision p) { return c(p); }, std::move(domain));
}

inline CompFunc identity(DyInterval domain = CompFunc::unit()) {
  return CompFunc([](const DyInterval& x, Precision) { return x; }, std::move(domain),
                  Dyadic(1));
}

/// x^k, exact on point inputs.
inline CompFunc monomial(unsigned k, DyInterval domain = CompFunc::unit()) {
  return CompFunc(
      [k](const DyInterval& x, Precision) {
        if (k == 0) return DyInterval::point(Dyadic(1));
        DyInterval acc = (k % 2 == 0) ? x.square() : x;
        DyInterval base = x.square();
        for (unsigned i = (k % 2 == 0) ? 2 : 1; i + 2 <= k; i += 2) acc = acc * base;
        return acc;
      },
      std::move(domain));
}

inline CompFunc sum(const CompFunc& f, const CompFunc& g) {
  auto dom = f.domain().intersect(g.domain());
  if (!dom) throw DomainError("sum of functions with disjoint domains");
  return CompFunc(
      [f, g](const DyInterval& x, Precision p) {
        return detail::refine(x, p, [&](std::int64_t w) {
          return (f(x, Precision{w}) + g(x, Precision{w})).round_out(w + 2);
        });
      },
      *dom);
}

inline CompFunc scale(const Dyadic& c, const CompFunc& f) {
  const std::int64_t extra = detail::magnitude_bits(c);
  return CompFunc(
      [c, f, extra](const DyInterval& x, Precision p) {
        return detail::refine(x, p, [&](std::int64_t w) {
          return (f(x, Precision{w + extra}) * c).round_out(w + 2);
        });
      },
      f.domain());
}

inline CompFunc difference(const CompFunc& f, const CompFunc& g) {
  return sum(f, scale(Dyadic(-1), g));
}

inline CompFunc product(const CompFunc& f, const CompFunc& g) {
  auto dom = f.domain().intersect(g.domain());
  if (!dom) throw DomainError("product of functions with disjoint domains");
  return CompFunc(
      [f, g](const DyInterval& x, Precision p) {
        return detail::refine(x, p, [&](std::int64_t w) {
          DyInterval a = f(x, Precision{w});
          DyInterval b = g(x, Precision{w});
          std::int64_t extra = std::max(detail::magnitude_bits(a.mag()),
                                        detail::magnitude_bits(b.mag()));
          if (extra > 0) {
            a = f(x, Precision{w + extra});
            b = g(x, Precision{w + extra});
          }
          return (a * b).round_out(w + 2);
        });
      },
      *dom);
}

/// (f o g)(x) = f(g(x)). The range of g must lie in f's domain; enclosures of
/// g that stick out by rounding are clipped back.
inline CompFunc compose(const CompFunc& f, const CompFunc& g) {
  return CompFunc(
      [f, g](const DyInterval& x, Precision p) {
        return detail::refine(x, p, [&](std::int64_t w) {
          DyInterval inner = g(x, Precision{w});
          auto clipped = inner.intersect(f.domain());
          if (!clipped) throw DomainError("composition left the outer domain");
          return f(*clipped, Precision{w}).round_out(w + 2);
        });
      },
      g.domain());
}

/// Glues pieces[i] on [b_{i-1}, b_i] (b_{-1}, b_n being the domain ends).
///
/// A query straddling a breakpoint gets the hull of the pieces over the parts
/// it touches; breakpoint enclosures tighten with the working precision, so a
/// point query sharpens as long as the pieces agree at the breakpoints. That
/// agreement is checked at check_precision when the function is built.
inline CompFunc piecewise(std::vector<CompReal> breakpoints, std::vector<CompFunc> pieces,
                          DyInterval domain = CompFunc::unit(),
                          Precision check_precision = Precision{24}) {
  if (pieces.size() != breakpoints.size() + 1)
    throw InvalidInput("piecewise needs exactly one more piece than breakpoints");
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    DyInterval b = breakpoints[i](check_precision);
    auto on_left = b.intersect(pieces[i].domain());
    auto on_right = b.intersect(pieces[i + 1].domain());
    if (!on_left || !on_right) throw GluingError("breakpoint outside a piece's domain");
    DyInterval l = pieces[i](*on_left, check_precision);
    DyInterval r = pieces[i + 1](*on_right, check_precision);
    if (!l.intersects(r)) {
      throw GluingError("pieces " + std::to_string(i) + " and " + std::to_string(i + 1) +
                        " disagree at breakpoint: " + l.to_string() + " vs " + r.to_string());
    }
  }
  auto bps = std::make_shared<const std::vector<CompReal>>(std::move(breakpoints));
  auto fs = std::make_shared<const std::vector<CompFunc>>(std::move(pieces));
  DyInterval dom = domain;
  return CompFunc(
      [bps, fs, dom](const DyInterval& x, Precision p) {
        return detail::refine(x, p, [&](std::int64_t w) {
          const Precision wp{w};
          std::vector<DyInterval> cuts;
          cuts.reserve(bps->size());
          for (const CompReal& b : *bps) cuts.push_back(b(wp));
          std::optional<DyInterval> out;
          for (std::size_t i = 0; i < fs->size(); ++i) {
            Dyadic lo = i == 0 ? dom.lo() : cuts[i - 1].lo();
            Dyadic hi = i + 1 == fs->size() ? dom.hi() : cuts[i].hi();
            if (hi < lo) continue;
            auto part = x.intersect(DyInterval(lo, hi));
            if (!part) continue;
            part = part->intersect((*fs)[i].domain());
            if (!part) continue;
            DyInterval v = (*fs)[i](*part, wp);
            out = out ? DyInterval::hull(*out, v) : v;
          }
          if (!out) throw DomainError("piecewise query " + x.to_string() + " hit no piece");
          return out->round_out(w + 2);
        });
      },
      dom);
}

/// Extends f from [0,1] to [0,2] by f(y) = 2 f(1) - f(2 - y) for y > 1.
inline CompFunc reflect_extend(const CompFunc& f) {
  if (!(f.domain() == CompFunc::unit()))
    throw DomainError("reflect_extend needs a function on [0,1]");
  return CompFunc(
      [f](const DyInterval& y, Precision p) {
        return detail::refine(y, p, [&](std::int64_t w) {
          const Precision wp{w + 2};
          std::optional<DyInterval> out;
          if (auto left = y.intersect(CompFunc::unit())) out = f(*left, wp);
          if (auto right = y.intersect(DyInterval(Dyadic(1), Dyadic(2)))) {
            DyInterval mirrored = DyInterval::point(Dyadic(2)) - *right;
            DyInterval v = f.eval(Dyadic(1), wp).mul_pow2(1) - f(mirrored, wp);
            out = out ? DyInterval::hull(*out, v) : v;
          }
          return out->round_out(w + 2);
        });
      },
      DyInterval(Dyadic(0), Dyadic(2)));
}

// ---------------------------------------------------------------------------
// Stagewise preimages

/// Finite stage of the enumeration of f^-1((a, b)).
struct PreimageCover {
  Rational a;
  Rational b;
  std::uint64_t stage = 0;
  /// Open intervals, sorted and pairwise disjoint. Pieces touching the domain
  /// ends are open relative to the domain.
  std::vector<RationalInterval> pieces;
  RationalInterval domain{Rational(0), Rational(1)};

  bool covers(const Rational& x) const {
    return std::any_of(pieces.begin(), pieces.end(), [&](const RationalInterval& iv) {
      return (iv.lo < x || x == domain.lo) && (x < iv.hi || x == domain.hi) && iv.lo <= x && x <= iv.hi;
    });
  }
};

inline nlohmann::json to_json(const PreimageCover& cover) {
  nlohmann::json pieces = nlohmann::json::array();
  for (const auto& iv : cover.pieces)
    pieces.push_back({to_fraction_string(iv.lo), to_fraction_string(iv.hi)});
  return {{"target", {to_fraction_string(cover.a), to_fraction_string(cover.b)}},
          {"stage", cover.stage},
          {"pieces", pieces}};
}

namespace detail {

inline void preimage_descend(const CompFunc& f, const Rational& a, const Rational& b,
                             const Dyadic& lo, const Dyadic& width, std::uint64_t level,
                             std::uint64_t stage, std::vector<std::pair<Dyadic, Dyadic>>& out) {
  DyInterval cell(lo, lo + width);
  DyInterval e = f(cell, Precision{static_cast<std::int64_t>(stage)});
  if (compare(e.lo(), a) > 0 && compare(e.hi(), b) < 0) {
    if (!out.empty() && out.back().second == cell.lo())
      out.back().second = cell.hi();
    else
      out.emplace_back(cell.lo(), cell.hi());
    return;
  }
  // the image misses (a, b) entirely: nothing below can enter
  if (compare(e.hi(), a) <= 0 || compare(e.lo(), b) >= 0) return;
  if (level == stage) return;
  Dyadic half = width.half();
  preimage_descend(f, a, b, lo, half, level + 1, stage, out);
  preimage_descend(f, a, b, lo + half, half, level + 1, stage, out);
}

}  // namespace detail

/// Sound stage-s cover of f^-1((a, b)): the union of all dyadic cells of mesh
/// >= 2^-s (relative to the domain) whose certified image lies in (a, b).
/// Covers grow with s.
inline PreimageCover preimage_stage(const CompFunc& f, const Rational& a, const Rational& b,
                                    std::uint64_t stage) {
  if (!(a < b)) throw InvalidInput("preimage target needs a < b");
  std::vector<std::pair<Dyadic, Dyadic>> cells;
  detail::preimage_descend(f, a, b, f.domain().lo(), f.domain().width(), 0, stage, cells);
  PreimageCover cover{a, b, stage, {}, {f.domain().lo().to_rational(), f.domain().hi().to_rational()}};
  for (const auto& [lo, hi] : cells) cover.pieces.push_back({lo.to_rational(), hi.to_rational()});
  return cover;
}

// ---------------------------------------------------------------------------
// Antiderivatives

/// Limit on interval cells per integral; hitting it means the integrand's
/// enclosures shrink too slowly for the requested precision.
inline constexpr std::size_t kMaxIntegrationCells = std::size_t{1} << 22;

namespace detail {

/// Encloses the integral of f over [a, b] (a <= b) to width <= tol.
inline DyInterval integrate(const CompFunc& f, const Dyadic& a, const Dyadic& b,
                            const Dyadic& tol, std::int64_t work_bits) {
  if (a == b) return DyInterval();
  const Rational length = (b - a).to_rational();
  // a cell of width h may contribute width tol * h / length
  DyInterval total;
  std::vector<std::pair<Dyadic, Dyadic>> stack{{a, b}};
  std::size_t cells = 0;
  while (!stack.empty()) {
    auto [lo, hi] = stack.back();
    stack.pop_back();
    if (++cells > kMaxIntegrationCells)
      throw PrecisionCapExceeded(work_bits, precision_cap());
    Dyadic h = hi - lo;
    DyInterval contrib =
        (f(DyInterval(lo, hi), Precision{work_bits}) * h).round_out(work_bits + 8 - h.msb());
    Rational allowed = tol.to_rational() * h.to_rational() / length;
    if (contrib.width().to_rational() <= allowed) {
      total = total + contrib;
      continue;
    }
    if (-h.msb() > precision_cap()) throw PrecisionCapExceeded(-h.msb(), precision_cap());
    Dyadic m = lo + h.half();
    stack.emplace_back(m, hi);
    stack.emplace_back(lo, m);
  }
  return total;
}

}  // namespace detail

/// F(x) = integral of f from `base` (default: left end of the domain) to x,
/// by adaptive interval Riemann sums. Cost grows like 2^p for Lipschitz f.
inline CompFunc antiderivative(const CompFunc& f, std::optional<Dyadic> base = std::nullopt) {
  const Dyadic origin = base.value_or(f.domain().lo());
  if (!f.domain().contains(origin)) throw DomainError("antiderivative base outside domain");
  auto at_point = [f, origin](const Dyadic& x, Precision p) {
    const Dyadic tol = Dyadic::pow2(-(p.bits + 1));
    const std::int64_t work = p.bits + 8;
    if (x >= origin) return detail::integrate(f, origin, x, tol, work).round_out(p.bits + 2);
    return (-detail::integrate(f, x, origin, tol, work)).round_out(p.bits + 2);
  };
  return CompFunc(
      [f, at_point](const DyInterval& x, Precision p) {
        DyInterval left = at_point(x.lo(), p);
        if (x.is_point()) return left;
        // F(t) - F(lo) lies in (t - lo) * f(x) for t in x
        DyInterval range = f(x, p) * x.width();
        DyInterval drift = DyInterval::hull(range, DyInterval());
        return (left + drift).round_out(p.bits + 2);
      },
      f.domain());
}

// ---------------------------------------------------------------------------
// Uniform sequences

/// A family n -> f_n of computable functions answered through one entry
/// point, so that (n, I, p) queries are uniform in n.
class UniformSequence {
 public:
  using Query = std::function<DyInterval(std::size_t, const DyInterval&, Precision)>;

  UniformSequence(Query query, DyInterval domain = CompFunc::unit())
      : query_(std::make_shared<Query>(std::move(query))), domain_(std::move(domain)) {}

  DyInterval operator()(std::size_t n, const DyInterval& x, Precision p) const {
    if (!domain_.contains(x)) throw DomainError("query outside sequence domain");
    require_within_cap(p);
    return (*query_)(n, x, p);
  }

  CompFunc slice(std::size_t n) const {
    auto q = query_;
    return CompFunc([q, n](const DyInterval& x, Precision p) { return (*q)(n, x, p); },
                    domain_);
  }

  const DyInterval& domain() const { return domain_; }

 private:
  std::shared_ptr<const Query> query_;
  DyInterval domain_;
};

}  // namespace vexact

#endif  // VEXACT_COMP_FUNC_HPP
