#ifndef VEXACT_GENERICITY_HPP
#define VEXACT_GENERICITY_HPP

#include <algorithm>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vexact/interval.hpp"
#include "vexact/pi01.hpp"

namespace vexact {

/// Finite binary string.
class BinaryString {
 public:
  BinaryString() = default;
  explicit BinaryString(std::vector<bool> bits) : bits_(std::move(bits)) {}
  /// From "0101"; anything but 0/1 is rejected.
  static BinaryString parse(std::string_view s) {
    std::vector<bool> bits;
    bits.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1') throw InvalidInput("binary string with non-bit '" + std::string(s) + "'");
      bits.push_back(c == '1');
    }
    return BinaryString(std::move(bits));
  }
  static BinaryString zeros(std::size_t n) { return BinaryString(std::vector<bool>(n, false)); }

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i]; }
  const std::vector<bool>& bits() const { return bits_; }

  BinaryString prefix(std::size_t n) const {
    return BinaryString(std::vector<bool>(bits_.begin(), bits_.begin() + static_cast<long>(std::min(n, size()))));
  }
  BinaryString append(bool b) const {
    auto v = bits_;
    v.push_back(b);
    return BinaryString(std::move(v));
  }
  /// this is a prefix of other
  bool is_prefix_of(const BinaryString& other) const {
    return size() <= other.size() && std::equal(bits_.begin(), bits_.end(), other.bits_.begin());
  }

  std::string to_string() const {
    std::string s;
    for (bool b : bits_) s.push_back(b ? '1' : '0');
    return s;
  }

  friend bool operator==(const BinaryString&, const BinaryString&) = default;
  friend auto operator<=>(const BinaryString& a, const BinaryString& b) {
    if (a.size() != b.size()) return a.size() <=> b.size();
    return a.bits_ <=> b.bits_;
  }

 private:
  std::vector<bool> bits_;
};

/// A computably enumerable set of strings, given by its finite stages. Stage
/// 0 is empty and stages grow with s.
class CeStringSet {
 public:
  virtual ~CeStringSet() = default;
  /// Whether t belongs to the stage-s approximation.
  virtual bool contains(const BinaryString& t, std::uint64_t s) const = 0;
  /// Strings enumerated at exactly stage s, restricted to those with no
  /// proper prefix enumerated by stage s.
  virtual std::vector<BinaryString> minimal_enumerated_at(std::uint64_t s) const = 0;
  virtual std::optional<std::uint64_t> last_stage() const { return std::nullopt; }
  /// Upper bound on the length of strings in stage s, when known.
  virtual std::optional<std::size_t> max_length(std::uint64_t) const { return std::nullopt; }
  virtual std::string name() const = 0;
};

namespace strings {

/// Stage s is the union of the first s lists.
class Explicit final : public CeStringSet {
 public:
  explicit Explicit(std::vector<std::vector<BinaryString>> stages) : stages_(std::move(stages)) {}
  bool contains(const BinaryString& t, std::uint64_t s) const override {
    for (std::uint64_t i = 0; i < std::min<std::uint64_t>(s, stages_.size()); ++i)
      if (std::find(stages_[i].begin(), stages_[i].end(), t) != stages_[i].end()) return true;
    return false;
  }
  std::vector<BinaryString> minimal_enumerated_at(std::uint64_t s) const override {
    if (s == 0 || s > stages_.size()) return {};
    std::vector<BinaryString> out;
    for (const auto& t : stages_[s - 1]) {
      bool covered = false;
      for (std::size_t n = 0; n < t.size() && !covered; ++n) covered = contains(t.prefix(n), s);
      if (!covered && !contains(t, s - 1) && std::find(out.begin(), out.end(), t) == out.end())
        out.push_back(t);
    }
    return out;
  }
  std::optional<std::uint64_t> last_stage() const override { return stages_.size(); }
  std::optional<std::size_t> max_length(std::uint64_t s) const override {
    std::size_t m = 0;
    for (std::uint64_t i = 0; i < std::min<std::uint64_t>(s, stages_.size()); ++i)
      for (const auto& t : stages_[i]) m = std::max(m, t.size());
    return m;
  }
  std::string name() const override { return "explicit"; }

 private:
  std::vector<std::vector<BinaryString>> stages_;
};

/// Nonempty strings ending in 1, of length <= s at stage s.
class EndsInOne final : public CeStringSet {
 public:
  bool contains(const BinaryString& t, std::uint64_t s) const override {
    return !t.empty() && t.size() <= s && t[t.size() - 1];
  }
  std::vector<BinaryString> minimal_enumerated_at(std::uint64_t s) const override {
    if (s == 0) return {};
    // any other new string of length s ending in 1 has an earlier 1
    return {BinaryString::zeros(s - 1).append(true)};
  }
  std::optional<std::size_t> max_length(std::uint64_t s) const override { return s; }
  std::string name() const override { return "ends-in-1"; }
};

/// Extensions of a fixed prefix, of length <= s at stage s.
class HasPrefix final : public CeStringSet {
 public:
  explicit HasPrefix(BinaryString prefix) : prefix_(std::move(prefix)) {}
  bool contains(const BinaryString& t, std::uint64_t s) const override {
    return s >= 1 && t.size() <= s && prefix_.is_prefix_of(t);
  }
  std::vector<BinaryString> minimal_enumerated_at(std::uint64_t s) const override {
    if (s == std::max<std::uint64_t>(1, prefix_.size())) return {prefix_};
    return {};
  }
  std::optional<std::size_t> max_length(std::uint64_t s) const override { return s; }
  std::string name() const override { return "has-prefix"; }

 private:
  BinaryString prefix_;
};

}  // namespace strings

/// Some prefix of x (including x itself) is in the stage-s set.
inline bool meets(const BinaryString& x, const CeStringSet& a, std::uint64_t s) {
  for (std::size_t n = 0; n <= x.size(); ++n)
    if (a.contains(x.prefix(n), s)) return true;
  return false;
}

struct DenseRow {
  BinaryString sigma;
  std::optional<BinaryString> extension;  ///< shortest tau found, if any
};

struct DenseReport {
  std::uint64_t stage = 0;
  std::size_t depth = 0;
  std::vector<DenseRow> rows;  ///< one per sigma <= prefix, by length
  bool dense() const {
    return std::all_of(rows.begin(), rows.end(), [](const DenseRow& r) { return r.extension.has_value(); });
  }
};

namespace detail {

/// Shortest tau extending sigma with |tau| <= |sigma| + depth that has a
/// prefix in the stage-s set. Breadth first, so ties go to the
/// lexicographically smallest.
inline std::optional<BinaryString> find_extension(const BinaryString& sigma, const CeStringSet& a,
                                                  std::uint64_t s, std::size_t depth) {
  if (meets(sigma, a, s)) return sigma;
  const auto longest = a.max_length(s);
  std::vector<BinaryString> level{sigma};
  for (std::size_t d = 1; d <= depth; ++d) {
    if (longest && sigma.size() + d > *longest) break;
    std::vector<BinaryString> next;
    next.reserve(level.size() * 2);
    for (const auto& t : level) {
      for (bool b : {false, true}) {
        BinaryString u = t.append(b);
        if (a.contains(u, s)) return u;
        next.push_back(std::move(u));
      }
    }
    level = std::move(next);
  }
  return std::nullopt;
}

}  // namespace detail

/// For each sigma <= prefix: an extension within `depth` extra bits whose
/// cylinder lies inside the stage-s open set. Depth 0 only admits sigma
/// itself.
inline DenseReport dense_along(const BinaryString& prefix, const CeStringSet& a, std::uint64_t s,
                               std::size_t depth) {
  DenseReport rep{s, depth, {}};
  for (std::size_t n = 0; n <= prefix.size(); ++n) {
    BinaryString sigma = prefix.prefix(n);
    rep.rows.push_back({sigma, detail::find_extension(sigma, a, s, depth)});
  }
  return rep;
}

struct GenericityEvidence {
  bool met = false;
  DenseReport density;
  /// x looks like a point of V \ Int(V) for V the complement of [A]: A is
  /// dense along the prefix and not met.
  bool non_generic_evidence() const { return !met && density.dense(); }
};

inline GenericityEvidence non_genericity_evidence(const BinaryString& prefix, const CeStringSet& a,
                                                  std::uint64_t s, std::size_t depth) {
  return {meets(prefix, a, s), dense_along(prefix, a, s, depth)};
}

/// [0.sigma000..., 0.sigma111...]
inline DyInterval to_interval(const BinaryString& sigma) {
  mpz_class k = 0;
  for (bool b : sigma.bits()) k = 2 * k + (b ? 1 : 0);
  const auto n = static_cast<std::int64_t>(sigma.size());
  return DyInterval(Dyadic(k, -n), Dyadic(k + 1, -n));
}

enum class Expansion {
  Strict,         ///< reject dyadic inputs (two expansions)
  TrailingZeros,  ///< terminating form: 1/2 = 0.1000...
  TrailingOnes,   ///< 1/2 = 0.0111...
};

/// First n bits of a binary expansion of x in [0,1]. x = 1 has only 0.111...
inline BinaryString from_point(const Rational& x, std::size_t n, Expansion mode = Expansion::TrailingZeros) {
  if (x < 0 || x > 1) throw InvalidInput("from_point needs x in [0,1]");
  const bool dyadic = Dyadic::try_from_rational(x).has_value();
  if (dyadic && mode == Expansion::Strict && x != 0 && x != 1)
    throw InvalidInput("dyadic point " + x.get_str() + " has two binary expansions");
  std::vector<bool> bits;
  bits.reserve(n);
  Rational r = x;
  const bool ones = x == 1 || (dyadic && mode == Expansion::TrailingOnes && x != 0);
  for (std::size_t i = 0; i < n; ++i) {
    r *= 2;
    // the ones-form keeps a remainder of exactly 1 as 0.111...
    const bool bit = ones ? r > 1 : r >= 1;
    bits.push_back(bit);
    if (bit) r -= 1;
  }
  return BinaryString(std::move(bits));
}

namespace detail {

class CantorGenerator final : public IntervalGenerator {
 public:
  explicit CantorGenerator(std::shared_ptr<const CeStringSet> a) : a_(std::move(a)) {}
  std::vector<RationalInterval> emit(std::uint64_t stage) const override {
    std::vector<RationalInterval> out;
    for (const BinaryString& t : a_->minimal_enumerated_at(stage)) {
      DyInterval iv = to_interval(t);
      out.push_back({iv.lo().to_rational(), iv.hi().to_rational()});
    }
    return out;
  }
  std::optional<std::uint64_t> last_stage() const override { return a_->last_stage(); }
  std::string name() const override { return "cantor:" + a_->name(); }

 private:
  std::shared_ptr<const CeStringSet> a_;
};

}  // namespace detail

/// The class in [0,1] whose complement enumerates the interiors of [tau] for
/// the strings tau of A.
inline Pi01Class cantor_class(std::shared_ptr<const CeStringSet> a) {
  return Pi01Class(std::make_shared<detail::CantorGenerator>(std::move(a)));
}

}  // namespace vexact

#endif  // VEXACT_GENERICITY_HPP
