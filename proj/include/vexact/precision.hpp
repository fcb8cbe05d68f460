#ifndef VEXACT_PRECISION_HPP
#define VEXACT_PRECISION_HPP

#include <atomic>
#include <compare>
#include <cstdint>

#include "vexact/errors.hpp"

namespace vexact {

/// Target accuracy: an enclosure at precision p has width at most 2^-p.
struct Precision {
  std::int64_t bits = 0;

  constexpr Precision() = default;
  constexpr explicit Precision(std::int64_t b) : bits(b) {}

  friend constexpr Precision operator+(Precision p, std::int64_t extra) {
    return Precision{p.bits + extra};
  }
  friend constexpr auto operator<=>(Precision, Precision) = default;
};

namespace detail {
inline std::atomic<std::int64_t>& precision_cap_storage() {
  static std::atomic<std::int64_t> cap{4096};
  return cap;
}
}  // namespace detail

inline std::int64_t precision_cap() { return detail::precision_cap_storage().load(); }
inline void set_precision_cap(std::int64_t bits) { detail::precision_cap_storage().store(bits); }

/// Restores the previous cap on scope exit.
class ScopedPrecisionCap {
 public:
  explicit ScopedPrecisionCap(std::int64_t bits) : saved_(precision_cap()) {
    set_precision_cap(bits);
  }
  ~ScopedPrecisionCap() { set_precision_cap(saved_); }
  ScopedPrecisionCap(const ScopedPrecisionCap&) = delete;
  ScopedPrecisionCap& operator=(const ScopedPrecisionCap&) = delete;

 private:
  std::int64_t saved_;
};

/// Working precisions pass through here; exceeding the cap is an error, never
/// a silent truncation.
inline void require_within_cap(std::int64_t bits) {
  if (bits > precision_cap()) throw PrecisionCapExceeded(bits, precision_cap());
}
inline void require_within_cap(Precision p) { require_within_cap(p.bits); }

/// Abstract cost accounting: big-integer limb operations performed by the
/// current thread. Deterministic for deterministic inputs.
namespace ops {

inline std::uint64_t& counter() {
  thread_local std::uint64_t count = 0;
  return count;
}

inline void charge(std::uint64_t limbs) { counter() += limbs == 0 ? 1 : limbs; }

/// Counts operations performed while alive.
class Scope {
 public:
  Scope() : start_(counter()) {}
  std::uint64_t elapsed() const { return counter() - start_; }

 private:
  std::uint64_t start_;
};

}  // namespace ops
}  // namespace vexact

#endif  // VEXACT_PRECISION_HPP
