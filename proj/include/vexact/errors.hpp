#ifndef VEXACT_ERRORS_HPP
#define VEXACT_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vexact {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed a value outside an operation's precondition
/// (division by zero, negative square root, zero step, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A query interval left the domain of a function, or an enclosure would be
/// unbounded there.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Working precision would exceed the global cap.
class PrecisionCapExceeded : public Error {
 public:
  PrecisionCapExceeded(std::int64_t requested, std::int64_t cap)
      : Error("precision cap exceeded: requested " + std::to_string(requested) +
              " bits, cap is " + std::to_string(cap)),
        requested_(requested),
        cap_(cap) {}

  std::int64_t requested() const noexcept { return requested_; }
  std::int64_t cap() const noexcept { return cap_; }

 private:
  std::int64_t requested_;
  std::int64_t cap_;
};

/// Adjacent pieces of a piecewise function disagree at a breakpoint.
class GluingError : public Error {
 public:
  using Error::Error;
};

/// A generator did not deliver what was asked for within its step budget.
class BudgetExhausted : public Error {
 public:
  BudgetExhausted(const std::string& what, std::uint64_t steps)
      : Error("precision unreachable within budget: " + what + " (after " +
              std::to_string(steps) + " generator steps)"),
        steps_(steps) {}

  std::uint64_t steps() const noexcept { return steps_; }

 private:
  std::uint64_t steps_;
};

/// Malformed class / string-set specification. Line and column are 1-based;
/// 0 means unknown.
class SpecError : public Error {
 public:
  SpecError(const std::string& msg, std::size_t line = 0, std::size_t column = 0)
      : Error(line ? msg + " (line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ")"
                   : msg),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

}  // namespace vexact

#endif  // VEXACT_ERRORS_HPP
