#pragma once

// Exact base-m digit streams for points of the circle and the m-fold map.
//
// Orbits of theta -> m*theta mod 1 are represented by shifting digit streams
// instead of multiplying floating-point numbers; every theta-value consumed
// elsewhere in the library is produced by evaluating a (shifted) stream.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace doubling {

using Digit = std::uint32_t;
using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

/// Longest prefix+period accepted from long division.
inline constexpr std::size_t kMaxEncodedDigits = std::size_t{1} << 16;

/// Non-negative fraction num/den with 64-bit parts.
struct Fraction {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// numerator * base^-depth, exact.
struct MadicRational {
  BigInt numerator;
  unsigned base = 2;
  std::size_t depth = 0;

  BigRational value() const;
  double to_double() const;
};

/// Floating value obtained from `depth` digits.
struct FloatTruncation {
  std::size_t depth = 0;
};

/// A point of R/Z.  `value` is always in [0, 1); `provenance` records how it
/// was obtained.
struct CirclePoint {
  double value = 0.0;
  std::variant<MadicRational, FloatTruncation> provenance = FloatTruncation{};
};

/// Eventually periodic digits: prefix then period repeated forever.
struct PeriodicForm {
  std::vector<Digit> prefix;
  std::vector<Digit> period;

  friend bool operator==(const PeriodicForm&, const PeriodicForm&) = default;
};

/// Digit stream indexed by n in Z.
///
/// Backed either by a keyed counter-based generator (Bernoulli sample) or by a
/// repeating pattern with digit(n) = pattern[n mod p].  Individual digits may
/// be overridden, which is how two sequences differing at finitely many sites
/// are built.  Copies share immutable storage.
class TwoSidedDigitSequence {
 public:
  static TwoSidedDigitSequence bernoulli(std::uint64_t seed, unsigned base);
  static TwoSidedDigitSequence periodic(unsigned base, std::vector<Digit> pattern);

  unsigned base() const noexcept { return base_; }
  Digit digit(std::int64_t n) const;
  /// Digits first, first+1, ... written into `out`.
  void fill(std::int64_t first, std::span<Digit> out) const;

  /// digit'(n) = digit(n + steps); steps may be negative.
  TwoSidedDigitSequence shifted(std::int64_t steps) const;
  TwoSidedDigitSequence with_digit(std::int64_t n, Digit d) const;

  bool is_seeded() const noexcept;
  std::uint64_t seed() const;
  const std::vector<Digit>& pattern() const;
  std::int64_t offset() const noexcept { return offset_; }
  /// Overrides keyed by index in the shifted frame (i.e. as seen by digit()).
  std::map<std::int64_t, Digit> overrides() const;

 private:
  struct Seeded {
    std::uint64_t seed;
  };
  struct Pattern {
    std::shared_ptr<const std::vector<Digit>> digits;
  };

  TwoSidedDigitSequence(unsigned base, std::variant<Seeded, Pattern> source);
  Digit source_digit(std::int64_t index) const;

  unsigned base_;
  std::variant<Seeded, Pattern> source_;
  std::int64_t offset_ = 0;
  // Keyed by source index (before offset).
  std::shared_ptr<const std::map<std::int64_t, Digit>> overrides_;
};

/// Digit stream indexed by n = 1, 2, ...  (a point of the one-sided shift
/// space).  Either an explicit eventually periodic form or a window onto a
/// two-sided stream reading its digits at n >= 1.
class DigitSequence {
 public:
  static DigitSequence periodic(unsigned base, std::vector<Digit> prefix,
                                std::vector<Digit> period);
  static DigitSequence seeded(std::uint64_t seed, unsigned base);
  static DigitSequence window(TwoSidedDigitSequence source);

  unsigned base() const noexcept { return base_; }
  /// n >= 1.
  Digit digit(std::uint64_t n) const;
  void fill(std::uint64_t first, std::span<Digit> out) const;
  DigitSequence shifted(std::uint64_t steps) const;

  bool is_explicit_periodic() const noexcept;
  /// Eventually periodic description when one is known (explicit form, or a
  /// window onto a pattern-backed stream).  Seeded windows return nullopt.
  std::optional<PeriodicForm> periodic_form() const;
  /// Two-sided source of a window; nullptr for the explicit periodic form.
  const TwoSidedDigitSequence* source() const noexcept;

 private:
  explicit DigitSequence(unsigned base, std::variant<PeriodicForm, TwoSidedDigitSequence> rep);

  unsigned base_;
  std::variant<PeriodicForm, TwoSidedDigitSequence> rep_;
};

/// Number of digits used for floating evaluation: the least k with
/// base^k >= 2^64 (64 for base 2).
std::size_t float_depth(unsigned base);

/// Sum_{n=1}^{k} digits[n-1] * base^-n in double precision, accumulated from
/// the last digit.  This is the single floating evaluation path; the result
/// is clamped below 1.
double digits_value(std::span<const Digit> digits, unsigned base);

/// Exact eventually-periodic representation of num/den via long division
/// with remainder-cycle detection.  Terminating expansions end in period {0}.
/// Throws ValidationError if num/den is outside [0,1), base < 2, or the
/// representation needs more than `max_digits` digits.
DigitSequence encode(Fraction value, unsigned base,
                     std::size_t max_digits = kMaxEncodedDigits);

/// Exact value of an eventually periodic digit string.
BigRational periodic_value(const PeriodicForm& form, unsigned base);

/// Truncated coding map D_k, exact.
MadicRational evaluate_d_exact(const DigitSequence& omega, std::size_t depth);
/// Truncated coding map D_k in floating point (default depth float_depth).
CirclePoint evaluate_d(const DigitSequence& omega, std::size_t depth = 0);

DigitSequence shift(const DigitSequence& omega, std::uint64_t steps);

/// theta -> base*theta mod 1 on doubles.  Demonstration only: each step
/// discards digits of the mantissa.
double doubling_map_float(double theta, unsigned base = 2);
CirclePoint doubling_map_float(const CirclePoint& theta, unsigned base = 2);
/// theta -> base*theta mod 1 on exact fractions.
Fraction doubling_map_exact(Fraction theta, unsigned base = 2);
/// theta -> base*theta mod 1 on m-adic rationals (depth unchanged).
MadicRational doubling_map_exact(const MadicRational& theta);

TwoSidedDigitSequence sample_bernoulli(std::uint64_t seed, unsigned base = 2);
DigitSequence restrict_to_halfline(const TwoSidedDigitSequence& omega);

}  // namespace doubling
