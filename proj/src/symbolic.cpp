#include "doubling/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>

#include "doubling/errors.hpp"
#include "doubling/philox.hpp"

namespace doubling {

namespace {

void check_base(unsigned base) {
  if (base < 2) throw ValidationError("base must be >= 2, got " + std::to_string(base));
}

void check_digits(std::span<const Digit> digits, unsigned base, const char* what) {
  for (Digit d : digits) {
    if (d >= base) {
      throw ValidationError(std::string(what) + ": digit " + std::to_string(d) +
                            " out of range for base " + std::to_string(base));
    }
  }
}

double clamp_below_one(double v) {
  return v < 1.0 ? v : std::nextafter(1.0, 0.0);
}

BigInt power(unsigned base, std::size_t exponent) {
  return boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(exponent));
}

BigInt digits_integer(std::span<const Digit> digits, unsigned base) {
  std::size_t chunk = 0;
  std::uint64_t chunk_scale = 1;
  while (chunk_scale <= std::numeric_limits<std::uint64_t>::max() / base) {
    chunk_scale *= base;
    ++chunk;
  }
  BigInt acc = 0;
  std::size_t i = 0;
  while (i < digits.size()) {
    const std::size_t take = std::min(chunk, digits.size() - i);
    std::uint64_t word = 0;
    std::uint64_t scale = 1;
    for (std::size_t j = 0; j < take; ++j, ++i) {
      word = word * base + digits[i];
      scale *= base;
    }
    acc = acc * scale + word;
  }
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------

BigRational MadicRational::value() const {
  return BigRational(numerator, power(base, depth));
}

double MadicRational::to_double() const {
  return clamp_below_one(value().convert_to<double>());
}

// ---------------------------------------------------------------------------

TwoSidedDigitSequence::TwoSidedDigitSequence(unsigned base,
                                             std::variant<Seeded, Pattern> source)
    : base_(base), source_(std::move(source)) {}

TwoSidedDigitSequence TwoSidedDigitSequence::bernoulli(std::uint64_t seed, unsigned base) {
  check_base(base);
  return TwoSidedDigitSequence(base, Seeded{seed});
}

TwoSidedDigitSequence TwoSidedDigitSequence::periodic(unsigned base,
                                                      std::vector<Digit> pattern) {
  check_base(base);
  if (pattern.empty()) throw ValidationError("two-sided pattern must be non-empty");
  check_digits(pattern, base, "two-sided pattern");
  return TwoSidedDigitSequence(
      base, Pattern{std::make_shared<const std::vector<Digit>>(std::move(pattern))});
}

Digit TwoSidedDigitSequence::source_digit(std::int64_t index) const {
  if (const auto* s = std::get_if<Seeded>(&source_)) {
    const std::uint64_t j = zigzag(index);
    const PhiloxBlock block =
        philox4x64({j / 4, 0, static_cast<std::uint64_t>(Stream::kDigits), 0}, {s->seed, 0});
    return bounded(block[j % 4], base_);
  }
  const auto& pattern = *std::get<Pattern>(source_).digits;
  const auto p = static_cast<std::int64_t>(pattern.size());
  return pattern[static_cast<std::size_t>(((index % p) + p) % p)];
}

Digit TwoSidedDigitSequence::digit(std::int64_t n) const {
  const std::int64_t index = n + offset_;
  if (overrides_) {
    if (auto it = overrides_->find(index); it != overrides_->end()) return it->second;
  }
  return source_digit(index);
}

void TwoSidedDigitSequence::fill(std::int64_t first, std::span<Digit> out) const {
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = digit(first + static_cast<std::int64_t>(i));
  }
}

TwoSidedDigitSequence TwoSidedDigitSequence::shifted(std::int64_t steps) const {
  TwoSidedDigitSequence copy = *this;
  copy.offset_ += steps;
  return copy;
}

TwoSidedDigitSequence TwoSidedDigitSequence::with_digit(std::int64_t n, Digit d) const {
  if (d >= base_) {
    throw ValidationError("digit " + std::to_string(d) + " out of range for base " +
                          std::to_string(base_));
  }
  auto updated = overrides_ ? std::make_shared<std::map<std::int64_t, Digit>>(*overrides_)
                            : std::make_shared<std::map<std::int64_t, Digit>>();
  (*updated)[n + offset_] = d;
  TwoSidedDigitSequence copy = *this;
  copy.overrides_ = std::move(updated);
  return copy;
}

bool TwoSidedDigitSequence::is_seeded() const noexcept {
  return std::holds_alternative<Seeded>(source_);
}

std::uint64_t TwoSidedDigitSequence::seed() const {
  if (!is_seeded()) throw ValidationError("pattern-backed sequence has no seed");
  return std::get<Seeded>(source_).seed;
}

const std::vector<Digit>& TwoSidedDigitSequence::pattern() const {
  if (is_seeded()) throw ValidationError("seeded sequence has no pattern");
  return *std::get<Pattern>(source_).digits;
}

std::map<std::int64_t, Digit> TwoSidedDigitSequence::overrides() const {
  std::map<std::int64_t, Digit> shifted_view;
  if (overrides_) {
    for (const auto& [index, d] : *overrides_) shifted_view.emplace(index - offset_, d);
  }
  return shifted_view;
}

// ---------------------------------------------------------------------------

DigitSequence::DigitSequence(unsigned base,
                             std::variant<PeriodicForm, TwoSidedDigitSequence> rep)
    : base_(base), rep_(std::move(rep)) {}

DigitSequence DigitSequence::periodic(unsigned base, std::vector<Digit> prefix,
                                      std::vector<Digit> period) {
  check_base(base);
  if (period.empty()) throw ValidationError("period must have length >= 1");
  check_digits(prefix, base, "prefix");
  check_digits(period, base, "period");
  return DigitSequence(base, PeriodicForm{std::move(prefix), std::move(period)});
}

DigitSequence DigitSequence::seeded(std::uint64_t seed, unsigned base) {
  return window(TwoSidedDigitSequence::bernoulli(seed, base));
}

DigitSequence DigitSequence::window(TwoSidedDigitSequence source) {
  const unsigned base = source.base();
  return DigitSequence(base, std::move(source));
}

Digit DigitSequence::digit(std::uint64_t n) const {
  if (n == 0) throw ValidationError("one-sided digit index starts at 1");
  if (const auto* form = std::get_if<PeriodicForm>(&rep_)) {
    if (n <= form->prefix.size()) return form->prefix[n - 1];
    return form->period[(n - 1 - form->prefix.size()) % form->period.size()];
  }
  return std::get<TwoSidedDigitSequence>(rep_).digit(static_cast<std::int64_t>(n));
}

void DigitSequence::fill(std::uint64_t first, std::span<Digit> out) const {
  if (first == 0) throw ValidationError("one-sided digit index starts at 1");
  if (const auto* src = source()) {
    src->fill(static_cast<std::int64_t>(first), out);
    return;
  }
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = digit(first + i);
}

DigitSequence DigitSequence::shifted(std::uint64_t steps) const {
  if (const auto* form = std::get_if<PeriodicForm>(&rep_)) {
    PeriodicForm next;
    if (steps <= form->prefix.size()) {
      next.prefix.assign(form->prefix.begin() + static_cast<std::ptrdiff_t>(steps),
                         form->prefix.end());
      next.period = form->period;
    } else {
      const std::size_t p = form->period.size();
      const std::size_t r = (steps - form->prefix.size()) % p;
      next.period = form->period;
      std::rotate(next.period.begin(), next.period.begin() + static_cast<std::ptrdiff_t>(r),
                  next.period.end());
    }
    return DigitSequence(base_, std::move(next));
  }
  return DigitSequence(base_, std::get<TwoSidedDigitSequence>(rep_).shifted(
                                  static_cast<std::int64_t>(steps)));
}

bool DigitSequence::is_explicit_periodic() const noexcept {
  return std::holds_alternative<PeriodicForm>(rep_);
}

std::optional<PeriodicForm> DigitSequence::periodic_form() const {
  if (const auto* form = std::get_if<PeriodicForm>(&rep_)) return *form;
  const auto& src = std::get<TwoSidedDigitSequence>(rep_);
  if (src.is_seeded()) return std::nullopt;
  std::int64_t last_override = 0;
  for (const auto& [index, d] : src.overrides()) last_override = std::max(last_override, index);
  const auto prefix_len = static_cast<std::size_t>(last_override);
  const std::size_t p = src.pattern().size();
  PeriodicForm form;
  form.prefix.resize(prefix_len);
  form.period.resize(p);
  if (prefix_len > 0) fill(1, form.prefix);
  fill(prefix_len + 1, form.period);
  return form;
}

const TwoSidedDigitSequence* DigitSequence::source() const noexcept {
  return std::get_if<TwoSidedDigitSequence>(&rep_);
}

// ---------------------------------------------------------------------------

std::size_t float_depth(unsigned base) {
  check_base(base);
  const unsigned __int128 target = static_cast<unsigned __int128>(1) << 64;
  unsigned __int128 acc = 1;
  std::size_t k = 0;
  while (acc < target) {
    acc *= base;
    ++k;
  }
  return k;
}

double digits_value(std::span<const Digit> digits, unsigned base) {
  const double m = base;
  double v = 0.0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) v = (v + *it) / m;
  return clamp_below_one(v);
}

DigitSequence encode(Fraction value, unsigned base, std::size_t max_digits) {
  check_base(base);
  if (value.den == 0) throw ValidationError("encode: zero denominator");
  if (value.num >= value.den) {
    throw ValidationError("encode: value " + std::to_string(value.num) + "/" +
                          std::to_string(value.den) + " is outside [0,1)");
  }
  const std::uint64_t g = std::gcd(value.num, value.den);
  const std::uint64_t den = value.den / (g == 0 ? 1 : g);
  std::uint64_t r = value.num / (g == 0 ? 1 : g);

  // Index at which each remainder first appeared, before its digit is emitted.
  constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 18;
  std::vector<std::int64_t> dense;
  std::unordered_map<std::uint64_t, std::int64_t> sparse;
  if (den <= kDenseLimit) dense.assign(den, -1);
  auto seen = [&](std::uint64_t rem) -> std::int64_t {
    if (!dense.empty()) return dense[rem];
    auto it = sparse.find(rem);
    return it == sparse.end() ? -1 : it->second;
  };
  auto mark = [&](std::uint64_t rem, std::int64_t at) {
    if (!dense.empty()) dense[rem] = at;
    else sparse.emplace(rem, at);
  };

  std::vector<Digit> digits;
  for (;;) {
    if (const std::int64_t start = seen(r); start >= 0) {
      std::vector<Digit> prefix(digits.begin(), digits.begin() + start);
      std::vector<Digit> period(digits.begin() + start, digits.end());
      return DigitSequence::periodic(base, std::move(prefix), std::move(period));
    }
    if (digits.size() >= max_digits) {
      throw ValidationError("encode: prefix+period of " + std::to_string(value.num) + "/" +
                            std::to_string(value.den) + " exceeds " +
                            std::to_string(max_digits) + " digits");
    }
    mark(r, static_cast<std::int64_t>(digits.size()));
    const unsigned __int128 t = static_cast<unsigned __int128>(r) * base;
    digits.push_back(static_cast<Digit>(t / den));
    r = static_cast<std::uint64_t>(t % den);
  }
}

BigRational periodic_value(const PeriodicForm& form, unsigned base) {
  check_base(base);
  if (form.period.empty()) throw ValidationError("period must have length >= 1");
  const BigInt head = digits_integer(form.prefix, base);
  const BigInt cycle = digits_integer(form.period, base);
  const BigInt cycle_den = power(base, form.period.size()) - 1;
  const BigRational tail(cycle, cycle_den);
  return (BigRational(head) + tail) / BigRational(power(base, form.prefix.size()));
}

MadicRational evaluate_d_exact(const DigitSequence& omega, std::size_t depth) {
  if (depth == 0) throw ValidationError("evaluate_d: depth must be >= 1");
  std::vector<Digit> digits(depth);
  omega.fill(1, digits);
  return MadicRational{digits_integer(digits, omega.base()), omega.base(), depth};
}

CirclePoint evaluate_d(const DigitSequence& omega, std::size_t depth) {
  if (depth == 0) depth = float_depth(omega.base());
  std::vector<Digit> digits(depth);
  omega.fill(1, digits);
  return CirclePoint{digits_value(digits, omega.base()), FloatTruncation{depth}};
}

DigitSequence shift(const DigitSequence& omega, std::uint64_t steps) {
  return omega.shifted(steps);
}

double doubling_map_float(double theta, unsigned base) {
  check_base(base);
  if (!(theta >= 0.0 && theta < 1.0)) throw ValidationError("doubling_map: value outside [0,1)");
  const double x = std::fmod(theta * base, 1.0);
  return x < 0.0 ? x + 1.0 : x;
}

CirclePoint doubling_map_float(const CirclePoint& theta, unsigned base) {
  if (const auto* exact = std::get_if<MadicRational>(&theta.provenance)) {
    if (exact->base != base) throw ValidationError("doubling_map: base mismatch");
    MadicRational next = doubling_map_exact(*exact);
    const double v = next.to_double();
    return CirclePoint{v, std::move(next)};
  }
  return CirclePoint{doubling_map_float(theta.value, base), theta.provenance};
}

Fraction doubling_map_exact(Fraction theta, unsigned base) {
  check_base(base);
  if (theta.den == 0 || theta.num >= theta.den) {
    throw ValidationError("doubling_map: value outside [0,1)");
  }
  const unsigned __int128 t = static_cast<unsigned __int128>(theta.num) * base;
  return Fraction{static_cast<std::uint64_t>(t % theta.den), theta.den};
}

MadicRational doubling_map_exact(const MadicRational& theta) {
  const BigInt modulus = power(theta.base, theta.depth);
  return MadicRational{BigInt((theta.numerator * theta.base) % modulus), theta.base,
                       theta.depth};
}

TwoSidedDigitSequence sample_bernoulli(std::uint64_t seed, unsigned base) {
  return TwoSidedDigitSequence::bernoulli(seed, base);
}

DigitSequence restrict_to_halfline(const TwoSidedDigitSequence& omega) {
  return DigitSequence::window(omega);
}

}  // namespace doubling
