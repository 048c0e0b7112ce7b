#include "doubling/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "doubling/errors.hpp"

namespace doubling {

namespace {

void check_base_match(const PotentialSpec& spec, unsigned sequence_base) {
  if (spec.base() != sequence_base) {
    throw ValidationError("potential base " + std::to_string(spec.base()) +
                          " does not match digit sequence base " +
                          std::to_string(sequence_base));
  }
}

// Sites first..first+count-1 from one contiguous digit buffer; site i reads
// buffer[i+1 .. i+depth].
template <class FillDigits>
std::vector<double> potentials_from_digits(const PotentialSpec& spec, std::size_t count,
                                           FillDigits&& fill) {
  const std::size_t depth = float_depth(spec.base());
  std::vector<Digit> digits(count + depth);
  fill(std::span<Digit>(digits));
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double theta = digits_value(std::span<const Digit>(digits).subspan(i, depth),
                                      spec.base());
    out[i] = spec.coupling() * spec.f()(theta);
  }
  return out;
}

}  // namespace

SamplingFunction::SamplingFunction(std::variant<Cosine, Step, Table> kind)
    : kind_(std::move(kind)) {}

SamplingFunction SamplingFunction::cosine() {
  SamplingFunction f(Cosine{});
  f.sup_abs_ = 1.0;
  return f;
}

SamplingFunction SamplingFunction::step(double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ValidationError("step threshold must lie in (0,1), got " + std::to_string(threshold));
  }
  SamplingFunction f(Step{threshold});
  f.sup_abs_ = 1.0;
  return f;
}

SamplingFunction SamplingFunction::table(std::vector<double> values, bool allow_constant) {
  if (values.empty()) throw ValidationError("table sampling function needs at least one value");
  double sup = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw ValidationError("table values must be finite");
    sup = std::max(sup, std::abs(v));
  }
  const bool constant =
      std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); });
  if (constant && !allow_constant) {
    throw ValidationError("sampling function must be non-constant (table has one distinct value)");
  }
  SamplingFunction f(Table{std::move(values)});
  f.sup_abs_ = sup;
  f.constant_ = constant;
  return f;
}

double SamplingFunction::operator()(double theta) const {
  if (std::holds_alternative<Cosine>(kind_)) {
    return std::cos(2.0 * std::numbers::pi * theta);
  }
  if (const auto* s = std::get_if<Step>(&kind_)) {
    return theta < s->threshold ? 1.0 : 0.0;
  }
  const auto& values = std::get<Table>(kind_).values;
  const double k = static_cast<double>(values.size());
  // floor(theta*K) can round up to K as theta -> 1-.
  const auto cell = std::min<std::size_t>(static_cast<std::size_t>(std::floor(theta * k)),
                                          values.size() - 1);
  return values[cell];
}

std::string_view SamplingFunction::kind_name() const noexcept {
  switch (kind_.index()) {
    case 0: return "cosine";
    case 1: return "step";
    default: return "table";
  }
}

bool operator==(const SamplingFunction& a, const SamplingFunction& b) {
  if (a.kind_.index() != b.kind_.index()) return false;
  if (const auto* s = std::get_if<SamplingFunction::Step>(&a.kind_)) {
    return s->threshold == std::get<SamplingFunction::Step>(b.kind_).threshold;
  }
  if (const auto* t = std::get_if<SamplingFunction::Table>(&a.kind_)) {
    return t->values == std::get<SamplingFunction::Table>(b.kind_).values;
  }
  return true;
}

PotentialSpec::PotentialSpec(double coupling, SamplingFunction f, unsigned base)
    : coupling_(coupling), f_(std::move(f)), base_(base) {
  if (!(coupling > 0.0) || !std::isfinite(coupling)) {
    throw ValidationError("coupling must be a positive finite number, got " +
                          std::to_string(coupling));
  }
  if (base < 2) throw ValidationError("base must be >= 2, got " + std::to_string(base));
}

double eval_f(const SamplingFunction& f, const CirclePoint& theta) { return f(theta.value); }

double halfline_potential(const PotentialSpec& spec, const DigitSequence& omega,
                          std::uint64_t n) {
  if (n == 0) throw ValidationError("half-line sites start at n = 1");
  check_base_match(spec, omega.base());
  return spec.coupling() * eval_f(spec.f(), evaluate_d(shift(omega, n)));
}

std::vector<double> halfline_potentials(const PotentialSpec& spec, const DigitSequence& omega,
                                        std::size_t count) {
  check_base_match(spec, omega.base());
  return potentials_from_digits(spec, count,
                                [&](std::span<Digit> buf) { omega.fill(2, buf); });
}

double wholeline_potential(const PotentialSpec& spec, const TwoSidedDigitSequence& omega,
                           std::int64_t n) {
  check_base_match(spec, omega.base());
  const std::size_t depth = float_depth(spec.base());
  std::vector<Digit> digits(depth);
  omega.fill(n + 1, digits);
  return spec.coupling() * spec.f()(digits_value(digits, spec.base()));
}

std::vector<double> wholeline_potentials(const PotentialSpec& spec,
                                         const TwoSidedDigitSequence& omega,
                                         std::int64_t first, std::int64_t last) {
  check_base_match(spec, omega.base());
  if (last < first) throw ValidationError("wholeline_potentials: empty site range");
  const auto count = static_cast<std::size_t>(last - first + 1);
  return potentials_from_digits(spec, count,
                                [&](std::span<Digit> buf) { omega.fill(first + 1, buf); });
}

}  // namespace doubling
