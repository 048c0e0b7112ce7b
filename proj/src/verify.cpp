#include "doubling/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "doubling/cocycle.hpp"
#include "doubling/parallel.hpp"
#include "doubling/philox.hpp"
#include "doubling/symbolic.hpp"
#include "doubling/tridiagonal.hpp"

namespace doubling {

namespace {

// Deterministic test-case generator keyed by (seed, check, case).
class CaseRng {
 public:
  CaseRng(std::uint64_t seed, std::uint64_t check, std::uint64_t index)
      : key_{seed, check}, index_(index) {}

  std::uint64_t next() {
    if (used_ == 4) {
      block_ = philox4x64({counter_++, index_, 0, 0}, key_);
      used_ = 0;
    }
    return block_[used_++];
  }
  std::uint64_t below(std::uint64_t bound) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
  }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1p-53);
  }

 private:
  PhiloxKey key_;
  std::uint64_t index_;
  std::uint64_t counter_ = 0;
  PhiloxBlock block_{};
  int used_ = 4;
};

CheckResult summarize_check(std::string name, const std::vector<char>& ok,
                            const std::string& detail) {
  const auto failures = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 0));
  CheckResult r{std::move(name), failures == 0, ok.size(), detail};
  if (failures > 0) r.detail += "; " + std::to_string(failures) + " failing case(s)";
  return r;
}

}  // namespace

std::vector<CheckResult> conjugacy_check(unsigned base, const IdentitySuiteOptions& options) {
  std::vector<char> ok(options.conjugacy_prefixes, 0);
  parallel_for(ok.size(), options.threads, [&](std::size_t i) {
    CaseRng rng(options.seed, 1, i);
    const std::size_t k = 2 + rng.below(options.max_prefix_length - 1);
    std::vector<Digit> prefix(k);
    for (Digit& d : prefix) d = static_cast<Digit>(rng.below(base));
    const DigitSequence omega = DigitSequence::periodic(base, prefix, {0});
    // T(D_k(omega)) against D_{k-1}(S omega), as integers and as rationals.
    const MadicRational image = doubling_map_exact(evaluate_d_exact(omega, k));
    const MadicRational shifted = evaluate_d_exact(shift(omega, 1), k - 1);
    ok[i] = image.numerator == shifted.numerator * base && image.value() == shifted.value();
  });
  return {summarize_check("conjugacy", ok, "exact T(D_k w) = D_{k-1}(S w)")};
}

std::vector<CheckResult> restriction_check(const PotentialSpec& spec,
                                           const IdentitySuiteOptions& options) {
  std::vector<char> ok(options.restriction_seeds, 0);
  parallel_for(ok.size(), options.threads, [&](std::size_t i) {
    const TwoSidedDigitSequence omega =
        sample_bernoulli(derive_seed(options.seed, i), spec.base());
    const TridiagonalOperator whole = build_wholeline_box(spec, omega, options.restriction_box);
    const TridiagonalOperator cut = restrict(whole);
    const TridiagonalOperator half =
        build_halfline_box(spec, restrict_to_halfline(omega), options.restriction_box);
    ok[i] = std::equal(cut.diagonal().begin(), cut.diagonal().end(), half.diagonal().begin(),
                       half.diagonal().end());
  });
  return {summarize_check("restriction", ok,
                          "bit-exact diagonals, N = " + std::to_string(options.restriction_box))};
}

std::vector<CheckResult> cocycle_check(const PotentialSpec& spec,
                                       const IdentitySuiteOptions& options) {
  std::vector<char> ok(options.cocycle_tuples, 0);
  std::vector<double> errors(options.cocycle_tuples, 0.0);
  parallel_for(ok.size(), options.threads, [&](std::size_t i) {
    CaseRng rng(options.seed, 3, i);
    const std::uint64_t n = 1 + rng.below(500);
    const std::uint64_t m = 1 + rng.below(500);
    const double bound = 2.0 + spec.bound();
    const double energy = rng.uniform(-bound - 0.5, bound + 0.5);
    const DigitSequence omega = ensemble_sample(options.seed, 1000 + i, spec.base());
    errors[i] = cocycle_identity_error(spec, omega, shift(omega, m), energy, n, m);
    ok[i] = errors[i] <= 1e-9;
  });
  char buf[64];
  std::snprintf(buf, sizeof buf, "max relative error %.3g",
                *std::max_element(errors.begin(), errors.end()));
  return {summarize_check("cocycle", ok, buf)};
}

std::vector<CheckResult> determinant_check(const PotentialSpec& spec,
                                           const IdentitySuiteOptions& options) {
  std::vector<char> ok(options.determinant_samples, 0);
  std::vector<double> errors(options.determinant_samples, 0.0);
  parallel_for(ok.size(), options.threads, [&](std::size_t i) {
    CaseRng rng(options.seed, 4, i);
    const double bound = 2.0 + spec.bound();
    const double energy = rng.uniform(-bound - 0.5, bound + 0.5);
    const std::uint64_t n = 1 + rng.below(options.determinant_steps);
    const DigitSequence omega = ensemble_sample(options.seed, 2000 + i, spec.base());
    const TransferCocycle m = propagate(spec, omega, energy, n);
    // log10 |det(current) * exp(2 log_scale) - 1|, kept finite when the product is hyperbolic.
    const double norm = m.current().sup_norm();
    const double det = m.current().scaled(1.0 / norm).det();
    const double log_det = det == 0.0 ? -std::numeric_limits<double>::infinity()
                                      : std::log(std::abs(det)) + 2.0 * (std::log(norm) + m.log_scale());
    double log_error;
    if (det > 0.0 && log_det < 1.0) {
      log_error = std::log10(std::abs(std::expm1(log_det)));
    } else if (det > 0.0) {
      log_error = (log_det + std::log1p(-std::exp(-log_det))) / std::log(10.0);
    } else {
      log_error = (std::max(log_det, 0.0) + std::log1p(std::exp(-std::abs(log_det)))) / std::log(10.0);
    }
    errors[i] = log_error;
    ok[i] = log_error <= -6.0;
  });
  char buf[64];
  std::snprintf(buf, sizeof buf, "max |det - 1| 1e%.1f",
                *std::max_element(errors.begin(), errors.end()));
  return {summarize_check("determinant", ok, buf)};
}

std::vector<CheckResult> roundtrip_check(unsigned base, const IdentitySuiteOptions& options) {
  std::vector<char> ok(options.roundtrip_fractions, 0);
  parallel_for(ok.size(), options.threads, [&](std::size_t i) {
    CaseRng rng(options.seed, 5, i);
    const std::uint64_t q = 1 + rng.below(std::uint64_t{1} << 16);
    const std::uint64_t p = rng.below(q);
    const DigitSequence omega = encode(Fraction{p, q}, base);
    ok[i] = periodic_value(*omega.periodic_form(), base) == BigRational(p, q);
  });
  return {summarize_check("roundtrip", ok, "encode then exact evaluation, q <= 2^16")};
}

std::vector<CheckResult> shift_composition_check(unsigned base,
                                                 const IdentitySuiteOptions& options) {
  std::vector<char> ok(options.shift_cases, 0);
  parallel_for(ok.size(), options.threads, [&](std::size_t i) {
    CaseRng rng(options.seed, 6, i);
    const std::uint64_t a = 1 + rng.below(1000);
    const std::uint64_t b = 1 + rng.below(1000);
    const DigitSequence seeded = DigitSequence::seeded(derive_seed(options.seed, 3000 + i), base);
    std::vector<Digit> prefix(rng.below(20));
    std::vector<Digit> period(1 + rng.below(20));
    for (Digit& d : prefix) d = static_cast<Digit>(rng.below(base));
    for (Digit& d : period) d = static_cast<Digit>(rng.below(base));
    const DigitSequence periodic = DigitSequence::periodic(base, prefix, period);
    bool good = true;
    for (const DigitSequence* omega : {&seeded, &periodic}) {
      const DigitSequence twice = shift(shift(*omega, a), b);
      for (std::uint64_t n = 1; n <= 64; ++n) good = good && twice.digit(n) == omega->digit(n + a + b);
    }
    ok[i] = good;
  });
  return {summarize_check("shift-composition", ok, "S^b S^a = S^(a+b) on 64-digit windows")};
}

std::vector<CheckResult> run_identity_suite(const PotentialSpec& spec,
                                            const IdentitySuiteOptions& options) {
  std::vector<CheckResult> results;
  auto append = [&](std::vector<CheckResult> part) {
    results.insert(results.end(), part.begin(), part.end());
  };
  append(conjugacy_check(spec.base(), options));
  append(restriction_check(spec, options));
  append(cocycle_check(spec, options));
  append(determinant_check(spec, options));
  append(roundtrip_check(spec.base(), options));
  append(shift_composition_check(spec.base(), options));
  return results;
}

}  // namespace doubling
