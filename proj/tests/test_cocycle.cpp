#include <doctest.h>

#include <cmath>
#include <vector>

#include "doubling/cocycle.hpp"
#include "doubling/errors.hpp"
#include "doubling/philox.hpp"
#include "doubling/potential.hpp"
#include "doubling/symbolic.hpp"

using namespace doubling;

namespace {

const PotentialSpec kFree(1.0, SamplingFunction::table({0.0}, true));

double free_gamma(double e) {
  const double a = std::abs(e);
  return a <= 2.0 ? 0.0 : std::log((a + std::sqrt(a * a - 4.0)) / 2.0);
}

double uniform(std::uint64_t i, std::uint64_t j, double lo, double hi) {
  const std::uint64_t w = philox4x64({i, j, 7, 0}, {99, 0})[0];
  return lo + (hi - lo) * static_cast<double>(w >> 11) * 0x1p-53;
}

// First `count` digits of omega followed by a zero tail, optionally complemented.
DigitSequence frozen(const DigitSequence& omega, std::size_t count, bool complement) {
  std::vector<Digit> prefix(count);
  omega.fill(1, prefix);
  if (complement) {
    for (Digit& d : prefix) d = 1 - d;
  }
  return DigitSequence::periodic(2, std::move(prefix), {0});
}

}  // namespace

TEST_CASE("one-step matrices") {
  CHECK(one_step(0.0, 0.0) == TransferMatrix{0.0, -1.0, 1.0, 0.0});
  CHECK(one_step(3.0, 1.0) == TransferMatrix{2.0, -1.0, 1.0, 0.0});
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const TransferMatrix m = one_step(uniform(i, 0, -1e6, 1e6), uniform(i, 1, -1e6, 1e6));
    REQUIRE(m.det() == 1.0);
  }
}

TEST_CASE("propagate follows the ordered product") {
  const PotentialSpec spec(1.0, SamplingFunction::cosine());
  const DigitSequence omega = DigitSequence::seeded(3, 2);

  const TransferCocycle first = propagate(spec, omega, 0.7, 1);
  CHECK(first.current() == one_step(0.7, halfline_potential(spec, omega, 1)));
  CHECK(first.log_scale() == 0.0);
  CHECK(first.steps() == 1);

  // Naive long-double product, site 1 rightmost.
  const std::vector<double> v = halfline_potentials(spec, omega, 60);
  long double a = 1, b = 0, c = 0, d = 1;
  for (double x : v) {
    const long double t = 0.7L - x;
    const long double na = t * a - c, nb = t * b - d;
    c = a;
    d = b;
    a = na;
    b = nb;
  }
  const TransferCocycle m = propagate(spec, omega, 0.7, 60);
  CHECK(m.log_scale() == 0.0);
  CHECK(m.current().a == doctest::Approx(static_cast<double>(a)).epsilon(1e-12));
  CHECK(m.current().b == doctest::Approx(static_cast<double>(b)).epsilon(1e-12));
  CHECK(m.current().c == doctest::Approx(static_cast<double>(c)).epsilon(1e-12));
  CHECK(m.current().d == doctest::Approx(static_cast<double>(d)).epsilon(1e-12));
  CHECK_THROWS_AS(propagate(spec, omega, 0.7, 0), ValidationError);
}

TEST_CASE("rescaling keeps entries in range and reconstructs the norm") {
  const DigitSequence any = DigitSequence::seeded(1, 2);
  const TransferCocycle m = propagate(kFree, any, 3.0, 10000);
  CHECK(m.steps() == 10000);
  CHECK(m.log_scale() > 0.0);
  CHECK(m.current().sup_norm() <= kRescaleHigh);
  CHECK(m.current().sup_norm() >= kRescaleLow);
  CHECK(std::abs(m.log_norm() / 10000.0 - std::log((3.0 + std::sqrt(5.0)) / 2.0)) < 1e-3);

  const TransferCocycle rotation = propagate(kFree, any, 0.0, 10000);
  CHECK(rotation.log_norm() / 10000.0 <= 1e-3);
  CHECK(rotation.log_scale() == 0.0);
}

TEST_CASE("non-finite products abort with a numerical failure") {
  TransferCocycle m;
  CHECK_THROWS_AS(m.advance(NAN, 0.0), NumericalError);
  TransferCocycle big;
  CHECK_THROWS_AS(big.advance(INFINITY, 0.0), NumericalError);
}

TEST_CASE("cocycle identity") {
  const PotentialSpec spec(1.0, SamplingFunction::cosine());
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const DigitSequence omega = DigitSequence::seeded(seed, 2);
    CHECK(cocycle_property_check(spec, omega, uniform(seed, 2, -3, 3), 1, 1));
    CHECK(cocycle_property_check(spec, omega, 1.7, 500, 500));
    CHECK(cocycle_property_check(spec, omega, uniform(seed, 3, -3, 3), 1 + seed * 13, 1 + seed * 31));
  }
  const DigitSequence omega = DigitSequence::seeded(5, 2);
  CHECK(cocycle_identity_error(spec, omega, shift(omega, 300), 1.7, 400, 300) <= 1e-9);
  CHECK(cocycle_identity_error(spec, omega, shift(omega, 301), 1.7, 400, 300) > 1e-3);
  CHECK(cocycle_identity_error(spec, omega, shift(omega, 299), 1.7, 400, 300) > 1e-3);
  CHECK_THROWS_AS(cocycle_property_check(spec, omega, 1.0, 600, 500), ValidationError);
  CHECK_THROWS_AS(cocycle_property_check(spec, omega, 1.0, 0, 5), ValidationError);
}

TEST_CASE("determinant reconstruction while norms stay moderate") {
  // Inside the free band the product is a rotation conjugate; a period-2
  // potential at its band midpoint is likewise bounded.
  const DigitSequence any = DigitSequence::seeded(1, 2);
  for (double e : {-1.9, -1.0, 0.0, 0.3, 1.5}) {
    for (std::uint64_t n : {1ULL, 100ULL, 10000ULL}) {
      const TransferCocycle m = propagate(kFree, any, e, n);
      CHECK(std::abs(m.current().det() * std::exp(2.0 * m.log_scale()) - 1.0) <= 1e-9);
    }
  }
  const PotentialSpec alternating(1.0, SamplingFunction::table({1.0, -1.0}));
  const DigitSequence third = DigitSequence::periodic(2, {}, {0, 1});
  const double mid = 0.5 * (1.0 + std::sqrt(5.0));
  const TransferCocycle m = propagate(alternating, third, mid, 10000);
  CHECK(std::abs(m.current().det() * std::exp(2.0 * m.log_scale()) - 1.0) <= 1e-9);
}

TEST_CASE("scale invariance of the estimate") {
  const PotentialSpec spec(2.0, SamplingFunction::cosine());
  const std::vector<double> v = halfline_potentials(spec, DigitSequence::seeded(8, 2), 5000);
  const TransferCocycle base = propagate(v, 0.4);
  for (double c : {3.0, 1e10, 1e200}) {
    const TransferCocycle scaled = propagate(v, 0.4, TransferCocycle(TransferMatrix{}.scaled(c)));
    const double diff = (scaled.log_norm() - base.log_norm()) / 5000.0;
    CHECK(std::abs(diff - std::log(c) / 5000.0) <= 1e-12 * std::log(c));
    CHECK(std::abs(diff) <= 2.0 * std::log(c) / 5000.0);
  }
}

TEST_CASE("estimate_gamma examples") {
  const LyapunovEstimate free3 = estimate_gamma(kFree, 3.0, 100000, 4, 1);
  CHECK(std::abs(free3.mean - 0.9624236501192069) <= 1e-3);
  CHECK(free3.std_error <= 1e-12);
  CHECK(free3.n_steps == 100000);
  CHECK(free3.n_samples == 4);

  const PotentialSpec spec(2.0, SamplingFunction::cosine());
  const LyapunovEstimate centre = estimate_gamma(spec, 0.0, 100000, 16, 1);
  CHECK(centre.mean > 3.0 * centre.std_error);

  const DigitSequence same = ensemble_sample(7, 0, 2);
  const std::vector<DigitSequence> twins{same, same};
  CHECK(estimate_gamma(spec, 0.5, 2000, twins).std_error == 0.0);

  CHECK_THROWS_AS(estimate_gamma(spec, 0.5, 2000, 1, 1), ValidationError);
  CHECK_THROWS_AS(estimate_gamma(spec, 0.5, 0, 4, 1), ValidationError);
}

TEST_CASE("summary statistics") {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  const LyapunovEstimate est = summarize(0.5, 10, xs);
  CHECK(est.mean == 2.5);
  CHECK(est.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  CHECK(est.energy == 0.5);
}

TEST_CASE("free curve matches the closed form") {
  const LyapunovCurve curve = lyapunov_curve(kFree, EnergyGrid{-3.0, 3.0, 61}, 100000, 4, 11);
  REQUIRE(curve.points.size() == 61);
  for (const LyapunovEstimate& p : curve.points) {
    if (std::abs(p.energy) <= 2.0) {
      CHECK(p.mean <= 1e-3);
    } else if (std::abs(p.energy) > 2.05) {
      CHECK(std::abs(p.mean - free_gamma(p.energy)) <= 1e-3);
    }
  }
}

TEST_CASE("one-point grid reduces to estimate_gamma") {
  const PotentialSpec spec(1.0, SamplingFunction::step(0.4));
  const LyapunovCurve curve = lyapunov_curve(spec, EnergyGrid{0.8, 0.8, 1}, 5000, 6, 21);
  const LyapunovEstimate direct = estimate_gamma(spec, 0.8, 5000, 6, 21);
  REQUIRE(curve.points.size() == 1);
  CHECK(curve.points[0].mean == direct.mean);
  CHECK(curve.points[0].std_error == direct.std_error);
}

TEST_CASE("curves are bit-identical across thread counts") {
  const PotentialSpec spec(2.0, SamplingFunction::cosine());
  const EnergyGrid grid{-4.2, 4.2, 17};
  const LyapunovCurve one = lyapunov_curve(spec, grid, 3000, 8, 5, 1);
  for (unsigned threads : {2U, 4U, 8U}) {
    const LyapunovCurve many = lyapunov_curve(spec, grid, 3000, 8, 5, threads);
    for (std::size_t i = 0; i < grid.count; ++i) {
      REQUIRE(one.points[i].mean == many.points[i].mean);
      REQUIRE(one.points[i].std_error == many.points[i].std_error);
    }
    CHECK(estimate_gamma(spec, 0.1, 3000, 8, 5, threads).mean ==
          estimate_gamma(spec, 0.1, 3000, 8, 5, 1).mean);
  }
}

TEST_CASE("non-negativity in expectation") {
  const PotentialSpec spec(1.0, SamplingFunction::cosine());
  const LyapunovCurve curve = lyapunov_curve(spec, EnergyGrid{-3.2, 3.2, 33}, 20000, 8, 2);
  for (const LyapunovEstimate& p : curve.points) CHECK(p.mean >= -5.0 * p.std_error - 1e-6);
}

TEST_CASE("gauge symmetry: gamma_V(E) = gamma_{-V}(-E)") {
  // For f = [1, -1] complementing every digit negates the potential, and the
  // (-1)^n gauge maps energy E with V onto -E with -V.
  const PotentialSpec spec(1.5, SamplingFunction::table({1.0, -1.0}));
  constexpr std::size_t kSteps = 4000;
  for (std::uint64_t i = 0; i < 8; ++i) {
    const DigitSequence omega = frozen(ensemble_sample(3, i, 2), kSteps + 80, false);
    const DigitSequence mirror = frozen(ensemble_sample(3, i, 2), kSteps + 80, true);
    const std::vector<double> v = halfline_potentials(spec, omega, kSteps);
    const std::vector<double> w = halfline_potentials(spec, mirror, kSteps);
    for (std::size_t n = 0; n < kSteps; ++n) REQUIRE(w[n] == -v[n]);
    for (double e : {0.3, 1.1, 2.9}) {
      CHECK(propagate(spec, omega, e, kSteps).log_norm() ==
            propagate(spec, mirror, -e, kSteps).log_norm());
    }
  }
  // Distributional version over independent samples.
  const LyapunovCurve curve = lyapunov_curve(spec, EnergyGrid{-3.0, 3.0, 13}, 50000, 16, 4);
  for (std::size_t i = 0; i < 13; ++i) {
    const LyapunovEstimate& p = curve.points[i];
    const LyapunovEstimate& q = curve.points[12 - i];
    CHECK(std::abs(p.mean - q.mean) <= 3.0 * std::hypot(p.std_error, q.std_error));
  }
}

TEST_CASE("cosine curve is not symmetric under E -> -E") {
  // theta -> theta + 1/2 only flips the first digit, which no V(n >= 1)
  // reads, so cos does not induce V -> -V for this family.
  const PotentialSpec spec(2.0, SamplingFunction::cosine());
  const LyapunovEstimate left = estimate_gamma(spec, -0.84, 100000, 16, 1);
  const LyapunovEstimate right = estimate_gamma(spec, 0.84, 100000, 16, 1);
  CHECK(left.mean - right.mean > 10.0 * std::hypot(left.std_error, right.std_error));
}

TEST_CASE("single-orbit estimator on periodic theta") {
  const PotentialSpec spec(1.0, SamplingFunction::table({1.0, -1.0}));
  const DigitSequence third = DigitSequence::periodic(2, {}, {0, 1});
  const double mid = 0.5 * (1.0 + std::sqrt(5.0));
  CHECK(estimate_gamma_orbit(spec, third, mid, 100000).mean <= 2e-4);
  const LyapunovEstimate gap = estimate_gamma_orbit(spec, third, 0.0, 100000);
  CHECK(gap.mean > 3.0 * gap.std_error);
  // |Delta(0)| = |0 - 1 - 2| = 3: growth rate acosh(3/2)/2 per step.
  CHECK(gap.mean == doctest::Approx(std::acosh(1.5) / 2.0).epsilon(1e-4));
  CHECK_THROWS_AS(estimate_gamma_orbit(spec, third, 0.0, 10, 16), ValidationError);
}

TEST_CASE("energy grid") {
  const EnergyGrid grid{-1.0, 1.0, 5};
  CHECK(grid.energy(0) == -1.0);
  CHECK(grid.energy(2) == 0.0);
  CHECK(grid.energy(4) == 1.0);
  const EnergyGrid enclosure = EnergyGrid::enclosure(PotentialSpec(2.0, SamplingFunction::cosine()), 101);
  CHECK(enclosure.lo == -4.0);
  CHECK(enclosure.hi == 4.0);
  CHECK_THROWS_AS(EnergyGrid({1.0, -1.0, 3}).validate(), ValidationError);
  CHECK_THROWS_AS(EnergyGrid({0.0, 1.0, 0}).validate(), ValidationError);
}
