#include "doubling/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "doubling/errors.hpp"
#include "doubling/parallel.hpp"
#include "doubling/philox.hpp"

namespace doubling {

namespace {

std::string describe_energy(double energy) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "E=%.17g", energy);
  return buf;
}

template <class Fn>
auto with_seed_context(std::uint64_t seed, Fn&& fn) {
  try {
    return fn();
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(e.what()) + ", seed=" + std::to_string(seed));
  }
}

double per_step(const TransferCocycle& m) {
  return m.log_norm() / static_cast<double>(m.steps());
}

}  // namespace

double TransferMatrix::sup_norm() const noexcept {
  return std::max(std::max(std::abs(a), std::abs(b)), std::max(std::abs(c), std::abs(d)));
}

TransferMatrix one_step(double energy, double v) noexcept { return {energy - v, -1.0, 1.0, 0.0}; }

TransferCocycle::TransferCocycle(TransferMatrix start, double log_scale)
    : current_(start), log_scale_(log_scale) {}

void TransferCocycle::renormalize(double norm, double energy) {
  if (!std::isfinite(norm) || norm == 0.0) {
    throw NumericalError("non-finite transfer matrix at step " + std::to_string(steps_) + ", " +
                         describe_energy(energy));
  }
  current_ = current_.scaled(1.0 / norm);
  log_scale_ += std::log(norm);
}

void TransferCocycle::advance(double energy, double v) {
  const double e = energy - v;
  const TransferMatrix& m = current_;
  current_ = {e * m.a - m.c, e * m.b - m.d, m.a, m.b};
  ++steps_;
  const double norm = current_.sup_norm();
  if (!(norm <= kRescaleHigh && norm >= kRescaleLow)) renormalize(norm, energy);
}

void TransferCocycle::advance(double energy, std::span<const double> potentials) {
  for (double v : potentials) advance(energy, v);
}

double TransferCocycle::log_norm() const { return log_scale_ + std::log(current_.sup_norm()); }

TransferCocycle propagate(std::span<const double> potentials, double energy,
                          TransferCocycle start) {
  start.advance(energy, potentials);
  return start;
}

TransferCocycle propagate(const PotentialSpec& spec, const DigitSequence& omega, double energy,
                          std::uint64_t n) {
  if (n == 0) throw ValidationError("propagate: n must be >= 1");
  return propagate(halfline_potentials(spec, omega, n), energy);
}

double cocycle_identity_error(const PotentialSpec& spec, const DigitSequence& omega,
                              const DigitSequence& shifted, double energy, std::uint64_t n,
                              std::uint64_t m) {
  if (n == 0 || m == 0) throw ValidationError("cocycle check: n and m must be >= 1");
  const TransferCocycle whole = propagate(spec, omega, energy, n + m);
  const TransferCocycle first = propagate(spec, omega, energy, m);
  const TransferCocycle second = propagate(spec, shifted, energy, n);

  const TransferMatrix product = second.current() * first.current();
  const double log_product = second.log_scale() + first.log_scale() + std::log(product.sup_norm());
  const TransferMatrix x = whole.current().scaled(1.0 / whole.current().sup_norm());
  const TransferMatrix y = product.scaled(1.0 / product.sup_norm());
  const double entry_error = std::max({std::abs(x.a - y.a), std::abs(x.b - y.b),
                                       std::abs(x.c - y.c), std::abs(x.d - y.d)});
  const double log_error =
      std::abs(whole.log_norm() - log_product) / std::max(1.0, std::abs(whole.log_norm()));
  return std::max(entry_error, log_error);
}

bool cocycle_property_check(const PotentialSpec& spec, const DigitSequence& omega, double energy,
                            std::uint64_t n, std::uint64_t m) {
  if (n + m > 1000) throw ValidationError("cocycle check: n + m must be <= 1000");
  return cocycle_identity_error(spec, omega, shift(omega, m), energy, n, m) <= 1e-9;
}

LyapunovEstimate summarize(double energy, std::uint64_t n_steps,
                           std::span<const double> exponents) {
  LyapunovEstimate est{energy, 0.0, 0.0, n_steps, exponents.size()};
  if (exponents.empty()) return est;
  double sum = 0.0;
  for (double g : exponents) sum += g;
  est.mean = sum / static_cast<double>(exponents.size());
  if (exponents.size() > 1) {
    double ss = 0.0;
    for (double g : exponents) ss += (g - est.mean) * (g - est.mean);
    const double var = ss / static_cast<double>(exponents.size() - 1);
    est.std_error = std::sqrt(var / static_cast<double>(exponents.size()));
  }
  return est;
}

DigitSequence ensemble_sample(std::uint64_t seed, std::uint64_t index, unsigned base) {
  return restrict_to_halfline(sample_bernoulli(derive_seed(seed, index), base));
}

LyapunovEstimate estimate_gamma(const PotentialSpec& spec, double energy, std::uint64_t n,
                                std::span<const DigitSequence> samples, unsigned threads) {
  if (n == 0) throw ValidationError("estimate_gamma: n must be >= 1");
  if (samples.size() < 2) throw ValidationError("estimate_gamma: need at least 2 samples");
  std::vector<double> exponents(samples.size());
  parallel_for(samples.size(), threads, [&](std::size_t i) {
    exponents[i] = per_step(propagate(spec, samples[i], energy, n));
  });
  return summarize(energy, n, exponents);
}

LyapunovEstimate estimate_gamma(const PotentialSpec& spec, double energy, std::uint64_t n,
                                std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  if (samples < 2) throw ValidationError("estimate_gamma: need at least 2 samples");
  std::vector<DigitSequence> draws;
  draws.reserve(samples);
  for (std::uint64_t i = 0; i < samples; ++i) draws.push_back(ensemble_sample(seed, i, spec.base()));
  return with_seed_context(seed, [&] { return estimate_gamma(spec, energy, n, draws, threads); });
}

LyapunovEstimate estimate_gamma_orbit(const PotentialSpec& spec, const DigitSequence& omega,
                                      double energy, std::uint64_t n, std::uint64_t blocks) {
  if (blocks < 2 || n < blocks) {
    throw ValidationError("estimate_gamma_orbit: need 2 <= blocks <= n");
  }
  const std::vector<double> potentials = halfline_potentials(spec, omega, n);
  std::vector<double> rates(blocks);
  TransferCocycle m;
  double previous = 0.0;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    const std::uint64_t begin = b * n / blocks;
    const std::uint64_t end = (b + 1) * n / blocks;
    m.advance(energy, std::span<const double>(potentials).subspan(begin, end - begin));
    const double now = m.log_norm();
    rates[b] = (now - previous) / static_cast<double>(end - begin);
    previous = now;
  }
  LyapunovEstimate est = summarize(energy, n, rates);
  est.mean = per_step(m);
  return est;
}

double EnergyGrid::energy(std::size_t i) const {
  if (count == 1) return lo;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
}

void EnergyGrid::validate() const {
  if (count == 0) throw ValidationError("energy grid needs count >= 1");
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw ValidationError("energy grid must be finite");
  if (count > 1 && !(hi > lo)) throw ValidationError("energy grid needs hi > lo");
}

EnergyGrid EnergyGrid::enclosure(const PotentialSpec& spec, std::size_t count) {
  return EnergyGrid{-2.0 - spec.bound(), 2.0 + spec.bound(), count};
}

LyapunovCurve lyapunov_curve(const PotentialSpec& spec, const EnergyGrid& grid, std::uint64_t n,
                             std::uint64_t samples, std::uint64_t seed, unsigned threads) {
  grid.validate();
  if (n == 0) throw ValidationError("lyapunov_curve: n must be >= 1");
  if (samples < 2) throw ValidationError("lyapunov_curve: need at least 2 samples");

  std::vector<std::vector<double>> potentials(samples);
  parallel_for(samples, threads, [&](std::size_t s) {
    potentials[s] = halfline_potentials(spec, ensemble_sample(seed, s, spec.base()), n);
  });

  std::vector<double> exponents(grid.count * samples);
  with_seed_context(seed, [&] {
    parallel_for(exponents.size(), threads, [&](std::size_t task) {
      const std::size_t e = task / samples;
      const std::size_t s = task % samples;
      exponents[task] = per_step(propagate(potentials[s], grid.energy(e)));
    });
    return 0;
  });

  LyapunovCurve curve{grid, {}, seed, n, samples};
  curve.points.reserve(grid.count);
  for (std::size_t e = 0; e < grid.count; ++e) {
    curve.points.push_back(summarize(grid.energy(e), n,
                                     std::span<const double>(exponents).subspan(e * samples, samples)));
  }
  return curve;
}

}  // namespace doubling
