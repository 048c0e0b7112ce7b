#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "doubling/potential.hpp"
#include "doubling/symbolic.hpp"

namespace doubling {

/// Row-major 2x2 matrix [[a, b], [c, d]].
struct TransferMatrix {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;

  double det() const noexcept { return a * d - b * c; }
  /// max |entry|
  double sup_norm() const noexcept;
  TransferMatrix scaled(double s) const noexcept { return {a * s, b * s, c * s, d * s}; }

  friend TransferMatrix operator*(const TransferMatrix& x, const TransferMatrix& y) noexcept {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend bool operator==(const TransferMatrix&, const TransferMatrix&) = default;
};

/// [[E - v, -1], [1, 0]]; determinant exactly 1.
TransferMatrix one_step(double energy, double v) noexcept;

inline constexpr double kRescaleHigh = 0x1p512;
inline constexpr double kRescaleLow = 0x1p-512;

/// Running product M = A_n ... A_1 stored as exp(log_scale) * current.
/// current is divided by its sup-norm whenever that norm leaves
/// [2^-512, 2^512].
class TransferCocycle {
 public:
  TransferCocycle() = default;
  explicit TransferCocycle(TransferMatrix start, double log_scale = 0.0);

  /// Left-multiplies by one_step(energy, v).
  void advance(double energy, double v);
  void advance(double energy, std::span<const double> potentials);

  const TransferMatrix& current() const noexcept { return current_; }
  double log_scale() const noexcept { return log_scale_; }
  std::uint64_t steps() const noexcept { return steps_; }
  /// log ||M|| in the sup-norm.
  double log_norm() const;

 private:
  void renormalize(double norm, double energy);

  TransferMatrix current_{};
  double log_scale_ = 0.0;
  std::uint64_t steps_ = 0;
};

/// M(n, E, theta) with site 1 applied first.
TransferCocycle propagate(const PotentialSpec& spec, const DigitSequence& omega, double energy,
                          std::uint64_t n);
TransferCocycle propagate(std::span<const double> potentials, double energy,
                          TransferCocycle start = {});

/// Largest discrepancy between M(n+m, theta) and M(n, theta') M(m, theta),
/// where theta' is coded by `shifted` (correctly shift(omega, m)).  Both
/// products are compared after normalizing to unit sup-norm; the log-norms
/// are compared relative to max(1, |log-norm|).
double cocycle_identity_error(const PotentialSpec& spec, const DigitSequence& omega,
                              const DigitSequence& shifted, double energy, std::uint64_t n,
                              std::uint64_t m);
/// True iff the cocycle identity holds to relative 1e-9.  Requires n, m >= 1
/// and n + m <= 1000.
bool cocycle_property_check(const PotentialSpec& spec, const DigitSequence& omega, double energy,
                            std::uint64_t n, std::uint64_t m);

struct LyapunovEstimate {
  double energy = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n_steps = 0;
  std::uint64_t n_samples = 0;
};

/// Mean and standard error (sample std / sqrt(count)) of per-sample
/// exponents, accumulated in index order.
LyapunovEstimate summarize(double energy, std::uint64_t n_steps, std::span<const double> exponents);

/// Half-line digit sequence of ensemble sample `index` for a run keyed by `seed`.
DigitSequence ensemble_sample(std::uint64_t seed, std::uint64_t index, unsigned base);

/// Average of (1/n) log ||M(n, E, theta_i)|| over `samples` Bernoulli draws.
LyapunovEstimate estimate_gamma(const PotentialSpec& spec, double energy, std::uint64_t n,
                                std::uint64_t samples, std::uint64_t seed, unsigned threads = 1);
/// Same estimator over caller-supplied sample sequences.
LyapunovEstimate estimate_gamma(const PotentialSpec& spec, double energy, std::uint64_t n,
                                std::span<const DigitSequence> samples, unsigned threads = 1);
/// Single-orbit estimate: mean is log||M(n)||/n; the error bar comes from the
/// spread of per-block growth rates over `blocks` consecutive blocks.
LyapunovEstimate estimate_gamma_orbit(const PotentialSpec& spec, const DigitSequence& omega,
                                      double energy, std::uint64_t n, std::uint64_t blocks = 16);

struct EnergyGrid {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 1;

  double energy(std::size_t i) const;
  void validate() const;
  /// count points over [-2 - bound, 2 + bound].
  static EnergyGrid enclosure(const PotentialSpec& spec, std::size_t count);
};

struct LyapunovCurve {
  EnergyGrid grid;
  std::vector<LyapunovEstimate> points;
  std::uint64_t seed = 0;
  std::uint64_t n_steps = 0;
  std::uint64_t n_samples = 0;
};

/// estimate_gamma over a uniform grid.  Samples are drawn once and shared by
/// all energies; output is independent of `threads`.
LyapunovCurve lyapunov_curve(const PotentialSpec& spec, const EnergyGrid& grid, std::uint64_t n,
                             std::uint64_t samples, std::uint64_t seed, unsigned threads = 1);

}  // namespace doubling
