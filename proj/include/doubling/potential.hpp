#pragma once

#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

#include "doubling/symbolic.hpp"

namespace doubling {

/// Bounded, non-constant sampling function f on the circle.
///
/// Step and table kinds use half-open cells [a, b).  Constant tables are
/// rejected unless explicitly allowed; they serve as free-Laplacian references
/// and are never used where the theory needs non-constancy.
class SamplingFunction {
 public:
  struct Cosine {};
  struct Step {
    double threshold;
  };
  struct Table {
    std::vector<double> values;
  };

  /// f(theta) = cos(2 pi theta)
  static SamplingFunction cosine();
  /// f(theta) = 1 if theta < threshold else 0, threshold in (0,1)
  static SamplingFunction step(double threshold);
  /// values[floor(theta*K)] on cells [i/K, (i+1)/K)
  static SamplingFunction table(std::vector<double> values, bool allow_constant = false);

  double operator()(double theta) const;
  double sup_abs() const noexcept { return sup_abs_; }
  bool is_constant() const noexcept { return constant_; }
  std::string_view kind_name() const noexcept;
  const std::variant<Cosine, Step, Table>& kind() const noexcept { return kind_; }

  friend bool operator==(const SamplingFunction& a, const SamplingFunction& b);

 private:
  explicit SamplingFunction(std::variant<Cosine, Step, Table> kind);

  std::variant<Cosine, Step, Table> kind_;
  double sup_abs_ = 0.0;
  bool constant_ = false;
};

/// Coupling, sampling function and base m of V(n) = coupling * f(m^n theta).
class PotentialSpec {
 public:
  PotentialSpec(double coupling, SamplingFunction f, unsigned base = 2);

  double coupling() const noexcept { return coupling_; }
  const SamplingFunction& f() const noexcept { return f_; }
  unsigned base() const noexcept { return base_; }
  /// coupling * sup|f|
  double bound() const noexcept { return coupling_ * f_.sup_abs(); }

 private:
  double coupling_;
  SamplingFunction f_;
  unsigned base_;
};

double eval_f(const SamplingFunction& f, const CirclePoint& theta);

/// V(n) = coupling * f(D(S^n omega)), n >= 1.  Site n reads digits n+1 ...
double halfline_potential(const PotentialSpec& spec, const DigitSequence& omega,
                          std::uint64_t n);
/// V(1), ..., V(count) along the same evaluation path as halfline_potential.
std::vector<double> halfline_potentials(const PotentialSpec& spec, const DigitSequence& omega,
                                        std::size_t count);

/// Whole-line potential at site n in Z.  Site n reads digits n+1, n+2, ...,
/// so sites n >= 1 coincide with the half-line potential of the restriction.
double wholeline_potential(const PotentialSpec& spec, const TwoSidedDigitSequence& omega,
                           std::int64_t n);
/// Sites first, ..., last inclusive.
std::vector<double> wholeline_potentials(const PotentialSpec& spec,
                                         const TwoSidedDigitSequence& omega,
                                         std::int64_t first, std::int64_t last);

}  // namespace doubling
