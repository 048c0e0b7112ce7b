#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "doubling/potential.hpp"
#include "doubling/symbolic.hpp"

namespace doubling {

/// cos(alpha) phi(0) + sin(alpha) phi(1) = 0 with alpha in [0, pi).
/// alpha = 0 is Dirichlet.
class BoundaryCondition {
 public:
  explicit BoundaryCondition(double alpha = 0.0);
  double alpha() const noexcept { return alpha_; }
  static BoundaryCondition dirichlet() { return BoundaryCondition(0.0); }

 private:
  double alpha_;
};

/// Finite box of a unit-hopping Schrodinger operator
///   (H phi)(n) = phi(n+1) + phi(n-1) + d(n) phi(n),   n = first..last,
/// truncated with Dirichlet conditions outside the box.  Off-diagonal entries
/// are exactly 1 and are not stored.
class TridiagonalOperator {
 public:
  TridiagonalOperator(std::int64_t first_site, std::vector<double> diagonal,
                      std::optional<double> alpha = std::nullopt);

  std::size_t size() const noexcept { return diagonal_.size(); }
  std::int64_t first_site() const noexcept { return first_site_; }
  std::int64_t last_site() const noexcept {
    return first_site_ + static_cast<std::int64_t>(diagonal_.size()) - 1;
  }
  std::span<const double> diagonal() const noexcept { return diagonal_; }
  double diagonal_at(std::int64_t site) const;
  /// Boundary angle at the left edge for half-line boxes.
  std::optional<double> alpha() const noexcept { return alpha_; }

  std::vector<double> off_diagonal() const;
  /// y = H x
  void apply(std::span<const double> x, std::span<double> y) const;
  /// max_i |d(i)| + 2, an upper bound on the spectral radius.
  double norm_bound() const;

 private:
  std::int64_t first_site_;
  std::vector<double> diagonal_;
  std::optional<double> alpha_;
};

/// Sites 1..N of H_theta, theta = D(omega).  The boundary condition enters as
/// d(1) = V(1) - tan(alpha); alpha = pi/2 is rejected.
TridiagonalOperator build_halfline_box(const PotentialSpec& spec, const DigitSequence& omega,
                                       std::size_t box_size,
                                       BoundaryCondition bc = BoundaryCondition::dirichlet());

/// Sites -N..N of the whole-line operator H_omega.
TridiagonalOperator build_wholeline_box(const PotentialSpec& spec,
                                        const TwoSidedDigitSequence& omega,
                                        std::size_t half_width);

/// Compression onto sites 1..last (hopping to site 0 dropped).
TridiagonalOperator restrict(const TridiagonalOperator& op);

/// Two columns "site diagonal", one row per site.
void write_operator_text(const TridiagonalOperator& op, std::ostream& out);

}  // namespace doubling
