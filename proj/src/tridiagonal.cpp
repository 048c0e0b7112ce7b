#include "doubling/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>

#include "doubling/errors.hpp"

namespace doubling {

BoundaryCondition::BoundaryCondition(double alpha) : alpha_(alpha) {
  if (!(alpha >= 0.0 && alpha < std::numbers::pi)) {
    throw ValidationError("boundary angle alpha must lie in [0, pi), got " +
                          std::to_string(alpha));
  }
}

TridiagonalOperator::TridiagonalOperator(std::int64_t first_site, std::vector<double> diagonal,
                                         std::optional<double> alpha)
    : first_site_(first_site), diagonal_(std::move(diagonal)), alpha_(alpha) {
  if (diagonal_.empty()) throw ValidationError("operator needs at least one site");
}

double TridiagonalOperator::diagonal_at(std::int64_t site) const {
  if (site < first_site_ || site > last_site()) {
    throw ValidationError("site " + std::to_string(site) + " outside operator range");
  }
  return diagonal_[static_cast<std::size_t>(site - first_site_)];
}

std::vector<double> TridiagonalOperator::off_diagonal() const {
  return std::vector<double>(diagonal_.size() - 1, 1.0);
}

void TridiagonalOperator::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  if (x.size() != n || y.size() != n) throw ValidationError("apply: dimension mismatch");
  for (std::size_t i = 0; i < n; ++i) {
    double acc = diagonal_[i] * x[i];
    if (i > 0) acc += x[i - 1];
    if (i + 1 < n) acc += x[i + 1];
    y[i] = acc;
  }
}

double TridiagonalOperator::norm_bound() const {
  double sup = 0.0;
  for (double d : diagonal_) sup = std::max(sup, std::abs(d));
  return sup + 2.0;
}

TridiagonalOperator build_halfline_box(const PotentialSpec& spec, const DigitSequence& omega,
                                       std::size_t box_size, BoundaryCondition bc) {
  if (box_size == 0) throw ValidationError("box size N must be >= 1");
  if (std::abs(bc.alpha() - std::numbers::pi / 2) <= 1e-12) {
    throw ValidationError(
        "alpha = pi/2 forces phi(1) = 0; pose it as a Dirichlet problem on sites 2..N");
  }
  std::vector<double> diagonal = halfline_potentials(spec, omega, box_size);
  if (bc.alpha() != 0.0) diagonal[0] -= std::tan(bc.alpha());
  return TridiagonalOperator(1, std::move(diagonal), bc.alpha());
}

TridiagonalOperator build_wholeline_box(const PotentialSpec& spec,
                                        const TwoSidedDigitSequence& omega,
                                        std::size_t half_width) {
  if (half_width == 0) throw ValidationError("box half-width N must be >= 1");
  const auto n = static_cast<std::int64_t>(half_width);
  return TridiagonalOperator(-n, wholeline_potentials(spec, omega, -n, n));
}

TridiagonalOperator restrict(const TridiagonalOperator& op) {
  if (op.first_site() > 1 || op.last_site() < 1) {
    throw ValidationError("restrict: operator site range does not contain site 1");
  }
  const auto skip = static_cast<std::size_t>(1 - op.first_site());
  std::vector<double> diagonal(op.diagonal().begin() + static_cast<std::ptrdiff_t>(skip),
                               op.diagonal().end());
  return TridiagonalOperator(1, std::move(diagonal),
                             op.first_site() == 1 ? op.alpha() : std::optional<double>(0.0));
}

void write_operator_text(const TridiagonalOperator& op, std::ostream& out) {
  char line[64];
  for (std::size_t i = 0; i < op.size(); ++i) {
    std::snprintf(line, sizeof line, "%lld %.17g\n",
                  static_cast<long long>(op.first_site() + static_cast<std::int64_t>(i)),
                  op.diagonal()[i]);
    out << line;
  }
}

}  // namespace doubling
