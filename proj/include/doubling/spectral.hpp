#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "doubling/cocycle.hpp"
#include "doubling/potential.hpp"
#include "doubling/symbolic.hpp"
#include "doubling/tridiagonal.hpp"

namespace doubling {

struct EigenPair {
  double eigenvalue = 0.0;
  /// Unit 2-norm, largest-magnitude entry positive.
  std::vector<double> eigenvector;
};

/// Number of eigenvalues of the symmetric tridiagonal matrix strictly below x
/// (Sturm sequence count).
std::size_t sturm_count(std::span<const double> diagonal, std::span<const double> off_diagonal,
                        double x);

/// All eigenvalues in ascending order by bisection on the Sturm count.
std::vector<double> tridiagonal_eigenvalues(std::span<const double> diagonal,
                                            std::span<const double> off_diagonal);

/// All eigenpairs: bisection for eigenvalues, then inverse iteration with
/// reorthogonalization inside clusters of close eigenvalues.
std::vector<EigenPair> tridiagonal_eigensolve(std::span<const double> diagonal,
                                              std::span<const double> off_diagonal);

std::vector<EigenPair> eigensolve(const TridiagonalOperator& op);

/// ||H psi - E psi||_2
double eigen_residual(const TridiagonalOperator& op, const EigenPair& pair);

/// (sum psi^2)^2 / sum psi^4, in [1, N].
double participation_ratio(std::span<const double> psi);

struct DecayReport {
  double eigenvalue = 0.0;
  /// Per-site decay rate of |psi| right of its peak; NaN when unreliable.
  double rate = 0.0;
  /// RMS residual of the log-linear fit; NaN when unreliable.
  double residual = 0.0;
  double participation_ratio = 0.0;
  std::size_t fit_points = 0;
  bool reliable = false;
};

inline constexpr double kDecayNoiseFloor = 1e-14;
inline constexpr std::size_t kMinDecayFitPoints = 8;

/// Least-squares fit of log|psi(n)| = c - rate * n over sites from
/// peak + ceil(N/10) to N, skipping entries below the noise floor.
/// Requires at least 16 entries.
DecayReport decay_report(const EigenPair& pair);

struct Band {
  double lower = 0.0;
  double upper = 0.0;

  friend bool operator==(const Band&, const Band&) = default;
};

/// Spectrum {E : |Delta(E)| <= 2} of a periodic potential, where Delta is the
/// trace of the one-period transfer matrix.
class BandSet {
 public:
  BandSet(std::vector<Band> bands, std::vector<double> period_potentials,
          std::vector<double> closed_gaps);

  const std::vector<Band>& bands() const noexcept { return bands_; }
  std::size_t period() const noexcept { return potentials_.size(); }
  /// V(1..p) of the purely periodic tail.
  const std::vector<double>& period_potentials() const noexcept { return potentials_; }
  /// Energies where |Delta| touches 2 from inside without opening a gap.
  const std::vector<double>& closed_gaps() const noexcept { return closed_gaps_; }

  double discriminant(double energy) const;
  bool contains(double energy, double inflate = 0.0) const;

 private:
  std::vector<Band> bands_;
  std::vector<double> potentials_;
  std::vector<double> closed_gaps_;
};

inline constexpr std::size_t kBandScanPoints = 10000;

/// Bands of H_theta for eventually periodic omega; only the periodic tail
/// matters.  Edges are found by bisection on |Delta| - 2 after a uniform scan
/// of the spectral enclosure, with local extrema refined so that gaps or bands
/// narrower than the scan spacing are not missed.
BandSet periodic_bands(const PotentialSpec& spec, const DigitSequence& omega,
                       std::size_t scan_points = kBandScanPoints);

struct BandGammaEntry {
  double energy = 0.0;
  bool inside = false;
  double gamma = 0.0;
  double std_error = 0.0;
  /// Upper bound (inside) or required margin (outside).
  double threshold = 0.0;
  bool pass = false;
};

struct BandGammaReport {
  std::vector<BandGammaEntry> entries;
  std::uint64_t n_steps = 0;
  bool all_pass() const;
};

/// Exponent along omega at band midpoints (must be <= bound_constant / n)
/// and at probe energies outside the bands (must exceed 3 std errors):
/// 0.5 beyond every band edge that is not inside another band, and gap
/// midpoints for gaps wider than the scan spacing.
BandGammaReport band_gamma_check(const PotentialSpec& spec, const DigitSequence& omega,
                                 const BandSet& bands, std::uint64_t n,
                                 double bound_constant = 20.0,
                                 std::size_t scan_points = kBandScanPoints);

}  // namespace doubling
