#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "doubling/errors.hpp"
#include "doubling/spectral.hpp"

namespace doubling {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kTangencyTolerance = 1e-8;
constexpr double kMinGapWidth = 1e-10;

// Root of a sign change of `inside` (g <= 0) between a and b.
template <class Pred>
double bisect_edge(Pred&& inside, double a, double b) {
  const bool inside_a = inside(a);
  for (int it = 0; it < 200; ++it) {
    const double mid = a + 0.5 * (b - a);
    if (mid <= a || mid >= b) break;
    if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(mid))) break;
    (inside(mid) == inside_a ? a : b) = mid;
  }
  return a + 0.5 * (b - a);
}

// Golden-section search for an extremum of g on [a, b].
template <class Fn>
std::pair<double, double> golden_extremum(Fn&& g, double a, double b, bool maximize) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto score = [&](double x) { return maximize ? g(x) : -g(x); };
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = score(x1);
  double f2 = score(x2);
  for (int it = 0; it < 120 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = score(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = score(x1);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, g(x)};
}

}  // namespace

double participation_ratio(std::span<const double> psi) {
  double s2 = 0.0;
  double s4 = 0.0;
  for (double x : psi) {
    s2 += x * x;
    s4 += x * x * x * x;
  }
  if (s4 == 0.0) throw ValidationError("participation_ratio: zero vector");
  return s2 * s2 / s4;
}

DecayReport decay_report(const EigenPair& pair) {
  const std::vector<double>& psi = pair.eigenvector;
  const std::size_t n = psi.size();
  if (n < 16) throw ValidationError("decay_report: eigenvector needs at least 16 entries");

  DecayReport report;
  report.eigenvalue = pair.eigenvalue;
  report.participation_ratio = participation_ratio(psi);

  std::size_t peak = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (std::abs(psi[i]) > std::abs(psi[peak])) peak = i;
  }
  const std::size_t start = peak + (n + 9) / 10;

  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = start; i < n; ++i) {
    if (std::abs(psi[i]) < kDecayNoiseFloor) continue;
    xs.push_back(static_cast<double>(i + 1));
    ys.push_back(std::log(std::abs(psi[i])));
  }
  report.fit_points = xs.size();
  if (xs.size() < kMinDecayFitPoints) {
    report.rate = kNaN;
    report.residual = kNaN;
    return report;
  }

  const double count = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= count;
  my /= count;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (my + slope * (xs[i] - mx));
    ss += r * r;
  }
  report.rate = -slope;
  report.residual = std::sqrt(ss / count);
  report.reliable = true;
  return report;
}

// ---------------------------------------------------------------------------

BandSet::BandSet(std::vector<Band> bands, std::vector<double> period_potentials,
                 std::vector<double> closed_gaps)
    : bands_(std::move(bands)),
      potentials_(std::move(period_potentials)),
      closed_gaps_(std::move(closed_gaps)) {
  if (potentials_.empty()) throw ValidationError("band set needs period >= 1");
}

double BandSet::discriminant(double energy) const {
  const TransferCocycle m = propagate(potentials_, energy);
  const double trace = m.current().a + m.current().d;
  if (trace == 0.0) return 0.0;
  return trace * std::exp(m.log_scale());
}

bool BandSet::contains(double energy, double inflate) const {
  return std::any_of(bands_.begin(), bands_.end(), [&](const Band& b) {
    return energy >= b.lower - inflate && energy <= b.upper + inflate;
  });
}

BandSet periodic_bands(const PotentialSpec& spec, const DigitSequence& omega,
                       std::size_t scan_points) {
  const auto form = omega.periodic_form();
  if (!form) throw ValidationError("periodic_bands: digit sequence is not eventually periodic");
  if (scan_points < 16) throw ValidationError("periodic_bands: scan needs at least 16 points");

  const DigitSequence tail = DigitSequence::periodic(omega.base(), {}, form->period);
  std::vector<double> potentials = halfline_potentials(spec, tail, form->period.size());
  BandSet probe(std::vector<Band>{}, potentials, std::vector<double>{});
  auto g = [&](double e) { return std::abs(probe.discriminant(e)) - 2.0; };
  auto inside = [&](double e) { return g(e) <= 0.0; };

  const double lo = -2.5 - spec.bound();
  const double hi = 2.5 + spec.bound();
  struct Sample {
    double e;
    double g;
  };
  std::vector<Sample> samples(scan_points);
  for (std::size_t i = 0; i < scan_points; ++i) {
    const double e = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(scan_points - 1);
    samples[i] = {e, g(e)};
  }

  std::vector<double> closed_gaps;
  std::vector<Sample> extra;
  for (std::size_t i = 1; i + 1 < scan_points; ++i) {
    const Sample& prev = samples[i - 1];
    const Sample& cur = samples[i];
    const Sample& next = samples[i + 1];
    if (cur.g <= 0.0 && cur.g >= prev.g && cur.g >= next.g) {
      // Possible gap narrower than the scan spacing, or a tangency.
      const auto [e, value] = golden_extremum(g, prev.e, next.e, true);
      if (value > 0.0) {
        extra.push_back({e, value});
      } else if (value >= -kTangencyTolerance) {
        closed_gaps.push_back(e);
      }
    } else if (cur.g > 0.0 && cur.g <= prev.g && cur.g <= next.g) {
      // Possible band narrower than the scan spacing.
      const auto [e, value] = golden_extremum(g, prev.e, next.e, false);
      if (value <= 0.0) extra.push_back({e, value});
    }
  }
  samples.insert(samples.end(), extra.begin(), extra.end());
  std::sort(samples.begin(), samples.end(),
            [](const Sample& a, const Sample& b) { return a.e < b.e; });

  std::vector<double> edges;
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    if ((samples[i].g <= 0.0) != (samples[i + 1].g <= 0.0)) {
      edges.push_back(bisect_edge(inside, samples[i].e, samples[i + 1].e));
    }
  }
  if (edges.size() % 2 != 0) {
    throw NumericalError("periodic_bands: unmatched band edge; widen the scan");
  }

  std::vector<Band> bands;
  for (std::size_t i = 0; i < edges.size(); i += 2) {
    const Band band{edges[i], edges[i + 1]};
    if (!bands.empty() && band.lower - bands.back().upper <= kMinGapWidth) {
      closed_gaps.push_back(0.5 * (band.lower + bands.back().upper));
      bands.back().upper = band.upper;
    } else {
      bands.push_back(band);
    }
  }
  std::sort(closed_gaps.begin(), closed_gaps.end());
  return BandSet(std::move(bands), std::move(potentials), std::move(closed_gaps));
}

bool BandGammaReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(), [](const BandGammaEntry& e) { return e.pass; });
}

BandGammaReport band_gamma_check(const PotentialSpec& spec, const DigitSequence& omega,
                                 const BandSet& bands, std::uint64_t n, double bound_constant,
                                 std::size_t scan_points) {
  constexpr std::uint64_t kBlocks = 16;
  constexpr double kProbeDistance = 0.5;
  BandGammaReport report;
  report.n_steps = n;

  for (const Band& band : bands.bands()) {
    const double e = 0.5 * (band.lower + band.upper);
    const LyapunovEstimate est = estimate_gamma_orbit(spec, omega, e, n, kBlocks);
    const double threshold = bound_constant / static_cast<double>(n);
    report.entries.push_back({e, true, est.mean, est.std_error, threshold, est.mean <= threshold});
  }

  std::vector<double> probes;
  const auto& list = bands.bands();
  for (const Band& band : list) {
    probes.push_back(band.lower - kProbeDistance);
    probes.push_back(band.upper + kProbeDistance);
  }
  const double spacing = (5.0 + 2.0 * spec.bound()) / static_cast<double>(scan_points - 1);
  for (std::size_t i = 0; i + 1 < list.size(); ++i) {
    if (list[i + 1].lower - list[i].upper > spacing) {
      probes.push_back(0.5 * (list[i].upper + list[i + 1].lower));
    }
  }
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

  for (double e : probes) {
    if (bands.contains(e)) continue;
    const LyapunovEstimate est = estimate_gamma_orbit(spec, omega, e, n, kBlocks);
    const double margin = 3.0 * est.std_error;
    report.entries.push_back({e, false, est.mean, est.std_error, margin, est.mean > margin});
  }
  std::sort(report.entries.begin(), report.entries.end(),
            [](const BandGammaEntry& a, const BandGammaEntry& b) { return a.energy < b.energy; });
  return report;
}

}  // namespace doubling
