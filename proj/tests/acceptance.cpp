// Acceptance suite: one PASS/FAIL line per criterion, runtime bounds included.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "doubling/cocycle.hpp"
#include "doubling/config.hpp"
#include "doubling/parallel.hpp"
#include "doubling/philox.hpp"
#include "doubling/run.hpp"
#include "doubling/spectral.hpp"
#include "doubling/symbolic.hpp"
#include "doubling/table.hpp"
#include "doubling/verify.hpp"

using namespace doubling;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

const PotentialSpec kFree(1.0, SamplingFunction::table({0.0}, true));

double free_gamma(double e) {
  const double a = std::abs(e);
  return a <= 2.0 ? 0.0 : std::log((a + std::sqrt(a * a - 4.0)) / 2.0);
}

// ---------------------------------------------------------------------------

Outcome free_case_oracle() {
  double worst_outside = 0.0;
  double worst_inside = 0.0;
  for (double e : {2.5, 3.0, 4.0}) {
    const LyapunovEstimate est = estimate_gamma(kFree, e, 100000, 4, 1, hardware_threads());
    worst_outside = std::max(worst_outside, std::abs(est.mean - free_gamma(e)));
  }
  for (double e : {0.0, 1.0, 1.9}) {
    const LyapunovEstimate est = estimate_gamma(kFree, e, 100000, 4, 1, hardware_threads());
    worst_inside = std::max(worst_inside, est.mean);
  }
  return {worst_outside <= 1e-3 && worst_inside <= 1e-3,
          fmt("max |gamma - closed form| = %.2e for |E| > 2, max gamma = %.2e inside the band",
              worst_outside, worst_inside)};
}

Outcome structural_identities() {
  const PotentialSpec spec(1.0, SamplingFunction::cosine());
  IdentitySuiteOptions options;
  options.threads = hardware_threads();
  std::vector<CheckResult> results = conjugacy_check(2, options);
  for (auto&& r : restriction_check(spec, options)) results.push_back(r);
  for (auto&& r : cocycle_check(spec, options)) results.push_back(r);
  bool pass = true;
  std::string detail;
  for (const CheckResult& r : results) {
    pass = pass && r.pass;
    detail += fmt("%s %s (%zu cases: %s); ", r.name.c_str(), r.pass ? "ok" : "FAILED", r.cases,
                  r.detail.c_str());
  }
  return {pass, detail};
}

ExperimentConfig positivity_config(unsigned threads) {
  ExperimentConfig c;
  c.command = Command::kLyapunov;
  c.lambda = 2.0;
  c.f = SamplingFunction::cosine();
  c.grid = EnergyGrid{-4.2, 4.2, 101};
  c.n_steps = 100000;
  c.n_samples = 16;
  c.seed = 1;
  c.threads = threads;
  return c;
}

std::string csv_body(const ExperimentConfig& c) {
  std::ostringstream out;
  write_csv(execute(c).table, "lyapunov", config_to_json(c), out);
  std::istringstream in(out.str());
  std::string line;
  std::string body;
  while (std::getline(in, line)) {
    if (!line.starts_with("#")) body += line + "\n";
  }
  return body;
}

Outcome positivity_sweep() {
  const ExperimentConfig c = positivity_config(hardware_threads());
  const PotentialSpec spec = c.potential();
  const LyapunovCurve curve = lyapunov_curve(spec, *c.grid, c.n_steps, c.n_samples, c.seed, c.threads);
  std::size_t eligible = 0;
  std::size_t significant = 0;
  std::size_t negative = 0;
  double smallest = INFINITY;
  for (const LyapunovEstimate& p : curve.points) {
    smallest = std::min(smallest, p.mean);
    if (p.mean < -3.0 * p.std_error) ++negative;
    if (p.mean > 1e-3) {
      ++eligible;
      if (p.mean > 3.0 * p.std_error) ++significant;
    }
  }
  const bool pass = eligible > 0 &&
                    static_cast<double>(significant) >= 0.99 * static_cast<double>(eligible) &&
                    negative == 0;
  return {pass, fmt("%zu/%zu grid points with mean > 1e-3 exceed 3 stderr, %zu below -3 stderr, "
                    "min mean %.4f",
                    significant, eligible, negative, smallest)};
}

Outcome band_dichotomy() {
  struct Case {
    const char* name;
    PotentialSpec spec;
    std::vector<Band> expected;
    std::function<double(double)> delta;
  };
  const double outer = std::sqrt(5.0);
  const std::vector<Case> cases{
      {"theta=1/3 cosine", PotentialSpec(1.0, SamplingFunction::cosine()), {{-2.5, 1.5}},
       [](double e) { return (e + 0.5) * (e + 0.5) - 2.0; }},
      {"alternating +-1", PotentialSpec(1.0, SamplingFunction::table({1.0, -1.0})),
       {{-outer, -1.0}, {1.0, outer}}, [](double e) { return e * e - 3.0; }},
  };
  const DigitSequence third = encode({1, 3}, 2);
  bool pass = true;
  std::string detail;
  for (const Case& c : cases) {
    const BandSet bands = periodic_bands(c.spec, third);
    double edge_error = 0.0;
    double delta_error = 0.0;
    bool shape = bands.bands().size() == c.expected.size();
    for (std::size_t i = 0; shape && i < c.expected.size(); ++i) {
      edge_error = std::max({edge_error, std::abs(bands.bands()[i].lower - c.expected[i].lower),
                             std::abs(bands.bands()[i].upper - c.expected[i].upper)});
      for (double e : {bands.bands()[i].lower, bands.bands()[i].upper}) {
        delta_error = std::max(delta_error, std::abs(std::abs(c.delta(e)) - 2.0));
      }
    }
    const BandGammaReport report = band_gamma_check(c.spec, third, bands, 100000, 20.0);
    double mid_gamma = 0.0;
    double min_margin = INFINITY;
    for (const BandGammaEntry& e : report.entries) {
      if (e.inside) mid_gamma = std::max(mid_gamma, e.gamma);
      else min_margin = std::min(min_margin, e.gamma / std::max(e.std_error, 1e-300));
    }
    const bool ok = shape && edge_error <= 1e-8 && delta_error <= 1e-8 && mid_gamma <= 2e-4 &&
                    report.all_pass();
    pass = pass && ok;
    detail += fmt("%s: %zu band(s), edge error %.1e, max midpoint gamma %.1e, "
                  "min outside gamma/stderr %.3g; ",
                  c.name, bands.bands().size(), edge_error, mid_gamma, min_margin);
  }
  return {pass, detail};
}

Outcome nondeterminism_witness() {
  // Whole-line site n reads digits n+1, n+2, ...; V(0) is the one value
  // that depends on digit 1, which no half-line site reads.
  const PotentialSpec spec(1.0, SamplingFunction::cosine());
  for (std::uint64_t seed = 1;; ++seed) {
    const TwoSidedDigitSequence omega = sample_bernoulli(seed, 2);
    const TwoSidedDigitSequence other = omega.with_digit(1, 1 - omega.digit(1));
    const bool same_halfline =
        wholeline_potentials(spec, omega, 1, 10000) == wholeline_potentials(spec, other, 1, 10000) &&
        halfline_potentials(spec, restrict_to_halfline(omega), 10000) ==
            halfline_potentials(spec, restrict_to_halfline(other), 10000);
    const double v0 = wholeline_potential(spec, omega, 0);
    const double w0 = wholeline_potential(spec, other, 0);
    if (std::abs(v0 - w0) < 1e-3 && seed < 20) continue;
    return {same_halfline && std::abs(v0 - w0) >= 1e-3,
            fmt("seed %llu: V(n) identical for 1 <= n <= 10^4, V(0) = %.6f vs %.6f (|diff| %.3f)",
                static_cast<unsigned long long>(seed), v0, w0, std::abs(v0 - w0))};
  }
}

Outcome precision_collapse() {
  bool pass = true;
  int worst_steps = 0;
  std::uint64_t checked = 0;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const PhiloxBlock block = philox4x64({i, 0, 0xdeadbeef, 0}, {2024, 0});
    const std::uint64_t q = 2 * (bounded(block[0], 32000) + 10) + 1;  // odd, 21..64041
    const std::uint64_t p = q / 16 + 1 + bounded(block[1], static_cast<std::uint32_t>(q - q / 16 - 1));

    double x = static_cast<double>(p) / static_cast<double>(q);
    int steps = 0;
    while (x != 0.0 && steps < 1000) {
      x = doubling_map_float(x, 2);
      ++steps;
    }
    worst_steps = std::max(worst_steps, steps);
    pass = pass && x == 0.0 && steps <= 64;

    // Symbolic orbit: the point T^n(p/q) is the digit window starting at n+1.
    const DigitSequence omega = encode({p, q}, 2);
    constexpr std::uint64_t kSteps = 100000;
    const std::size_t depth = float_depth(2);
    std::vector<Digit> digits(kSteps + depth);
    omega.fill(1, digits);
    std::uint64_t r = p;
    for (std::uint64_t n = 1; n <= kSteps; ++n) {
      const std::uint64_t digit = 2 * r / q;
      r = 2 * r % q;
      if (digits[n - 1] != digit || omega.digit(n) != digit) pass = false;
      const double value = digits_value(std::span<const Digit>(digits).subspan(n, depth), 2);
      if (std::abs(value - static_cast<double>(r) / static_cast<double>(q)) > 0x1p-50) pass = false;
      if (n % 9973 == 0) {
        const DigitSequence tail = shift(omega, n);
        if (evaluate_d(tail).value != value) pass = false;
        if (periodic_value(*tail.periodic_form(), 2) != BigRational(r, q)) pass = false;
        ++checked;
      }
    }
  }
  return {pass, fmt("float orbits reach 0 within %d steps (<= 64); symbolic orbits match "
                    "long division for 10^5 steps (%llu exact rational checkpoints)",
                    worst_steps, static_cast<unsigned long long>(checked))};
}

double median_mid_pr(const std::vector<EigenPair>& pairs) {
  const std::size_t n = pairs.size();
  std::vector<double> prs;
  for (std::size_t k = n / 4; k < 3 * n / 4; ++k) prs.push_back(participation_ratio(pairs[k].eigenvector));
  std::nth_element(prs.begin(), prs.begin() + static_cast<std::ptrdiff_t>(prs.size() / 2), prs.end());
  return prs[prs.size() / 2];
}

Outcome eigensolver_oracle() {
  double worst = 0.0;
  std::size_t boxes = 0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    for (std::size_t n : {10UL, 57UL, 128UL, 200UL}) {
      const PotentialSpec spec(0.5 * static_cast<double>(seed), SamplingFunction::cosine());
      const TridiagonalOperator op = build_halfline_box(spec, DigitSequence::seeded(seed, 2), n,
                                                        BoundaryCondition(0.3 * static_cast<double>(seed % 3)));
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        m(ii, ii) = op.diagonal()[i];
        if (i + 1 < n) m(ii, ii + 1) = m(ii + 1, ii) = 1.0;
      }
      const Eigen::VectorXd oracle = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues();
      const std::vector<EigenPair> pairs = eigensolve(op);
      for (std::size_t k = 0; k < n; ++k) {
        worst = std::max(worst, std::abs(pairs[k].eigenvalue - oracle(static_cast<Eigen::Index>(k))));
      }
      ++boxes;
    }
  }

  constexpr std::size_t kN = 2000;
  const double free_pr = median_mid_pr(eigensolve(build_halfline_box(kFree, DigitSequence::seeded(1, 2), kN)));
  std::vector<double> disordered(10);
  parallel_for(10, hardware_threads(), [&](std::size_t i) {
    const PotentialSpec spec(2.0, SamplingFunction::cosine());
    const DigitSequence omega = ensemble_sample(2024, i, 2);
    disordered[i] = median_mid_pr(eigensolve(build_halfline_box(spec, omega, kN)));
  });
  std::size_t holds = 0;
  for (double pr : disordered) holds += (pr <= kN / 20.0 && free_pr >= kN / 4.0);
  const auto [lo, hi] = std::minmax_element(disordered.begin(), disordered.end());

  return {worst <= 1e-9 && holds >= 8,
          fmt("%zu boxes N <= 200: max eigenvalue difference %.1e; N = 2000 median PR: "
              "lambda=2 in [%.1f, %.1f] (<= %.0f), free %.1f (>= %.0f); holds for %zu/10 seeds",
              boxes, worst, *lo, *hi, kN / 20.0, free_pr, kN / 4.0, holds)};
}

Outcome determinism() {
  const std::string reference = csv_body(positivity_config(1));
  bool same = true;
  for (unsigned threads : {4U, 8U}) same = same && csv_body(positivity_config(threads)) == reference;
  same = same && csv_body(positivity_config(1)) == reference;
  return {same, fmt("criterion 3 CSV body (%zu bytes) identical for threads 1, 4, 8 and a repeat run",
                    reference.size())};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_seconds;
    Outcome (*run)();
  };
  const std::vector<Criterion> criteria{
      {1, "free-case oracle", 10.0, free_case_oracle},
      {2, "structural identities", 30.0, structural_identities},
      {3, "positivity sweep", 600.0, positivity_sweep},
      {4, "periodic/band dichotomy", 60.0, band_dichotomy},
      {5, "non-determinism witness", 1.0, nondeterminism_witness},
      {6, "precision collapse", 1.0, precision_collapse},
      {7, "eigensolver oracle and localization", 120.0, eigensolver_oracle},
      {8, "determinism across thread counts", 1800.0, determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_budget = seconds <= c.budget_seconds;
    const bool pass = outcome.pass && in_budget;
    failures += !pass;
    std::printf("criterion %d [%s]: %s (%.2f s, budget %.0f s%s) %s\n", c.id, c.name,
                pass ? "PASS" : "FAIL", seconds, c.budget_seconds,
                in_budget ? "" : ", OVER BUDGET", outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
