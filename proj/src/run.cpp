#include "doubling/run.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include "doubling/cocycle.hpp"
#include "doubling/errors.hpp"
#include "doubling/parallel.hpp"
#include "doubling/philox.hpp"
#include "doubling/spectral.hpp"
#include "doubling/tridiagonal.hpp"
#include "doubling/verify.hpp"

namespace doubling {

namespace {

constexpr std::uint64_t kOrbitBlocks = 16;
constexpr std::size_t kFloatDemoCap = 256;

Table lyapunov_table(const ExperimentConfig& config) {
  const PotentialSpec spec = config.potential();
  const EnergyGrid grid = config.energy_grid();
  const std::string kind(spec.f().kind_name());
  const std::uint64_t seed = theta_seed(config);

  std::vector<LyapunovEstimate> points;
  if (config.theta.is_seeded()) {
    points = lyapunov_curve(spec, grid, config.n_steps, config.n_samples, seed, config.threads)
                 .points;
  } else {
    const DigitSequence omega = theta_sequence(config);
    const std::uint64_t blocks = std::min<std::uint64_t>(kOrbitBlocks, config.n_steps);
    if (blocks < 2) throw ValidationError("n: single-orbit estimates need n >= 2");
    points.resize(grid.count);
    parallel_for(grid.count, config.threads, [&](std::size_t i) {
      points[i] = estimate_gamma_orbit(spec, omega, grid.energy(i), config.n_steps, blocks);
    });
  }

  Table table{{"E", "gamma_mean", "gamma_stderr", "n_steps", "n_samples", "lambda", "f_kind",
               "base", "seed"},
              {}};
  for (const LyapunovEstimate& p : points) {
    table.add_row({p.energy, p.mean, p.std_error, p.n_steps, p.n_samples, spec.coupling(), kind,
                   std::uint64_t{spec.base()}, seed});
  }
  return table;
}

Table bands_table(const ExperimentConfig& config) {
  const BandSet bands = periodic_bands(config.potential(), theta_sequence(config));
  Table table{{"band_index", "E_lower", "E_upper", "period"}, {}};
  for (std::size_t i = 0; i < bands.bands().size(); ++i) {
    table.add_row({std::uint64_t{i}, bands.bands()[i].lower, bands.bands()[i].upper,
                   std::uint64_t{bands.period()}});
  }
  return table;
}

Table spectrum_table(const ExperimentConfig& config) {
  const PotentialSpec spec = config.potential();
  const TridiagonalOperator op =
      config.wholeline
          ? build_wholeline_box(spec, sample_bernoulli(theta_seed(config), spec.base()),
                                config.box_size)
          : build_halfline_box(spec, theta_sequence(config), config.box_size,
                               BoundaryCondition(config.alpha.front()));
  const std::vector<double> off = op.off_diagonal();
  const std::vector<double> values = tridiagonal_eigenvalues(op.diagonal(), off);
  Table table{{"index", "eigenvalue"}, {}};
  for (std::size_t i = 0; i < values.size(); ++i) table.add_row({std::uint64_t{i}, values[i]});
  return table;
}

Table localize_table(const ExperimentConfig& config) {
  const PotentialSpec spec = config.potential();
  const bool seeded = config.theta.is_seeded();
  const std::uint64_t base_seed = theta_seed(config);
  const std::size_t draws = seeded ? config.n_samples : 1;
  const std::size_t tasks = config.alpha.size() * draws;

  std::vector<std::vector<std::vector<Cell>>> rows(tasks);
  parallel_for(tasks, config.threads, [&](std::size_t task) {
    const double alpha = config.alpha[task / draws];
    const std::size_t s = task % draws;
    const DigitSequence omega =
        seeded ? ensemble_sample(base_seed, s, spec.base()) : theta_sequence(config);
    const std::uint64_t seed = seeded ? derive_seed(base_seed, s) : config.seed;
    const TridiagonalOperator op =
        build_halfline_box(spec, omega, config.box_size, BoundaryCondition(alpha));
    for (const EigenPair& pair : eigensolve(op)) {
      const DecayReport r = decay_report(pair);
      rows[task].push_back({r.eigenvalue, r.rate, r.residual, r.participation_ratio,
                            std::uint64_t{config.box_size}, alpha, seed});
    }
  });

  Table table{{"eigenvalue", "rate", "residual", "participation_ratio", "N", "alpha", "seed"}, {}};
  for (auto& batch : rows) {
    for (auto& row : batch) table.add_row(std::move(row));
  }
  return table;
}

RunResult verify_table(const ExperimentConfig& config) {
  IdentitySuiteOptions options;
  options.seed = config.seed;
  options.threads = config.threads;
  const std::vector<CheckResult> checks = run_identity_suite(config.potential(), options);
  RunResult result{Table{{"check", "pass", "cases", "detail"}, {}}, 0};
  for (const CheckResult& c : checks) {
    result.table.add_row({c.name, std::string(c.pass ? "pass" : "FAIL"), std::uint64_t{c.cases},
                          c.detail});
    if (!c.pass) result.exit_code = 2;
  }
  return result;
}

Table float_demo_table(const ExperimentConfig& config) {
  const unsigned base = config.base;
  const DigitSequence omega = theta_sequence(config);
  std::optional<Fraction> exact;
  if (const auto* r = std::get_if<ThetaConfig::Rational>(&config.theta.kind)) exact = r->value;

  double float_theta = exact ? static_cast<double>(exact->num) / static_cast<double>(exact->den)
                             : evaluate_d(omega).value;
  Table table{{"step", "float_theta", "symbolic_theta", "exact_theta"}, {}};
  std::size_t zero_rows = 0;
  const std::size_t cap = std::min<std::size_t>(kFloatDemoCap, config.n_steps);
  for (std::size_t step = 0; step <= cap; ++step) {
    const double symbolic = evaluate_d(shift(omega, step)).value;
    std::string exact_text;
    if (exact) {
      exact_text = std::to_string(exact->num) + "/" + std::to_string(exact->den);
      *exact = doubling_map_exact(*exact, base);
    }
    table.add_row({std::uint64_t{step}, float_theta, symbolic, exact_text});
    if (float_theta == 0.0 && ++zero_rows > 3) break;
    float_theta = doubling_map_float(float_theta, base);
  }
  return table;
}

}  // namespace

RunResult execute(const ExperimentConfig& config) {
  switch (config.command) {
    case Command::kLyapunov: return {lyapunov_table(config), 0};
    case Command::kBands: return {bands_table(config), 0};
    case Command::kSpectrum: return {spectrum_table(config), 0};
    case Command::kLocalize: return {localize_table(config), 0};
    case Command::kVerify: return verify_table(config);
    case Command::kFloatDemo: return {float_demo_table(config), 0};
  }
  throw ValidationError("command: unsupported");
}

int run(const ExperimentConfig& config, std::ostream& fallback) {
  config.validate();
  const RunResult result = execute(config);
  const std::string command(to_string(config.command));
  const nlohmann::json provenance = config_to_json(config);

  std::ofstream file;
  if (config.out != "-") {
    file.open(config.out);
    if (!file) throw ValidationError("out: cannot open '" + config.out + "' for writing");
  }
  std::ostream& out = config.out == "-" ? fallback : file;
  if (config.format == OutputFormat::kCsv) write_csv(result.table, command, provenance, out);
  else write_json(result.table, command, provenance, out);
  return result.exit_code;
}

}  // namespace doubling
