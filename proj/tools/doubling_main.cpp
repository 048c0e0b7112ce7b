// doubling: command-line front end for the doubling-map Schrodinger laboratory.
//
//   doubling lyapunov --lambda 2 --f cosine --grid=-4.2:4.2:101 --n 100000 --samples 16
//   doubling bands --theta 1/3 --lambda 1
//   doubling verify
//
// Exit status: 0 success, 1 validation error, 2 numerical failure.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "doubling/config.hpp"
#include "doubling/errors.hpp"
#include "doubling/run.hpp"

namespace {

struct Flags {
  std::optional<std::string> config_path;
  std::optional<double> lambda;
  std::optional<std::string> f;
  bool allow_constant_f = false;
  std::optional<unsigned> base;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> n;
  std::optional<std::uint64_t> samples;
  std::optional<std::string> grid;
  std::optional<std::size_t> box;
  std::optional<std::string> alpha;
  std::optional<std::string> theta;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<unsigned> threads;
  bool wholeline = false;
};

doubling::ExperimentConfig resolve(const Flags& flags, doubling::Command command) {
  using namespace doubling;
  ExperimentConfig config;
  if (flags.config_path) {
    std::ifstream in(*flags.config_path);
    if (!in) throw ValidationError("--config: cannot open '" + *flags.config_path + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(std::string("--config: ") + e.what());
    }
    config = config_from_json(j, config);
  }
  config.command = command;
  if (flags.allow_constant_f) config.allow_constant_f = true;
  if (flags.lambda) config.lambda = *flags.lambda;
  if (flags.base) config.base = *flags.base;
  if (flags.f) config.f = parse_function_flag(*flags.f, config.allow_constant_f);
  if (flags.seed) config.seed = *flags.seed;
  if (flags.n) config.n_steps = *flags.n;
  if (flags.samples) config.n_samples = *flags.samples;
  if (flags.grid) config.grid = parse_grid_flag(*flags.grid);
  if (flags.box) config.box_size = *flags.box;
  if (flags.alpha) config.alpha = parse_alpha_flag(*flags.alpha);
  if (flags.theta) config.theta = parse_theta_flag(*flags.theta);
  if (flags.out) config.out = *flags.out;
  if (flags.format) {
    if (*flags.format == "csv") config.format = OutputFormat::kCsv;
    else if (*flags.format == "json") config.format = OutputFormat::kJson;
    else throw ValidationError("--format: must be csv or json");
  }
  if (flags.threads) config.threads = *flags.threads;
  if (flags.wholeline) config.wholeline = true;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lyapunov exponents and spectra of Schrodinger operators over the doubling map"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  app.add_option("--config", flags.config_path, "JSON experiment config (flags override it)");
  app.add_option("--lambda", flags.lambda, "Coupling constant (> 0)");
  app.add_option("--f", flags.f, "Sampling function: cosine | step:c | table:v1,v2,... | table:path");
  app.add_flag("--allow-constant-f", flags.allow_constant_f,
               "Accept a constant table (free-Laplacian reference runs)");
  app.add_option("--base", flags.base, "Base m of the map theta -> m theta mod 1");
  app.add_option("--seed", flags.seed, "Experiment seed");
  app.add_option("--n", flags.n, "Transfer-matrix steps per sample");
  app.add_option("--samples", flags.samples, "Bernoulli samples per energy / localize draws");
  app.add_option("--grid", flags.grid, "Energy grid lo:hi:count (use --grid=-3:3:61 for negative lo)");
  app.add_option("--N", flags.box, "Box size");
  app.add_option("--alpha", flags.alpha, "Boundary angle(s) in [0, pi), comma-separated");
  app.add_option("--theta", flags.theta, "seed | seed:S | p/q | digits:PERIOD | digits:PREFIX:PERIOD");
  app.add_option("--out", flags.out, "Output path ('-' for stdout)");
  app.add_option("--format", flags.format, "csv | json");
  app.add_option("--threads", flags.threads, "Worker threads (0 = hardware); results do not depend on it");
  app.add_flag("--wholeline", flags.wholeline, "spectrum: whole-line box -N..N");

  for (const char* name : {"lyapunov", "bands", "spectrum", "localize", "verify", "float-demo"}) {
    app.add_subcommand(name);
  }
  app.get_subcommand("lyapunov")->description("Lyapunov exponent curve over an energy grid");
  app.get_subcommand("bands")->description("Floquet bands for periodic theta");
  app.get_subcommand("spectrum")->description("Eigenvalues of a finite box");
  app.get_subcommand("localize")->description("Eigenfunction decay and participation ratios");
  app.get_subcommand("verify")->description("Structural identity checks");
  app.get_subcommand("float-demo")->description("Floating-point vs symbolic orbits of the doubling map");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const auto command = doubling::parse_command(app.get_subcommands().front()->get_name());
    return doubling::run(resolve(flags, command), std::cout);
  } catch (const doubling::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 1;
  } catch (const doubling::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  }
}
