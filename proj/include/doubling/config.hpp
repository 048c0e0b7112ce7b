#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "doubling/cocycle.hpp"
#include "doubling/potential.hpp"
#include "doubling/symbolic.hpp"

namespace doubling {

enum class Command { kLyapunov, kBands, kSpectrum, kLocalize, kVerify, kFloatDemo };
enum class OutputFormat { kCsv, kJson };

std::string_view to_string(Command c);
Command parse_command(std::string_view name);

/// How theta is chosen: a Bernoulli draw, an explicit eventually periodic
/// digit string, or an exact rational p/q encoded in the configured base.
struct ThetaConfig {
  struct Seeded {
    /// Falls back to the experiment seed when unset.
    std::optional<std::uint64_t> seed;
    friend bool operator==(const Seeded&, const Seeded&) = default;
  };
  struct Periodic {
    PeriodicForm form;
    friend bool operator==(const Periodic&, const Periodic&) = default;
  };
  struct Rational {
    Fraction value;
    friend bool operator==(const Rational&, const Rational&) = default;
  };
  std::variant<Seeded, Periodic, Rational> kind = Seeded{};

  bool is_seeded() const noexcept { return std::holds_alternative<Seeded>(kind); }
  friend bool operator==(const ThetaConfig&, const ThetaConfig&) = default;
};

struct ExperimentConfig {
  Command command = Command::kVerify;
  double lambda = 1.0;
  SamplingFunction f = SamplingFunction::cosine();
  bool allow_constant_f = false;
  unsigned base = 2;
  ThetaConfig theta;
  /// Defaults to 101 points over the spectral enclosure.
  std::optional<EnergyGrid> grid;
  std::uint64_t n_steps = 100000;
  std::uint64_t n_samples = 16;
  std::size_t box_size = 1000;
  std::vector<double> alpha{0.0};
  std::uint64_t seed = 1;
  /// "-" is standard output.
  std::string out = "-";
  OutputFormat format = OutputFormat::kCsv;
  /// 0 selects the hardware concurrency.  Never affects results.
  unsigned threads = 0;
  /// spectrum: whole-line box over -N..N instead of the half-line box.
  bool wholeline = false;

  PotentialSpec potential() const;
  EnergyGrid energy_grid() const;
  /// Range checks for every field; throws ValidationError naming the field.
  void validate() const;
  friend bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);
};

/// Half-line digit sequence selected by theta (seeded draws use the
/// Bernoulli stream of the resolved seed).
DigitSequence theta_sequence(const ExperimentConfig& config);
std::uint64_t theta_seed(const ExperimentConfig& config);

// Flag syntax parsers.  All throw ValidationError with the offending text.
/// cosine | step:c | table:v1,v2,... | table:path
SamplingFunction parse_function_flag(std::string_view text, bool allow_constant);
/// seed | seed:S | p/q | digits:PERIOD | digits:PREFIX:PERIOD
ThetaConfig parse_theta_flag(std::string_view text);
/// lo:hi:count
EnergyGrid parse_grid_flag(std::string_view text);
/// comma-separated angles
std::vector<double> parse_alpha_flag(std::string_view text);
std::vector<double> read_table_file(const std::string& path);

// JSON schema.  Unknown keys are rejected.
nlohmann::json function_to_json(const SamplingFunction& f);
SamplingFunction function_from_json(const nlohmann::json& j, bool allow_constant);
nlohmann::json digits_to_json(const DigitSequence& omega);
DigitSequence digits_from_json(const nlohmann::json& j);
nlohmann::json theta_to_json(const ThetaConfig& theta, unsigned base);
ThetaConfig theta_from_json(const nlohmann::json& j, unsigned base);
nlohmann::json config_to_json(const ExperimentConfig& config);
/// Fields absent from `j` keep their values from `defaults`.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig defaults = {});

}  // namespace doubling
