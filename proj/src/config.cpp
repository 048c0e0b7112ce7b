#include "doubling/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include "doubling/errors.hpp"

namespace doubling {

using nlohmann::json;

namespace {

constexpr unsigned kMaxBase = 36;

template <class T>
T parse_number(std::string_view text, std::string_view field) {
  T value{};
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  if (!text.empty() && text.front() == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || begin == end) {
    throw ValidationError(std::string(field) + ": cannot parse '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) return parts;
    start = pos + 1;
  }
}

std::vector<Digit> parse_digit_string(std::string_view text) {
  std::vector<Digit> digits;
  for (char ch : text) {
    if (ch >= '0' && ch <= '9') digits.push_back(static_cast<Digit>(ch - '0'));
    else if (ch >= 'a' && ch <= 'z') digits.push_back(static_cast<Digit>(ch - 'a' + 10));
    else throw ValidationError(std::string("--theta: invalid digit '") + ch + "'");
  }
  return digits;
}

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> allowed,
                         std::string_view where) {
  if (!j.is_object()) throw ValidationError(std::string(where) + ": expected a JSON object");
  const std::set<std::string_view> keys(allowed);
  for (const auto& [key, value] : j.items()) {
    if (!keys.contains(key)) {
      throw ValidationError(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

template <class T>
T get_field(const json& j, const char* key, std::string_view where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string(where) + "." + key + ": missing or wrong type");
  }
}

std::vector<Digit> digit_array(const json& j, const char* key, std::string_view where) {
  return j.contains(key) ? get_field<std::vector<Digit>>(j, key, where) : std::vector<Digit>{};
}

bool grids_equal(const std::optional<EnergyGrid>& a, const std::optional<EnergyGrid>& b) {
  if (a.has_value() != b.has_value()) return false;
  if (!a) return true;
  return a->lo == b->lo && a->hi == b->hi && a->count == b->count;
}

}  // namespace

std::string_view to_string(Command c) {
  switch (c) {
    case Command::kLyapunov: return "lyapunov";
    case Command::kBands: return "bands";
    case Command::kSpectrum: return "spectrum";
    case Command::kLocalize: return "localize";
    case Command::kVerify: return "verify";
    case Command::kFloatDemo: return "float-demo";
  }
  return "unknown";
}

Command parse_command(std::string_view name) {
  for (Command c : {Command::kLyapunov, Command::kBands, Command::kSpectrum, Command::kLocalize,
                    Command::kVerify, Command::kFloatDemo}) {
    if (to_string(c) == name) return c;
  }
  throw ValidationError("command: unknown command '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------

PotentialSpec ExperimentConfig::potential() const { return PotentialSpec(lambda, f, base); }

EnergyGrid ExperimentConfig::energy_grid() const {
  return grid ? *grid : EnergyGrid::enclosure(potential(), 101);
}

void ExperimentConfig::validate() const {
  if (base < 2 || base > kMaxBase) {
    throw ValidationError("base: must lie in [2, " + std::to_string(kMaxBase) + "]");
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw ValidationError("lambda: must be > 0");
  if (f.is_constant() && !allow_constant_f) {
    throw ValidationError("f: sampling function is constant (pass allow_constant_f for reference runs)");
  }
  if (grid) grid->validate();
  if (n_steps == 0) throw ValidationError("n: must be >= 1");
  if (n_samples < 2) throw ValidationError("samples: must be >= 2");
  if (box_size == 0) throw ValidationError("N: must be >= 1");
  if (command == Command::kLocalize && box_size < 16) {
    throw ValidationError("N: localize needs N >= 16");
  }
  if (alpha.empty()) throw ValidationError("alpha: need at least one angle");
  for (double a : alpha) {
    if (!(a >= 0.0 && a < std::numbers::pi)) throw ValidationError("alpha: must lie in [0, pi)");
    if (std::abs(a - std::numbers::pi / 2) <= 1e-12) {
      throw ValidationError("alpha: pi/2 is not a diagonal boundary correction");
    }
  }
  if (const auto* r = std::get_if<ThetaConfig::Rational>(&theta.kind)) {
    if (r->value.den == 0 || r->value.num >= r->value.den) {
      throw ValidationError("theta: rational must lie in [0,1)");
    }
  }
  if (const auto* p = std::get_if<ThetaConfig::Periodic>(&theta.kind)) {
    if (p->form.period.empty()) throw ValidationError("theta: period must be non-empty");
    for (const auto* part : {&p->form.prefix, &p->form.period}) {
      for (Digit d : *part) {
        if (d >= base) throw ValidationError("theta: digit out of range for base");
      }
    }
  }
  if ((command == Command::kBands) && theta.is_seeded()) {
    throw ValidationError("theta: bands needs a periodic theta (p/q or digits:...)");
  }
  if (command == Command::kSpectrum && wholeline && !theta.is_seeded()) {
    throw ValidationError("theta: whole-line spectrum samples a Bernoulli sequence; use --theta seed");
  }
  if (format != OutputFormat::kCsv && format != OutputFormat::kJson) {
    throw ValidationError("format: must be csv or json");
  }
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  return a.command == b.command && a.lambda == b.lambda && a.f == b.f &&
         a.allow_constant_f == b.allow_constant_f && a.base == b.base && a.theta == b.theta &&
         grids_equal(a.grid, b.grid) && a.n_steps == b.n_steps && a.n_samples == b.n_samples &&
         a.box_size == b.box_size && a.alpha == b.alpha && a.seed == b.seed && a.out == b.out &&
         a.format == b.format && a.threads == b.threads && a.wholeline == b.wholeline;
}

std::uint64_t theta_seed(const ExperimentConfig& config) {
  if (const auto* s = std::get_if<ThetaConfig::Seeded>(&config.theta.kind)) {
    return s->seed.value_or(config.seed);
  }
  return config.seed;
}

DigitSequence theta_sequence(const ExperimentConfig& config) {
  return std::visit(
      [&](const auto& kind) -> DigitSequence {
        using T = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<T, ThetaConfig::Seeded>) {
          return DigitSequence::seeded(theta_seed(config), config.base);
        } else if constexpr (std::is_same_v<T, ThetaConfig::Periodic>) {
          return DigitSequence::periodic(config.base, kind.form.prefix, kind.form.period);
        } else {
          return encode(kind.value, config.base);
        }
      },
      config.theta.kind);
}

// ---------------------------------------------------------------------------

std::vector<double> read_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("f: cannot open table file '" + path + "'");
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    values.push_back(parse_number<double>(std::string_view(line).substr(first, last - first + 1),
                                          "f table file"));
  }
  return values;
}

SamplingFunction parse_function_flag(std::string_view text, bool allow_constant) {
  if (text == "cosine") return SamplingFunction::cosine();
  if (text.starts_with("step:")) {
    return SamplingFunction::step(parse_number<double>(text.substr(5), "--f step"));
  }
  if (text.starts_with("table:")) {
    const std::string_view body = text.substr(6);
    std::vector<double> values;
    bool inline_values = !body.empty();
    for (std::string_view part : split(body, ',')) {
      double v{};
      const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
      if (ec != std::errc() || ptr != part.data() + part.size() || part.empty()) {
        inline_values = false;
        break;
      }
      values.push_back(v);
    }
    if (!inline_values) values = read_table_file(std::string(body));
    return SamplingFunction::table(std::move(values), allow_constant);
  }
  throw ValidationError("--f: expected cosine, step:c or table:..., got '" + std::string(text) + "'");
}

ThetaConfig parse_theta_flag(std::string_view text) {
  if (text == "seed") return ThetaConfig{ThetaConfig::Seeded{}};
  if (text.starts_with("seed:")) {
    return ThetaConfig{
        ThetaConfig::Seeded{parse_number<std::uint64_t>(text.substr(5), "--theta seed")}};
  }
  if (text.starts_with("digits:")) {
    const auto parts = split(text.substr(7), ':');
    if (parts.size() > 2) throw ValidationError("--theta: use digits:PERIOD or digits:PREFIX:PERIOD");
    PeriodicForm form;
    if (parts.size() == 2) form.prefix = parse_digit_string(parts[0]);
    form.period = parse_digit_string(parts.back());
    if (form.period.empty()) throw ValidationError("--theta: period must be non-empty");
    return ThetaConfig{ThetaConfig::Periodic{std::move(form)}};
  }
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    return ThetaConfig{ThetaConfig::Rational{
        Fraction{parse_number<std::uint64_t>(text.substr(0, slash), "--theta numerator"),
                 parse_number<std::uint64_t>(text.substr(slash + 1), "--theta denominator")}}};
  }
  throw ValidationError("--theta: expected seed, seed:S, p/q or digits:..., got '" +
                        std::string(text) + "'");
}

EnergyGrid parse_grid_flag(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ValidationError("--grid: expected lo:hi:count");
  EnergyGrid grid{parse_number<double>(parts[0], "--grid lo"),
                  parse_number<double>(parts[1], "--grid hi"),
                  parse_number<std::size_t>(parts[2], "--grid count")};
  grid.validate();
  return grid;
}

std::vector<double> parse_alpha_flag(std::string_view text) {
  std::vector<double> alphas;
  for (std::string_view part : split(text, ',')) alphas.push_back(parse_number<double>(part, "--alpha"));
  return alphas;
}

// ---------------------------------------------------------------------------

json function_to_json(const SamplingFunction& f) {
  return std::visit(
      [](const auto& kind) -> json {
        using T = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<T, SamplingFunction::Cosine>) {
          return {{"kind", "cosine"}};
        } else if constexpr (std::is_same_v<T, SamplingFunction::Step>) {
          return {{"kind", "step"}, {"threshold", kind.threshold}};
        } else {
          return {{"kind", "table"}, {"values", kind.values}};
        }
      },
      f.kind());
}

SamplingFunction function_from_json(const json& j, bool allow_constant) {
  reject_unknown_keys(j, {"kind", "threshold", "values", "path"}, "f");
  const auto kind = get_field<std::string>(j, "kind", "f");
  if (kind == "cosine") return SamplingFunction::cosine();
  if (kind == "step") return SamplingFunction::step(get_field<double>(j, "threshold", "f"));
  if (kind == "table") {
    if (j.contains("values") == j.contains("path")) {
      throw ValidationError("f: table needs exactly one of 'values' or 'path'");
    }
    std::vector<double> values = j.contains("values")
                                     ? get_field<std::vector<double>>(j, "values", "f")
                                     : read_table_file(get_field<std::string>(j, "path", "f"));
    return SamplingFunction::table(std::move(values), allow_constant);
  }
  throw ValidationError("f.kind: unknown kind '" + kind + "'");
}

json digits_to_json(const DigitSequence& omega) {
  if (const auto* src = omega.source(); src && src->is_seeded()) {
    json j = {{"base", omega.base()}, {"kind", "seeded"}, {"seed", src->seed()},
              {"offset", src->offset()}};
    const auto overrides = src->overrides();
    if (!overrides.empty()) {
      json list = json::array();
      for (const auto& [n, d] : overrides) list.push_back({n, d});
      j["overrides"] = std::move(list);
    }
    return j;
  }
  const PeriodicForm form = *omega.periodic_form();
  return {{"base", omega.base()}, {"kind", "periodic"}, {"prefix", form.prefix},
          {"period", form.period}};
}

DigitSequence digits_from_json(const json& j) {
  reject_unknown_keys(j, {"base", "kind", "seed", "offset", "overrides", "prefix", "period"},
                      "digits");
  const auto base = get_field<unsigned>(j, "base", "digits");
  const auto kind = get_field<std::string>(j, "kind", "digits");
  if (kind == "periodic") {
    return DigitSequence::periodic(base, digit_array(j, "prefix", "digits"),
                                   digit_array(j, "period", "digits"));
  }
  if (kind == "seeded") {
    auto two_sided = TwoSidedDigitSequence::bernoulli(get_field<std::uint64_t>(j, "seed", "digits"),
                                                      base);
    if (j.contains("offset")) two_sided = two_sided.shifted(get_field<std::int64_t>(j, "offset", "digits"));
    if (j.contains("overrides")) {
      for (const auto& entry : j.at("overrides")) {
        two_sided = two_sided.with_digit(entry.at(0).get<std::int64_t>(), entry.at(1).get<Digit>());
      }
    }
    return DigitSequence::window(std::move(two_sided));
  }
  throw ValidationError("digits.kind: unknown kind '" + kind + "'");
}

json theta_to_json(const ThetaConfig& theta, unsigned base) {
  return std::visit(
      [&](const auto& kind) -> json {
        using T = std::decay_t<decltype(kind)>;
        if constexpr (std::is_same_v<T, ThetaConfig::Seeded>) {
          json j = {{"base", base}, {"kind", "seeded"}};
          if (kind.seed) j["seed"] = *kind.seed;
          return j;
        } else if constexpr (std::is_same_v<T, ThetaConfig::Periodic>) {
          return {{"base", base}, {"kind", "periodic"}, {"prefix", kind.form.prefix},
                  {"period", kind.form.period}};
        } else {
          return {{"base", base}, {"kind", "rational"}, {"p", kind.value.num}, {"q", kind.value.den}};
        }
      },
      theta.kind);
}

ThetaConfig theta_from_json(const json& j, unsigned base) {
  reject_unknown_keys(j, {"base", "kind", "seed", "prefix", "period", "p", "q"}, "theta");
  if (j.contains("base") && get_field<unsigned>(j, "base", "theta") != base) {
    throw ValidationError("theta.base: does not match the experiment base");
  }
  const auto kind = get_field<std::string>(j, "kind", "theta");
  if (kind == "seeded") {
    ThetaConfig::Seeded s;
    if (j.contains("seed")) s.seed = get_field<std::uint64_t>(j, "seed", "theta");
    return ThetaConfig{s};
  }
  if (kind == "periodic") {
    return ThetaConfig{ThetaConfig::Periodic{
        PeriodicForm{digit_array(j, "prefix", "theta"), digit_array(j, "period", "theta")}}};
  }
  if (kind == "rational") {
    return ThetaConfig{ThetaConfig::Rational{Fraction{get_field<std::uint64_t>(j, "p", "theta"),
                                                      get_field<std::uint64_t>(j, "q", "theta")}}};
  }
  throw ValidationError("theta.kind: unknown kind '" + kind + "'");
}

json config_to_json(const ExperimentConfig& c) {
  json j = {{"command", to_string(c.command)},
            {"lambda", c.lambda},
            {"f", function_to_json(c.f)},
            {"allow_constant_f", c.allow_constant_f},
            {"base", c.base},
            {"theta", theta_to_json(c.theta, c.base)},
            {"n", c.n_steps},
            {"samples", c.n_samples},
            {"N", c.box_size},
            {"alpha", c.alpha},
            {"seed", c.seed},
            {"out", c.out},
            {"format", c.format == OutputFormat::kCsv ? "csv" : "json"},
            {"threads", c.threads},
            {"wholeline", c.wholeline}};
  if (c.grid) j["grid"] = {{"lo", c.grid->lo}, {"hi", c.grid->hi}, {"count", c.grid->count}};
  return j;
}

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
  constexpr std::string_view kWhere = "config";
  reject_unknown_keys(j,
                      {"command", "lambda", "f", "allow_constant_f", "base", "theta", "grid", "n",
                       "samples", "N", "alpha", "seed", "out", "format", "threads", "wholeline"},
                      kWhere);
  if (j.contains("command")) c.command = parse_command(get_field<std::string>(j, "command", kWhere));
  if (j.contains("lambda")) c.lambda = get_field<double>(j, "lambda", kWhere);
  if (j.contains("allow_constant_f")) c.allow_constant_f = get_field<bool>(j, "allow_constant_f", kWhere);
  if (j.contains("base")) c.base = get_field<unsigned>(j, "base", kWhere);
  if (j.contains("f")) c.f = function_from_json(j.at("f"), c.allow_constant_f);
  if (j.contains("theta")) c.theta = theta_from_json(j.at("theta"), c.base);
  if (j.contains("grid")) {
    const json& g = j.at("grid");
    reject_unknown_keys(g, {"lo", "hi", "count"}, "grid");
    c.grid = EnergyGrid{get_field<double>(g, "lo", "grid"), get_field<double>(g, "hi", "grid"),
                        get_field<std::size_t>(g, "count", "grid")};
  }
  if (j.contains("n")) c.n_steps = get_field<std::uint64_t>(j, "n", kWhere);
  if (j.contains("samples")) c.n_samples = get_field<std::uint64_t>(j, "samples", kWhere);
  if (j.contains("N")) c.box_size = get_field<std::size_t>(j, "N", kWhere);
  if (j.contains("alpha")) {
    const json& a = j.at("alpha");
    c.alpha = a.is_array() ? get_field<std::vector<double>>(j, "alpha", kWhere)
                           : std::vector<double>{get_field<double>(j, "alpha", kWhere)};
  }
  if (j.contains("seed")) c.seed = get_field<std::uint64_t>(j, "seed", kWhere);
  if (j.contains("out")) c.out = get_field<std::string>(j, "out", kWhere);
  if (j.contains("format")) {
    const auto fmt = get_field<std::string>(j, "format", kWhere);
    if (fmt == "csv") c.format = OutputFormat::kCsv;
    else if (fmt == "json") c.format = OutputFormat::kJson;
    else throw ValidationError("format: must be csv or json");
  }
  if (j.contains("threads")) c.threads = get_field<unsigned>(j, "threads", kWhere);
  if (j.contains("wholeline")) c.wholeline = get_field<bool>(j, "wholeline", kWhere);
  return c;
}

}  // namespace doubling
