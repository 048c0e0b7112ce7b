#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "doubling/cocycle.hpp"
#include "doubling/config.hpp"
#include "doubling/errors.hpp"
#include "doubling/run.hpp"
#include "doubling/spectral.hpp"
#include "doubling/symbolic.hpp"
#include "doubling/verify.hpp"

namespace py = pybind11;
using namespace doubling;

namespace {

py::dict estimate_to_dict(const LyapunovEstimate& e) {
  py::dict d;
  d["energy"] = e.energy;
  d["mean"] = e.mean;
  d["stderr"] = e.std_error;
  d["n_steps"] = e.n_steps;
  d["n_samples"] = e.n_samples;
  return d;
}

py::object cell_to_py(const Cell& cell) {
  return std::visit([](const auto& v) -> py::object { return py::cast(v); }, cell);
}

}  // namespace

PYBIND11_MODULE(_doubling, m) {
  m.doc() = "Schrodinger operators with doubling-map potentials";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<SamplingFunction>(m, "SamplingFunction")
      .def_static("cosine", &SamplingFunction::cosine)
      .def_static("step", &SamplingFunction::step, py::arg("threshold"))
      .def_static("table", &SamplingFunction::table, py::arg("values"),
                  py::arg("allow_constant") = false)
      .def_static("parse", &parse_function_flag, py::arg("text"), py::arg("allow_constant") = false)
      .def("__call__", &SamplingFunction::operator(), py::arg("theta"))
      .def_property_readonly("kind", [](const SamplingFunction& f) { return std::string(f.kind_name()); })
      .def_property_readonly("sup_abs", &SamplingFunction::sup_abs)
      .def("__eq__", [](const SamplingFunction& a, const SamplingFunction& b) { return a == b; });

  py::class_<PotentialSpec>(m, "PotentialSpec")
      .def(py::init<double, SamplingFunction, unsigned>(), py::arg("coupling"),
           py::arg("f") = SamplingFunction::cosine(), py::arg("base") = 2)
      .def_property_readonly("coupling", &PotentialSpec::coupling)
      .def_property_readonly("f", &PotentialSpec::f)
      .def_property_readonly("base", &PotentialSpec::base)
      .def_property_readonly("bound", &PotentialSpec::bound);

  py::class_<DigitSequence>(m, "DigitSequence")
      .def_static("seeded", &DigitSequence::seeded, py::arg("seed"), py::arg("base") = 2)
      .def_static("periodic", &DigitSequence::periodic, py::arg("base"), py::arg("prefix"),
                  py::arg("period"))
      .def_property_readonly("base", &DigitSequence::base)
      .def("digit", &DigitSequence::digit, py::arg("n"))
      .def("window",
           [](const DigitSequence& s, std::uint64_t first, std::size_t count) {
             std::vector<Digit> out(count);
             s.fill(first, out);
             return out;
           },
           py::arg("first"), py::arg("count"))
      .def("shift", &DigitSequence::shifted, py::arg("steps"))
      .def("periodic_form", [](const DigitSequence& s) -> py::object {
        const auto form = s.periodic_form();
        if (!form) return py::none();
        return py::make_tuple(form->prefix, form->period);
      })
      .def("value", [](const DigitSequence& s) { return evaluate_d(s).value; });

  m.def("encode", [](std::uint64_t p, std::uint64_t q, unsigned base) {
        return encode(Fraction{p, q}, base);
      }, py::arg("p"), py::arg("q"), py::arg("base") = 2);
  m.def("doubling_map", py::overload_cast<double, unsigned>(&doubling_map_float),
        py::arg("theta"), py::arg("base") = 2);

  m.def("halfline_potentials", &halfline_potentials, py::arg("spec"), py::arg("omega"),
        py::arg("count"));
  m.def("wholeline_potentials",
        [](const PotentialSpec& spec, std::uint64_t seed, std::int64_t first, std::int64_t last) {
          return wholeline_potentials(spec, sample_bernoulli(seed, spec.base()), first, last);
        },
        py::arg("spec"), py::arg("seed"), py::arg("first"), py::arg("last"));

  m.def("estimate_gamma",
        [](const PotentialSpec& spec, double energy, std::uint64_t n, std::uint64_t samples,
           std::uint64_t seed, unsigned threads) {
          LyapunovEstimate e;
          {
            py::gil_scoped_release release;
            e = estimate_gamma(spec, energy, n, samples, seed, threads);
          }
          return estimate_to_dict(e);
        },
        py::arg("spec"), py::arg("energy"), py::arg("n") = 100000, py::arg("samples") = 16,
        py::arg("seed") = 1, py::arg("threads") = 0);

  m.def("lyapunov_curve",
        [](const PotentialSpec& spec, double lo, double hi, std::size_t count, std::uint64_t n,
           std::uint64_t samples, std::uint64_t seed, unsigned threads) {
          LyapunovCurve curve;
          {
            py::gil_scoped_release release;
            curve = lyapunov_curve(spec, EnergyGrid{lo, hi, count}, n, samples, seed, threads);
          }
          py::list out;
          for (const auto& p : curve.points) out.append(estimate_to_dict(p));
          return out;
        },
        py::arg("spec"), py::arg("lo"), py::arg("hi"), py::arg("count"), py::arg("n") = 100000,
        py::arg("samples") = 16, py::arg("seed") = 1, py::arg("threads") = 0);

  m.def("periodic_bands",
        [](const PotentialSpec& spec, const DigitSequence& omega) {
          const BandSet bands = periodic_bands(spec, omega);
          std::vector<std::pair<double, double>> out;
          for (const Band& b : bands.bands()) out.emplace_back(b.lower, b.upper);
          return out;
        },
        py::arg("spec"), py::arg("omega"));

  m.def("eigenvalues",
        [](const PotentialSpec& spec, const DigitSequence& omega, std::size_t n, double alpha) {
          const TridiagonalOperator op = build_halfline_box(spec, omega, n, BoundaryCondition(alpha));
          const std::vector<double> off = op.off_diagonal();
          return tridiagonal_eigenvalues(op.diagonal(), off);
        },
        py::arg("spec"), py::arg("omega"), py::arg("n"), py::arg("alpha") = 0.0);

  m.def("participation_ratios",
        [](const PotentialSpec& spec, const DigitSequence& omega, std::size_t n, double alpha) {
          const TridiagonalOperator op = build_halfline_box(spec, omega, n, BoundaryCondition(alpha));
          std::vector<double> out;
          for (const EigenPair& pair : eigensolve(op)) out.push_back(participation_ratio(pair.eigenvector));
          return out;
        },
        py::arg("spec"), py::arg("omega"), py::arg("n"), py::arg("alpha") = 0.0);

  m.def("identity_suite",
        [](const PotentialSpec& spec, unsigned threads) {
          IdentitySuiteOptions options;
          options.threads = threads;
          py::list out;
          for (const CheckResult& r : run_identity_suite(spec, options)) {
            py::dict d;
            d["name"] = r.name;
            d["pass"] = r.pass;
            d["cases"] = r.cases;
            d["detail"] = r.detail;
            out.append(d);
          }
          return out;
        },
        py::arg("spec"), py::arg("threads") = 0);

  m.def("run",
        [](const std::string& config_json) {
          ExperimentConfig config = config_from_json(nlohmann::json::parse(config_json));
          config.validate();
          const RunResult result = execute(config);
          py::list rows;
          for (const auto& row : result.table.rows) {
            py::list r;
            for (const Cell& c : row) r.append(cell_to_py(c));
            rows.append(r);
          }
          py::dict d;
          d["columns"] = result.table.columns;
          d["rows"] = rows;
          d["exit_code"] = result.exit_code;
          return d;
        },
        py::arg("config_json"),
        "Run one experiment from a JSON config (same schema as the CLI --config file).");
}
