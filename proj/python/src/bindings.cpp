#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "wasserline/dpm.hpp"
#include "wasserline/dyadic_bounds.hpp"
#include "wasserline/error.hpp"
#include "wasserline/experiments.hpp"
#include "wasserline/io.hpp"
#include "wasserline/reference_distributions.hpp"
#include "wasserline/wasserstein.hpp"

namespace py = pybind11;
using namespace wasserline;

namespace {

py::object to_python(const nlohmann::json& j) {
  if (j.is_null()) return py::none();
  if (j.is_boolean()) return py::bool_(j.get<bool>());
  if (j.is_number_integer()) return py::int_(j.get<long long>());
  if (j.is_number()) return py::float_(j.get<double>());
  if (j.is_string()) return py::str(j.get<std::string>());
  if (j.is_array()) {
    py::list out;
    for (const auto& item : j) out.append(to_python(item));
    return out;
  }
  py::dict out;
  for (const auto& [key, value] : j.items()) out[py::str(key)] = to_python(value);
  return out;
}

DistanceOrder order_from(const py::object& p) {
  if (py::isinstance<py::str>(p)) return DistanceOrder::parse(p.cast<std::string>());
  const double value = p.cast<double>();
  if (std::isinf(value) && value > 0) return DistanceOrder::infinity();
  return DistanceOrder::finite(value);
}

std::vector<double> to_vector(std::span<const double> values) { return {values.begin(), values.end()}; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact one-dimensional Wasserstein distances, dyadic bounds and DPM posterior sampling";

  static py::exception<HypothesisError> hypothesis_error(m, "HypothesisError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr e) {
    try {
      if (e) std::rethrow_exception(e);
    } catch (const HypothesisError& err) {
      py::set_error(hypothesis_error, err.what());
    } catch (const DataError& err) {
      py::set_error(PyExc_ValueError, err.what());
    }
  });

  py::class_<DiscreteMeasure>(m, "DiscreteMeasure")
      .def(py::init<std::vector<double>, std::vector<double>>(), py::arg("atoms"), py::arg("weights"))
      .def_static("dirac", &DiscreteMeasure::dirac)
      .def_static("uniform_on", [](const std::vector<double>& points) { return DiscreteMeasure::uniform_on(points); })
      .def_static("empirical", [](std::vector<double> values) {
        return empirical_from_sample(SortedSample::from_unsorted(std::move(values)));
      })
      .def_property_readonly("atoms", [](const DiscreteMeasure& d) { return to_vector(d.atoms()); })
      .def_property_readonly("weights", [](const DiscreteMeasure& d) { return to_vector(d.weights()); })
      .def("__len__", &DiscreteMeasure::size)
      .def("moment", [](const DiscreteMeasure& d, double p) { return moment(d, p); })
      .def("to_csv", [](const DiscreteMeasure& d) {
        std::ostringstream out;
        write_measure_csv(out, d);
        return out.str();
      })
      .def_static("from_csv", [](const std::string& text) {
        std::istringstream in(text);
        return read_measure_csv(in);
      });

  m.def("wp_sorted_equal", [](std::vector<double> x, std::vector<double> y, double p) {
    return wp_sorted_equal(SortedSample::from_unsorted(std::move(x)), SortedSample::from_unsorted(std::move(y)), p);
  }, py::arg("x"), py::arg("y"), py::arg("p"));
  m.def("wp_quantile", &wp_quantile, py::arg("a"), py::arg("b"), py::arg("p"));
  m.def("w1_cdf", &w1_cdf);
  m.def("w_infty", &w_infty);
  m.def("w1_duality_gap", &w1_duality_gap);
  m.def("wasserstein_distance", [](const DiscreteMeasure& a, const DiscreteMeasure& b, const py::object& p) {
    return wasserstein_distance(a, b, order_from(p));
  }, py::arg("a"), py::arg("b"), py::arg("p"));

  m.def("bound_compact", [](const DiscreteMeasure& a, const DiscreteMeasure& b, int levels, double p) {
    return to_python(to_json(bound_compact(a, b, levels, p)));
  }, py::arg("a"), py::arg("b"), py::arg("levels"), py::arg("p"));
  m.def("bound_unbounded", [](const DiscreteMeasure& a, const DiscreteMeasure& b, double p, std::optional<int> levels) {
    const auto inner = levels ? InnerDistance::recursive(*levels) : InnerDistance::exact();
    return to_python(to_json(bound_unbounded(a, b, p, inner)));
  }, py::arg("a"), py::arg("b"), py::arg("p"), py::arg("recursive_levels") = py::none());
  m.def("bound_combined", [](const DiscreteMeasure& a, const DiscreteMeasure& b, double p, int levels, int blocks,
                             double delta, double k) {
    return to_python(to_json(bound_combined(a, b, CombinedParams{levels, blocks, p, delta, k})));
  }, py::arg("a"), py::arg("b"), py::arg("p"), py::arg("levels"), py::arg("blocks"), py::arg("delta"), py::arg("k"));
  m.def("coupling_discrepancy", [](const DiscreteMeasure& a, const DiscreteMeasure& b, std::vector<double> breaks) {
    return coupling_discrepancy(a, b, Partition(std::move(breaks)));
  }, py::arg("a"), py::arg("b"), py::arg("breakpoints"));

  py::class_<ReferenceDistribution>(m, "ReferenceDistribution")
      .def_static("from_name", &ReferenceDistribution::from_name)
      .def_static("names", &ReferenceDistribution::names)
      .def_property_readonly("name", &ReferenceDistribution::name)
      .def("quantile", &ReferenceDistribution::quantile)
      .def("cdf", &ReferenceDistribution::cdf)
      .def("density", &ReferenceDistribution::density)
      .def("upper_tail_moment", &ReferenceDistribution::upper_tail_moment);
  m.def("discretize", &discretize, py::arg("dist"), py::arg("M"));
  m.def("approx_error_bound", &approx_error_bound, py::arg("dist"), py::arg("M"), py::arg("p"));
  m.def("sample", [](const ReferenceDistribution& d, std::size_t n, std::uint64_t seed) {
    return to_vector(sample(d, n, seed).values());
  }, py::arg("dist"), py::arg("n"), py::arg("seed"));

  m.def("run_chain", [](std::vector<double> data, const std::string& mixture, int burn_in, int n_draws, int thinning,
                        std::uint64_t seed, std::optional<double> fixed_sigma) {
    DpmConfig config;
    config.mixture = parse_mixture_kind(mixture);
    config.fixed_sigma = fixed_sigma;
    ChainConfig chain{burn_in, n_draws, thinning, seed};
    ChainResult result;
    {
      py::gil_scoped_release release;
      result = run_chain(SortedSample::from_unsorted(std::move(data)), config, chain);
    }
    return py::make_tuple(result.draws, to_python(to_json(result.diagnostics)));
  }, py::arg("data"), py::arg("mixture") = "location", py::arg("burn_in") = 1000, py::arg("n_draws") = 10000,
     py::arg("thinning") = 1, py::arg("seed") = 0, py::arg("fixed_sigma") = py::none());
  m.def("tail_mass_diagnostic", [](const DiscreteMeasure& d, double p, int m_max) {
    return to_python(to_json(tail_mass_diagnostic(d, p, m_max)));
  }, py::arg("sample"), py::arg("p"), py::arg("m_max") = 10);
  m.def("moment_diagnostic", &moment_diagnostic, py::arg("sample"), py::arg("p"), py::arg("delta") = 1.0);

  m.def("run_study", [](const std::string& config_json, bool write) {
    const auto config = study_config_from_json(nlohmann::json::parse(config_json));
    StudyOutcome outcome;
    {
      py::gil_scoped_release release;
      outcome = run_study(config);
      if (write) write_study_outputs(config, outcome);
    }
    std::ostringstream results;
    write_results_csv(results, outcome.results);
    std::ostringstream summary;
    write_summary_csv(summary, outcome.summary);
    py::list failures;
    for (const auto& f : outcome.failures) failures.append(f.message);
    return py::make_tuple(results.str(), summary.str(), failures);
  }, py::arg("config_json"), py::arg("write") = false);
}
