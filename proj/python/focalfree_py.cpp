#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "focalfree/distance.hpp"
#include "focalfree/regress.hpp"
#include "focalfree/scenario.hpp"

namespace py = pybind11;
using namespace focalfree;

namespace {

using Point = std::pair<double, double>;
using Tangent = std::tuple<double, double, double>;

DiskPoint point(const Point& p) {
  const DiskPoint d{p.first, p.second};
  if (!d.valid()) throw DomainError("point must lie in the open unit disk");
  return d;
}

UnitTangent tangent(const Tangent& v) {
  return {point({std::get<0>(v), std::get<1>(v)}), wrap_two_pi(std::get<2>(v))};
}

Tangent as_tuple(const UnitTangent& v) { return {v.base.x, v.base.y, v.angle}; }

py::array_t<double> samples_array(const std::vector<MMESample>& samples) {
  py::array_t<double> out({static_cast<py::ssize_t>(samples.size()), py::ssize_t{4}});
  auto a = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    a(i, 0) = s.tangent.base.x;
    a(i, 1) = s.tangent.base.y;
    a(i, 2) = s.tangent.angle;
    a(i, 3) = s.source.weight;
  }
  return out;
}

std::vector<MMESample> samples_from(const py::array_t<double>& array) {
  const auto a = array.unchecked<2>();
  if (a.shape(1) != 4) throw DomainError("samples must have columns x, y, angle, weight");
  std::vector<MMESample> out(a.shape(0));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) {
    out[i].tangent = tangent({a(i, 0), a(i, 1), a(i, 2)});
    out[i].source.weight = a(i, 3);
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Geodesic flow on genus-2 surfaces without focal points";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SolverFailure>(m, "SolverFailure", PyExc_RuntimeError);

  py::class_<CertificationStatus>(m, "CertificationStatus")
      .def_readonly("certified", &CertificationStatus::certified)
      .def_readonly("witness_time", &CertificationStatus::witness_time)
      .def_readonly("vectors_checked", &CertificationStatus::vectors_checked)
      .def("__repr__", [](const CertificationStatus& s) {
        return "CertificationStatus(certified=" + std::string(s.certified ? "True" : "False") + ")";
      });

  py::class_<ConformalMetric>(m, "Metric", "Conformal metric e^{2u} times the hyperbolic metric")
      .def_static("hyperbolic", &ConformalMetric::hyperbolic)
      .def_static(
          "bump",
          [](double amplitude, const Point& center, double radius) {
            return ConformalMetric::bump(amplitude, point(center), radius);
          },
          py::arg("amplitude"), py::arg("center") = Point{0.0, 0.0}, py::arg("radius") = 1.0)
      .def_property_readonly("amplitude", &ConformalMetric::amplitude)
      .def_property_readonly("closed_form", &ConformalMetric::closed_form)
      .def_property_readonly("certified_no_focal", &ConformalMetric::certified_no_focal)
      .def("curvature", [](const ConformalMetric& g, const Point& p) { return gauss_curvature(g, point(p)); })
      .def("generic", &ConformalMetric::generic, "Same metric, forced through the numerical path");

  auto certification = [](int vectors, double T, std::uint64_t seed) {
    CertificationOptions o;
    o.n_vectors = vectors;
    o.T = T;
    o.seed = seed;
    return o;
  };
  m.def(
      "certify",
      [certification](const ConformalMetric& g, int vectors, double T, std::uint64_t seed) {
        return certify_no_focal(g, certification(vectors, T, seed));
      },
      py::arg("metric"), py::arg("vectors") = 100, py::arg("T") = 10.0, py::arg("seed") = 1);
  m.def(
      "certified",
      [certification](const ConformalMetric& g, int vectors, double T, std::uint64_t seed) {
        return certified(g, certification(vectors, T, seed));
      },
      py::arg("metric"), py::arg("vectors") = 100, py::arg("T") = 10.0, py::arg("seed") = 1,
      "Copy of the metric carrying its certification status");

  m.def(
      "flow", [](const ConformalMetric& g, const Tangent& v, double t) { return as_tuple(flow(g, tangent(v), t)); },
      py::arg("metric"), py::arg("v"), py::arg("t"));
  m.def(
      "distance", [](const ConformalMetric& g, const Point& p, const Point& q) { return focalfree::distance(g, point(p), point(q)); },
      py::arg("metric"), py::arg("p"), py::arg("q"));
  m.def(
      "endpoint",
      [](const ConformalMetric& g, const Tangent& v, int sign) { return endpoint(g, tangent(v), sign).theta; },
      py::arg("metric"), py::arg("v"), py::arg("sign") = 1);
  m.def(
      "busemann",
      [](const ConformalMetric& g, const Point& p, const Point& q, double xi) {
        return busemann(g, point(p), point(q), BoundaryPoint(xi));
      },
      py::arg("metric"), py::arg("p"), py::arg("q"), py::arg("xi"));
  m.def(
      "gromov_product",
      [](const ConformalMetric& g, const Point& p, double xi, double eta) {
        return gromov_product(g, point(p), BoundaryPoint(xi), BoundaryPoint(eta));
      },
      py::arg("metric"), py::arg("p"), py::arg("xi"), py::arg("eta"));

  py::class_<CrossRatioReport>(m, "CrossRatioReport")
      .def_readonly("limit", &CrossRatioReport::limit)
      .def_readonly("horospheres", &CrossRatioReport::horospheres)
      .def_readonly("holonomy", &CrossRatioReport::holonomy)
      .def_property_readonly("spread", &CrossRatioReport::spread);
  m.def(
      "cross_ratio",
      [](const ConformalMetric& g, double xi, double eta, double xi_p, double eta_p) {
        const auto quad = make_quadrilateral(g, BoundaryPoint(xi), BoundaryPoint(eta),
                                             BoundaryPoint(xi_p), BoundaryPoint(eta_p));
        return cross_ratio_all(g, quad);
      },
      py::arg("metric"), py::arg("xi"), py::arg("eta"), py::arg("xi_prime"), py::arg("eta_prime"),
      "Cross ratio by the distance limit, horosphere and holonomy methods");

  py::class_<EntropyEstimate>(m, "EntropyEstimate")
      .def_readonly("h", &EntropyEstimate::h)
      .def_readonly("residual", &EntropyEstimate::residual)
      .def_readonly("points", &EntropyEstimate::points);
  m.def(
      "critical_exponent",
      [](const ConformalMetric& g, const Point& p, int L, double r_lo, double r_hi, double r_step) {
        return critical_exponent(g, point(p), L, EntropyOptions{r_lo, r_hi, r_step});
      },
      py::arg("metric"), py::arg("p") = Point{0.0, 0.0}, py::arg("L") = 10, py::arg("r_lo") = 5.0,
      py::arg("r_hi") = 10.0, py::arg("r_step") = 0.25);
  m.def(
      "poincare_series",
      [](const ConformalMetric& g, double s, const Point& p, const Point& q, int L) {
        return poincare_series(g, s, point(p), point(q), L);
      },
      py::arg("metric"), py::arg("s"), py::arg("p") = Point{0.0, 0.0}, py::arg("q") = Point{0.0, 0.0},
      py::arg("L") = 10);

  py::class_<AtomicBoundaryMeasure>(m, "BoundaryMeasure", "Finite-orbit Patterson-Sullivan measure")
      .def_property_readonly("theta",
                             [](const AtomicBoundaryMeasure& mu) {
                               std::vector<double> out;
                               for (const auto& a : mu.atoms) out.push_back(a.xi.theta);
                               return py::array_t<double>(out.size(), out.data());
                             })
      .def_property_readonly("weight",
                             [](const AtomicBoundaryMeasure& mu) {
                               std::vector<double> out;
                               for (const auto& a : mu.atoms) out.push_back(a.weight);
                               return py::array_t<double>(out.size(), out.data());
                             })
      .def_readonly("exponent", &AtomicBoundaryMeasure::exponent)
      .def_readonly("s", &AtomicBoundaryMeasure::s)
      .def("total", &AtomicBoundaryMeasure::total)
      .def("binned", &AtomicBoundaryMeasure::binned, py::arg("bins") = 16)
      .def("__len__", [](const AtomicBoundaryMeasure& mu) { return mu.atoms.size(); });
  m.def(
      "ps_measure",
      [](const ConformalMetric& g, const Point& p, int L, double r_out, double width, double s_offset,
         std::optional<double> h) {
        PsOptions o;
        o.r_out = r_out;
        o.width = width;
        o.s_offset = s_offset;
        if (h) return ps_measure(g, point(p), L, *h + s_offset, *h, o);
        return ps_measure(g, point(p), L, o);
      },
      py::arg("metric"), py::arg("p") = Point{0.0, 0.0}, py::arg("L") = 10, py::arg("r_out") = 12.0,
      py::arg("width") = 2.0, py::arg("s_offset") = 0.05, py::arg("h") = py::none(),
      "Atoms from an orbit shell; h is estimated with critical_exponent when not given");

  m.def(
      "sample_mme",
      [](const ConformalMetric& g, const AtomicBoundaryMeasure& mu, int n, std::uint64_t seed) {
        return samples_array(sample_mme(g, mu, n, seed));
      },
      py::arg("metric"), py::arg("mu"), py::arg("n"), py::arg("seed"),
      "Weighted samples of the maximal entropy measure, columns x, y, angle, weight");
  m.def(
      "sample_liouville",
      [](const ConformalMetric& g, int n, std::uint64_t seed) { return samples_array(sample_liouville(g, n, seed)); },
      py::arg("metric"), py::arg("n"), py::arg("seed"));

  py::class_<Observable>(m, "Observable")
      .def(py::init(&observable_by_name), py::arg("name"))
      .def_readonly("name", &Observable::name)
      .def("__call__",
           [](const Observable& f, const ConformalMetric& g, const Tangent& v) { return f(g.group(), tangent(v)); },
           py::arg("metric"), py::arg("v"));
  m.def("angular_harmonic", &angular_harmonic);
  m.def("disk_indicator", &disk_indicator, py::arg("radius") = 0.5, py::arg("ramp") = 0.25);
  m.def("constant_observable", &constant_observable, py::arg("c"));

  m.def(
      "mixing_curve",
      [](const ConformalMetric& g, const Observable& f, const Observable& h, const std::vector<double>& t_grid,
         const AtomicBoundaryMeasure& mu, int N, std::uint64_t seed) {
        const CorrelationSeries c = mixing_curve(g, f, h, t_grid, mu, N, seed);
        py::dict out;
        std::vector<double> est, err;
        for (const auto& e : c.estimates) {
          est.push_back(e.estimate);
          err.push_back(e.stderr_);
        }
        out["t"] = c.t_grid;
        out["estimate"] = est;
        out["stderr"] = err;
        out["N"] = c.N;
        out["seed"] = c.seed;
        return out;
      },
      py::arg("metric"), py::arg("f"), py::arg("g"), py::arg("t_grid"), py::arg("mu"), py::arg("N"),
      py::arg("seed"));
  m.def(
      "space_average",
      [](const ConformalMetric& g, const Observable& f, const py::array_t<double>& samples) {
        const auto r = space_average(g, f, samples_from(samples));
        return std::pair{r.estimate, r.stderr_};
      },
      py::arg("metric"), py::arg("f"), py::arg("samples"), "Weighted mean and batch-means stderr");
  m.def(
      "birkhoff_average",
      [](const ConformalMetric& g, const Observable& f, const Tangent& v, double T, double dt) {
        BirkhoffOptions o;
        o.dt = dt;
        const auto r = birkhoff_average(g, f, tangent(v), T, o);
        return std::pair{r.average, r.stderr_};
      },
      py::arg("metric"), py::arg("f"), py::arg("v"), py::arg("T"), py::arg("dt") = 0.05);
  m.def(
      "stable_contraction",
      [](const ConformalMetric& g, double eta, double xi, double xi_prime, const std::vector<double>& t_grid) {
        // v on the geodesic xi -> eta, w its stable lift onto xi' -> eta.
        const auto eta_b = BoundaryPoint(eta);
        const auto v = connect(g, BoundaryPoint(xi), eta_b).anchor();
        const auto w = stable_lift(g, v, connect(g, BoundaryPoint(xi_prime), eta_b));
        return stable_contraction_test(g, v, w, t_grid);
      },
      py::arg("metric"), py::arg("eta"), py::arg("xi"), py::arg("xi_prime"), py::arg("t_grid"),
      "d1 distances along a positively asymptotic pair sharing the endpoint eta");

  m.def(
      "run_scenario",
      [](const std::filesystem::path& config) {
        const RunReport r = run_scenario(config);
        py::dict out;
        out["config_hash"] = r.config_hash;
        out["seed"] = r.seed;
        out["certified_no_focal"] = r.certification.certified;
        out["witness_time"] = r.certification.witness_time;
        out["artifacts"] = r.artifacts;
        py::list errors;
        for (const auto& e : r.errors) errors.append(py::make_tuple(e.stage, e.message));
        out["errors"] = errors;
        return out;
      },
      py::arg("config"), "Run the commands of a scenario file and return its report");
  m.def("config_hash", [](const std::filesystem::path& config) { return config_hash(load_scenario(config)); },
        py::arg("config"));
  m.def(
      "regress",
      [](const std::filesystem::path& golden, const std::filesystem::path& fresh, double tol, bool force) {
        RegressOptions o;
        o.default_tol = tol;
        o.force = force;
        const RegressReport r = regress(golden, fresh, o);
        py::dict out;
        out["passed"] = r.pass();
        out["structural_failure"] = r.structural_failure;
        out["problems"] = r.problems;
        out["mismatches"] = r.mismatches;
        return out;
      },
      py::arg("golden"), py::arg("fresh"), py::arg("tol") = 1e-9, py::arg("force") = false);
}
