// Python bindings: airfoils are (N, 2) float arrays, PARSEC values are dicts.
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "afbench/aero.hpp"
#include "afbench/annotation.hpp"
#include "afbench/cst.hpp"
#include "afbench/dat_io.hpp"
#include "afbench/data_engine.hpp"
#include "afbench/editor.hpp"
#include "afbench/error.hpp"
#include "afbench/generators.hpp"
#include "afbench/metrics.hpp"
#include "afbench/service.hpp"
#include "afbench/version.hpp"

namespace py = pybind11;
using namespace afbench;
using Points = Eigen::Matrix<double, Eigen::Dynamic, 2, Eigen::RowMajor>;

namespace {

Points to_array(std::span<const Point2> pts) {
  Points m(static_cast<Eigen::Index>(pts.size()), 2);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    m(static_cast<Eigen::Index>(i), 0) = pts[i].x;
    m(static_cast<Eigen::Index>(i), 1) = pts[i].y;
  }
  return m;
}

std::vector<Point2> from_array(const Points& m) {
  std::vector<Point2> pts(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) pts[static_cast<std::size_t>(i)] = {m(i, 0), m(i, 1)};
  return pts;
}

Airfoil airfoil_of(const Points& m, const std::string& name = "") {
  Airfoil a;
  a.points = from_array(m);
  a.name = name;
  return a;
}

py::dict parsec_dict(const ParsecParams& p) {
  py::dict d;
  const auto v = p.to_array();
  for (std::size_t i = 0; i < kParsecCount; ++i) d[py::str(std::string(parsec_names()[i]))] = v[i];
  return d;
}

ParsecTargets targets_of(const py::dict& d) {
  ParsecTargets t;
  for (const auto& [k, v] : d) {
    if (!v.is_none()) t[parsec_index(k.cast<std::string>())] = v.cast<double>();
  }
  return t;
}

ParsecParams parsec_of(const py::dict& d) {
  std::array<double, kParsecCount> v{};
  const auto t = targets_of(d);
  for (std::size_t i = 0; i < kParsecCount; ++i) {
    if (!t[i]) throw Error(ErrorCode::invalid_argument, "missing PARSEC value " + std::string(parsec_names()[i]));
    v[i] = *t[i];
  }
  return ParsecParams::from_array(v);
}

py::dict cst_dict(const CstParams& p) {
  py::dict d;
  d["upper"] = p.upper_coeffs;
  d["lower"] = p.lower_coeffs;
  d["zeta_te_upper"] = p.zeta_te_upper;
  d["zeta_te_lower"] = p.zeta_te_lower;
  d["n1"] = p.n1;
  d["n2"] = p.n2;
  return d;
}

CstParams cst_of(const py::dict& d) {
  CstParams p;
  p.upper_coeffs = d["upper"].cast<std::vector<double>>();
  p.lower_coeffs = d["lower"].cast<std::vector<double>>();
  if (d.contains("zeta_te_upper")) p.zeta_te_upper = d["zeta_te_upper"].cast<double>();
  if (d.contains("zeta_te_lower")) p.zeta_te_lower = d["zeta_te_lower"].cast<double>();
  if (d.contains("n1")) p.n1 = d["n1"].cast<double>();
  if (d.contains("n2")) p.n2 = d["n2"].cast<double>();
  return p;
}

py::dict sigma_dict(const SigmaReport& s) {
  py::dict d;
  for (std::size_t i = 0; i < kParsecCount; ++i) {
    d[py::str(std::string(parsec_names()[i]))] = std::isnan(s.sigma[i]) ? py::object(py::none()) : py::float_(s.sigma[i]);
  }
  py::dict out;
  out["sigma"] = d;
  out["sigma_bar"] = s.sigma_bar;
  return out;
}

std::vector<Airfoil> population(const std::vector<Points>& pop) {
  std::vector<Airfoil> out;
  out.reserve(pop.size());
  for (const auto& p : pop) out.push_back(airfoil_of(p));
  return out;
}

}  // namespace

PYBIND11_MODULE(_afbench, m) {
  m.doc() = "Airfoil generation, annotation, metrics and editing";
  m.attr("__version__") = std::string(kVersion);
  m.attr("CANONICAL_POINT_COUNT") = kCanonicalPointCount;
  m.attr("PARSEC_NAMES") = std::vector<std::string>(parsec_names().begin(), parsec_names().end());

  static py::exception<Error> error(m, "AfbenchError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), (std::string(to_string(e.code())) + ": " + e.what()).c_str());
    }
  });

  m.def("naca4", [](const std::string& d, std::size_t n) { return to_array(naca4(d, n).points); }, py::arg("designation"),
        py::arg("n") = kCanonicalPointCount);
  m.def("naca5", [](const std::string& d, std::size_t n) { return to_array(naca5(d, n).points); }, py::arg("designation"),
        py::arg("n") = kCanonicalPointCount);
  m.def("validate", [](const Points& p, std::size_t n) { return validate(airfoil_of(p), n); }, py::arg("points"),
        py::arg("expected_count") = kCanonicalPointCount);
  m.def("resample", [](const Points& p, std::size_t n) { return to_array(resample_airfoil(from_array(p), n).points); },
        py::arg("points"), py::arg("n") = kCanonicalPointCount);
  m.def("keypoints", [](const Points& p, std::size_t n) { return to_array(extract_keypoints(airfoil_of(p), n)); },
        py::arg("points"), py::arg("count") = kDefaultKeypointCount);

  m.def("cst_fit", [](const Points& p, std::size_t degree) {
    const auto f = cst_fit(airfoil_of(p), degree);
    py::dict d = cst_dict(f.params);
    d["max_residual"] = f.max_residual;
    d["rms_residual"] = f.rms_residual;
    return d;
  }, py::arg("points"), py::arg("degree") = kDefaultCstDegree);
  m.def("cst_airfoil", [](const py::dict& params, std::size_t n) { return to_array(cst_airfoil(cst_of(params), n).points); },
        py::arg("params"), py::arg("n") = kCanonicalPointCount);
  m.def("cst_perturb", [](const py::dict& base, std::size_t n, double band, std::uint64_t seed) {
    std::vector<Points> out;
    for (const auto& a : cst_perturb_generate(cst_of(base), n, band, seed)) out.push_back(to_array(a.points));
    return out;
  }, py::arg("base"), py::arg("n"), py::arg("band") = kDefaultPerturbBand, py::arg("seed") = 0);

  m.def("bezier_layer", [](const Points& ctrl, std::vector<double> weights, std::vector<double> params) {
    return to_array(bezier_layer({from_array(ctrl), std::move(weights), std::move(params)}));
  }, py::arg("control_points"), py::arg("weights"), py::arg("params"));
  m.def("lhs_sample", [](std::vector<std::pair<double, double>> ranges, std::size_t n, std::uint64_t seed) {
    return lhs_sample({std::move(ranges), n, seed});
  }, py::arg("ranges"), py::arg("n"), py::arg("seed") = 0);

  m.def("annotate", [](const Points& p) { return parsec_dict(annotate_parsec(airfoil_of(p))); }, py::arg("points"));
  m.def("label_error", [](const py::dict& predicted, const py::dict& target) {
    return sigma_dict(label_error(parsec_of(predicted), parsec_of(target)));
  }, py::arg("predicted"), py::arg("target"));

  m.def("smoothness", [](const Points& p) { return smoothness(from_array(p)); }, py::arg("points"));
  m.def("diversity", [](const std::vector<Points>& pop, std::size_t subset_size, std::size_t n_draws, std::uint64_t seed,
                        std::optional<double> bandwidth) {
    DiversityConfig cfg;
    cfg.subset_size = subset_size;
    cfg.n_draws = n_draws;
    cfg.seed = seed;
    if (bandwidth) {
      cfg.bandwidth_mode = BandwidthMode::fixed;
      cfg.bandwidth = *bandwidth;
    }
    return diversity(population(pop), cfg);
  }, py::arg("population"), py::arg("subset_size") = 16, py::arg("n_draws") = 100, py::arg("seed") = 0,
        py::arg("bandwidth") = py::none());
  m.def("success_rate", [](const std::vector<std::vector<bool>>& conv, double threshold) {
    return success_rate(conv, threshold);
  }, py::arg("convergence"), py::arg("threshold") = kSuccessThreshold);
  m.def("condition_grid", [] {
    std::vector<std::tuple<double, double, double>> out;
    for (const auto& c : condition_grid()) out.emplace_back(c.re, c.ma, c.cl);
    return out;
  });
  m.def("airfoil_hash", [](const Points& p) { return airfoil_hash(airfoil_of(p)); }, py::arg("points"));

  m.def("edit", [](const Points& source, std::optional<Points> target_keypoints, std::optional<py::dict> target_parsec,
                   std::optional<std::tuple<double, double, double>> weights, int max_iter,
                   std::optional<std::function<void(int, double)>> progress) {
    EditRequest req;
    req.source = airfoil_of(source);
    if (target_keypoints) req.target_keypoints = from_array(*target_keypoints);
    if (target_parsec) req.target_parsec = targets_of(*target_parsec);
    if (!req.target_keypoints && req.target_parsec) req = make_ep_request(req.source, *req.target_parsec);
    else if (req.target_keypoints && !req.target_parsec) req = make_ek_request(req.source, *req.target_keypoints);
    if (weights) req.weights = {std::get<0>(*weights), std::get<1>(*weights), std::get<2>(*weights)};
    req.limits.max_iter = max_iter;
    EditCallback cb;
    if (progress) cb = [&](const EditProgress& e) { (*progress)(e.iteration, e.objective); };
    EditResult r;
    {
      py::gil_scoped_release release;
      r = edit(req, progress ? [&](const EditProgress& e) {
        py::gil_scoped_acquire acquire;
        cb(e);
      } : EditCallback{});
    }
    py::dict d = sigma_dict(r.sigma);
    d["points"] = to_array(r.airfoil.points);
    d["achieved"] = parsec_dict(r.achieved);
    d["trace"] = r.trace;
    d["status"] = std::string(to_string(r.status));
    d["iterations"] = r.iterations;
    d["cst"] = cst_dict(r.params);
    return d;
  }, py::arg("source"), py::arg("target_keypoints") = py::none(), py::arg("target_parsec") = py::none(),
        py::arg("weights") = py::none(), py::arg("max_iter") = EditLimits{}.max_iter, py::arg("progress") = py::none());

  m.def("read_dat", [](const std::filesystem::path& p, std::size_t n) { return to_array(read_dat(p, n).points); },
        py::arg("path"), py::arg("n") = kCanonicalPointCount);
  m.def("write_dat", [](const Points& p, const std::filesystem::path& path, const std::string& name) {
    write_dat(airfoil_of(p, name), path);
  }, py::arg("points"), py::arg("path"), py::arg("name") = "");

  m.def("build_dataset", [](const std::filesystem::path& config, const std::filesystem::path& out, unsigned workers) {
    BuildOverrides o;
    o.workers = workers;
    py::gil_scoped_release release;
    return build_dataset(config, out, o).samples.size();
  }, py::arg("config"), py::arg("out"), py::arg("workers") = 0);
  m.def("validate_dataset", &validate_dataset, py::arg("dataset_dir"));

  py::class_<Service>(m, "Service")
      .def(py::init([](std::optional<std::filesystem::path> dataset) {
             ServiceOptions o;
             o.dataset = dataset;
             return std::make_unique<Service>(std::move(o));
           }),
           py::arg("dataset") = py::none())
      .def("handle", [](const Service& s, const std::string& method, const std::string& target, const std::string& body) {
        HttpResponse r;
        {
          py::gil_scoped_release release;
          r = s.handle(method, target, body);
        }
        return py::make_tuple(r.status, r.content_type, r.body);
      }, py::arg("method"), py::arg("target"), py::arg("body") = "");
}
