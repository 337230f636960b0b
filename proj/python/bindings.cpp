#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "ppf/dispersion.hpp"
#include "ppf/error.hpp"
#include "ppf/io.hpp"
#include "ppf/pattern.hpp"
#include "ppf/pde.hpp"
#include "ppf/stokes.hpp"

namespace py = pybind11;
using namespace ppf;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

FieldState state_from(double L, const py::array_t<double>& u, double t) {
  FieldState s;
  s.u.assign(u.data(), u.data() + u.size());
  s.grid = Grid1D::from_nodes(L, static_cast<int>(s.u.size()));
  s.t = t;
  return s;
}

Side side_from(const std::string& s) {
  if (s == "right") return Side::Right;
  if (s == "left") return Side::Left;
  throw Error(ErrorCode::InvalidConfig, "side must be 'left' or 'right'");
}

py::dict prediction_dict(const FrontPrediction& p) {
  py::dict d;
  d["Phi_u"] = p.Phi_u;
  d["xi_star"] = p.xi_star;
  d["p_star"] = p.p_star;
  d["lambda_star"] = p.lambda_star;
  d["F_star"] = p.F_star;
  d["T"] = p.T;
  d["X"] = p.X;
  d["D"] = p.D;
  d["nu"] = p.nu;
  return d;
}

py::dict simulate(const std::string& config_json) {
  const SimConfig config = io::config_from_json(io::json::parse(config_json));
  RunResult r;
  {
    py::gil_scoped_release release;
    r = run(config);
  }
  py::list snaps;
  for (const auto& s : r.snapshots) {
    py::dict d;
    d["t"] = s.t;
    d["step_count"] = s.step_count;
    d["x"] = to_array(s.grid.nodes());
    d["u"] = to_array(s.u);
    snaps.append(d);
  }
  py::dict diag;
  diag["t"] = to_array(r.diagnostics.t);
  diag["mass"] = to_array(r.diagnostics.mass);
  diag["first_moment"] = to_array(r.diagnostics.first_moment);
  diag["max_abs"] = to_array(r.diagnostics.max_abs);
  diag["u_max"] = to_array(r.diagnostics.u_max);
  diag["u_min"] = to_array(r.diagnostics.u_min);
  diag["right_front"] = to_array(r.diagnostics.right_front);
  diag["left_front"] = to_array(r.diagnostics.left_front);
  py::dict out;
  out["snapshots"] = snaps;
  out["diagnostics"] = diag;
  out["final_u"] = to_array(r.final_state.u);
  out["final_t"] = r.final_state.t;
  out["divergence"] = r.divergence ? py::object(py::str(*r.divergence)) : py::object(py::none());
  out["config_hash"] = io::config_hash(config);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native core of ppfront";
  m.attr("__version__") = io::version();
  py::register_exception<Error>(m, "PpfError", PyExc_RuntimeError);

  m.def("critical_front", [](double Phi_u) { return prediction_dict(critical_front(Phi_u)); }, py::arg("Phi_u") = 1.0);
  m.def("xi_f", &xi_f, py::arg("lam"), py::arg("Phi_u") = 1.0);
  m.def(
      "modulation_periods",
      [](Complex lam, double Phi_u) {
        const auto p = modulation_periods(lam, Phi_u);
        return py::make_tuple(p.T_f, p.X_f);
      },
      py::arg("lam"), py::arg("Phi_u") = 1.0);
  m.def(
      "classify_lambda",
      [](Complex lam, double Phi_u) {
        const auto c = classify_lambda(lam, Phi_u);
        py::dict d;
        d["region"] = to_string(c.region);
        d["xi_f"] = c.xi_f;
        d["selected_speed"] = c.selected_speed;
        d["boundary"] = c.boundary;
        return d;
      },
      py::arg("lam"), py::arg("Phi_u") = 1.0);
  m.def(
      "saddle_branches",
      [](Complex xi, double Phi_u) {
        const auto s = saddle_branches(xi, Phi_u);
        return py::make_tuple(std::vector<Complex>(s.p.begin(), s.p.end()), std::vector<Complex>(s.F.begin(), s.F.end()));
      },
      py::arg("xi"), py::arg("Phi_u") = 1.0);
  m.def(
      "turning_points",
      [](Complex lam, double Phi_u) {
        std::vector<std::pair<Complex, Complex>> out;
        for (const auto& t : turning_points(lam, Phi_u)) out.emplace_back(t.p, t.xi);
        return out;
      },
      py::arg("lam"), py::arg("Phi_u") = 1.0);
  m.def("grid_instability_speed", &grid_instability_speed, py::arg("alpha"), py::arg("dx"), py::arg("Phi_u") = 1.0);

  m.def(
      "trace_contours",
      [](const std::string& kind, int i, const std::string& j, Complex lam, std::array<double, 4> window, double res,
         double Phi_u) {
        const LineKind k = kind == "stokes" ? LineKind::Stokes : LineKind::AntiStokes;
        if (kind != "stokes" && kind != "anti-stokes")
          throw Error(ErrorCode::InvalidConfig, "kind must be 'stokes' or 'anti-stokes'");
        ContourPair pair = j == "data" ? ContourPair::data(i, lam)
                           : j == "null" ? ContourPair::null(i)
                                         : ContourPair::branches(i, std::stoi(j));
        const auto set = trace_contours(k, pair, StokesWindow{window[0], window[1], window[2], window[3]}, res, Phi_u);
        std::vector<std::vector<Complex>> lines;
        for (const auto& pl : set.polylines) lines.push_back(pl.vertices);
        return lines;
      },
      py::arg("kind"), py::arg("i"), py::arg("j"), py::arg("lam") = Complex(1.5, 0.0),
      py::arg("window") = std::array<double, 4>{0.02, 3.0, -2.0, 2.0}, py::arg("resolution") = 2e-3,
      py::arg("Phi_u") = 1.0);

  m.def("_simulate", &simulate, py::arg("config_json"));

  m.def(
      "front_position",
      [](double L, const py::array_t<double>& u, double u_u, double threshold, const std::string& side) {
        return front_position(state_from(L, u, 0.0), u_u, threshold, side_from(side));
      },
      py::arg("L"), py::arg("u"), py::arg("u_u") = 0.0, py::arg("threshold") = 0.01, py::arg("side") = "right");
  m.def(
      "speed_fit",
      [](std::vector<double> t, std::vector<double> x, double t0, double t1, bool with_log, std::optional<double> L,
         double margin) {
        FrontTrace tr;
        for (std::size_t k = 0; k < t.size() && k < x.size(); ++k)
          if (std::isfinite(x[k])) {
            tr.t.push_back(t[k]);
            tr.x.push_back(x[k]);
          }
        if (L) tr = tr.away_from_boundary(*L, margin);
        const auto f = speed_fit(tr, t0, t1, with_log);
        py::dict d;
        d["xi_hat"] = f.xi_hat;
        d["nu_hat"] = f.nu_hat ? py::object(py::float_(*f.nu_hat)) : py::object(py::none());
        d["x0_hat"] = f.x0_hat;
        d["rms"] = f.rms;
        d["samples"] = f.samples;
        return d;
      },
      py::arg("t"), py::arg("x"), py::arg("t0"), py::arg("t1"), py::arg("with_log") = false,
      py::arg("L") = py::none(), py::arg("margin") = 5.0);
  m.def(
      "spatial_periods",
      [](double L, const py::array_t<double>& u, double u_u, bool interior, int skip) {
        auto pm = spatial_periods(state_from(L, u, 0.0), u_u);
        if (interior) pm = interior_periods(pm, skip);
        return py::make_tuple(to_array(pm.midpoints), to_array(pm.periods));
      },
      py::arg("L"), py::arg("u"), py::arg("u_u") = 0.0, py::arg("interior") = true, py::arg("skip") = 2);
  m.def(
      "growth_law",
      [](std::vector<double> t, std::vector<double> u_max, double t_min) {
        const auto g = growth_law(t, u_max, t_min);
        return py::make_tuple(g.slope, g.intercept);
      },
      py::arg("t"), py::arg("u_max"), py::arg("t_min"));
}
