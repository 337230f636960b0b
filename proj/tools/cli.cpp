#include "cli.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "ppf/dispersion.hpp"
#include "ppf/error.hpp"
#include "ppf/io.hpp"
#include "ppf/nonlinearity.hpp"
#include "ppf/pattern.hpp"
#include "ppf/pde.hpp"
#include "ppf/stokes.hpp"

namespace ppf::cli {

namespace {

namespace fs = std::filesystem;
using io::json;

constexpr int kExitNumerical = 1;
constexpr int kExitConfig = 2;
constexpr int kExitMissing = 3;
constexpr int kExitDivergence = 4;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
      return kExitConfig;
    case ErrorCode::MissingInput:
      return kExitMissing;
    case ErrorCode::Divergence:
      return kExitDivergence;
    default:
      return kExitNumerical;
  }
}

struct Globals {
  double phi_u = 1.0;
  std::string out = ".";
  std::optional<long> seed;  // reserved; every path is deterministic
  int threads = 1;
};

json complex_json(Complex z) { return json{{"re", z.real()}, {"im", z.imag()}}; }

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorCode::MissingInput, "cannot create " + p.string() + ": " + ec.message());
}

std::string joined_command(int argc, const char* const* argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

// ---- predict ----

int cmd_predict(const Globals& g, bool write_file, std::ostream& out) {
  const auto p = critical_front(g.phi_u);
  const json j = io::to_json(p);
  out << j.dump(2) << '\n';
  if (write_file) {
    ensure_dir(g.out);
    io::write_json(fs::path(g.out) / "prediction.json", j);
  }
  return 0;
}

// ---- simulate ----

struct SimOutcome {
  int code = 0;
  std::string message;
};

SimOutcome simulate_one(const SimConfig& config, const fs::path& dir, const std::string& command) {
  const auto start = std::chrono::steady_clock::now();
  ensure_dir(dir);
  const std::string hash = io::config_hash(config);
  const RunResult r = run(config);

  io::RunManifest m;
  m.config_hash = hash;
  m.tool_version = io::version();
  m.command = command;
  io::write_json(dir / "config.json", io::config_to_json(config));
  m.outputs.push_back("config.json");
  for (std::size_t k = 0; k < r.snapshots.size(); ++k) {
    const auto files = io::write_snapshot(dir, static_cast<int>(k), r.snapshots[k], hash);
    m.outputs.push_back(files.csv.filename().string());
    m.outputs.push_back(files.sidecar.filename().string());
  }
  io::write_diagnostics(dir / "diagnostics.csv", r.diagnostics);
  m.outputs.push_back("diagnostics.csv");
  SimOutcome outcome;
  if (r.divergence) {
    m.status = "diverged";
    m.message = *r.divergence;
    outcome = {kExitDivergence, *r.divergence};
  }
  m.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  io::write_json(dir / "manifest.json", m.to_json());
  return outcome;
}

int cmd_simulate(const Globals& g, const std::vector<std::string>& configs, const std::string& command,
                 std::ostream& out, std::ostream& err) {
  // Parse everything first so a bad file fails before any run starts.
  std::vector<SimConfig> parsed;
  for (const auto& path : configs) parsed.push_back(io::load_config(path));

  std::vector<fs::path> dirs;
  for (const auto& path : configs)
    dirs.push_back(configs.size() == 1 ? fs::path(g.out) : fs::path(g.out) / fs::path(path).stem());

  std::vector<SimOutcome> outcomes(parsed.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < parsed.size();) {
      try {
        outcomes[k] = simulate_one(parsed[k], dirs[k], command);
      } catch (const Error& e) {
        outcomes[k] = {exit_code_for(e.code()), e.what()};
      }
    }
  };
  const int nthreads = std::max(1, std::min<int>(g.threads, static_cast<int>(parsed.size())));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
  }

  int code = 0;
  for (std::size_t k = 0; k < outcomes.size(); ++k) {
    if (outcomes[k].code == 0) {
      out << dirs[k].string() << ": ok\n";
    } else {
      err << dirs[k].string() << ": " << outcomes[k].message << '\n';
      code = std::max(code, outcomes[k].code);
    }
  }
  return code;
}

// ---- analyze ----

struct AnalyzeOptions {
  std::string run_dir;
  std::vector<double> fit_window;  // empty: [0.4, 0.93] t_end
  double margin = 5.0;
  bool with_log = false;
  int skip = 2;
  double overlap_period = 0.0;  // 0: skip the overlap section
  double overlap_speed = 0.0;   // 0: use the fitted speed
  double overlap_width = 0.0;   // 0: predicted wavelength
  double growth_tmin = -1.0;    // < 0: t_end / 2
};

json fit_json(const SpeedFit& f) {
  json j{{"xi_hat", f.xi_hat}, {"x0_hat", f.x0_hat}, {"rms", f.rms}, {"samples", f.samples}};
  j["nu_hat"] = f.nu_hat ? json(*f.nu_hat) : json(nullptr);
  return j;
}

int cmd_analyze(const Globals& g, const AnalyzeOptions& o, std::ostream& out) {
  const fs::path dir(o.run_dir);
  const auto snapshots = io::read_snapshots(dir);
  const SimConfig config = io::load_config(dir / "config.json");
  const auto diagnostics = io::read_diagnostics(dir / "diagnostics.csv");
  const Nonlinearity phi = Nonlinearity::from_name(config.nonlinearity);
  const double Phi_u = -phi.deriv(config.u_u);
  const fs::path dest = g.out == "." ? dir : fs::path(g.out);
  ensure_dir(dest);

  json report{{"run_dir", dir.string()}, {"xi_hat", nullptr},        {"nu_hat", nullptr},
              {"X_j", json::array()},    {"T_overlap_rms", nullptr}, {"plateau_phi", json::array()},
              {"growth_slope", nullptr}};
  json details = json::object(), errors = json::object();
  auto section = [&](const char* name, auto&& body) {
    try {
      body();
    } catch (const Error& e) {
      errors[name] = e.what();
    }
  };

  double xi_hat = 0.0;
  section("speed", [&] {
    const double t0 = o.fit_window.empty() ? 0.4 * config.t_end : o.fit_window[0];
    const double t1 = o.fit_window.empty() ? 0.93 * config.t_end : o.fit_window[1];
    json sides = json::object();
    for (Side side : {Side::Right, Side::Left}) {
      const auto trace =
          FrontTrace::from_diagnostics(diagnostics, side, config.front_threshold).away_from_boundary(config.L, o.margin);
      const auto fit = speed_fit(trace, t0, t1, o.with_log);
      sides[to_string(side)] = fit_json(fit);
      if (side == Side::Right) {
        xi_hat = fit.xi_hat;
        report["xi_hat"] = fit.xi_hat;
        if (fit.nu_hat) report["nu_hat"] = *fit.nu_hat;
      }
    }
    sides["window"] = {t0, t1};
    details["speed"] = sides;
  });

  const FieldState& last = snapshots.back();
  section("periods", [&] {
    const auto all = spatial_periods(last, config.u_u);
    const auto in = interior_periods(all, o.skip);
    report["X_j"] = in.periods;
    details["periods"] = {{"t", last.t}, {"interior_midpoints", in.midpoints}, {"all_periods", all.periods},
                          {"all_midpoints", all.midpoints}};
    std::ofstream csv(dest / "periods.csv");
    csv << "midpoint,X_j,interior\n";
    for (std::size_t k = 0; k < all.periods.size(); ++k) {
      const bool interior = std::find(in.midpoints.begin(), in.midpoints.end(), all.midpoints[k]) != in.midpoints.end();
      csv << io::format_double(all.midpoints[k]) << ',' << io::format_double(all.periods[k]) << ',' << interior << '\n';
    }
  });

  section("plateaus", [&] {
    json xs = json::array(), phis = json::array(), us = json::array();
    for (const auto& p : plateau_values(last, config.u_u, phi)) {
      xs.push_back(p.x_mid);
      us.push_back(p.u);
      phis.push_back(p.phi);
    }
    report["plateau_phi"] = phis;
    details["plateaus"] = {{"t", last.t}, {"x_mid", xs}, {"u", us}};
  });

  if (o.overlap_period > 0.0) {
    section("overlap", [&] {
      std::vector<FieldState> chosen;
      for (const auto& s : snapshots) {
        const double k = std::round(s.t / o.overlap_period);
        if (k >= 1.0 && std::abs(s.t - k * o.overlap_period) <= 0.5 * config.dt + 1e-12) chosen.push_back(s);
      }
      const double speed = o.overlap_speed > 0.0 ? o.overlap_speed : xi_hat;
      const double width = o.overlap_width > 0.0 ? o.overlap_width : critical_front(Phi_u).X;
      const auto r = temporal_overlap(chosen, speed, width, config.u_u, config.front_threshold);
      report["T_overlap_rms"] = r.rms;
      json ts = json::array();
      for (const auto& s : chosen) ts.push_back(s.t);
      details["overlap"] = {{"period", o.overlap_period}, {"speed", speed},         {"width", width},
                            {"snapshot_times", ts},       {"amplitude", r.amplitude}, {"z_anchor", r.z_anchor}};
    });
  }

  section("growth", [&] {
    const double tmin = o.growth_tmin >= 0.0 ? o.growth_tmin : 0.5 * config.t_end;
    const auto f = growth_law(diagnostics.t, diagnostics.u_max, tmin);
    report["growth_slope"] = f.slope;
    details["growth"] = {{"t_min", tmin}, {"intercept", f.intercept}, {"samples", f.samples}};
  });

  report["details"] = details;
  report["errors"] = errors;
  io::write_json(dest / "report.json", report);
  out << report.dump(2) << '\n';
  return 0;
}

// ---- stokes ----

struct StokesOptions {
  std::string kind = "anti-stokes";
  std::string pair = "2,null";
  std::vector<double> lambda{1.5, 0.0};
  std::vector<double> window{0.02, 3.0, -2.0, 2.0};
  double resolution = 2e-3;
  bool turning_points = false;
};

ContourPair parse_pair(const std::string& text, Complex lambda) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw Error(ErrorCode::InvalidConfig, "--pair: expected i,j or i,data or i,null");
  const std::string a = text.substr(0, comma), b = text.substr(comma + 1);
  int i = 0;
  try {
    i = std::stoi(a);
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidConfig, "--pair: bad branch index '" + a + "'");
  }
  if (b == "data") return ContourPair::data(i, lambda);
  if (b == "null") return ContourPair::null(i);
  try {
    return ContourPair::branches(i, std::stoi(b));
  } catch (const std::invalid_argument&) {
    throw Error(ErrorCode::InvalidConfig, "--pair: bad second member '" + b + "'");
  }
}

LineKind parse_kind(const std::string& k) {
  if (k == "stokes") return LineKind::Stokes;
  if (k == "anti-stokes") return LineKind::AntiStokes;
  throw Error(ErrorCode::InvalidConfig, "--kind: expected stokes or anti-stokes");
}

void write_contours(const fs::path& path, const ContourSet& set) {
  std::ofstream csv(path);
  csv << "polyline,vertex,re,im,closed,seam_truncated\n";
  for (std::size_t p = 0; p < set.polylines.size(); ++p) {
    const auto& pl = set.polylines[p];
    for (std::size_t v = 0; v < pl.vertices.size(); ++v)
      csv << p << ',' << v << ',' << io::format_double(pl.vertices[v].real()) << ','
          << io::format_double(pl.vertices[v].imag()) << ',' << pl.closed << ',' << pl.seam_truncated << '\n';
  }
}

int cmd_stokes(const Globals& g, const StokesOptions& o, std::ostream& out, std::ostream& err) {
  const LineKind kind = parse_kind(o.kind);
  const ContourPair pair = parse_pair(o.pair, Complex(o.lambda[0], o.lambda[1]));
  const StokesWindow w{o.window[0], o.window[1], o.window[2], o.window[3]};
  if (!(o.resolution > 0.0)) throw Error(ErrorCode::InvalidConfig, "--resolution must be positive");
  ensure_dir(g.out);
  const fs::path csv = fs::path(g.out) / "contours.csv";

  json summary{{"kind", to_string(kind)}, {"pair", pair.label()}, {"window", o.window}, {"resolution", o.resolution}};
  std::optional<ContourSet> set;
  try {
    set = trace_contours(kind, pair, w, o.resolution, g.phi_u);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::EmptyContour) throw;
    err << "warning: " << e.what() << '\n';
    set = ContourSet{kind, pair, {}, w, o.resolution, g.phi_u};
  }
  write_contours(csv, *set);
  std::size_t vertices = 0;
  for (const auto& pl : set->polylines) vertices += pl.vertices.size();
  summary["polylines"] = set->polylines.size();
  summary["vertices"] = vertices;

  // Real-axis crossings, handy for the no-growth line.
  json crossings = json::array();
  for (const auto& pl : set->polylines)
    for (std::size_t v = 1; v < pl.vertices.size(); ++v) {
      const Complex a = pl.vertices[v - 1], b = pl.vertices[v];
      if ((a.imag() < 0.0) != (b.imag() < 0.0)) {
        const double s = a.imag() / (a.imag() - b.imag());
        crossings.push_back(a.real() + s * (b.real() - a.real()));
      }
    }
  summary["real_axis_crossings"] = crossings;

  if (o.turning_points) {
    if (pair.type != ContourPair::Type::BranchData)
      throw Error(ErrorCode::InvalidConfig, "--turning-points needs a data pair (i,data)");
    std::optional<ContourSet> other;
    const LineKind other_kind = kind == LineKind::Stokes ? LineKind::AntiStokes : LineKind::Stokes;
    try {
      other = trace_contours(other_kind, pair, w, o.resolution, g.phi_u);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyContour) throw;
    }
    json tps = json::array();
    std::ofstream tcsv(fs::path(g.out) / "turning_points.csv");
    tcsv << "re,im,p_re,p_im,residual,tangency\n";
    if (other && !set->polylines.empty()) {
      const auto& st = kind == LineKind::Stokes ? *set : *other;
      const auto& an = kind == LineKind::Stokes ? *other : *set;
      for (const auto& tp : find_turning_points(st, an)) {
        tps.push_back({{"xi", complex_json(tp.xi)}, {"residual", tp.residual}, {"tangency", tp.tangency}});
        tcsv << io::format_double(tp.xi.real()) << ',' << io::format_double(tp.xi.imag()) << ','
             << io::format_double(tp.p.real()) << ',' << io::format_double(tp.p.imag()) << ','
             << io::format_double(tp.residual) << ',' << tp.tangency << '\n';
      }
    }
    summary["turning_points"] = tps;
  }
  io::write_json(fs::path(g.out) / "contours.json", summary);
  out << summary.dump(2) << '\n';
  return 0;
}

// ---- lambda-map ----

int cmd_lambda_map(const Globals& g, const LambdaWindow& w, std::ostream& out) {
  const LambdaMap map(g.phi_u, w);
  ensure_dir(g.out);
  std::ofstream csv(fs::path(g.out) / "lambda_map.csv");
  csv << "re,im,xi_f,region,boundary\n";
  std::array<std::size_t, 4> counts{};
  for (int r = 0; r < map.rows(); ++r)
    for (int c = 0; c < map.cols(); ++c) {
      const Complex z = map.node(c, r);
      const LambdaRegion region = map.region_at(c, r);
      ++counts[static_cast<std::size_t>(region)];
      csv << io::format_double(z.real()) << ',' << io::format_double(z.imag()) << ','
          << io::format_double(map.xi_f_at(c, r)) << ',' << to_string(region) << ',' << map.boundary_at(c, r) << '\n';
    }
  auto opt = [](std::optional<double> v) { return v ? json(*v) : json(nullptr); };
  json summary{{"Phi_u", g.phi_u},
               {"xi_star", map.xi_star()},
               {"window", {{"re_max", w.re_max}, {"im_max", w.im_max}, {"resolution", w.resolution}}},
               {"components", map.component_count()},
               {"cells",
                {{"OmegaR", counts[0]}, {"OmegaL1", counts[1]}, {"OmegaL2", counts[2]}, {"Outside", counts[3]}}},
               {"max_re_OmegaL1", opt(map.max_re_in_region(LambdaRegion::OmegaL1, w.im_max))},
               {"max_re_OmegaL2", opt(map.max_re_in_region(LambdaRegion::OmegaL2, -w.im_max))},
               {"asymptote", 1.0 / map.xi_star()}};
  io::write_json(fs::path(g.out) / "lambda_summary.json", summary);
  out << summary.dump(2) << '\n';
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pattern-forming fronts: predictions, simulations and analyses", "ppf"};
  app.set_version_flag("--version", std::string(io::version()));
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--phi-u", g.phi_u, "Linear growth rate Phi_u")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--seed", g.seed, "Reserved; all paths are deterministic");
  app.add_option("--threads", g.threads, "Worker threads for multi-run commands")->check(CLI::PositiveNumber);

  auto* predict = app.add_subcommand("predict", "Critical front constants as JSON");
  bool predict_write = false;
  predict->add_flag("--write", predict_write, "Also write prediction.json to --out");

  auto* simulate = app.add_subcommand("simulate", "Run the PDE from JSON config files");
  std::vector<std::string> configs;
  simulate->add_option("--config", configs, "Config file (repeatable; one subdirectory per config when several)")
      ->required();

  auto* analyze = app.add_subcommand("analyze", "Measure speeds, periods, plateaus and growth in a run directory");
  AnalyzeOptions ao;
  analyze->add_option("--run", ao.run_dir, "Run directory written by simulate")->required();
  analyze->add_option("--fit-window", ao.fit_window, "t0,t1 for the speed fit")->delimiter(',')->expected(2);
  analyze->add_option("--margin", ao.margin, "Drop front samples this close to the ends");
  analyze->add_flag("--with-log", ao.with_log, "Fit x = xi t - nu ln t + x0");
  analyze->add_option("--skip", ao.skip, "Periods dropped per side near the origin and the ends");
  analyze->add_option("--overlap-period", ao.overlap_period, "Snapshot cadence for the overlap test");
  analyze->add_option("--overlap-speed", ao.overlap_speed, "Frame speed (default: fitted)");
  analyze->add_option("--overlap-width", ao.overlap_width, "Window behind the front (default: predicted X)");
  analyze->add_option("--growth-tmin", ao.growth_tmin, "Tail start for the growth law (default: t_end/2)");

  auto* stokes = app.add_subcommand("stokes", "Trace Stokes or anti-Stokes lines to CSV");
  StokesOptions so;
  stokes->add_option("--kind", so.kind, "stokes | anti-stokes");
  stokes->add_option("--pair", so.pair, "i,j | i,data | i,null (branches 1..4)");
  stokes->add_option("--lambda", so.lambda, "re,im of the data decay rate")->delimiter(',')->expected(2);
  stokes->add_option("--window", so.window, "re_min,re_max,im_min,im_max")->delimiter(',')->expected(4);
  stokes->add_option("--resolution", so.resolution, "Grid spacing");
  stokes->add_flag("--turning-points", so.turning_points, "Also locate turning points (data pairs)");

  auto* lmap = app.add_subcommand("lambda-map", "Raster of xi_f over the lambda plane");
  LambdaWindow lw;
  lmap->add_option("--re-max", lw.re_max);
  lmap->add_option("--im-max", lw.im_max);
  lmap->add_option("--resolution", lw.resolution);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << io::version() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (*predict) return cmd_predict(g, predict_write, out);
    if (*simulate) return cmd_simulate(g, configs, joined_command(argc, argv), out, err);
    if (*analyze) return cmd_analyze(g, ao, out);
    if (*stokes) return cmd_stokes(g, so, out, err);
    if (*lmap) return cmd_lambda_map(g, lw, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const io::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}

}  // namespace ppf::cli
