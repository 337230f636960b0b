#include "ppf/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ppf/error.hpp"
#include "ppf/pattern.hpp"

namespace ppf {

Grid1D Grid1D::from_spacing(double L, double dx) {
  if (!(L > 0.0) || !(dx > 0.0)) throw Error(ErrorCode::InvalidConfig, "L and dx must be positive");
  const long n = std::lround(2.0 * L / dx) + 1;
  if (n < 3) throw Error(ErrorCode::InvalidConfig, "grid needs at least 3 nodes");
  return from_nodes(L, static_cast<int>(n));
}

Grid1D Grid1D::from_nodes(double L, int n) {
  if (!(L > 0.0) || n < 3) throw Error(ErrorCode::InvalidConfig, "grid needs L > 0 and n >= 3");
  return {L, n, 2.0 * L / (n - 1)};
}

std::vector<double> Grid1D::nodes() const {
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = x(i);
  return xs;
}

InitialCondition InitialCondition::gaussian(double eps) {
  InitialCondition ic;
  ic.kind = Kind::Gaussian;
  ic.eps = eps;
  return ic;
}

InitialCondition InitialCondition::exp_decay(double eps, double lambda) {
  InitialCondition ic;
  ic.kind = Kind::ExpDecay;
  ic.eps = eps;
  ic.lambda = lambda;
  return ic;
}

InitialCondition InitialCondition::oscillatory(double eps, double alpha, double beta, double x0) {
  InitialCondition ic;
  ic.kind = Kind::Oscillatory;
  ic.eps = eps;
  ic.alpha = alpha;
  ic.beta = beta;
  ic.x0 = x0;
  return ic;
}

double InitialCondition::perturbation(double x) const {
  switch (kind) {
    case Kind::Gaussian:
      return eps * std::exp(-x * x);
    case Kind::ExpDecay:
      return eps * std::exp(-lambda * std::abs(x));
    case Kind::Oscillatory:
      return eps * std::exp(-alpha * std::abs(x)) * std::cos(beta * (x + x0));
  }
  return 0.0;
}

const char* to_string(InitialCondition::Kind kind) {
  switch (kind) {
    case InitialCondition::Kind::Gaussian:
      return "gaussian";
    case InitialCondition::Kind::ExpDecay:
      return "exp_decay";
    case InitialCondition::Kind::Oscillatory:
      return "oscillatory";
  }
  return "?";
}

void SimConfig::validate() const {
  auto bad = [](const char* key, const char* why) {
    throw Error(ErrorCode::InvalidConfig, std::string(key) + ": " + why);
  };
  if (!(L > 0.0)) bad("L", "must be positive");
  if (!(dx > 0.0)) bad("dx", "must be positive");
  if (!(dt > 0.0)) bad("dt", "must be positive");
  if (!(t_end >= 0.0)) bad("t_end", "must be non-negative");
  if (!(ic.eps > 0.0)) bad("ic.eps", "must be positive");
  if (ic.kind == InitialCondition::Kind::ExpDecay && !(ic.lambda > 0.0)) bad("ic.lambda", "must be positive");
  if (ic.kind == InitialCondition::Kind::Oscillatory && !(ic.alpha > 0.0)) bad("ic.alpha", "must be positive");
  if (!(front_threshold > 0.0)) bad("front_threshold", "must be positive");
  if (!(divergence_threshold > 0.0)) bad("divergence_threshold", "must be positive");
  if (diagnostics_every < 1) bad("diagnostics_every", "must be at least 1");
  if (!std::is_sorted(snapshot_times.begin(), snapshot_times.end())) bad("snapshot_times", "must be sorted");
  for (double t : snapshot_times)
    if (t < 0.0 || t > t_end + 1e-12) bad("snapshot_times", "must lie in [0, t_end]");
  if (std::lround(2.0 * L / dx) + 1 < 3) bad("dx", "too coarse for L");
  Nonlinearity::from_name(nonlinearity);
}

FieldState build_initial(const SimConfig& config) {
  config.validate();
  FieldState s;
  s.grid = Grid1D::from_spacing(config.L, config.dx);
  s.u.resize(s.grid.n);
  for (int i = 0; i < s.grid.n; ++i) s.u[i] = config.u_u + config.ic.perturbation(s.grid.x(i));
  return s;
}

HelmholtzSolver::HelmholtzSolver(const Grid1D& grid) : grid_(grid) {
  const int n = grid.n;
  if (n < 3 || !(grid.dx > 0.0)) throw Error(ErrorCode::SingularSystem, "grid too small");
  const double h2 = 1.0 / (grid.dx * grid.dx);
  sub_.assign(n, -h2);
  super_.assign(n, -h2);
  super_[0] = -2.0 * h2;     // ghost g_{-1} = g_1
  sub_[n - 1] = -2.0 * h2;   // ghost g_n = g_{n-2}
  const double diag = 1.0 + 2.0 * h2;
  cprime_.resize(n);
  denom_.resize(n);
  denom_[0] = diag;
  cprime_[0] = super_[0] / diag;
  for (int i = 1; i < n; ++i) {
    denom_[i] = diag - sub_[i] * cprime_[i - 1];
    if (!(std::abs(denom_[i]) > 0.0)) throw Error(ErrorCode::SingularSystem, "zero pivot in Thomas elimination");
    cprime_[i] = super_[i] / denom_[i];
  }
}

void HelmholtzSolver::solve(std::span<const double> rhs, std::span<double> g) const {
  const int n = grid_.n;
  if (static_cast<int>(rhs.size()) != n || static_cast<int>(g.size()) != n)
    throw Error(ErrorCode::InvalidConfig, "array length does not match grid");
  g[0] = rhs[0] / denom_[0];
  for (int i = 1; i < n; ++i) g[i] = (rhs[i] - sub_[i] * g[i - 1]) / denom_[i];
  for (int i = n - 2; i >= 0; --i) g[i] -= cprime_[i] * g[i + 1];
}

std::vector<double> HelmholtzSolver::solve(std::span<const double> rhs) const {
  std::vector<double> g(rhs.size());
  solve(rhs, g);
  return g;
}

std::vector<double> elliptic_solve(std::span<const double> u, const Nonlinearity& phi, const Grid1D& grid) {
  std::vector<double> f(u.size());
  std::transform(u.begin(), u.end(), f.begin(), [&](double v) { return phi(v); });
  return HelmholtzSolver(grid).solve(f);
}

namespace {

// Scratch buffers reused across steps of one run.
struct StepBuffers {
  std::vector<double> f, g;
};

void step_with(FieldState& state, double dt, const Nonlinearity& phi, const HelmholtzSolver& solver,
               double divergence_threshold, StepBuffers& buf) {
  const std::size_t n = state.u.size();
  buf.f.resize(n);
  buf.g.resize(n);
  for (std::size_t i = 0; i < n; ++i) buf.f[i] = phi(state.u[i]);
  solver.solve(buf.f, buf.g);
  double max_abs = 0.0;
  bool finite = true;
  for (std::size_t i = 0; i < n; ++i) {
    state.u[i] += dt * (buf.g[i] - buf.f[i]);
    finite = finite && std::isfinite(state.u[i]);
    max_abs = std::max(max_abs, std::abs(state.u[i]));
  }
  state.t += dt;
  ++state.step_count;
  if (!finite || max_abs > divergence_threshold)
    throw Error(ErrorCode::Divergence, "max|u| = " + std::to_string(max_abs) + " at step " +
                                           std::to_string(state.step_count) + " (t = " + std::to_string(state.t) + ")");
}

}  // namespace

void step(FieldState& state, double dt, const Nonlinearity& phi, const HelmholtzSolver& solver,
          double divergence_threshold) {
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidConfig, "dt must be positive");
  StepBuffers buf;
  step_with(state, dt, phi, solver, divergence_threshold, buf);
}

double mass(const FieldState& state) {
  const auto& u = state.u;
  double s = 0.5 * (u.front() + u.back());
  for (std::size_t i = 1; i + 1 < u.size(); ++i) s += u[i];
  return s * state.grid.dx;
}

double first_moment(const FieldState& state) {
  const auto& u = state.u;
  const int n = state.grid.n;
  double s = 0.5 * (state.grid.x(0) * u.front() + state.grid.x(n - 1) * u.back());
  for (int i = 1; i + 1 < n; ++i) s += state.grid.x(i) * u[i];
  return s * state.grid.dx;
}

namespace {

void record(DiagnosticsTrace& d, const FieldState& s, double u_u, double threshold) {
  d.t.push_back(s.t);
  d.mass.push_back(mass(s));
  d.first_moment.push_back(first_moment(s));
  const auto [lo, hi] = std::minmax_element(s.u.begin(), s.u.end());
  d.u_max.push_back(*hi);
  d.u_min.push_back(*lo);
  d.max_abs.push_back(std::max(std::abs(*lo), std::abs(*hi)));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  d.right_front.push_back(try_front_position(s.grid, s.u, u_u, threshold, Side::Right).value_or(nan));
  d.left_front.push_back(try_front_position(s.grid, s.u, u_u, threshold, Side::Left).value_or(nan));
}

}  // namespace

RunResult run(const SimConfig& config) {
  RunResult result;
  FieldState state = build_initial(config);
  const Nonlinearity phi = Nonlinearity::from_name(config.nonlinearity);
  const HelmholtzSolver solver(state.grid);
  const long total_steps = std::lround(config.t_end / config.dt);

  std::vector<long> snapshot_steps;
  for (double t : config.snapshot_times) snapshot_steps.push_back(std::min(std::lround(t / config.dt), total_steps));
  std::size_t next_snapshot = 0;
  auto take_snapshots = [&]() {
    while (next_snapshot < snapshot_steps.size() && snapshot_steps[next_snapshot] == state.step_count) {
      result.snapshots.push_back(state);
      ++next_snapshot;
    }
  };

  record(result.diagnostics, state, config.u_u, config.front_threshold);
  take_snapshots();
  StepBuffers buf;
  try {
    while (state.step_count < total_steps) {
      step_with(state, config.dt, phi, solver, config.divergence_threshold, buf);
      // t accumulated by repeated addition drifts; pin it to the step index.
      state.t = state.step_count * config.dt;
      if (state.step_count % config.diagnostics_every == 0 || state.step_count == total_steps)
        record(result.diagnostics, state, config.u_u, config.front_threshold);
      take_snapshots();
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Divergence) throw;
    result.divergence = e.what();
  }
  result.final_state = std::move(state);
  return result;
}

}  // namespace ppf
