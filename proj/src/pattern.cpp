#include "ppf/pattern.hpp"

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ppf/error.hpp"

namespace ppf {

const char* to_string(Side side) { return side == Side::Left ? "left" : "right"; }

std::optional<double> try_front_position(const Grid1D& grid, std::span<const double> u, double u_u, double threshold,
                                         Side side) {
  if (!(threshold > 0.0)) throw Error(ErrorCode::InvalidConfig, "threshold must be positive");
  const int n = static_cast<int>(u.size());
  auto dev = [&](int i) { return std::abs(u[i] - u_u); };
  if (side == Side::Right) {
    for (int i = n - 1; i >= 0; --i) {
      if (dev(i) < threshold) continue;
      if (i == n - 1) return grid.x(i);
      const double a = dev(i), b = dev(i + 1);
      return grid.x(i) + grid.dx * (a - threshold) / (a - b);
    }
  } else {
    for (int i = 0; i < n; ++i) {
      if (dev(i) < threshold) continue;
      if (i == 0) return grid.x(0);
      const double a = dev(i), b = dev(i - 1);
      return grid.x(i) - grid.dx * (a - threshold) / (a - b);
    }
  }
  return std::nullopt;
}

double front_position(const FieldState& state, double u_u, double threshold, Side side) {
  if (auto x = try_front_position(state.grid, state.u, u_u, threshold, side)) return *x;
  throw Error(ErrorCode::NoFront, "no node deviates from u_u by the threshold");
}

FrontTrace FrontTrace::from_diagnostics(const DiagnosticsTrace& d, Side side, double threshold) {
  FrontTrace tr;
  tr.threshold = threshold;
  tr.side = side;
  const auto& xs = side == Side::Right ? d.right_front : d.left_front;
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (std::isnan(xs[k])) continue;
    if (!tr.t.empty() && d.t[k] <= tr.t.back()) continue;
    tr.t.push_back(d.t[k]);
    tr.x.push_back(xs[k]);
  }
  return tr;
}

FrontTrace FrontTrace::away_from_boundary(double L, double margin) const {
  FrontTrace out;
  out.threshold = threshold;
  out.side = side;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (std::abs(x[k]) > L - margin) continue;
    out.t.push_back(t[k]);
    out.x.push_back(x[k]);
  }
  return out;
}

SpeedFit speed_fit(const FrontTrace& trace, double t0, double t1, bool with_log) {
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < trace.t.size(); ++k)
    if (trace.t[k] >= t0 && trace.t[k] <= t1) idx.push_back(k);
  if (idx.size() < 10) throw Error(ErrorCode::InsufficientSamples, "need at least 10 front samples in the window");
  if (with_log && t0 <= 0.0) throw Error(ErrorCode::InvalidConfig, "log-corrected fit needs t > 0");
  const int cols = with_log ? 3 : 2;
  Eigen::MatrixXd A(idx.size(), cols);
  Eigen::VectorXd b(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const double t = trace.t[idx[r]];
    A(r, 0) = t;
    A(r, 1) = 1.0;
    if (with_log) A(r, 2) = -std::log(t);
    b(r) = trace.x[idx[r]];
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  SpeedFit fit;
  fit.xi_hat = c(0);
  fit.x0_hat = c(1);
  if (with_log) fit.nu_hat = c(2);
  fit.rms = std::sqrt((A * c - b).squaredNorm() / static_cast<double>(idx.size()));
  fit.samples = idx.size();
  return fit;
}

namespace {

std::vector<double> crossing_nodes(const FieldState& state, double u_u, Crossing dir) {
  const auto& u = state.u;
  std::vector<double> out;
  for (std::size_t i = 1; i < u.size(); ++i) {
    const bool prev = u[i - 1] - u_u > 0.0, cur = u[i] - u_u > 0.0;
    if (dir == Crossing::Up && cur && !prev) out.push_back(state.grid.x(static_cast<int>(i)));
    if (dir == Crossing::Down && prev && !cur) out.push_back(state.grid.x(static_cast<int>(i - 1)));
  }
  return out;
}

PeriodMeasurement from_crossings(std::vector<double> xs) {
  PeriodMeasurement m;
  m.crossings = std::move(xs);
  for (std::size_t j = 1; j < m.crossings.size(); ++j) {
    m.periods.push_back(m.crossings[j] - m.crossings[j - 1]);
    m.midpoints.push_back(0.5 * (m.crossings[j] + m.crossings[j - 1]));
  }
  return m;
}

double interpolate(const FieldState& s, double x) {
  const double pos = (x + s.grid.L) / s.grid.dx;
  const int i = std::clamp(static_cast<int>(std::floor(pos)), 0, s.grid.n - 2);
  const double f = pos - i;
  return (1.0 - f) * s.u[i] + f * s.u[i + 1];
}

}  // namespace

PeriodMeasurement spatial_periods(const FieldState& state, double u_u, Crossing dir) {
  auto xs = crossing_nodes(state, u_u, dir);
  if (xs.size() < 2) throw Error(ErrorCode::TooFewCrossings, "fewer than two crossings of u_u");
  return from_crossings(std::move(xs));
}

PeriodMeasurement interior_periods(const PeriodMeasurement& m, int skip) {
  std::vector<std::size_t> right, left;
  for (std::size_t j = 0; j < m.periods.size(); ++j) (m.midpoints[j] >= 0.0 ? right : left).push_back(j);
  // right is ordered outward already; left is ordered inward.
  std::reverse(left.begin(), left.end());
  std::vector<std::size_t> keep;
  for (const auto* side : {&left, &right}) {
    const auto& v = *side;
    for (std::size_t k = 0; k < v.size(); ++k)
      if (static_cast<int>(k) >= skip && static_cast<int>(k) + skip < static_cast<int>(v.size())) keep.push_back(v[k]);
  }
  std::sort(keep.begin(), keep.end());
  PeriodMeasurement out;
  for (std::size_t j : keep) {
    out.periods.push_back(m.periods[j]);
    out.midpoints.push_back(m.midpoints[j]);
    out.crossings.push_back(m.crossings[j]);
    out.crossings.push_back(m.crossings[j + 1]);
  }
  out.crossings.erase(std::unique(out.crossings.begin(), out.crossings.end()), out.crossings.end());
  return out;
}

OverlapResult temporal_overlap(std::span<const FieldState> snapshots, double xi_hat, double width, double u_u,
                               double threshold, Side side) {
  if (snapshots.size() < 2) throw Error(ErrorCode::InsufficientSamples, "need at least two snapshots");
  if (!(width > 0.0)) throw Error(ErrorCode::InvalidConfig, "window width must be positive");
  const double dx = snapshots.front().grid.dx;
  const int m = static_cast<int>(std::floor(width / dx)) + 1;
  const double dir = side == Side::Right ? -1.0 : 1.0;  // "behind" the front
  const double v = side == Side::Right ? xi_hat : -xi_hat;

  OverlapResult res;
  for (const auto& s : snapshots) res.z_front.push_back(front_position(s, u_u, threshold, side) - v * s.t);
  for (double z : res.z_front) res.z_anchor += z;
  res.z_anchor /= static_cast<double>(res.z_front.size());

  std::vector<std::vector<double>> samples;
  for (const auto& s : snapshots) {
    const double x_near = res.z_anchor + v * s.t, x_far = x_near + dir * width;
    for (double x : {x_near, x_far})
      if (x < -s.grid.L || x > s.grid.L)
        throw Error(ErrorCode::WindowOutOfDomain, "overlap window leaves the domain at t = " + std::to_string(s.t));
    std::vector<double> w(m);
    for (int k = 0; k < m; ++k) {
      w[k] = interpolate(s, x_near + dir * k * dx) - u_u;
      res.amplitude = std::max(res.amplitude, std::abs(w[k]));
    }
    samples.push_back(std::move(w));
  }
  if (res.amplitude == 0.0) return res;
  double worst = 0.0;
  for (std::size_t a = 0; a < samples.size(); ++a)
    for (std::size_t b = a + 1; b < samples.size(); ++b) {
      double ss = 0.0;
      for (int k = 0; k < m; ++k) ss += std::pow(samples[a][k] - samples[b][k], 2);
      worst = std::max(worst, std::sqrt(ss / m));
    }
  res.rms = worst / res.amplitude;
  return res;
}

std::vector<PlateauSample> plateau_values(const FieldState& state, double u_u, const Nonlinearity& phi) {
  auto xs = crossing_nodes(state, u_u, Crossing::Up);
  auto down = crossing_nodes(state, u_u, Crossing::Down);
  xs.insert(xs.end(), down.begin(), down.end());
  std::sort(xs.begin(), xs.end());
  if (xs.size() < 2) throw Error(ErrorCode::TooFewCrossings, "fewer than two crossings of u_u");
  std::vector<PlateauSample> out;
  for (std::size_t j = 1; j < xs.size(); ++j) {
    const double mid = 0.5 * (xs[j] + xs[j - 1]);
    const double u = interpolate(state, mid);
    out.push_back({mid, u, phi(u)});
  }
  return out;
}

GrowthFit growth_law(std::span<const double> t, std::span<const double> u_max, double t_min) {
  if (t.size() != u_max.size()) throw Error(ErrorCode::InvalidConfig, "t and u_max lengths differ");
  Eigen::MatrixXd A;
  std::vector<double> ts, ys;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (t[k] <= t_min) continue;
    if (!(u_max[k] > 1.0)) throw Error(ErrorCode::InvalidConfig, "u_max must exceed 1 on the fit window");
    const double u2 = u_max[k] * u_max[k];
    ts.push_back(t[k]);
    ys.push_back(std::exp(u2) / (2.0 * u2));
  }
  if (ts.size() < 10) throw Error(ErrorCode::InsufficientSamples, "need at least 10 samples after t_min");
  A.resize(static_cast<Eigen::Index>(ts.size()), 2);
  Eigen::VectorXd b(static_cast<Eigen::Index>(ts.size()));
  for (std::size_t k = 0; k < ts.size(); ++k) {
    A(k, 0) = ts[k];
    A(k, 1) = 1.0;
    b(k) = ys[k];
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  return {c(0), c(1), ts.size()};
}

InnerLayerModel InnerLayerModel::from(const StabilityInfo& info, double A) {
  if (!info.Phi_s) throw Error(ErrorCode::NoStablePlateau, "stability info has no Phi_s");
  InnerLayerModel m;
  m.Phi_u = info.Phi_u;
  m.Phi_s = *info.Phi_s;
  m.kappa = m.Phi_s / m.Phi_u;
  m.omega = m.Phi_u;
  m.A = A;
  return m;
}

InnerProfile inner_profile(const InnerLayerModel& model, const Nonlinearity& phi, double u_u, double z_max,
                           double z0, int points) {
  if (!(z0 > 0.0) || !(z_max > z0) || points < 10)
    throw Error(ErrorCode::InvalidConfig, "need 0 < z0 < z_max and at least 10 points");

  // u_plus: first root of phi(u) = A above u_u, bracketed by a scan.
  std::optional<double> u_plus;
  {
    const double h = 1e-3;
    double a = u_u + h, fa = phi(a) - model.A;
    for (double b = a + h; b < u_u + 50.0; b += h) {
      const double fb = phi(b) - model.A;
      if (fa == 0.0 || fa * fb < 0.0) {
        double lo = a, hi = b, flo = fa;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
          const double mid = 0.5 * (lo + hi), fm = phi(mid) - model.A;
          if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        u_plus = fa == 0.0 ? a : 0.5 * (lo + hi);
        break;
      }
      a = b;
      fa = fb;
    }
  }
  if (!u_plus) throw Error(ErrorCode::NoStablePlateau, "phi(u) = A has no root above u_u");

  namespace ode = boost::numeric::odeint;
  using State = double;
  auto rhs = [&](const State& u, State& du, double /*s*/) { du = (model.A - phi(u)) / model.omega; };

  InnerProfile out;
  out.u_plus = *u_plus;
  std::vector<double> s_grid(points);
  const double s0 = std::log(z0), s1 = std::log(z_max);
  for (int k = 0; k < points; ++k) s_grid[k] = s0 + (s1 - s0) * k / (points - 1);
  State u = u_u + z0;
  try {
    auto stepper = ode::make_dense_output(1e-13, 1e-13, ode::runge_kutta_dopri5<State>());
    ode::integrate_times(stepper, rhs, u, s_grid.begin(), s_grid.end(), 1e-3,
                         [&](const State& v, double s) {
                           out.Z.push_back(std::exp(s));
                           out.u.push_back(v);
                         },
                         ode::max_step_checker(100000));
  } catch (const std::exception& e) {
    throw Error(ErrorCode::StiffnessFailure, e.what());
  }
  for (double v : out.u)
    if (!std::isfinite(v)) throw Error(ErrorCode::StiffnessFailure, "non-finite profile value");

  // Tail fit of ln(u_plus - u) against ln Z: within 1% of the plateau height
  // and well above roundoff.
  std::vector<double> lx, ly;
  const double height = std::abs(out.u_plus - u_u);
  for (std::size_t k = 0; k < out.Z.size(); ++k) {
    const double gap = out.u_plus - out.u[k];
    if (gap > 1e-9 && gap < 0.01 * height) {
      lx.push_back(std::log(out.Z[k]));
      ly.push_back(std::log(gap));
    }
  }
  if (lx.size() >= 5) {
    Eigen::MatrixXd A(lx.size(), 2);
    Eigen::VectorXd b(lx.size());
    for (std::size_t k = 0; k < lx.size(); ++k) {
      A(k, 0) = lx[k];
      A(k, 1) = 1.0;
      b(k) = ly[k];
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    out.tail_exponent = -c(0);
    out.tail_beta = std::exp(c(1));
  }
  return out;
}

OuterModes outer_modes(int n, const FrontPrediction& prediction, double Phi_s) {
  const Complex iw(0.0, 2.0 * std::numbers::pi * n / prediction.T);
  const double xi = prediction.xi_star;
  // Monic: sigma^3 + a2 sigma^2 + a1 sigma + a0.
  const Complex a2 = -(Phi_s + iw) / xi, a1 = -1.0, a0 = iw / xi;
  Eigen::Matrix3cd companion = Eigen::Matrix3cd::Zero();
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;
  companion(0, 2) = -a0;
  companion(1, 2) = -a1;
  companion(2, 2) = -a2;
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> solver(companion, false);
  OuterModes out;
  for (int k = 0; k < 3; ++k) {
    Complex s = solver.eigenvalues()[k];
    for (int it = 0; it < 5; ++it) {
      const Complex f = ((s + a2) * s + a1) * s + a0;
      const Complex df = (3.0 * s + 2.0 * a2) * s + a1;
      if (std::abs(df) == 0.0) break;
      s -= f / df;
    }
    out.roots[k] = s;
  }
  std::sort(out.roots.begin(), out.roots.end(),
            [](Complex a, Complex b) { return a.real() > b.real() || (a.real() == b.real() && a.imag() > b.imag()); });
  for (Complex s : out.roots)
    if (s.real() > 1e-12) out.growing.push_back(s);
  return out;
}

double grid_instability_speed(double alpha, double dx, double Phi_u) {
  if (!(dx > 0.0)) throw Error(ErrorCode::InvalidConfig, "dx must be positive");
  return xi_f(Complex(alpha, 2.0 * std::numbers::pi / dx), Phi_u);
}

PlateauCurvature plateau_curvature(const FieldState& state, double x_left, double x_right, double t) {
  if (!(t > 1.0)) throw Error(ErrorCode::InvalidConfig, "plateau curvature prediction needs t > 1");
  if (!(x_right > x_left)) throw Error(ErrorCode::InvalidConfig, "crossings must be ordered");
  const double width = x_right - x_left;
  const double a = x_left + 0.15 * width, b = x_right - 0.15 * width;
  std::vector<double> xs, us;
  for (int i = 0; i < state.grid.n; ++i) {
    const double x = state.grid.x(i);
    if (x >= a && x <= b) {
      xs.push_back(x);
      us.push_back(state.u[i]);
    }
  }
  if (xs.size() < 10) throw Error(ErrorCode::PlateauTooNarrow, "fewer than 10 nodes inside the plateau");
  const double mid = 0.5 * (x_left + x_right);
  Eigen::MatrixXd A(xs.size(), 3);
  Eigen::VectorXd rhs(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double y = xs[k] - mid;
    A(k, 0) = y * y;
    A(k, 1) = y;
    A(k, 2) = 1.0;
    rhs(k) = us[k];
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(rhs);
  PlateauCurvature out;
  out.quadratic = c(0);
  out.fitted_amplitude = std::abs(c(0)) * width * width / 4.0;
  out.predicted_amplitude = width * width / (16.0 * std::sqrt(std::log(t)));
  out.ratio = out.fitted_amplitude / out.predicted_amplitude;
  return out;
}

}  // namespace ppf
