#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ppf/nonlinearity.hpp"

namespace ppf {

/// Uniform nodes x_i = -L + i dx, i = 0..n-1, with dx = 2L/(n-1).
struct Grid1D {
  double L = 0.0;
  int n = 0;
  double dx = 0.0;

  /// n = round(2L/dx) + 1; dx is then recomputed so the endpoints are exact.
  static Grid1D from_spacing(double L, double dx);
  static Grid1D from_nodes(double L, int n);

  double x(int i) const { return -L + i * dx; }
  std::vector<double> nodes() const;
};

struct FieldState {
  Grid1D grid;
  std::vector<double> u;
  double t = 0.0;
  long step_count = 0;
};

/// Perturbation about u_u at t = 0.
struct InitialCondition {
  enum class Kind { Gaussian, ExpDecay, Oscillatory };
  Kind kind = Kind::Gaussian;
  double eps = 0.1;
  double lambda = 1.0;  // ExpDecay rate
  double alpha = 1.0;   // Oscillatory envelope rate
  double beta = 0.0;    // Oscillatory wavenumber
  double x0 = 0.0;      // Oscillatory phase shift

  static InitialCondition gaussian(double eps);
  static InitialCondition exp_decay(double eps, double lambda);
  static InitialCondition oscillatory(double eps, double alpha, double beta, double x0 = 0.0);

  double perturbation(double x) const;
};

const char* to_string(InitialCondition::Kind kind);

struct SimConfig {
  std::string nonlinearity = "cubic";
  double u_u = 0.0;
  InitialCondition ic;
  double L = 50.0;
  double dx = 0.1;
  double dt = 0.01;
  double t_end = 60.0;
  std::vector<double> snapshot_times;
  double front_threshold = 0.01;
  double divergence_threshold = 1e6;
  int diagnostics_every = 1;

  /// Throws InvalidConfig naming the offending field.
  void validate() const;
};

FieldState build_initial(const SimConfig& config);

/// Thomas factorisation of the mirrored-ghost Neumann discretisation of
/// -g'' + g on a fixed grid; reused across steps.
class HelmholtzSolver {
 public:
  explicit HelmholtzSolver(const Grid1D& grid);

  /// Solves for g given rhs. Residual is at roundoff.
  void solve(std::span<const double> rhs, std::span<double> g) const;
  std::vector<double> solve(std::span<const double> rhs) const;

  const Grid1D& grid() const { return grid_; }

 private:
  Grid1D grid_;
  std::vector<double> sub_;    // a_i, coefficient of g_{i-1}
  std::vector<double> super_;  // c_i, coefficient of g_{i+1}
  std::vector<double> cprime_;
  std::vector<double> denom_;
};

/// -g'' + g = phi(u) with dg/dx = 0 at both ends.
std::vector<double> elliptic_solve(std::span<const double> u, const Nonlinearity& phi, const Grid1D& grid);

/// One forward-Euler step u += dt (g - phi(u)). Throws Divergence when
/// max|u| exceeds `divergence_threshold` or a value is not finite.
void step(FieldState& state, double dt, const Nonlinearity& phi, const HelmholtzSolver& solver,
          double divergence_threshold = 1e6);

/// Trapezoid-weighted integrals; these are the quantities the scheme conserves.
double mass(const FieldState& state);
double first_moment(const FieldState& state);

struct DiagnosticsTrace {
  std::vector<double> t;
  std::vector<double> mass;
  std::vector<double> first_moment;
  std::vector<double> max_abs;
  std::vector<double> u_max;
  std::vector<double> u_min;
  std::vector<double> right_front;  // NaN when no node exceeds the threshold
  std::vector<double> left_front;

  std::size_t size() const { return t.size(); }
};

struct RunResult {
  std::vector<FieldState> snapshots;
  DiagnosticsTrace diagnostics;
  FieldState final_state;
  std::optional<std::string> divergence;  // set when the run stopped early
};

/// Advances to t_end recording snapshots at the step nearest each requested
/// time and diagnostics every `diagnostics_every` steps (and at the end).
RunResult run(const SimConfig& config);

}  // namespace ppf
