#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ppf/dispersion.hpp"
#include "ppf/nonlinearity.hpp"
#include "ppf/pde.hpp"

namespace ppf {

enum class Side { Left, Right };

const char* to_string(Side side);

/// Outermost node on `side` with |u - u_u| >= threshold, moved outward by
/// linear interpolation to where |u - u_u| falls to the threshold.
std::optional<double> try_front_position(const Grid1D& grid, std::span<const double> u, double u_u, double threshold,
                                         Side side);

/// As above; throws NoFront when nothing exceeds the threshold.
double front_position(const FieldState& state, double u_u, double threshold, Side side);

struct FrontTrace {
  std::vector<double> t;
  std::vector<double> x;
  double threshold = 0.01;
  Side side = Side::Right;

  /// Samples of one side from a run's diagnostics, skipping steps with no front.
  static FrontTrace from_diagnostics(const DiagnosticsTrace& d, Side side, double threshold);

  /// Drops samples within `margin` of x = +-L.
  FrontTrace away_from_boundary(double L, double margin) const;
};

struct SpeedFit {
  double xi_hat = 0.0;
  std::optional<double> nu_hat;
  double x0_hat = 0.0;
  double rms = 0.0;
  std::size_t samples = 0;
};

/// Least squares of x = xi t + x0, or x = xi t - nu ln t + x0 when `with_log`,
/// over t in [t0, t1]. Throws InsufficientSamples below 10 samples.
SpeedFit speed_fit(const FrontTrace& trace, double t0, double t1, bool with_log = false);

enum class Crossing { Up, Down };

struct PeriodMeasurement {
  std::vector<double> crossings;
  std::vector<double> periods;    // crossings[j] - crossings[j-1]
  std::vector<double> midpoints;  // (crossings[j] + crossings[j-1]) / 2
};

/// Grid points where H(u - u_u) switches, H(s) = [s > 0]. Up: H(x_i) = 1 and
/// H(x_{i-1}) = 0, recorded at x_i. Down: H(x_i) = 1 and H(x_{i+1}) = 0,
/// recorded at x_i, so an even state yields the mirror image of the Up set.
/// Throws TooFewCrossings below two crossings.
PeriodMeasurement spatial_periods(const FieldState& state, double u_u, Crossing dir = Crossing::Up);

/// Periods left after removing, on each side of the origin, the `skip`
/// periods nearest the origin and the `skip` outermost ones.
PeriodMeasurement interior_periods(const PeriodMeasurement& m, int skip = 2);

struct OverlapResult {
  double rms = 0.0;        // max pairwise rms difference / amplitude
  double amplitude = 0.0;  // max |u - u_u| over all windows
  double z_anchor = 0.0;   // mean of z_front; the window is [z_anchor - width, z_anchor]
  std::vector<double> z_front;  // x_front - xi_hat t per snapshot
};

/// Snapshots viewed in the common frame z = x - xi_hat t over the window of
/// length `width` behind the mean front position, resampled by linear
/// interpolation at the grid spacing. Throws WindowOutOfDomain,
/// InsufficientSamples (fewer than two snapshots), NoFront.
OverlapResult temporal_overlap(std::span<const FieldState> snapshots, double xi_hat, double width, double u_u,
                               double threshold = 0.01, Side side = Side::Right);

struct PlateauSample {
  double x_mid = 0.0;
  double u = 0.0;
  double phi = 0.0;
};

/// u and phi(u) at the midpoint between consecutive crossings of u_u (up and
/// down), interpolated between nodes. Throws TooFewCrossings.
std::vector<PlateauSample> plateau_values(const FieldState& state, double u_u, const Nonlinearity& phi);

struct GrowthFit {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t samples = 0;
};

/// Linear fit of y = exp(u_max^2)/(2 u_max^2) against t for t > t_min.
/// Throws InsufficientSamples (< 10 samples) and InvalidConfig if u_max <= 1
/// in the window.
GrowthFit growth_law(std::span<const double> t, std::span<const double> u_max, double t_min);

struct InnerLayerModel {
  double Phi_u = 1.0;
  double Phi_s = 2.0;
  double kappa = 2.0;
  double omega = 1.0;
  double A = 0.0;

  static InnerLayerModel from(const StabilityInfo& info, double A);
};

struct InnerProfile {
  std::vector<double> Z;
  std::vector<double> u;
  double u_plus = 0.0;
  double tail_exponent = 0.0;  // fitted decay rate of u_plus - u in Z
  double tail_beta = 0.0;      // prefactor of the fitted tail
};

/// Integrates omega Z u' = A - phi(u) in s = ln Z with adaptive Dormand-Prince
/// from Z = z0, u = u_u + z0, to z_max; output on `points` log-spaced Z.
/// Throws StiffnessFailure, NoStablePlateau (no root of phi = A above u_u).
InnerProfile inner_profile(const InnerLayerModel& model, const Nonlinearity& phi, double u_u, double z_max,
                           double z0 = 1e-6, int points = 400);

struct OuterModes {
  std::array<Complex, 3> roots;
  std::vector<Complex> growing;  // Re sigma > 1e-12
};

/// Roots of (sigma^2 - 1)(xi* sigma - 2 pi n i/T) = Phi_s sigma^2.
OuterModes outer_modes(int n, const FrontPrediction& prediction, double Phi_s);

/// xi_f(alpha + 2 pi i/dx): the speed carried by grid-scale oscillations.
double grid_instability_speed(double alpha, double dx, double Phi_u);

struct PlateauCurvature {
  double quadratic = 0.0;          // fitted x^2 coefficient
  double fitted_amplitude = 0.0;   // |quadratic| (x_right - x_left)^2 / 4
  double predicted_amplitude = 0.0;  // (x_right - x_left)^2 / (16 sqrt(ln t))
  double ratio = 0.0;
};

/// Parabola fitted to the middle 70% of the nodes between two crossings.
/// Throws PlateauTooNarrow below 10 nodes, InvalidConfig for t <= 1.
PlateauCurvature plateau_curvature(const FieldState& state, double x_left, double x_right, double t);

}  // namespace ppf
