#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace ppf {

using Complex = std::complex<double>;

/// The four labelled roots p_1..p_4 of the saddle equation
/// xi (1 - p^2)^2 + 2 Phi_u p = 0 and their exponents F_j = F(p_j).
/// Labels are fixed at xi = Phi_u (real) by the large-xi asymptotics
/// (p_1 -> -1+, p_2 lower half-plane, p_3 upper half-plane, p_4 -> -1-) and
/// carried to other xi by continuation. Index 0 holds p_1.
struct SaddleBranchSet {
  Complex xi;
  std::array<Complex, 4> p;
  std::array<Complex, 4> F;
};

/// Imaginary extent of the branch cut xi = i*zeta, |zeta| < 9/(8 sqrt 3), per unit Phi_u.
inline const double kBranchCutHalfLength = 9.0 / (8.0 * std::sqrt(3.0));

/// Throws DegenerateXi for |xi| < 1e-14. For Re xi >= 0 roots are continued
/// along the straight segment from xi = Phi_u; for Re xi < 0 the odd
/// continuation p_k(xi) = -p_k(-xi) is used, so labels may jump across the
/// imaginary-axis cut.
SaddleBranchSet saddle_branches(Complex xi, double Phi_u);

/// Relabels `guess` (roots at a nearby xi) onto the roots at `xi` by Newton
/// polishing. Returns nullopt when the polished roots are not cleanly separated
/// so the caller can fall back to full continuation.
std::optional<std::array<Complex, 4>> continue_branches(const std::array<Complex, 4>& guess, Complex xi,
                                                        double Phi_u);

/// All four roots of the saddle quartic, unlabelled, Newton-polished.
std::array<Complex, 4> saddle_roots(Complex xi, double Phi_u);

/// Envelope exponent F(p) = -Phi_u (2p^2/(1-p^2)^2 - p^2/(1-p^2)). Throws PoleAtUnitP.
Complex F_of_p(Complex p, double Phi_u);

/// Saddle map xi(p) = -Phi_u 2p/(1-p^2)^2. Throws PoleAtUnitP.
Complex xi_of_p(Complex p, double Phi_u);

/// Exponent of the separable mode exp(-lambda x) carried by exponentially
/// decaying data: E(xi) = lambda xi + Phi_u lambda^2/(1-lambda^2).
Complex data_exponent(Complex lambda, Complex xi, double Phi_u);

struct FrontPrediction {
  double Phi_u = 0.0;
  double xi_star = 0.0;
  Complex p_star;
  double lambda_star = 0.0;
  Complex F_star;
  double T = 0.0;
  double X = 0.0;
  Complex D;
  double nu = 0.0;
  double xi_star_bisection = 0.0;  // independent route: Re F_3(xi) = 0 on the real axis
  int newton_iterations = 0;
};

/// Critical (pulled) front constants. Newton on the two real saddle/no-growth
/// equations seeded at 1 + 0.8i; cross-checked against bisection on the
/// labelled branch. Throws NewtonDivergence.
FrontPrediction critical_front(double Phi_u);

struct RepeatedRoot {
  double c = 0.0;
  Complex mu;
  Complex lambda;
  Complex D;
};

/// Solves c (1 - lambda^2)^2 + 2 Phi_u lambda = 0 on the branch that passes
/// through lambda = p* at c = xi*, then mu from the simple-root relation and the
/// leading-edge diffusivity D. c < 0 uses lambda(-c) = -lambda(c). Throws
/// BranchJump if continuation loses the root.
RepeatedRoot repeated_root_system(double c, double Phi_u);

/// Same branch sampled along an increasing list of c > 0 (one continuation pass).
std::vector<RepeatedRoot> repeated_root_curve(std::span<const double> cs, double Phi_u);

/// Speed from the no-growth condition on exp(-lambda x) data:
/// Phi_u Re(lambda^2/(lambda^2-1)) / Re(lambda). Throws PoleAtUnitLambda, NonDecaying.
double xi_f(Complex lambda, double Phi_u);

struct ModulationPeriods {
  double T_f = 0.0;
  double X_f = 0.0;
};

/// T_f = 2 pi / Im(xi_f lambda + Phi_u lambda^2/(1-lambda^2)), X_f = xi_f T_f.
/// Throws NoOscillation when the imaginary part is below 1e-12.
ModulationPeriods modulation_periods(Complex lambda, double Phi_u);

enum class LambdaRegion { OmegaR, OmegaL1, OmegaL2, Outside };

const char* to_string(LambdaRegion region);

struct LambdaClassification {
  Complex lambda;
  double xi_f = 0.0;
  LambdaRegion region = LambdaRegion::Outside;
  bool boundary = false;  // within one cell of xi_f = xi*; reported as Outside
  double selected_speed = 0.0;
  std::optional<double> T_f;
  std::optional<double> X_f;
};

struct LambdaWindow {
  double re_max = 4.0;
  double im_max = 8.0;
  double resolution = 0.01;
};

/// Raster of xi_f over 0 < Re lambda <= re_max, |Im lambda| <= im_max with the
/// connected components of {xi_f > xi*} labelled by flood fill from the seeds
/// 1.5 (OmegaR), 0.5 + 2i (OmegaL1), 0.5 - 2i (OmegaL2). Immutable once built.
class LambdaMap {
 public:
  LambdaMap(double Phi_u, LambdaWindow window = {});

  LambdaClassification classify(Complex lambda) const;

  int cols() const { return cols_; }  // along Re lambda
  int rows() const { return rows_; }  // along Im lambda
  Complex node(int col, int row) const;
  double xi_f_at(int col, int row) const { return xi_f_[index(col, row)]; }
  LambdaRegion region_at(int col, int row) const;
  bool boundary_at(int col, int row) const { return boundary_[index(col, row)] != 0; }

  /// Number of connected components of interior {xi_f > xi*} cells.
  int component_count() const { return component_count_; }

  /// Largest Re lambda in `region` on the row nearest Im lambda = im, refined
  /// by bisection on xi_f = xi* to 1e-12. nullopt if the row misses the region.
  std::optional<double> max_re_in_region(LambdaRegion region, double im) const;

  double xi_star() const { return xi_star_; }
  double Phi_u() const { return Phi_u_; }
  const LambdaWindow& window() const { return window_; }

 private:
  std::size_t index(int col, int row) const { return static_cast<std::size_t>(row) * cols_ + col; }

  double Phi_u_;
  double xi_star_;
  LambdaWindow window_;
  int cols_ = 0;
  int rows_ = 0;
  std::vector<double> xi_f_;
  std::vector<int> component_;       // -1 for cells outside {xi_f > xi*} or on the boundary
  std::vector<unsigned char> boundary_;
  std::array<int, 3> seed_component_{-1, -1, -1};
  int component_count_ = 0;
};

/// Classifies lambda against a shared default-window raster for Phi_u.
/// Throws WindowExceeded outside 0 < Re lambda <= 4, |Im lambda| <= 8.
LambdaClassification classify_lambda(Complex lambda, double Phi_u);

struct TurningPoint {
  Complex p;
  Complex xi;  // infinite when p = -1 (lambda = 1)
};

/// Roots of p^2 + 2 lambda p + 1 = 0 mapped through xi = -2 Phi_u p/(1-p^2)^2.
std::vector<TurningPoint> turning_points(Complex lambda, double Phi_u = 1.0);

/// Fisher-KPP reference speed map Re(lambda^2 + 1)/Re(lambda).
double fisher_xi_f(Complex lambda);

}  // namespace ppf
