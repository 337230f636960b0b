#pragma once

#include <string>
#include <vector>

#include "ppf/dispersion.hpp"

namespace ppf {

enum class LineKind { Stokes, AntiStokes };

const char* to_string(LineKind kind);

/// Which two exponents are compared. Branch indices are 1-based (p_1..p_4).
/// Data compares F_i with E(xi) = lambda xi + Phi_u lambda^2/(1-lambda^2);
/// Null compares F_i with 0 (the no-growth line Re F_i = 0).
struct ContourPair {
  enum class Type { BranchBranch, BranchData, BranchNull };
  Type type = Type::BranchBranch;
  int i = 2;
  int j = 3;
  Complex lambda;

  static ContourPair branches(int i, int j);
  static ContourPair data(int i, Complex lambda);
  static ContourPair null(int i);

  std::string label() const;
};

struct StokesWindow {
  double re_min = 0.02;
  double re_max = 3.0;
  double im_min = -2.0;
  double im_max = 2.0;
};

struct Polyline {
  std::vector<Complex> vertices;
  bool closed = false;
  bool seam_truncated = false;  // ends on the exclusion strip around Re xi = 0
};

struct ContourSet {
  LineKind kind = LineKind::Stokes;
  ContourPair pair;
  std::vector<Polyline> polylines;
  StokesWindow window;
  double resolution = 2e-3;
  double Phi_u = 1.0;
};

/// Signed discriminant: Im (Stokes) or Re (anti-Stokes) of E_a - E_b.
/// Throws OnBranchCut within 1e-9 of the cut segment on the imaginary axis.
double stokes_field(Complex xi, LineKind kind, const ContourPair& pair, double Phi_u);

/// Zero set of the discriminant by marching squares on nodes at cell centres,
/// crossings refined by bisection along cell edges to 1e-8. Windows straddling
/// Re xi = 0 are traced per half-plane with a strip of half-width
/// `resolution` removed around the imaginary axis. Nodes within `resolution`
/// of xi = 0 are skipped. Throws EmptyContour.
ContourSet trace_contours(LineKind kind, const ContourPair& pair, const StokesWindow& window, double resolution,
                          double Phi_u);

struct BranchPointInfo {
  Complex p;
  Complex xi;
};

std::vector<BranchPointInfo> branch_points(double Phi_u = 1.0);

struct TracedTurningPoint {
  Complex xi;
  Complex p;       // p_i at xi
  double residual;  // |F_i - E| after refinement
  bool tangency;    // p_i = lambda: E is tangent to F_i rather than a crossing of p^2 + 2 lambda p + 1 = 0
};

/// Intersections of a Stokes and an anti-Stokes set for the same BranchData
/// pair, refined by Newton on F_i(xi) - E(xi) (derivative p_i - lambda) and
/// deduplicated. Tangencies (p_i = lambda) are kept and flagged. Throws InvalidConfig for other pair types.
std::vector<TracedTurningPoint> find_turning_points(const ContourSet& stokes, const ContourSet& anti_stokes);

/// Model lines of the lambda = 1 limit in eta = rho e^{i theta}, comparing
/// eta - 1/2 with the envelope sigma i sqrt(2 eta). Stokes:
/// sqrt(2 rho) sin(theta/2) = sigma, for rho >= 1/2. Anti-Stokes:
/// rho cos(theta) - 1/2 = -sigma sqrt(2 rho) sin(theta/2), solved for theta at
/// each rho in [1/4, rho_max]; its two roots are joined into one polyline
/// through the fold at rho = 1/4. Both lines meet at eta = -1/2.
struct Lambda1Lines {
  int sigma = 1;
  std::vector<Complex> stokes;
  std::vector<Complex> anti_stokes;
};

Lambda1Lines lambda1_lines(int sigma, double rho_max, int samples = 400);

}  // namespace ppf
