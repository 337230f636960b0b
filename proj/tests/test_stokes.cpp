#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ppf/error.hpp"
#include "ppf/stokes.hpp"

using namespace ppf;
using doctest::Approx;

namespace {

double distance_to_set(Complex z, const ContourSet& set) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& line : set.polylines) {
    for (std::size_t k = 0; k + 1 < line.vertices.size(); ++k) {
      const Complex a = line.vertices[k], b = line.vertices[k + 1];
      const Complex d = b - a;
      const double len2 = std::norm(d);
      double t = len2 > 0.0 ? ((z - a) * std::conj(d)).real() / len2 : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      best = std::min(best, std::abs(z - (a + t * d)));
    }
  }
  return best;
}

std::vector<double> real_axis_crossings(const ContourSet& set) {
  std::vector<double> out;
  for (const auto& line : set.polylines)
    for (std::size_t k = 0; k + 1 < line.vertices.size(); ++k) {
      const Complex a = line.vertices[k], b = line.vertices[k + 1];
      if (a.imag() * b.imag() <= 0.0 && a.imag() != b.imag()) {
        const double t = a.imag() / (a.imag() - b.imag());
        out.push_back(a.real() + t * (b.real() - a.real()));
      }
    }
  return out;
}

template <class F>
ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected ppf::Error");
  return ErrorCode::MissingInput;
}

}  // namespace

TEST_CASE("branch_points") {
  const auto bp = branch_points(1.0);
  REQUIRE(bp.size() == 2);
  CHECK(std::abs(bp[0].p - Complex(0.0, 1.0 / std::sqrt(3.0))) < 1e-15);
  CHECK(std::abs(bp[0].xi - Complex(0.0, -9.0 / (8.0 * std::sqrt(3.0)))) < 1e-15);
  for (const auto& b : bp) {
    const Complex q = 1.0 - b.p * b.p;
    CHECK(std::abs(b.xi * q * q + 2.0 * b.p) < 1e-12);
    // double root: the derivative of the quartic in p vanishes too
    CHECK(std::abs(-4.0 * b.xi * b.p * q + 2.0) < 1e-12);
  }
}

TEST_CASE("stokes_field on the axes") {
  // F_3 = conj F_2 on the positive real axis.
  for (double x : {0.2, 0.787, 2.0}) {
    CHECK(std::abs(stokes_field(Complex(x, 0.0), LineKind::AntiStokes, ContourPair::branches(2, 3), 1.0)) < 1e-12);
    CHECK(std::abs(stokes_field(Complex(x, 0.0), LineKind::Stokes, ContourPair::branches(2, 3), 1.0)) > 1e-3);
  }
  // Above the cut the equal-real-part pairs under these labels are (1,2) and (3,4).
  for (double y : {0.8, 1.0, 2.0}) {
    const Complex xi(1e-12, y);
    CHECK(std::abs(stokes_field(xi, LineKind::AntiStokes, ContourPair::branches(1, 2), 1.0)) < 1e-9);
    CHECK(std::abs(stokes_field(xi, LineKind::AntiStokes, ContourPair::branches(3, 4), 1.0)) < 1e-9);
    CHECK(std::abs(stokes_field(xi, LineKind::Stokes, ContourPair::branches(3, 4), 1.0)) > 1e-3);
  }
  CHECK(error_code_of([] {
          stokes_field(Complex(0.0, 0.5), LineKind::AntiStokes, ContourPair::branches(2, 3), 1.0);
        }) == ErrorCode::OnBranchCut);
  CHECK_NOTHROW(stokes_field(Complex(0.0, 0.7), LineKind::AntiStokes, ContourPair::branches(2, 3), 1.0));
}

TEST_CASE("ContourPair validation") {
  CHECK(error_code_of([] { ContourPair::branches(2, 2); }) == ErrorCode::InvalidConfig);
  CHECK(error_code_of([] { ContourPair::null(5); }) == ErrorCode::InvalidConfig);
  CHECK(error_code_of([] { ContourPair::data(2, Complex(1.0, 0.0)); }) == ErrorCode::PoleAtUnitLambda);
  CHECK(ContourPair::branches(2, 3).label() == "F2-F3");
}

TEST_CASE("no-growth line of F_2 crosses the real axis at xi*") {
  const auto fp = critical_front(1.0);
  const auto set =
      trace_contours(LineKind::AntiStokes, ContourPair::null(2), StokesWindow{0.5, 1.1, -0.2, 0.2}, 1e-3, 1.0);
  const auto x = real_axis_crossings(set);
  REQUIRE(x.size() == 1);
  CHECK(std::abs(x[0] - fp.xi_star) < 1e-3);
  for (const auto& line : set.polylines)
    for (const Complex v : line.vertices)
      CHECK(std::abs(stokes_field(v, LineKind::AntiStokes, ContourPair::null(2), 1.0)) < 1e-7);
}

TEST_CASE("traced vertices sit on the zero set") {
  const auto pair = ContourPair::data(2, Complex(1.5, 0.0));
  // With these labels the line lies in the fourth quadrant, away from the origin.
  const auto set = trace_contours(LineKind::Stokes, pair, StokesWindow{0.02, 12.0, -14.0, -2.0}, 5e-2, 1.0);
  CHECK_FALSE(set.polylines.empty());
  std::size_t n = 0;
  for (const auto& line : set.polylines)
    for (const Complex v : line.vertices) {
      CHECK(std::abs(stokes_field(v, LineKind::Stokes, pair, 1.0)) < 1e-6);
      CHECK(v.real() >= 0.02);
      ++n;
    }
  CHECK(n > 50);
}

TEST_CASE("branch 3 lines mirror branch 2 lines in the real axis") {
  const StokesWindow w{0.02, 12.0, -14.0, 14.0};
  const double res = 0.1;
  for (LineKind kind : {LineKind::Stokes, LineKind::AntiStokes}) {
    const auto two = trace_contours(kind, ContourPair::data(2, Complex(1.5, 0.0)), w, res, 1.0);
    const auto three = trace_contours(kind, ContourPair::data(3, Complex(1.5, 0.0)), w, res, 1.0);
    for (const auto& line : three.polylines)
      for (const Complex v : line.vertices) CHECK(distance_to_set(std::conj(v), two) < res);
  }
}

TEST_CASE("turning points against the analytic roots") {
  struct Case {
    double lambda;
    int branch;
    StokesWindow window;
  };
  const std::vector<Case> cases{
      {0.5, 2, {-0.6, -0.1, -0.8, -0.3}},
      {0.5, 3, {-0.6, -0.1, 0.3, 0.8}},
      {1.5, 1, {0.9, 1.2, -0.2, 0.2}},
      {1.5, 4, {0.08, 0.3, -0.1, 0.1}},
  };
  for (const auto& c : cases) {
    CAPTURE(c.lambda);
    CAPTURE(c.branch);
    const auto pair = ContourPair::data(c.branch, Complex(c.lambda, 0.0));
    const auto s = trace_contours(LineKind::Stokes, pair, c.window, 5e-3, 1.0);
    const auto a = trace_contours(LineKind::AntiStokes, pair, c.window, 5e-3, 1.0);
    const auto traced = find_turning_points(s, a);
    std::vector<TracedTurningPoint> proper;
    std::copy_if(traced.begin(), traced.end(), std::back_inserter(proper), [](const auto& t) { return !t.tangency; });
    REQUIRE(proper.size() == 1);
    double best = 1e300;
    for (const auto& tp : turning_points(Complex(c.lambda, 0.0))) best = std::min(best, std::abs(tp.xi - proper[0].xi));
    CHECK(best < 1e-6);
    CHECK(proper[0].residual < 1e-10);
    CHECK(std::abs(proper[0].p * proper[0].p + 2.0 * c.lambda * proper[0].p + 1.0) < 1e-6);
  }
}

TEST_CASE("tangency of the data exponent is flagged") {
  // p_1 = lambda = 0.5 at xi = -2 lambda/(1 - lambda^2)^2.
  const auto pair = ContourPair::data(1, Complex(0.5, 0.0));
  const StokesWindow w{-2.0, -1.5, -0.2, 0.2};
  const auto s = trace_contours(LineKind::Stokes, pair, w, 1e-2, 1.0);
  const auto a = trace_contours(LineKind::AntiStokes, pair, w, 1e-2, 1.0);
  const auto traced = find_turning_points(s, a);
  REQUIRE_FALSE(traced.empty());
  CHECK(traced[0].tangency);
  CHECK(traced[0].xi.real() == Approx(-2.0 * 0.5 / (0.75 * 0.75)).epsilon(1e-5));
}

TEST_CASE("windows straddling the imaginary axis") {
  const double res = 5e-2;
  const auto set =
      trace_contours(LineKind::Stokes, ContourPair::data(2, Complex(1.5, 0.0)), StokesWindow{-6.0, 6.0, -12.0, -3.0}, res, 1.0);
  CHECK(std::any_of(set.polylines.begin(), set.polylines.end(), [](const auto& l) { return l.seam_truncated; }));
  for (const auto& line : set.polylines) {
    for (const Complex v : line.vertices) CHECK(std::abs(v.real()) >= res);
    const bool touches = std::abs(line.vertices.front().real()) < 2.0 * res ||
                         std::abs(line.vertices.back().real()) < 2.0 * res;
    if (!line.closed && touches) CHECK(line.seam_truncated);
  }
}

TEST_CASE("trace_contours errors") {
  CHECK(error_code_of([] {
          trace_contours(LineKind::AntiStokes, ContourPair::null(2), StokesWindow{1.5, 3.0, 0.05, 0.5}, 1e-2, 1.0);
        }) == ErrorCode::EmptyContour);
  CHECK(error_code_of([] {
          trace_contours(LineKind::Stokes, ContourPair::null(2), StokesWindow{1.0, 0.5, 0.0, 1.0}, 1e-2, 1.0);
        }) == ErrorCode::InvalidConfig);
}

TEST_CASE("lambda = 1 model lines") {
  const auto l = lambda1_lines(1, 8.0, 601);
  CHECK(std::abs(std::arg(l.stokes.front()) - std::numbers::pi) < 1e-7);
  CHECK(std::abs(l.stokes.front() - Complex(-0.5, 0.0)) < 1e-7);
  for (const Complex eta : l.stokes) {
    const double rho = std::abs(eta), theta = std::arg(eta);
    if (std::abs(rho - 2.0) < 1e-12) CHECK(theta == Approx(std::numbers::pi / 3.0));
    CHECK(std::sqrt(2.0 * rho) * std::sin(theta / 2.0) == Approx(1.0).epsilon(1e-12));
  }
  CHECK(std::arg(l.stokes.back()) == Approx(2.0 * std::asin(0.25)).epsilon(1e-12));

  // Closed form: with sqrt(2 eta) = a + ib, the anti-Stokes set is a = |b - sigma|.
  REQUIRE(l.anti_stokes.size() > 100);
  for (const Complex eta : l.anti_stokes) {
    const Complex w = std::sqrt(2.0 * eta);
    CHECK(std::abs(w.real() - std::abs(w.imag() - 1.0)) < 1e-9);
  }
  // The anti-Stokes line passes through the turning point eta = -1/2.
  double best = 1e300;
  for (const Complex eta : l.anti_stokes) best = std::min(best, std::abs(eta + 0.5));
  CHECK(best < 0.05);

  const auto m = lambda1_lines(-1, 8.0, 601);
  for (std::size_t k = 0; k < m.stokes.size(); ++k) CHECK(std::abs(m.stokes[k] - std::conj(l.stokes[k])) < 1e-12);
  CHECK(error_code_of([] { lambda1_lines(1, 0.4); }) == ErrorCode::InvalidConfig);
}
