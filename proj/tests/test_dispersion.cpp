#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "ppf/dispersion.hpp"
#include "ppf/error.hpp"

using namespace ppf;
using doctest::Approx;

namespace {

double quartic_residual(Complex p, Complex xi, double Phi_u) {
  const Complex q = 1.0 - p * p;
  return std::abs(xi * q * q + 2.0 * Phi_u * p);
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

TEST_CASE("saddle_branches: large xi asymptotics fix the labels") {
  const auto set = saddle_branches(Complex(1000.0, 0.0), 1.0);
  const double s = 1.0 / std::sqrt(2.0 * 1000.0);
  CHECK(std::abs(set.p[1] - Complex(1.0, -s)) < 1e-4);
  CHECK(std::abs(set.p[2] - Complex(1.0, s)) < 1e-4);
  CHECK(std::abs(set.p[0] - Complex(-1.0 + s, 0.0)) < 1e-4);
  CHECK(std::abs(set.p[3] - Complex(-1.0 - s, 0.0)) < 1e-4);
}

TEST_CASE("saddle_branches: small xi branch p_1") {
  const double xi = 1e-3;
  const auto set = saddle_branches(Complex(xi, 0.0), 1.0);
  CHECK(std::abs(set.p[0] - Complex(-0.5 * xi + 0.25 * xi * xi * xi, 0.0)) < 1e-11);
  // p_4 ~ -2^{1/3} xi^{-1/3}
  CHECK(std::abs(set.p[3].real() / (-std::cbrt(2.0) / std::cbrt(xi)) - 1.0) < 0.02);
}

TEST_CASE("saddle_branches: roots agree with a Durand-Kerner oracle at xi = 1") {
  const auto set = saddle_branches(Complex(1.0, 0.0), 1.0);
  // p^4 - 2p^2 + 2p + 1 = 0
  const auto dk = oracle::durand_kerner({1.0, 2.0, -2.0, 0.0});
  for (const Complex r : dk) {
    double best = 1e300;
    for (const Complex p : set.p) best = std::min(best, std::abs(p - r));
    CHECK(best < 1e-10);
  }
}

TEST_CASE("saddle_branches: degenerate xi") {
  CHECK(error_code_of([] { saddle_branches(Complex(1e-15, 0.0), 1.0); }) == ErrorCode::DegenerateXi);
}

TEST_CASE("saddle_branches: residuals on random complex xi") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mag(-2.0, 1.0), arg(-std::numbers::pi, std::numbers::pi);
  for (int i = 0; i < 300; ++i) {
    const Complex xi = std::polar(std::pow(10.0, mag(rng)), arg(rng));
    if (std::abs(xi.real()) < 1e-3) continue;
    for (double Phi_u : {0.5, 1.0}) {
      const auto set = saddle_branches(xi, Phi_u);
      for (int k = 0; k < 4; ++k) {
        CHECK(quartic_residual(set.p[k], xi, Phi_u) < 1e-10 * (1.0 + std::abs(xi)));
        const Complex cross = set.p[k] * (1.0 + set.p[k] * set.p[k]) * xi / 2.0;
        CHECK(std::abs(set.F[k] - cross) <= 1e-9 * std::max(1.0, std::abs(cross)));
      }
    }
  }
}

TEST_CASE("saddle_branches: conjugate structure on the real axis") {
  for (double xi : {0.05, 0.3, 0.7872, 2.0, 17.0}) {
    const auto set = saddle_branches(Complex(xi, 0.0), 1.0);
    CHECK(std::abs(set.p[1] - std::conj(set.p[2])) < 1e-12);
    CHECK(std::abs(set.F[1] - std::conj(set.F[2])) < 1e-12);
    CHECK(std::abs(set.F[0].imag()) < 1e-12);
    CHECK(std::abs(set.F[3].imag()) < 1e-12);
    CHECK(set.p[1].imag() < 0.0);
    CHECK(set.F[0].real() <= 0.0);
    CHECK(set.F[3].real() <= 0.0);
  }
}

TEST_CASE("saddle_branches: reflection xi -> -xi") {
  // Labels for Re xi < 0 follow p_k(-xi) = -p_k(xi) (the small-xi expansions
  // hold for xi -> 0+-), so Re F_k is even and Im F_{2,3} are odd up to the
  // 2 <-> 3 exchange.
  for (double xi : {0.1, 0.5, 1.3, 4.0}) {
    const auto pos = saddle_branches(Complex(xi, 0.0), 1.0);
    const auto neg = saddle_branches(Complex(-xi, 0.0), 1.0);
    for (int k = 0; k < 4; ++k) CHECK(neg.F[k].real() == Approx(pos.F[k].real()).epsilon(1e-12));
    CHECK(neg.F[1].imag() == Approx(-pos.F[2].imag()).epsilon(1e-12));
    CHECK(neg.F[2].imag() == Approx(-pos.F[1].imag()).epsilon(1e-12));
  }
}

TEST_CASE("continue_branches follows saddle_branches for nearby xi") {
  const Complex a(0.8, 0.3), b(0.801, 0.302);
  const auto sa = saddle_branches(a, 1.0);
  const auto sb = saddle_branches(b, 1.0);
  const auto cont = continue_branches(sa.p, b, 1.0);
  REQUIRE(cont);
  for (int k = 0; k < 4; ++k) CHECK(std::abs((*cont)[k] - sb.p[k]) < 1e-12);
}

TEST_CASE("F_of_p") {
  CHECK(F_of_p(Complex(0.0, 0.0), 1.0) == Complex(0.0, 0.0));
  const Complex p_star(1.0419, 0.8337);
  const Complex F = F_of_p(p_star, 1.0);
  CHECK(std::abs(F.real()) < 2e-4);
  CHECK(F.imag() == Approx(1.1688).epsilon(2e-4));
  // Branch point: p = i/sqrt3 maps to xi = -i 9/(8 sqrt3).
  const Complex pb(0.0, 1.0 / std::sqrt(3.0));
  const Complex xib(0.0, -9.0 / (8.0 * std::sqrt(3.0)));
  CHECK(std::abs(xi_of_p(pb, 1.0) - xib) < 1e-14);
  CHECK(std::abs(F_of_p(pb, 1.0) - pb * (1.0 + pb * pb) * xib / 2.0) < 1e-14);
  CHECK(error_code_of([] { F_of_p(Complex(1.0, 0.0), 1.0); }) == ErrorCode::PoleAtUnitP);
}

TEST_CASE("F identity on random p") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  int checked = 0;
  while (checked < 1000) {
    const Complex p(u(rng), u(rng));
    if (std::abs(p) > 3.0 || std::abs(1.0 - p * p) < 0.05) continue;
    const Complex xi = xi_of_p(p, 1.0);
    const Complex rhs = p * (1.0 + p * p) * xi / 2.0;
    CHECK(std::abs(F_of_p(p, 1.0) - rhs) <= 1e-9 * std::max(1.0, std::abs(rhs)));
    ++checked;
  }
}

TEST_CASE("critical_front at Phi_u = 1") {
  const auto fp = critical_front(1.0);
  CHECK(fp.xi_star == Approx(0.7872).epsilon(5e-4 / 0.7872));
  CHECK(fp.lambda_star == Approx(1.042).epsilon(1e-3));
  CHECK(fp.p_star.imag() == Approx(0.834).epsilon(1e-3));
  CHECK(fp.T == Approx(5.375).epsilon(1e-3));
  CHECK(fp.X == Approx(4.232).epsilon(1e-3));
  CHECK(fp.D.real() == Approx(-0.1474).epsilon(1e-3));
  CHECK(fp.D.imag() == Approx(0.8923).epsilon(1e-3));
  CHECK(fp.nu == Approx(1.5 / fp.lambda_star));
  CHECK(std::abs(fp.xi_star - fp.xi_star_bisection) < 1e-6);
  // repeated-root relation at (xi*, p*)
  const Complex q = 1.0 - fp.p_star * fp.p_star;
  CHECK(std::abs(fp.xi_star * q * q + 2.0 * fp.p_star) < 1e-9);
  // X from the closed form xi0 2 pi i / (p* xi0 + p*^2/(1 - p*^2))
  const Complex X = fp.xi_star * 2.0 * std::numbers::pi * Complex(0, 1) /
                    (fp.p_star * fp.xi_star + fp.p_star * fp.p_star / q);
  CHECK(std::abs(X.real() - fp.X) < 1e-9);
  CHECK(std::abs(X.imag()) < 1e-9);
}

TEST_CASE("critical_front scales with Phi_u") {
  const auto base = critical_front(1.0);
  for (double Phi_u : {0.25, 0.5, 2.0}) {
    const auto fp = critical_front(Phi_u);
    CHECK(fp.xi_star / Phi_u == Approx(base.xi_star).epsilon(1e-9));
    CHECK(std::abs(fp.p_star - base.p_star) < 1e-9);
    CHECK(std::abs(fp.F_star / Phi_u - base.F_star) < 1e-9);
    CHECK(fp.D.real() / Phi_u == Approx(base.D.real()).epsilon(1e-9));
  }
  CHECK(critical_front(0.5).xi_star == Approx(0.3936).epsilon(1e-3));
}

TEST_CASE("xi_f at p* equals xi*") {
  const auto fp = critical_front(1.0);
  CHECK(std::abs(xi_f(fp.p_star, 1.0) - fp.xi_star) < 1e-6);
}

TEST_CASE("repeated_root_system") {
  const auto fp = critical_front(1.0);
  const auto rr = repeated_root_system(fp.xi_star, 1.0);
  CHECK(std::abs(rr.mu - Complex(0.0, -1.1688)) < 1e-4);
  CHECK(std::abs(rr.lambda - Complex(1.0419, 0.8337)) < 1e-4);
  CHECK(std::abs(rr.D - Complex(-0.147475737, 0.892386984)) < 1e-6);
  CHECK(std::abs(rr.mu + fp.F_star) < 1e-12);

  // Re D stays negative, approaching -1/4; Im D grows without bound.
  const std::vector<double> cs{0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 100.0, 1e3, 1e4};
  const auto curve = repeated_root_curve(cs, 1.0);
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].D.real() < 0.0);
    const Complex q = 1.0 - curve[i].lambda * curve[i].lambda;
    CHECK(std::abs(cs[i] * q * q + 2.0 * curve[i].lambda) < 1e-9 * (1.0 + cs[i]));
    if (i > 0) CHECK(curve[i].D.imag() > curve[i - 1].D.imag());
  }
  CHECK(curve.back().D.real() == Approx(-0.25).epsilon(1e-3));
  CHECK(curve[0].D.real() == Approx(-0.0224153).epsilon(1e-4));

  const auto neg = repeated_root_system(-fp.xi_star, 1.0);
  CHECK(std::abs(neg.lambda - Complex(-1.0419, -0.8337)) < 1e-4);
  CHECK(std::abs(neg.mu - Complex(0.0, -1.1688)) < 1e-4);
}

TEST_CASE("xi_f values") {
  CHECK(xi_f(Complex(1.5, 0.5), 1.0) == Approx(0.8718).epsilon(1e-4));
  CHECK(xi_f(Complex(0.5, 2.0), 1.0) == Approx(1.6424).epsilon(1e-4));
  CHECK(xi_f(Complex(2.0, 0.0), 1.0) == Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(xi_f(Complex(2.0, 0.0), 3.0) == Approx(2.0).epsilon(1e-15));
  CHECK(error_code_of([] { xi_f(Complex(1.0, 0.0), 1.0); }) == ErrorCode::PoleAtUnitLambda);
  CHECK(error_code_of([] { xi_f(Complex(-0.5, 1.0), 1.0); }) == ErrorCode::NonDecaying);
}

TEST_CASE("modulation_periods") {
  const auto a = modulation_periods(Complex(0.5, 2.0), 1.0);
  CHECK(a.T_f == Approx(1.8700).epsilon(1e-4));
  CHECK(a.X_f == Approx(3.0712).epsilon(1e-4));
  const auto b = modulation_periods(Complex(1.05, 3.0), 1.0);
  CHECK(b.T_f == Approx(2.3303).epsilon(1e-4));
  CHECK(b.X_f == Approx(2.0532).epsilon(1e-4));
  CHECK(error_code_of([] { modulation_periods(Complex(2.0, 0.0), 1.0); }) == ErrorCode::NoOscillation);
}

TEST_CASE("classify_lambda examples") {
  const auto fp = critical_front(1.0);
  const auto r = classify_lambda(Complex(1.5, 0.5), 1.0);
  CHECK(r.region == LambdaRegion::OmegaR);
  CHECK(r.selected_speed == Approx(fp.xi_star));
  CHECK_FALSE(r.T_f);

  const auto l1 = classify_lambda(Complex(1.05, 3.0), 1.0);
  CHECK(l1.region == LambdaRegion::OmegaL1);
  CHECK(l1.selected_speed == Approx(0.8811).epsilon(1e-4));
  REQUIRE(l1.T_f);
  CHECK(*l1.T_f == Approx(2.3303).epsilon(1e-4));

  const auto real = classify_lambda(Complex(3.0, 0.0), 1.0);
  CHECK((real.region == LambdaRegion::OmegaR || real.region == LambdaRegion::Outside));
  CHECK(real.selected_speed == Approx(fp.xi_star));

  CHECK(error_code_of([] { classify_lambda(Complex(5.0, 0.0), 1.0); }) == ErrorCode::WindowExceeded);
  CHECK(error_code_of([] { classify_lambda(Complex(0.5, 9.0), 1.0); }) == ErrorCode::WindowExceeded);
}

TEST_CASE("classify_lambda is conjugation-equivariant") {
  const LambdaMap map(1.0);
  for (int r = 0; r < map.rows(); r += 37) {
    for (int c = 0; c < map.cols(); c += 13) {
      const int mirror = map.rows() - 1 - r;
      const auto a = map.region_at(c, r);
      const auto b = map.region_at(c, mirror);
      auto swap = [](LambdaRegion x) {
        if (x == LambdaRegion::OmegaL1) return LambdaRegion::OmegaL2;
        if (x == LambdaRegion::OmegaL2) return LambdaRegion::OmegaL1;
        return x;
      };
      CHECK(b == swap(a));
      if (!std::isnan(map.xi_f_at(c, r))) CHECK(map.xi_f_at(c, mirror) == Approx(map.xi_f_at(c, r)));
    }
  }
  for (const Complex l : {Complex(0.5, 2.0), Complex(1.05, 3.0), Complex(0.3, 6.5)}) {
    const auto up = map.classify(l);
    const auto down = map.classify(std::conj(l));
    CHECK(up.region == LambdaRegion::OmegaL1);
    CHECK(down.region == LambdaRegion::OmegaL2);
    CHECK(up.xi_f == Approx(down.xi_f));
  }
}

TEST_CASE("lambda map topology") {
  const LambdaMap map(1.0);
  CHECK(map.component_count() == 3);
  const auto top = map.max_re_in_region(LambdaRegion::OmegaL1, 8.0);
  REQUIRE(top);
  CHECK(std::abs(*top - 1.269) < 0.02);
  CHECK(*top > critical_front(1.0).lambda_star);
  const auto bottom = map.max_re_in_region(LambdaRegion::OmegaL2, -8.0);
  REQUIRE(bottom);
  CHECK(*bottom == Approx(*top));
}

TEST_CASE("turning_points") {
  const auto half = turning_points(Complex(0.5, 0.0));
  REQUIRE(half.size() == 2);
  for (const auto& tp : half) {
    CHECK(std::abs(tp.p * tp.p + 1.0 * tp.p + 1.0) < 1e-14);
    CHECK(tp.xi.real() == Approx(0.5 * (0.5 / (0.25 - 1.0))).epsilon(1e-12));
    CHECK(std::abs(tp.xi.imag()) == Approx(0.5 / std::sqrt(0.75)).epsilon(1e-12));
    CHECK(tp.xi.real() < 0.0);
  }
  const auto two = turning_points(Complex(2.0, 0.0));
  for (const auto& tp : two) {
    CHECK(std::abs(tp.xi.imag()) < 1e-14);
    CHECK(tp.xi.real() > 0.0);
  }
  const auto one = turning_points(Complex(1.0, 0.0));
  for (const auto& tp : one) {
    CHECK(std::abs(tp.p + 1.0) < 1e-7);
    CHECK(std::isinf(tp.xi.real()));
  }
}

TEST_CASE("fisher_xi_f") {
  CHECK(fisher_xi_f(Complex(1.0, 0.0)) == 2.0);
  CHECK(fisher_xi_f(Complex(2.0, 0.0)) == 2.5);
  CHECK(fisher_xi_f(Complex(0.5, 0.5)) == Approx(2.0).epsilon(1e-15));
}
