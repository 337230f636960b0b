#include <doctest.h>

#include <cmath>
#include <random>

#include "ppf/error.hpp"
#include "ppf/nonlinearity.hpp"

using namespace ppf;

TEST_CASE("closed forms") {
  const auto c = Nonlinearity::cubic();
  const auto e = Nonlinearity::expsym();
  const auto p = Nonlinearity::exppop();
  for (double u : {-2.0, -0.3, 0.0, 0.7, 1.9}) {
    CHECK(c(u) == u * u * u - u);
    CHECK(e(u) == -u * std::exp(-u * u));
    CHECK(p(u) == u * std::exp(-u));
  }
  CHECK(c(0.0) == 0.0);
  CHECK(e(0.0) == 0.0);
  CHECK(c.deriv(0.0) == -1.0);
  CHECK(e.deriv(0.0) == -1.0);
}

TEST_CASE("derivative matches central differences on |u| <= 5") {
  for (const auto& phi : {Nonlinearity::cubic(), Nonlinearity::expsym(), Nonlinearity::exppop()}) {
    for (double u = -5.0; u <= 5.0; u += 0.0137) {
      const double h = 1e-5 * std::max(1.0, std::abs(u));
      const double fd = (phi(u + h) - phi(u - h)) / (2 * h);
      const double d = phi.deriv(u);
      CHECK(std::abs(fd - d) <= 1e-6 * std::max(1.0, std::abs(d)));
    }
  }
}

TEST_CASE("cubic and expsym are odd") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  const auto c = Nonlinearity::cubic();
  const auto e = Nonlinearity::expsym();
  for (int i = 0; i < 1000; ++i) {
    const double u = dist(rng);
    CHECK(c(-u) == -c(u));
    CHECK(e(-u) == -e(u));
  }
}

TEST_CASE("classify") {
  CHECK(classify(Nonlinearity::cubic(), 0.0) == Stability::Unstable);
  CHECK(classify(Nonlinearity::cubic(), 1.0) == Stability::Stable);
  // phi'(0.5) = -e^{-0.25}(1 - 2*0.25) < 0
  CHECK(Nonlinearity::expsym().deriv(0.5) == doctest::Approx(-std::exp(-0.25) * 0.5));
  CHECK(classify(Nonlinearity::expsym(), 0.5) == Stability::Unstable);
  CHECK(classify(Nonlinearity::cubic(), 1.0 / std::sqrt(3.0)) == Stability::Marginal);
}

TEST_CASE("stability_info for the cubic about 0") {
  const auto info = stability_info(Nonlinearity::cubic(), 0.0);
  CHECK(info.Phi_u == 1.0);
  REQUIRE(info.u_plus);
  REQUIRE(info.u_minus);
  CHECK(*info.u_plus == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(*info.u_minus == doctest::Approx(-1.0).epsilon(1e-11));
  REQUIRE(info.Phi_s);
  CHECK(*info.Phi_s == doctest::Approx(2.0).epsilon(1e-10));
  REQUIRE(info.u_M);
  REQUIRE(info.u_m);
  CHECK(*info.u_M == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-11));
  CHECK(*info.u_m == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-11));
}

TEST_CASE("critical points are marginal and the interval between them unstable") {
  for (const auto& phi : {Nonlinearity::cubic(), Nonlinearity::expsym()}) {
    const auto info = stability_info(phi, 0.0);
    REQUIRE(info.u_M);
    REQUIRE(info.u_m);
    CHECK(std::abs(phi.deriv(*info.u_M)) < 1e-10);
    CHECK(std::abs(phi.deriv(*info.u_m)) < 1e-10);
    CHECK(classify(phi, 0.5 * (*info.u_M + *info.u_m)) == Stability::Unstable);
  }
}

TEST_CASE("expsym has no stable plateau") {
  const auto info = stability_info(Nonlinearity::expsym(), 0.0);
  CHECK(info.Phi_u == 1.0);
  CHECK_FALSE(info.u_plus);
  CHECK_FALSE(info.u_minus);
  CHECK_FALSE(info.Phi_s);
  try {
    stability_info(Nonlinearity::expsym(), 0.0, true);
    FAIL("expected NoStablePlateau");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoStablePlateau);
  }
}

TEST_CASE("non-symmetric unstable state") {
  const auto info = stability_info(Nonlinearity::cubic(), 0.4);
  CHECK(info.Phi_u == doctest::Approx(1.0 - 3.0 * 0.16).epsilon(1e-14));
  CHECK(info.Phi_u == doctest::Approx(0.52));
  CHECK_FALSE(info.u_plus);
}

TEST_CASE("stable base state is rejected") {
  try {
    stability_info(Nonlinearity::cubic(), 1.0);
    FAIL("expected NotUnstable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotUnstable);
  }
}

TEST_CASE("names and custom functions") {
  CHECK(Nonlinearity::from_name("expsym").kind() == NonlinearityKind::ExpSym);
  CHECK_THROWS_AS(Nonlinearity::from_name("quintic"), Error);
  const auto custom = Nonlinearity::custom("tanh", [](double u) { return -std::tanh(u); },
                                           [](double u) { return -1.0 / (std::cosh(u) * std::cosh(u)); });
  CHECK(custom.kind() == NonlinearityKind::Custom);
  CHECK(stability_info(custom, 0.0).Phi_u == 1.0);
}
