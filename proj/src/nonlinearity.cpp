#include "ppf/nonlinearity.hpp"

#include <cmath>
#include <vector>

#include "ppf/error.hpp"

namespace ppf {

namespace {

// Grid scan on [-10, 10] at step 1e-3 for sign changes of f, each bracket then
// bisected to 1e-12. Grid points where f vanishes exactly are returned as is.
std::vector<double> scan_roots(const Nonlinearity::Fn& f) {
  constexpr double lo = -10.0;
  constexpr double step = 1e-3;
  constexpr int count = 20000;
  std::vector<double> roots;
  double a = lo;
  double fa = f(a);
  for (int i = 1; i <= count; ++i) {
    const double b = lo + i * step;
    const double fb = f(b);
    if (fa == 0.0) {
      roots.push_back(a);
    } else if (fa * fb < 0.0) {
      double l = a, r = b, fl = fa;
      while (r - l > 1e-12) {
        const double m = 0.5 * (l + r);
        const double fm = f(m);
        if (fm == 0.0) {
          l = r = m;
          break;
        }
        if (fl * fm < 0.0) {
          r = m;
        } else {
          l = m;
          fl = fm;
        }
      }
      roots.push_back(0.5 * (l + r));
    }
    a = b;
    fa = fb;
  }
  if (fa == 0.0) roots.push_back(a);
  return roots;
}

}  // namespace

Nonlinearity Nonlinearity::cubic() {
  return {NonlinearityKind::Cubic, "cubic", [](double u) { return u * u * u - u; },
          [](double u) { return 3.0 * u * u - 1.0; }};
}

Nonlinearity Nonlinearity::expsym() {
  return {NonlinearityKind::ExpSym, "expsym", [](double u) { return -u * std::exp(-u * u); },
          [](double u) { return -std::exp(-u * u) * (1.0 - 2.0 * u * u); }};
}

Nonlinearity Nonlinearity::exppop() {
  return {NonlinearityKind::ExpPop, "exppop", [](double u) { return u * std::exp(-u); },
          [](double u) { return (1.0 - u) * std::exp(-u); }};
}

Nonlinearity Nonlinearity::custom(std::string name, Fn phi, Fn dphi) {
  return {NonlinearityKind::Custom, std::move(name), std::move(phi), std::move(dphi)};
}

Nonlinearity Nonlinearity::from_name(std::string_view name) {
  if (name == "cubic") return cubic();
  if (name == "expsym") return expsym();
  if (name == "exppop") return exppop();
  throw Error(ErrorCode::InvalidConfig, "unknown nonlinearity '" + std::string(name) + "'");
}

double Nonlinearity::operator()(double u) const { return phi_(u); }

double Nonlinearity::deriv(double u) const { return dphi_(u); }

Stability classify(const Nonlinearity& phi, double u) {
  const double d = phi.deriv(u);
  if (d > kMarginalTol) return Stability::Stable;
  if (d < -kMarginalTol) return Stability::Unstable;
  return Stability::Marginal;
}

StabilityInfo stability_info(const Nonlinearity& phi, double u_u, bool require_plateau) {
  const double d = phi.deriv(u_u);
  if (!(d < 0.0)) {
    throw Error(ErrorCode::NotUnstable, "phi'(" + std::to_string(u_u) + ") = " + std::to_string(d) + " >= 0");
  }
  StabilityInfo info;
  info.u_u = u_u;
  info.Phi_u = -d;

  // Critical points of phi bracketing u_u: the nearest local max below and
  // the nearest local min above.
  const auto dphi = [&phi](double u) { return phi.deriv(u); };
  for (double c : scan_roots(dphi)) {
    if (c < u_u) info.u_M = c;
    if (c > u_u && !info.u_m) info.u_m = c;
  }

  if (phi.is_odd() && u_u == 0.0) {
    const double level = phi(u_u);
    const auto shifted = [&phi, level](double u) { return phi(u) - level; };
    for (double r : scan_roots(shifted)) {
      if (classify(phi, r) != Stability::Stable) continue;
      if (r > u_u && !info.u_plus) info.u_plus = r;
      if (r < u_u) info.u_minus = r;
    }
    if (info.u_plus && info.u_minus) {
      info.Phi_s = phi.deriv(*info.u_plus);
    } else {
      info.u_plus.reset();
      info.u_minus.reset();
      if (require_plateau) {
        throw Error(ErrorCode::NoStablePlateau, "no stable u with phi(u) = phi(u_u) for " + phi.name());
      }
    }
  } else if (require_plateau) {
    throw Error(ErrorCode::NoStablePlateau, "plateau values only determined for odd phi about u_u = 0");
  }
  return info;
}

}  // namespace ppf
