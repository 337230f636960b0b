#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace ppf {

enum class NonlinearityKind { Cubic, ExpSym, ExpPop, Custom };

/// Constitutive function phi(u) of u_t = (phi(u) + u_t)_xx together with its
/// derivative. Built-in kinds evaluate closed forms; Custom wraps a callable pair.
class Nonlinearity {
 public:
  using Fn = std::function<double(double)>;

  static Nonlinearity cubic();    // u^3 - u
  static Nonlinearity expsym();   // -u exp(-u^2)
  static Nonlinearity exppop();   // u exp(-u)
  static Nonlinearity custom(std::string name, Fn phi, Fn dphi);

  /// Looks up "cubic" | "expsym" | "exppop"; throws InvalidConfig otherwise.
  static Nonlinearity from_name(std::string_view name);

  double operator()(double u) const;
  double deriv(double u) const;

  NonlinearityKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  bool is_odd() const { return kind_ == NonlinearityKind::Cubic || kind_ == NonlinearityKind::ExpSym; }

 private:
  Nonlinearity(NonlinearityKind kind, std::string name, Fn phi, Fn dphi)
      : kind_(kind), name_(std::move(name)), phi_(std::move(phi)), dphi_(std::move(dphi)) {}

  NonlinearityKind kind_;
  std::string name_;
  Fn phi_;
  Fn dphi_;
};

enum class Stability { Stable, Unstable, Marginal };

inline constexpr double kMarginalTol = 1e-12;

Stability classify(const Nonlinearity& phi, double u);

struct StabilityInfo {
  double u_u = 0.0;
  double Phi_u = 0.0;                 // -phi'(u_u)
  std::optional<double> Phi_s;        // phi'(u_+) = phi'(u_-), symmetric case only
  std::optional<double> u_M;          // local max of phi
  std::optional<double> u_m;          // local min of phi
  std::optional<double> u_plus;
  std::optional<double> u_minus;
};

/// Stability quantities about the unstable state u_u. Throws NotUnstable when
/// phi'(u_u) >= 0. For odd phi with u_u = 0 the stable plateaus phi(u_+-) = phi(0)
/// are located; if none exist (expsym) they are left unset. Use
/// `require_plateau` to turn that case into a NoStablePlateau error.
StabilityInfo stability_info(const Nonlinearity& phi, double u_u, bool require_plateau = false);

}  // namespace ppf
