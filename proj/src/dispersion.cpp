#include "ppf/dispersion.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "ppf/error.hpp"

namespace ppf {

namespace {

using Roots = std::array<Complex, 4>;

// Monic form of the saddle quartic in the scaled variable s = xi / Phi_u:
// p^4 - 2p^2 + (2/s) p + 1 = 0.
Complex quartic(Complex p, Complex s) { return ((p * p - 2.0) * p + 2.0 / s) * p + 1.0; }
Complex quartic_deriv(Complex p, Complex s) { return (4.0 * p * p - 4.0) * p + 2.0 / s; }

Complex newton_polish(Complex p, Complex s, int max_iter = 50) {
  for (int it = 0; it < max_iter; ++it) {
    const Complex d = quartic_deriv(p, s);
    if (std::abs(d) == 0.0) break;
    const Complex step = quartic(p, s) / d;
    p -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(p))) break;
  }
  return p;
}

Roots companion_roots(Complex s) {
  Eigen::Matrix4cd companion = Eigen::Matrix4cd::Zero();
  // Coefficients of p^0..p^3 of the monic quartic.
  const std::array<Complex, 4> a{1.0, 2.0 / s, -2.0, 0.0};
  for (int i = 1; i < 4; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < 4; ++i) companion(i, 3) = -a[i];
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(companion, false);
  Roots roots;
  for (int i = 0; i < 4; ++i) roots[i] = newton_polish(solver.eigenvalues()[i], s);
  return roots;
}

double min_separation(const Roots& r) {
  double d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) d = std::min(d, std::abs(r[i] - r[j]));
  return d;
}

// Assigns each previous root to a distinct new root when every match is
// unambiguous (nearest distance well below the runner-up).
std::optional<Roots> match_roots(const Roots& prev, const Roots& next) {
  Roots out;
  std::array<bool, 4> used{};
  for (int i = 0; i < 4; ++i) {
    int best = -1;
    double d1 = std::numeric_limits<double>::infinity();
    double d2 = d1;
    for (int j = 0; j < 4; ++j) {
      const double d = std::abs(prev[i] - next[j]);
      if (d < d1) {
        d2 = d1;
        d1 = d;
        best = j;
      } else if (d < d2) {
        d2 = d;
      }
    }
    if (used[best] || d1 > 0.3 * d2) return std::nullopt;
    used[best] = true;
    out[i] = next[best];
  }
  return out;
}

// Labelled roots at the reference point s = 1: two real roots p_1 in (-1, 0)
// and p_4 < -1, a conjugate pair p_2 (Im < 0) and p_3 (Im > 0).
const Roots& reference_roots() {
  static const Roots ref = [] {
    Roots r = companion_roots(Complex(1.0, 0.0));
    std::sort(r.begin(), r.end(), [](Complex a, Complex b) { return a.imag() < b.imag(); });
    // r[0] lower complex, r[3] upper complex, r[1..2] real.
    Complex real_a = Complex(r[1].real(), 0.0);
    Complex real_b = Complex(r[2].real(), 0.0);
    if (real_a.real() < real_b.real()) std::swap(real_a, real_b);
    return Roots{real_a, r[0], r[3], real_b};
  }();
  return ref;
}

Roots continue_along(Roots roots, Complex from, Complex to) {
  double tau = 0.0;
  double dtau = std::min(1.0, 0.05 / std::max(std::abs(to - from), 1e-300));
  while (tau < 1.0) {
    const double next_tau = std::min(1.0, tau + dtau);
    const Complex s = from + next_tau * (to - from);
    std::optional<Roots> matched = match_roots(roots, companion_roots(s));
    if (!matched) {
      dtau *= 0.5;
      if (dtau < 1e-12) {
        throw Error(ErrorCode::BranchJump, "root labels lost near xi/Phi_u = " + std::to_string(s.real()) + " + " +
                                               std::to_string(s.imag()) + "i");
      }
      continue;
    }
    roots = *matched;
    tau = next_tau;
    dtau = std::min(2.0 * dtau, 0.25);
  }
  return roots;
}

}  // namespace

std::array<Complex, 4> saddle_roots(Complex xi, double Phi_u) {
  if (std::abs(xi) < 1e-14) throw Error(ErrorCode::DegenerateXi, "|xi| < 1e-14");
  return companion_roots(xi / Phi_u);
}

SaddleBranchSet saddle_branches(Complex xi, double Phi_u) {
  if (std::abs(xi) < 1e-14) throw Error(ErrorCode::DegenerateXi, "|xi| < 1e-14");
  const Complex s = xi / Phi_u;
  Roots p;
  if (s.real() >= 0.0) {
    p = continue_along(reference_roots(), Complex(1.0, 0.0), s);
  } else {
    p = continue_along(reference_roots(), Complex(1.0, 0.0), -s);
    for (auto& r : p) r = -r;
  }
  SaddleBranchSet set{xi, p, {}};
  for (int j = 0; j < 4; ++j) set.F[j] = F_of_p(p[j], Phi_u);
  return set;
}

std::optional<std::array<Complex, 4>> continue_branches(const std::array<Complex, 4>& guess, Complex xi,
                                                        double Phi_u) {
  if (std::abs(xi) < 1e-14) return std::nullopt;
  const Complex s = xi / Phi_u;
  Roots out;
  for (int i = 0; i < 4; ++i) {
    out[i] = newton_polish(guess[i], s, 30);
    if (!std::isfinite(out[i].real()) || !std::isfinite(out[i].imag())) return std::nullopt;
    if (std::abs(quartic(out[i], s)) > 1e-9 * (1.0 + std::pow(std::abs(out[i]), 4))) return std::nullopt;
  }
  const double sep = min_separation(out);
  const double guess_sep = min_separation(guess);
  for (int i = 0; i < 4; ++i) {
    if (std::abs(out[i] - guess[i]) > 0.25 * std::min(sep, guess_sep)) return std::nullopt;
  }
  return out;
}

Complex F_of_p(Complex p, double Phi_u) {
  const Complex q = 1.0 - p * p;
  if (std::abs(q) < 1e-12) throw Error(ErrorCode::PoleAtUnitP, "|1 - p^2| < 1e-12");
  const Complex p2 = p * p;
  return -Phi_u * (2.0 * p2 / (q * q) - p2 / q);
}

Complex xi_of_p(Complex p, double Phi_u) {
  const Complex q = 1.0 - p * p;
  if (std::abs(q) < 1e-12) throw Error(ErrorCode::PoleAtUnitP, "|1 - p^2| < 1e-12");
  return -Phi_u * 2.0 * p / (q * q);
}

Complex data_exponent(Complex lambda, Complex xi, double Phi_u) {
  return lambda * xi + Phi_u * lambda * lambda / (1.0 - lambda * lambda);
}

namespace {

// Real system for the critical saddle: xi(p) real and Re F(p) = 0, written
// without the Phi_u factor (p* does not depend on it).
std::array<double, 2> speed_equations(double pr, double pi) {
  const Complex p(pr, pi);
  const Complex q = 1.0 - p * p;
  const Complex a = 2.0 * p / (q * q);
  const Complex b = p * p / q;
  return {p.real() * a.real() - b.real(), (-a).imag()};
}

}  // namespace

FrontPrediction critical_front(double Phi_u) {
  if (!(Phi_u > 0.0)) throw Error(ErrorCode::NewtonDivergence, "Phi_u must be positive");

  double pr = 1.0, pi = 0.8;
  auto r = speed_equations(pr, pi);
  double norm = std::hypot(r[0], r[1]);
  int it = 0;
  for (; it < 100 && norm > 1e-15; ++it) {
    constexpr double h = 1e-7;
    const auto rxp = speed_equations(pr + h, pi), rxm = speed_equations(pr - h, pi);
    const auto ryp = speed_equations(pr, pi + h), rym = speed_equations(pr, pi - h);
    const double j11 = (rxp[0] - rxm[0]) / (2 * h), j12 = (ryp[0] - rym[0]) / (2 * h);
    const double j21 = (rxp[1] - rxm[1]) / (2 * h), j22 = (ryp[1] - rym[1]) / (2 * h);
    const double det = j11 * j22 - j12 * j21;
    if (det == 0.0) break;
    const double dx = (r[0] * j22 - r[1] * j12) / det;
    const double dy = (j11 * r[1] - j21 * r[0]) / det;
    double damp = 1.0;
    bool improved = false;
    for (int k = 0; k < 30; ++k, damp *= 0.5) {
      const auto trial = speed_equations(pr - damp * dx, pi - damp * dy);
      const double tn = std::hypot(trial[0], trial[1]);
      if (tn < norm) {
        pr -= damp * dx;
        pi -= damp * dy;
        r = trial;
        norm = tn;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (!(norm < 1e-10)) {
    throw Error(ErrorCode::NewtonDivergence, "saddle residual " + std::to_string(norm) + " after " +
                                                 std::to_string(it) + " iterations");
  }

  FrontPrediction fp;
  fp.Phi_u = Phi_u;
  fp.newton_iterations = it;
  fp.p_star = Complex(std::abs(pr), std::abs(pi));
  fp.xi_star = xi_of_p(fp.p_star, Phi_u).real();
  fp.lambda_star = fp.p_star.real();
  fp.F_star = F_of_p(fp.p_star, Phi_u);
  fp.T = 2.0 * std::numbers::pi / std::abs(fp.F_star.imag());
  fp.X = fp.xi_star * fp.T;
  fp.nu = 3.0 / (2.0 * fp.lambda_star);
  const RepeatedRoot rr{fp.xi_star, -Phi_u * fp.p_star * fp.p_star / (1.0 - fp.p_star * fp.p_star) -
                                         fp.xi_star * fp.p_star,
                        fp.p_star, {}};
  fp.D = (-Phi_u + rr.mu + 3.0 * rr.c * rr.lambda) / (1.0 - rr.lambda * rr.lambda);

  // Second route: Re F_3(xi) = 0 on the positive real axis (F_3 -> -Phi_u as
  // xi -> 0+, grows like xi for large xi).
  double lo = 0.05 * Phi_u, hi = 5.0 * Phi_u;
  auto re_f3 = [Phi_u](double xi) { return saddle_branches(Complex(xi, 0.0), Phi_u).F[2].real(); };
  double flo = re_f3(lo);
  while (hi - lo > 1e-13 * Phi_u) {
    const double mid = 0.5 * (lo + hi);
    const double fm = re_f3(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  fp.xi_star_bisection = 0.5 * (lo + hi);
  if (std::abs(fp.xi_star_bisection - fp.xi_star) > 1e-6 * std::max(1.0, Phi_u)) {
    throw Error(ErrorCode::NewtonDivergence, "Newton xi* " + std::to_string(fp.xi_star) +
                                                 " disagrees with bisection " +
                                                 std::to_string(fp.xi_star_bisection));
  }
  return fp;
}

namespace {

RepeatedRoot repeated_root_from(double c, Complex lambda, double Phi_u) {
  RepeatedRoot rr;
  rr.c = c;
  rr.lambda = lambda;
  const Complex q = 1.0 - lambda * lambda;
  rr.mu = -Phi_u * lambda * lambda / q - c * lambda;
  rr.D = (-Phi_u + rr.mu + 3.0 * c * lambda) / q;
  return rr;
}

Complex track_repeated_root(double c_from, Complex lambda, double c_to, double Phi_u) {
  // Geometric steps in c; roots behave like powers of c at both ends.
  double log_c = std::log(c_from);
  const double log_target = std::log(c_to);
  double h = 0.02;
  while (log_c != log_target) {
    const double step = std::copysign(std::min(h, std::abs(log_target - log_c)), log_target - log_c);
    const double c_next = std::exp(log_c + step);
    const Complex s(c_next / Phi_u, 0.0);
    const Complex cand = newton_polish(lambda, s);
    // The polished root must also be the companion root nearest the predictor.
    const Roots all = companion_roots(s);
    const auto nearest = *std::min_element(all.begin(), all.end(), [&](Complex a, Complex b) {
      return std::abs(a - lambda) < std::abs(b - lambda);
    });
    const bool ok = std::abs(cand - nearest) < 1e-8 * (1.0 + std::abs(nearest)) &&
                    std::abs(cand - lambda) <= 0.5;
    if (!ok) {
      h *= 0.5;
      if (h < 1e-10) {
        throw Error(ErrorCode::BranchJump, "lost repeated-root branch near c = " + std::to_string(c_next));
      }
      continue;
    }
    lambda = cand;
    log_c = (std::abs(log_c + step - log_target) < 1e-15) ? log_target : log_c + step;
    h = std::min(2.0 * h, 0.05);
  }
  return lambda;
}

}  // namespace

RepeatedRoot repeated_root_system(double c, double Phi_u) {
  if (c == 0.0) throw Error(ErrorCode::BranchJump, "c = 0 has no finite repeated root branch");
  static std::mutex mu;
  static std::map<double, FrontPrediction> cache;
  FrontPrediction fp;
  {
    std::lock_guard lock(mu);
    auto it = cache.find(Phi_u);
    if (it == cache.end()) it = cache.emplace(Phi_u, critical_front(Phi_u)).first;
    fp = it->second;
  }
  const double c_abs = std::abs(c);
  Complex lambda = track_repeated_root(fp.xi_star, fp.p_star, c_abs, Phi_u);
  if (c < 0.0) lambda = -lambda;
  return repeated_root_from(c, lambda, Phi_u);
}

std::vector<RepeatedRoot> repeated_root_curve(std::span<const double> cs, double Phi_u) {
  std::vector<RepeatedRoot> out;
  out.reserve(cs.size());
  for (double c : cs) out.push_back(repeated_root_system(c, Phi_u));
  return out;
}

double xi_f(Complex lambda, double Phi_u) {
  if (!(lambda.real() > 0.0)) throw Error(ErrorCode::NonDecaying, "Re(lambda) <= 0");
  const Complex l2 = lambda * lambda;
  if (std::abs(l2 - 1.0) < 1e-12) throw Error(ErrorCode::PoleAtUnitLambda, "|lambda^2 - 1| < 1e-12");
  return Phi_u * (l2 / (l2 - 1.0)).real() / lambda.real();
}

ModulationPeriods modulation_periods(Complex lambda, double Phi_u) {
  const double speed = xi_f(lambda, Phi_u);
  const Complex v = speed * lambda + Phi_u * lambda * lambda / (1.0 - lambda * lambda);
  if (std::abs(v.imag()) < 1e-12) throw Error(ErrorCode::NoOscillation, "Im of modulation exponent vanishes");
  ModulationPeriods mp;
  mp.T_f = 2.0 * std::numbers::pi / std::abs(v.imag());
  mp.X_f = speed * mp.T_f;
  return mp;
}

const char* to_string(LambdaRegion region) {
  switch (region) {
    case LambdaRegion::OmegaR: return "OmegaR";
    case LambdaRegion::OmegaL1: return "OmegaL1";
    case LambdaRegion::OmegaL2: return "OmegaL2";
    case LambdaRegion::Outside: return "Outside";
  }
  return "Outside";
}

LambdaMap::LambdaMap(double Phi_u, LambdaWindow window)
    : Phi_u_(Phi_u), xi_star_(critical_front(Phi_u).xi_star), window_(window) {
  if (!(window.resolution > 0.0) || !(window.re_max > 0.0) || !(window.im_max > 0.0)) {
    throw Error(ErrorCode::InvalidConfig, "lambda window needs positive extent and resolution");
  }
  cols_ = static_cast<int>(std::lround(window.re_max / window.resolution));
  rows_ = static_cast<int>(std::lround(2.0 * window.im_max / window.resolution)) + 1;
  const std::size_t n = static_cast<std::size_t>(cols_) * rows_;
  xi_f_.assign(n, std::numeric_limits<double>::quiet_NaN());
  component_.assign(n, -1);
  boundary_.assign(n, 0);

  std::vector<unsigned char> above(n, 0);
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      const std::size_t k = index(c, r);
      try {
        xi_f_[k] = xi_f(node(c, r), Phi_u_);
      } catch (const Error&) {
        // pole at lambda = 1 stays NaN
      }
      above[k] = xi_f_[k] > xi_star_ ? 1 : 0;
    }
  }
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      const std::size_t k = index(c, r);
      bool edge = std::isnan(xi_f_[k]);
      const int nb[4][2] = {{c - 1, r}, {c + 1, r}, {c, r - 1}, {c, r + 1}};
      for (const auto& q : nb) {
        if (q[0] < 0 || q[0] >= cols_ || q[1] < 0 || q[1] >= rows_) continue;
        const std::size_t m = index(q[0], q[1]);
        if (above[m] != above[k] || std::isnan(xi_f_[m])) edge = true;
      }
      boundary_[k] = edge ? 1 : 0;
    }
  }

  int next = 0;
  std::deque<std::pair<int, int>> queue;
  for (int r = 0; r < rows_; ++r) {
    for (int c = 0; c < cols_; ++c) {
      const std::size_t k = index(c, r);
      if (!above[k] || boundary_[k] || component_[k] >= 0) continue;
      component_[k] = next;
      queue.emplace_back(c, r);
      while (!queue.empty()) {
        const auto [qc, qr] = queue.front();
        queue.pop_front();
        const int nb[4][2] = {{qc - 1, qr}, {qc + 1, qr}, {qc, qr - 1}, {qc, qr + 1}};
        for (const auto& q : nb) {
          if (q[0] < 0 || q[0] >= cols_ || q[1] < 0 || q[1] >= rows_) continue;
          const std::size_t m = index(q[0], q[1]);
          if (!above[m] || boundary_[m] || component_[m] >= 0) continue;
          component_[m] = next;
          queue.emplace_back(q[0], q[1]);
        }
      }
      ++next;
    }
  }
  component_count_ = next;

  const std::array<Complex, 3> seeds{Complex(1.5, 0.0), Complex(0.5, 2.0), Complex(0.5, -2.0)};
  for (int s = 0; s < 3; ++s) {
    const int c = static_cast<int>(std::lround(seeds[s].real() / window_.resolution)) - 1;
    const int r = static_cast<int>(std::lround((seeds[s].imag() + window_.im_max) / window_.resolution));
    if (c >= 0 && c < cols_ && r >= 0 && r < rows_) seed_component_[s] = component_[index(c, r)];
  }
}

Complex LambdaMap::node(int col, int row) const {
  return {(col + 1) * window_.resolution, -window_.im_max + row * window_.resolution};
}

LambdaRegion LambdaMap::region_at(int col, int row) const {
  const std::size_t k = index(col, row);
  if (boundary_[k] || component_[k] < 0) return LambdaRegion::Outside;
  if (component_[k] == seed_component_[0]) return LambdaRegion::OmegaR;
  if (component_[k] == seed_component_[1]) return LambdaRegion::OmegaL1;
  if (component_[k] == seed_component_[2]) return LambdaRegion::OmegaL2;
  return LambdaRegion::Outside;
}

LambdaClassification LambdaMap::classify(Complex lambda) const {
  const double res = window_.resolution;
  if (!(lambda.real() > 0.5 * res) || lambda.real() > window_.re_max + 0.5 * res ||
      std::abs(lambda.imag()) > window_.im_max + 0.5 * res) {
    throw Error(ErrorCode::WindowExceeded, "lambda outside the classification window");
  }
  const int c = std::clamp(static_cast<int>(std::lround(lambda.real() / res)) - 1, 0, cols_ - 1);
  const int r = std::clamp(static_cast<int>(std::lround((lambda.imag() + window_.im_max) / res)), 0, rows_ - 1);

  LambdaClassification out;
  out.lambda = lambda;
  out.xi_f = xi_f(lambda, Phi_u_);
  out.boundary = boundary_at(c, r);
  out.region = region_at(c, r);
  if (out.region == LambdaRegion::OmegaL1 || out.region == LambdaRegion::OmegaL2) {
    out.selected_speed = out.xi_f;
    const auto mp = modulation_periods(lambda, Phi_u_);
    out.T_f = mp.T_f;
    out.X_f = mp.X_f;
  } else {
    out.selected_speed = xi_star_;
  }
  return out;
}

std::optional<double> LambdaMap::max_re_in_region(LambdaRegion region, double im) const {
  const int r = static_cast<int>(std::lround((im + window_.im_max) / window_.resolution));
  if (r < 0 || r >= rows_) return std::nullopt;
  const double beta = node(0, r).imag();
  for (int c = cols_ - 1; c >= 0; --c) {
    if (region_at(c, r) != region) continue;
    // The xi_f = xi* crossing lies between this interior cell and the first
    // cell to its right that is not above the threshold.
    double lo = node(c, r).real();
    double hi = lo;
    for (int k = c + 1; k < cols_; ++k) {
      hi = node(k, r).real();
      if (!(xi_f_at(k, r) > xi_star_)) break;
    }
    auto g = [&](double a) { return xi_f(Complex(a, beta), Phi_u_) - xi_star_; };
    if (g(hi) > 0.0) return hi;
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      (g(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
  return std::nullopt;
}

LambdaClassification classify_lambda(Complex lambda, double Phi_u) {
  static std::mutex mu;
  static std::map<double, std::shared_ptr<const LambdaMap>> maps;
  std::shared_ptr<const LambdaMap> map;
  {
    std::lock_guard lock(mu);
    auto it = maps.find(Phi_u);
    if (it == maps.end()) it = maps.emplace(Phi_u, std::make_shared<const LambdaMap>(Phi_u)).first;
    map = it->second;
  }
  return map->classify(lambda);
}

std::vector<TurningPoint> turning_points(Complex lambda, double Phi_u) {
  const Complex root = std::sqrt(lambda * lambda - 1.0);
  std::vector<TurningPoint> out;
  for (const Complex p : {-lambda + root, -lambda - root}) {
    TurningPoint tp{p, {}};
    if (std::abs(1.0 - p * p) < 1e-12) {
      tp.xi = Complex(std::numeric_limits<double>::infinity(), 0.0);
    } else {
      tp.xi = xi_of_p(p, Phi_u);
    }
    out.push_back(tp);
  }
  return out;
}

double fisher_xi_f(Complex lambda) { return (lambda * lambda + 1.0).real() / lambda.real(); }

}  // namespace ppf
