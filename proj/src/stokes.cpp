#include "ppf/stokes.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <unordered_map>

#include "ppf/error.hpp"

namespace ppf {

const char* to_string(LineKind kind) { return kind == LineKind::Stokes ? "stokes" : "anti-stokes"; }

ContourPair ContourPair::branches(int i, int j) {
  if (i < 1 || i > 4 || j < 1 || j > 4 || i == j) throw Error(ErrorCode::InvalidConfig, "branch indices must be distinct in 1..4");
  return {Type::BranchBranch, i, j, {}};
}

ContourPair ContourPair::data(int i, Complex lambda) {
  if (i < 1 || i > 4) throw Error(ErrorCode::InvalidConfig, "branch index must be in 1..4");
  if (std::abs(1.0 - lambda * lambda) < 1e-12) throw Error(ErrorCode::PoleAtUnitLambda, "lambda^2 = 1");
  return {Type::BranchData, i, 0, lambda};
}

ContourPair ContourPair::null(int i) {
  if (i < 1 || i > 4) throw Error(ErrorCode::InvalidConfig, "branch index must be in 1..4");
  return {Type::BranchNull, i, 0, {}};
}

std::string ContourPair::label() const {
  switch (type) {
    case Type::BranchBranch:
      return "F" + std::to_string(i) + "-F" + std::to_string(j);
    case Type::BranchData: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "F%d-data(%g%+gi)", i, lambda.real(), lambda.imag());
      return buf;
    }
    case Type::BranchNull:
      return "F" + std::to_string(i) + "-null";
  }
  return {};
}

namespace {

using Roots = std::array<Complex, 4>;

// Exponent on a labelled branch; the saddle form avoids the pole of F(p).
Complex branch_exponent(const Roots& p, int k, Complex xi) {
  const Complex pk = p[k - 1];
  return pk * (1.0 + pk * pk) * xi / 2.0;
}

double discriminant(const Roots& p, Complex xi, LineKind kind, const ContourPair& pair, double Phi_u) {
  Complex d = branch_exponent(p, pair.i, xi);
  switch (pair.type) {
    case ContourPair::Type::BranchBranch:
      d -= branch_exponent(p, pair.j, xi);
      break;
    case ContourPair::Type::BranchData:
      d -= data_exponent(pair.lambda, xi, Phi_u);
      break;
    case ContourPair::Type::BranchNull:
      break;
  }
  return kind == LineKind::Stokes ? d.imag() : d.real();
}

bool on_cut(Complex xi, double Phi_u) {
  return std::abs(xi.real()) < 1e-9 && std::abs(xi.imag()) < kBranchCutHalfLength * Phi_u + 1e-9;
}

Roots roots_near(const Roots& guess, Complex xi, double Phi_u) {
  if (auto r = continue_branches(guess, xi, Phi_u)) return *r;
  return saddle_branches(xi, Phi_u).p;
}

// One half-plane of the trace: nodes at cell centres of [re0, re1] x [im0, im1].
class HalfTrace {
 public:
  HalfTrace(LineKind kind, const ContourPair& pair, double re0, double re1, double im0, double im1, double res,
            double Phi_u)
      : kind_(kind), pair_(pair), re0_(re0), im0_(im0), res_(res), Phi_u_(Phi_u) {
    cols_ = static_cast<int>(std::floor((re1 - re0) / res + 1e-9));
    rows_ = static_cast<int>(std::floor((im1 - im0) / res + 1e-9));
  }

  std::vector<Polyline> run(double seam_re, bool has_seam) {
    if (cols_ < 2 || rows_ < 2) return {};
    fill();
    march();
    return assemble(seam_re, has_seam);
  }

 private:
  Complex node(int c, int r) const { return {re0_ + (c + 0.5) * res_, im0_ + (r + 0.5) * res_}; }
  std::size_t idx(int c, int r) const { return static_cast<std::size_t>(r) * cols_ + c; }
  bool excluded(Complex xi) const { return std::abs(xi) < res_; }

  void fill() {
    roots_.assign(static_cast<std::size_t>(cols_) * rows_, Roots{});
    value_.assign(roots_.size(), std::numeric_limits<double>::quiet_NaN());
    std::optional<Roots> row_start;
    for (int r = 0; r < rows_; ++r) {
      std::optional<Roots> prev = row_start;
      for (int c = 0; c < cols_; ++c) {
        const Complex xi = node(c, r);
        if (excluded(xi)) {
          prev.reset();
          continue;
        }
        Roots p = prev ? roots_near(*prev, xi, Phi_u_) : saddle_branches(xi, Phi_u_).p;
        roots_[idx(c, r)] = p;
        value_[idx(c, r)] = discriminant(p, xi, kind_, pair_, Phi_u_);
        if (c == 0) row_start = p;
        prev = p;
      }
      if (excluded(node(0, r))) row_start.reset();
    }
  }

  double field_from(const Roots& guess, Complex xi) const {
    return discriminant(roots_near(guess, xi, Phi_u_), xi, kind_, pair_, Phi_u_);
  }

  // Edge ids: 2*idx(c, r) is the edge to (c+1, r); 2*idx(c, r)+1 the edge to (c, r+1).
  Complex vertex(long edge) {
    if (auto it = vertex_.find(edge); it != vertex_.end()) return it->second;
    const auto base = static_cast<std::size_t>(edge / 2);
    const int c = static_cast<int>(base % cols_);
    const int r = static_cast<int>(base / cols_);
    const bool horizontal = (edge % 2) == 0;
    const int c2 = horizontal ? c + 1 : c;
    const int r2 = horizontal ? r : r + 1;
    const Complex a = node(c, r), b = node(c2, r2);
    const Roots& guess = roots_[idx(c, r)];
    double fa = value_[idx(c, r)];
    double lo = 0.0, hi = 1.0;
    while ((hi - lo) * res_ > 1e-8) {
      const double mid = 0.5 * (lo + hi);
      const double fm = field_from(guess, a + mid * (b - a));
      if ((fm > 0.0) == (fa > 0.0)) {
        lo = mid;
        fa = fm;
      } else {
        hi = mid;
      }
    }
    const Complex v = a + 0.5 * (lo + hi) * (b - a);
    vertex_.emplace(edge, v);
    return v;
  }

  void link(long e1, long e2) {
    adj_[e1].push_back(e2);
    adj_[e2].push_back(e1);
  }

  void march() {
    for (int r = 0; r + 1 < rows_; ++r) {
      for (int c = 0; c + 1 < cols_; ++c) {
        const double v[4] = {value_[idx(c, r)], value_[idx(c + 1, r)], value_[idx(c + 1, r + 1)],
                             value_[idx(c, r + 1)]};
        if (std::isnan(v[0]) || std::isnan(v[1]) || std::isnan(v[2]) || std::isnan(v[3])) continue;
        const bool s[4] = {v[0] > 0.0, v[1] > 0.0, v[2] > 0.0, v[3] > 0.0};
        const long e[4] = {2L * static_cast<long>(idx(c, r)), 2L * static_cast<long>(idx(c + 1, r)) + 1,
                           2L * static_cast<long>(idx(c, r + 1)), 2L * static_cast<long>(idx(c, r)) + 1};
        std::vector<int> cut;
        for (int k = 0; k < 4; ++k)
          if (s[k] != s[(k + 1) % 4]) cut.push_back(k);
        if (cut.size() == 2) {
          link(e[cut[0]], e[cut[1]]);
        } else if (cut.size() == 4) {
          const bool centre = 0.25 * (v[0] + v[1] + v[2] + v[3]) > 0.0;
          if (centre == s[0]) {
            link(e[0], e[1]);
            link(e[2], e[3]);
          } else {
            link(e[3], e[0]);
            link(e[1], e[2]);
          }
        }
      }
    }
  }

  std::vector<Polyline> assemble(double seam_re, bool has_seam) {
    std::vector<Polyline> out;
    std::unordered_map<long, bool> visited;
    auto walk = [&](long start) {
      Polyline line;
      long prev = -1, cur = start;
      while (true) {
        visited[cur] = true;
        line.vertices.push_back(vertex(cur));
        long next = -1;
        for (long n : adj_[cur]) {
          if (n != prev && !visited[n]) {
            next = n;
            break;
          }
        }
        if (next < 0) {
          for (long n : adj_[cur])
            if (n == start && n != prev && line.vertices.size() > 2) line.closed = true;
          break;
        }
        prev = cur;
        cur = next;
      }
      if (line.closed) line.vertices.push_back(line.vertices.front());
      if (has_seam && !line.closed) {
        const double margin = 2.0 * res_ + 1e-12;
        line.seam_truncated = std::abs(line.vertices.front().real() - seam_re) < margin ||
                              std::abs(line.vertices.back().real() - seam_re) < margin;
      }
      if (line.vertices.size() >= 2) out.push_back(std::move(line));
    };
    std::vector<long> ends, all;
    for (const auto& [edge, nbrs] : adj_) {
      all.push_back(edge);
      if (nbrs.size() == 1) ends.push_back(edge);
    }
    std::sort(ends.begin(), ends.end());
    std::sort(all.begin(), all.end());
    for (long e : ends)
      if (!visited[e]) walk(e);
    for (long e : all)
      if (!visited[e]) walk(e);
    return out;
  }

  LineKind kind_;
  ContourPair pair_;
  double re0_, im0_, res_, Phi_u_;
  int cols_ = 0, rows_ = 0;
  std::vector<Roots> roots_;
  std::vector<double> value_;
  std::unordered_map<long, Complex> vertex_;
  std::unordered_map<long, std::vector<long>> adj_;
};

}  // namespace

double stokes_field(Complex xi, LineKind kind, const ContourPair& pair, double Phi_u) {
  if (on_cut(xi, Phi_u)) throw Error(ErrorCode::OnBranchCut, "xi lies on the branch cut");
  return discriminant(saddle_branches(xi, Phi_u).p, xi, kind, pair, Phi_u);
}

ContourSet trace_contours(LineKind kind, const ContourPair& pair, const StokesWindow& window, double resolution,
                          double Phi_u) {
  if (!(resolution > 0.0) || window.re_max <= window.re_min || window.im_max <= window.im_min)
    throw Error(ErrorCode::InvalidConfig, "empty window or non-positive resolution");
  ContourSet set{kind, pair, {}, window, resolution, Phi_u};
  auto add = [&](double re0, double re1, double seam_re, bool has_seam) {
    if (re1 - re0 < 2.0 * resolution) return;
    HalfTrace half(kind, pair, re0, re1, window.im_min, window.im_max, resolution, Phi_u);
    auto lines = half.run(seam_re, has_seam);
    set.polylines.insert(set.polylines.end(), std::make_move_iterator(lines.begin()),
                         std::make_move_iterator(lines.end()));
  };
  if (window.re_min >= 0.0) {
    add(std::max(window.re_min, resolution), window.re_max, 0.0, window.re_min < resolution);
  } else if (window.re_max <= 0.0) {
    add(window.re_min, std::min(window.re_max, -resolution), 0.0, window.re_max > -resolution);
  } else {
    add(window.re_min, -resolution, 0.0, true);
    add(resolution, window.re_max, 0.0, true);
  }
  if (set.polylines.empty()) throw Error(ErrorCode::EmptyContour, "no sign change of the discriminant in the window");
  return set;
}

std::vector<BranchPointInfo> branch_points(double Phi_u) {
  const double p = 1.0 / std::sqrt(3.0);
  const double xi = kBranchCutHalfLength * Phi_u;
  return {{Complex(0.0, p), Complex(0.0, -xi)}, {Complex(0.0, -p), Complex(0.0, xi)}};
}

namespace {

std::optional<Complex> segment_intersection(Complex a, Complex b, Complex c, Complex d) {
  const Complex r = b - a, s = d - c;
  const double denom = r.real() * s.imag() - r.imag() * s.real();
  if (denom == 0.0) return std::nullopt;
  const Complex q = c - a;
  const double t = (q.real() * s.imag() - q.imag() * s.real()) / denom;
  const double u = (q.real() * r.imag() - q.imag() * r.real()) / denom;
  if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) return std::nullopt;
  return a + t * r;
}

}  // namespace

std::vector<TracedTurningPoint> find_turning_points(const ContourSet& stokes, const ContourSet& anti_stokes) {
  const ContourPair& pair = stokes.pair;
  if (pair.type != ContourPair::Type::BranchData || anti_stokes.pair.type != ContourPair::Type::BranchData ||
      anti_stokes.pair.i != pair.i || anti_stokes.pair.lambda != pair.lambda)
    throw Error(ErrorCode::InvalidConfig, "turning points need matching branch/data pairs");
  const double Phi_u = stokes.Phi_u;
  const double cell = 4.0 * std::max(stokes.resolution, anti_stokes.resolution);

  struct Seg {
    Complex a, b;
  };
  auto key = [&](Complex z) {
    const long kx = static_cast<long>(std::floor(z.real() / cell));
    const long ky = static_cast<long>(std::floor(z.imag() / cell));
    return (kx << 32) ^ (ky & 0xffffffffL);
  };
  std::unordered_map<long, std::vector<Seg>> buckets;
  for (const auto& line : anti_stokes.polylines)
    for (std::size_t k = 0; k + 1 < line.vertices.size(); ++k) {
      const Seg s{line.vertices[k], line.vertices[k + 1]};
      buckets[key(s.a)].push_back(s);
      if (key(s.b) != key(s.a)) buckets[key(s.b)].push_back(s);
    }

  std::vector<Complex> seeds;
  for (const auto& line : stokes.polylines)
    for (std::size_t k = 0; k + 1 < line.vertices.size(); ++k) {
      const Complex a = line.vertices[k], b = line.vertices[k + 1];
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy) {
          const auto it = buckets.find(key(a + Complex(dx * cell, dy * cell)));
          if (it == buckets.end()) continue;
          for (const Seg& s : it->second)
            if (auto x = segment_intersection(a, b, s.a, s.b)) seeds.push_back(*x);
        }
    }

  std::vector<TracedTurningPoint> out;
  for (Complex xi : seeds) {
    const Complex start = xi;
    bool ok = false;
    SaddleBranchSet set;
    for (int it = 0; it < 40; ++it) {
      set = saddle_branches(xi, Phi_u);
      const Complex pk = set.p[pair.i - 1];
      const Complex g = pk * (1.0 + pk * pk) * xi / 2.0 - data_exponent(pair.lambda, xi, Phi_u);
      const Complex step = g / (pk - pair.lambda);
      xi -= step;
      if (!std::isfinite(xi.real()) || !std::isfinite(xi.imag())) break;
      if (std::abs(step) < 1e-14 * (1.0 + std::abs(xi))) {
        ok = true;
        break;
      }
    }
    if (!ok || std::abs(xi - start) > 10.0 * cell) continue;
    set = saddle_branches(xi, Phi_u);
    const Complex pk = set.p[pair.i - 1];
    const double residual =
        std::abs(pk * (1.0 + pk * pk) * xi / 2.0 - data_exponent(pair.lambda, xi, Phi_u));
    const bool dup = std::any_of(out.begin(), out.end(), [&](const auto& t) { return std::abs(t.xi - xi) < 1e-6; });
    if (!dup) out.push_back({xi, pk, residual, std::abs(pk - pair.lambda) < 1e-6});
  }
  return out;
}

Lambda1Lines lambda1_lines(int sigma, double rho_max, int samples) {
  if (sigma != 1 && sigma != -1) throw Error(ErrorCode::InvalidConfig, "sigma must be +1 or -1");
  if (!(rho_max > 0.5)) throw Error(ErrorCode::InvalidConfig, "rho_max must exceed 1/2");
  if (samples < 2) throw Error(ErrorCode::InvalidConfig, "need at least two samples");
  Lambda1Lines out;
  out.sigma = sigma;
  const double s = sigma;

  for (int k = 0; k < samples; ++k) {
    const double rho = 0.5 + (rho_max - 0.5) * k / (samples - 1);
    const double theta = 2.0 * std::asin(std::clamp(s / std::sqrt(2.0 * rho), -1.0, 1.0));
    out.stokes.push_back(std::polar(rho, theta));
  }

  // Two roots in theta per rho; sin(theta/2) is monotone on [-pi, pi] so the
  // roots are ordered and can be bracketed by a sign scan.
  std::vector<Complex> lower, upper;
  boost::math::tools::eps_tolerance<double> tol(50);
  for (int k = 0; k < samples; ++k) {
    const double rho = 0.25 + (rho_max - 0.25) * std::pow(static_cast<double>(k) / (samples - 1), 2);
    auto h = [&](double th) { return rho * std::cos(th) - 0.5 + s * std::sqrt(2.0 * rho) * std::sin(th / 2.0); };
    std::vector<double> roots;
    constexpr int kScan = 256;
    double a = -std::numbers::pi, fa = h(a);
    for (int i = 1; i <= kScan; ++i) {
      const double b = -std::numbers::pi + 2.0 * std::numbers::pi * i / kScan;
      const double fb = h(b);
      if (fa == 0.0) {
        roots.push_back(a);
      } else if (fa * fb < 0.0) {
        std::uintmax_t iters = 100;
        const auto br = boost::math::tools::toms748_solve(h, a, b, fa, fb, tol, iters);
        roots.push_back(0.5 * (br.first + br.second));
      }
      a = b;
      fa = fb;
    }
    if (roots.size() >= 2) {
      lower.push_back(std::polar(rho, roots.front()));
      upper.push_back(std::polar(rho, roots.back()));
    } else if (roots.size() == 1) {
      lower.push_back(std::polar(rho, roots.front()));
      upper.push_back(std::polar(rho, roots.front()));
    }
  }
  out.anti_stokes.assign(lower.rbegin(), lower.rend());
  out.anti_stokes.insert(out.anti_stokes.end(), upper.begin(), upper.end());
  return out;
}

}  // namespace ppf
