#include "matprod/stieltjes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include "matprod/limitlaw.hpp"

namespace matprod {

namespace {

// Unknowns are y and q = y (w - alpha). In these variables both equations are
// polynomial and stay well conditioned when w - alpha ~ -1/y blows up:
//   G1 = 1 + P + s P^{m-1} y^2,  P = alpha y + q = w y,  s = (-1)^{m+1}
//   G2 = q^2 + q - |z|^2 y^2     (the second equation times y)
struct Point {
  cplx y;
  cplx q;
  cplx u() const { return q / y; }
};

struct System {
  int m;
  double z2;    // |z|^2
  double sign;  // (-1)^{m+1}

  System(int m_, cplx z) : m(m_), z2(std::norm(z)), sign(m_ % 2 == 1 ? 1.0 : -1.0) {}

  std::array<cplx, 2> residual(const Point& p, cplx alpha) const {
    const cplx prod = alpha * p.y + p.q;
    const cplx g1 = 1.0 + prod + sign * std::pow(prod, m - 1) * p.y * p.y;
    const cplx g2 = p.q * p.q + p.q - z2 * p.y * p.y;
    return {g1, g2};
  }

  // Residuals of the original two equations, each divided by max(1, sum of
  // the moduli of its terms).
  std::array<double, 2> scaled_residuals(const Point& p, cplx alpha) const {
    const cplx u = p.u();
    const cplx w = alpha + u;
    const cplx t1 = w * p.y;
    const cplx t2 = sign * std::pow(w, m - 1) * std::pow(p.y, m + 1);
    const double r1 = std::abs(1.0 + t1 + t2) / std::max(1.0, 1.0 + std::abs(t1) + std::abs(t2));
    const cplx a = p.y * u * u, b = u, c = p.y * z2;
    const double r2 = std::abs(a + b - c) / std::max(1.0, std::abs(a) + std::abs(b) + std::abs(c));
    return {r1, r2};
  }

  // Newton step solving J d = -G.
  bool newton_step(const Point& p, cplx alpha, Point& delta) const {
    const auto g = residual(p, alpha);
    const cplx prod = alpha * p.y + p.q;
    const cplx y2 = p.y * p.y;
    const cplx pm1 = std::pow(prod, m - 1);
    const cplx pm2 = m > 1 ? std::pow(prod, m - 2) : cplx{0.0};
    const cplx j11 = alpha + sign * ((m - 1.0) * pm2 * alpha * y2 + 2.0 * pm1 * p.y);
    const cplx j12 = 1.0 + sign * (m - 1.0) * pm2 * y2;
    const cplx j21 = -2.0 * z2 * p.y;
    const cplx j22 = 2.0 * p.q + 1.0;
    const cplx det = j11 * j22 - j12 * j21;
    if (std::abs(det) == 0.0 || !std::isfinite(std::abs(det))) return false;
    delta.y = (-g[0] * j22 + g[1] * j12) / det;
    delta.q = (-g[1] * j11 + g[0] * j21) / det;
    return std::isfinite(std::abs(delta.y)) && std::isfinite(std::abs(delta.q));
  }
};

double residual_norm(const std::array<cplx, 2>& f) {
  return std::max(std::abs(f[0]), std::abs(f[1]));
}

struct NewtonResult {
  Point point;
  bool ok = false;
  int iterations = 0;
};

// Damped Newton: full steps while the residual decreases, otherwise halve.
NewtonResult newton(const System& sys, Point start, cplx alpha, const SolverOptions& opt) {
  NewtonResult out{start, false, 0};
  Point p = start;
  double res = residual_norm(sys.residual(p, alpha));
  for (int it = 0; it < opt.newton_max_iterations; ++it) {
    ++out.iterations;
    Point d;
    if (!sys.newton_step(p, alpha, d)) return out;
    double lambda = 1.0;
    Point trial{};
    double trial_res = 0.0;
    for (int k = 0; k < 30; ++k) {
      trial = {p.y + lambda * d.y, p.q + lambda * d.q};
      trial_res = residual_norm(sys.residual(trial, alpha));
      if (trial_res < res || trial_res <= 1e-15) break;
      lambda *= 0.5;
    }
    const double step = lambda * std::max(std::abs(d.y), std::abs(d.q));
    const double scale = 1.0 + std::abs(p.y) + std::abs(p.q);
    p = trial;
    res = trial_res;
    if (step <= 1e-15 * scale || res == 0.0) break;
  }
  out.point = p;
  const auto scaled = sys.scaled_residuals(p, alpha);
  out.ok = std::max(scaled[0], scaled[1]) <= opt.residual_tolerance && p.y != 0.0 &&
           std::isfinite(std::abs(p.y)) && std::isfinite(std::abs(p.q));
  return out;
}

// The Stieltjes branch: Im y > 0 and Im(w - alpha) >= 0 in the upper half-plane.
bool on_branch(const Point& p) {
  const cplx u = p.u();
  return p.y.imag() > 0.0 && u.imag() >= -1e-12 * std::max(1.0, std::abs(u));
}

StieltjesState make_state(int m, cplx z, cplx alpha, const Point& p, const System& sys) {
  StieltjesState s;
  s.m = m;
  s.alpha = alpha;
  s.z = z;
  s.y = p.y;
  s.w = alpha + p.u();
  // z t / y = w - alpha; at z = 0 the relation carries no information about t.
  s.t = std::abs(z) > 0.0 ? p.q / z : cplx{0.0};
  s.residuals = sys.scaled_residuals(p, alpha);
  return s;
}

}  // namespace

SolverError::SolverError(StieltjesState state)
    : std::runtime_error("Stieltjes solver did not converge: " + state.diagnostic),
      state_(std::move(state)) {}

void to_json(nlohmann::json& j, const StieltjesState& s) {
  auto c = [](cplx v) { return nlohmann::json::array({v.real(), v.imag()}); };
  j = nlohmann::json{{"m", s.m},
                     {"alpha", c(s.alpha)},
                     {"z", c(s.z)},
                     {"y", c(s.y)},
                     {"t", c(s.t)},
                     {"w", c(s.w)},
                     {"residuals", {s.residuals[0], s.residuals[1]}},
                     {"iterations", s.iterations},
                     {"continuation_steps", s.continuation_steps},
                     {"shift_magnitude", s.shift_magnitude()},
                     {"z_abs_squared", std::norm(s.z)},
                     {"converged", s.converged}};
  if (!s.diagnostic.empty()) j["diagnostic"] = s.diagnostic;
}

std::vector<StieltjesState> solve_along(int m, cplx z, double x, const std::vector<double>& heights,
                                        const SolverOptions& opt) {
  if (m < 1) throw std::invalid_argument("solve_system: m must be >= 1");
  for (const double v : heights) {
    if (!(v > 0.0)) throw std::invalid_argument("solve_system: Im(alpha) must be positive");
  }
  const System sys(m, z);
  std::vector<std::size_t> order(heights.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return heights[a] > heights[b]; });

  std::vector<StieltjesState> out(heights.size());
  auto fail_all_from = [&](std::size_t pos, const std::string& why, const StieltjesState& last) {
    for (std::size_t k = pos; k < order.size(); ++k) {
      StieltjesState s = last;
      s.alpha = {x, heights[order[k]]};
      s.converged = false;
      s.diagnostic = why;
      out[order[k]] = s;
    }
  };

  int iterations = 0;
  int steps = 0;
  double v = std::max(opt.start_offset + std::abs(z), heights.empty() ? 0.0 : heights[order[0]]);
  cplx alpha{x, v};
  // Large |alpha|: y ~ -1/alpha and w - alpha ~ y |z|^2.
  const cplx y0 = -1.0 / alpha;
  NewtonResult start = newton(sys, Point{y0, y0 * y0 * sys.z2}, alpha, opt);
  iterations += start.iterations;
  if (!start.ok || !on_branch(start.point)) {
    StieltjesState s = make_state(m, z, alpha, start.point, sys);
    s.iterations = iterations;
    fail_all_from(
        0, "no Stieltjes-branch solution at the continuation start v0 = " + std::to_string(v), s);
    return out;
  }
  Point current = start.point;

  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const double target = heights[order[pos]];
    while (v > target) {
      double ratio = opt.step_ratio;
      bool accepted = false;
      for (int attempt = 0; attempt <= opt.max_step_halvings && !accepted; ++attempt) {
        const double v_next = std::max(v * ratio, target);
        const cplx a_next{x, v_next};
        NewtonResult r = newton(sys, current, a_next, opt);
        iterations += r.iterations;
        const double jump = std::abs(r.point.y - current.y);
        if (r.ok && on_branch(r.point) && jump <= 0.5 * std::max(std::abs(current.y), 1e-3)) {
          current = r.point;
          v = v_next;
          accepted = true;
          ++steps;
        } else {
          ratio = std::sqrt(ratio);  // halve the step in log v
        }
      }
      if (!accepted) {
        StieltjesState s = make_state(m, z, {x, v}, current, sys);
        s.iterations = iterations;
        s.continuation_steps = steps;
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "continuation stalled at Im(alpha) = %.3e after %d step halvings", v,
                      opt.max_step_halvings);
        fail_all_from(pos, buf, s);
        return out;
      }
    }
    StieltjesState s = make_state(m, z, {x, target}, current, sys);
    s.iterations = iterations;
    s.continuation_steps = steps;
    s.converged =
        s.residuals[0] <= opt.residual_tolerance && s.residuals[1] <= opt.residual_tolerance;
    if (!s.converged) s.diagnostic = "residual above tolerance";
    out[order[pos]] = s;
  }
  return out;
}

StieltjesState solve_system(int m, cplx z, cplx alpha, const SolverOptions& options) {
  return solve_along(m, z, alpha.real(), {alpha.imag()}, options).front();
}

double density_p(int m, cplx z, double x, double v_min) {
  if (!(v_min >= 1e-8 && v_min <= 1e-2)) {
    throw std::invalid_argument("density_p: v_min must lie in [1e-8, 1e-2]");
  }
  const auto states = solve_along(m, z, x, {2.0 * v_min, v_min});
  for (const auto& s : states) {
    if (!s.converged) throw SolverError(s);
  }
  const double extrapolated = 2.0 * states[1].y.imag() - states[0].y.imag();
  return std::max(0.0, extrapolated / std::numbers::pi);
}

double DensityCurve::integral() const {
  double s = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) s += weight[k] * p[k];
  return s;
}

double DensityCurve::even_moment(int k) const {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += weight[i] * std::pow(x[i] * x[i], k) * p[i];
  return s;
}

double DensityCurve::log_potential() const {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s -= weight[i] * std::log(std::abs(x[i])) * p[i];
  return s;
}

void DensityCurve::write_csv(std::ostream& out) const {
  out << "x,p\n";
  char buf[64];
  for (std::size_t i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x[i], p[i]);
    out << buf;
  }
}

DensityCurve density_curve(int m, cplx z, int grid_points, double v_min, double grading) {
  if (grid_points < 4 || grid_points % 2 != 0) {
    throw std::invalid_argument("density_curve: grid_points must be even and >= 4");
  }
  if (!(grading >= 1.0)) throw std::invalid_argument("density_curve: grading must be >= 1");
  DensityCurve curve;
  curve.m = m;
  curve.z = z;
  curve.v_min = v_min;
  curve.extent = support_edge(m) + std::abs(z) + 0.2;
  const int half = grid_points / 2;
  curve.x.resize(static_cast<std::size_t>(grid_points));
  curve.p.resize(curve.x.size());
  curve.weight.resize(curve.x.size());
  for (int k = 0; k < half; ++k) {
    const double t = (k + 0.5) / half;
    const double xk = curve.extent * std::pow(t, grading);
    const double wk = curve.extent * grading * std::pow(t, grading - 1.0) / half;
    const auto right = static_cast<std::size_t>(half + k);
    const auto left = static_cast<std::size_t>(half - 1 - k);
    curve.x[right] = xk;
    curve.x[left] = -xk;
    curve.weight[right] = curve.weight[left] = wk;
  }
  for (std::size_t i = 0; i < curve.x.size(); ++i) curve.p[i] = density_p(m, z, curve.x[i], v_min);
  return curve;
}

double delta_function(int m, cplx z, double x) {
  if (!(x > 0.0)) throw std::invalid_argument("delta_function: x must be positive");
  if (std::abs(z) == 0.0) throw std::invalid_argument("delta_function: z must be nonzero");
  const StieltjesState s = solve_system(m, z, {0.0, x});
  if (!s.converged) throw SolverError(s);
  const cplx value = -cplx{0.0, 1.0} * s.y;
  if (std::abs(value.imag()) > 1e-8) {
    throw std::runtime_error("delta_function: imaginary residue " + std::to_string(value.imag()) +
                             " exceeds 1e-8");
  }
  return value.real();
}

double pde_residual(int m, cplx z, double x, double h) {
  if (!(h >= 1e-5 && h <= 1e-2))
    throw std::invalid_argument("pde_residual: h must lie in [1e-5, 1e-2]");
  auto solve = [&](cplx zz, double xx) {
    StieltjesState s = solve_system(m, zz, {xx, kPdeHeight});
    if (!s.converged) throw SolverError(s);
    return s;
  };
  const StieltjesState centre = solve(z, x);
  const cplx dy_du = (solve(z + h, x).y - solve(z - h, x).y) / (2.0 * h);
  const cplx dy_dx = (solve(z, x + h).y - solve(z, x - h).y) / (2.0 * h);
  const cplx root = 2.0 * centre.y * (centre.w - centre.alpha) + 1.0;
  const cplx rhs = 2.0 * z.real() * centre.y / root * dy_dx;
  return std::abs(dy_du - rhs);
}

double potential_from_solver(int m, cplx z, int quadrature_grid_size) {
  return density_curve(m, z, quadrature_grid_size).log_potential();
}

}  // namespace matprod
