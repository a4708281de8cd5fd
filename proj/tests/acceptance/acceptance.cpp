// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

#include "matprod/harness.hpp"
#include "matprod/limitlaw.hpp"
#include "matprod/stieltjes.hpp"

using namespace matprod;

namespace {

constexpr cplx kI{0.0, 1.0};

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double time_limit_seconds,
               const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out{false, ""};
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool pass = out.pass;
  if (seconds > time_limit_seconds) {
    pass = false;
    out.detail += "; over time limit";
  }
  if (!pass) ++failures;
  std::printf("%s %2d %s: %s (%.1fs, limit %.0fs)\n", pass ? "PASS" : "FAIL", id, name,
              out.detail.c_str(), seconds, time_limit_seconds);
  std::fflush(stdout);
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

int worker_count() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

ExperimentConfig gaussian_config(int m, std::vector<int> n_values, int replicas,
                                 std::uint64_t seed) {
  ExperimentConfig c;
  c.ensemble.m = m;
  c.ensemble.seed = seed;
  c.n_values = std::move(n_values);
  c.ensemble.n = c.n_values.front();
  c.replicas = replicas;
  c.threads = worker_count();
  return c;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string mask_runtime(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + ",*\n";
  return out;
}

Outcome solver_closed_form() {
  double worst_inside = 0.0, worst_outside = 0.0;
  bool converged = true;
  for (int m = 1; m <= 3; ++m) {
    for (const double r : {0.25, 0.5, 0.9}) {
      const auto s = solve_system(m, r, 1e-6 * kI);
      converged = converged && s.converged;
      const cplx expected = kI * std::sqrt(1.0 - std::pow(r, 2.0 / m)) / std::pow(r, 1.0 - 1.0 / m);
      worst_inside = std::max(worst_inside, std::abs(s.y - expected));
    }
    for (const double r : {1.2, 2.0}) {
      const auto s = solve_system(m, r, 1e-6 * kI);
      converged = converged && s.converged;
      worst_outside = std::max(worst_outside, std::abs(s.y));
    }
  }
  return {converged && worst_inside <= 1e-3 && worst_outside <= 1e-2,
          fmt("max |y - closed form| = %.2e (tol 1e-3), max |y| outside = %.2e (tol 1e-2)",
              worst_inside, worst_outside)};
}

Outcome semicircle() {
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const cplx alpha(-2.85 + 0.3 * k, 0.02 + 0.05 * (k % 4));
    const auto s = solve_system(1, 0.0, alpha);
    const cplx root = std::sqrt(alpha * alpha - 4.0);
    cplx expected = (-alpha + root) / 2.0;
    if (expected.imag() <= 0.0) expected = (-alpha - root) / 2.0;
    worst = std::max(worst, s.converged ? std::abs(s.y - expected) : INFINITY);
  }
  return {worst <= 1e-10, fmt("max error over 20 points = %.2e (tol 1e-10)", worst)};
}

Outcome potential_identity() {
  double worst = 0.0;
  for (int m = 1; m <= 3; ++m) {
    const PowerDiscLaw law(m);
    for (const double r : {0.2, 0.5, 0.8, 1.5, 2.0})
      worst = std::max(worst, std::abs(potential_from_solver(m, r) - law.potential(r)));
  }
  return {worst <= 1e-3, fmt("max |V - U| = %.2e (tol 1e-3)", worst)};
}

Outcome density_properties() {
  double mass_err = 0.0, moment_err = 0.0, tail = 0.0;
  for (int m = 1; m <= 3; ++m) {
    const auto curve = density_curve(m, 0.0);
    mass_err = std::max(mass_err, std::abs(curve.integral() - 1.0));
    for (int p = 1; p <= 3; ++p) {
      const double target = fuss_catalan(m, p).value();
      moment_err = std::max(moment_err, std::abs(curve.even_moment(p) - target) / target);
    }
    const double edge = support_edge(m) + 0.05;
    for (std::size_t i = 0; i < curve.x.size(); ++i)
      if (std::abs(curve.x[i]) >= edge) tail = std::max(tail, curve.p[i]);
    for (const double x : {edge, edge + 0.1, edge + 1.0})
      tail = std::max(tail, density_p(m, 0.0, x));
  }
  return {mass_err <= 1e-3 && moment_err <= 0.01 && tail <= 1e-4,
          fmt("max |mass - 1| = %.2e, max moment rel. error = %.2e", mass_err, moment_err) +
              fmt(", max p beyond edge = %.2e", tail)};
}

Outcome pde_identity() {
  const std::pair<cplx, double> generic[] = {
      {cplx(0.3, 0.2), 1.0}, {cplx(0.5, -0.1), 0.4}, {cplx(-0.7, 0.3), 1.3},
      {cplx(1.2, 0.5), 0.8}, {cplx(0.2, 0.9), 2.1},
  };
  double worst = 0.0;
  for (const auto& [z, x] : generic) worst = std::max(worst, pde_residual(2, z, x, 1e-3));
  double at_zero = 0.0;
  for (const auto& [z, x] : generic)
    at_zero = std::max(at_zero, pde_residual(2, cplx(0.0, z.imag()), x, 1e-3));
  return {worst <= 1e-3 && at_zero <= 1e-4,
          fmt("max residual = %.2e (tol 1e-3), max at u = 0 = %.2e (tol 1e-4)", worst, at_zero)};
}

Outcome circular_law() {
  struct Case {
    int m;
    EntryLaw law;
  };
  const Case cases[] = {{1, EntryLaw::complex_gaussian},
                        {2, EntryLaw::complex_gaussian},
                        {3, EntryLaw::complex_gaussian},
                        {2, EntryLaw::rademacher}};
  bool ok = true;
  std::string detail;
  for (const auto& k : cases) {
    auto c = gaussian_config(k.m, {512}, 10, 6000 + static_cast<std::uint64_t>(k.m));
    c.ensemble.entry_law = k.law;
    c.metrics.radial_ks = c.metrics.angular_ks = c.metrics.grid2d_ks = true;
    const auto r = run_convergence(c);
    const double radial = r.find(512, "radial_ks")->value;
    const double angular = r.find(512, "angular_ks")->value;
    const double grid = r.find(512, "grid2d_ks")->value;
    ok = ok && radial <= 0.05 && angular <= 0.05 && grid <= 0.08 && r.accounting[0].excluded == 0;
    if (!detail.empty()) detail += "; ";
    detail += "m=" + std::to_string(k.m) + " " + to_string(k.law) +
              fmt(": radial %.4f, angular %.4f", radial, angular) + fmt(", grid %.4f", grid);
  }
  return {ok, detail + " (tol 0.05/0.05/0.08)"};
}

Outcome convergence_trend() {
  auto c = gaussian_config(2, {64, 128, 256, 512}, 10, 7000);
  c.metrics.radial_ks = true;
  const auto r = run_convergence(c);
  bool ok = true;
  std::string detail = "median radial KS";
  double previous = INFINITY;
  for (const int n : c.n_values) {
    const double v = r.find(n, "radial_ks")->value;
    ok = ok && v < previous;
    previous = v;
    detail += fmt(" %.4f", v);
  }
  return {ok, detail};
}

Outcome fuss_catalan_moments() {
  bool ok = true;
  double worst = 0.0;
  for (const int m : {1, 2}) {
    auto c = gaussian_config(m, {1024}, 10, 8000 + static_cast<std::uint64_t>(m));
    c.p_max = 4;
    const auto r = run_moment_check(c);
    for (int p = 1; p <= 4; ++p) {
      const double err = r.find(1024, "moment_p" + std::to_string(p) + "_relerr")->value;
      worst = std::max(worst, err);
      ok = ok && err <= 0.05;
    }
  }
  return {ok, fmt("max relative error = %.4f (tol 0.05)", worst)};
}

Outcome empirical_potential() {
  bool ok = true;
  double worst = 0.0;
  for (const int m : {1, 2}) {
    auto c = gaussian_config(m, {512}, 5, 9000 + static_cast<std::uint64_t>(m));
    c.z_values = {0.0, 0.5, 2.0};
    c.solver_grid = 512;
    const auto r = run_potential_check(c);
    for (const cplx z : c.z_values) {
      const double err = r.find(512, "potential_abs_error[z=" + format_shift(z) + "]")->value;
      worst = std::max(worst, err);
      ok = ok && err <= 0.05;
    }
  }
  return {ok, fmt("max |empirical - U| = %.4f (tol 0.05)", worst)};
}

Outcome deterministic_inequalities() {
  auto c = gaussian_config(2, {8}, 1, 10000);
  c.product_pairs = 100;
  c.linearization_instances = 50;
  const auto r = run_property_suite(c);
  const double violations = r.find(8, "prod1_violations")->value;
  const double pairing = r.find(8, "linearization_pairing_error")->value;
  const double agreement = r.find(8, "linearization_svd_error")->value;
  return {violations == 0.0 && pairing <= 1e-8 && agreement <= 1e-8,
          fmt("prod1 violations %.0f, pairing error %.2e", violations, pairing) +
              fmt(", svd agreement error %.2e (tol 1e-8 relative)", agreement)};
}

Outcome reproducibility() {
  auto c = gaussian_config(2, {64, 96}, 4, 11000);
  c.metrics.radial_ks = c.metrics.grid2d_ks = c.metrics.angular_ks = true;
  c.z_values = {0.0, 0.5};
  c.solver_grid = 256;
  const auto base = std::filesystem::temp_directory_path() / "matprod_acceptance_repro";
  std::filesystem::remove_all(base);
  std::string texts[2];
  for (int run = 0; run < 2; ++run) {
    c.threads = run == 0 ? 1 : worker_count();
    const auto dir = base / std::to_string(run);
    for (const auto& report : {run_convergence(c), run_moment_check(c), run_potential_check(c)}) {
      texts[run] += mask_runtime(slurp(emit_report(report, dir, ReportFormat::csv)));
    }
  }
  std::filesystem::remove_all(base);
  const bool same = texts[0] == texts[1] && !texts[0].empty();
  return {same, same ? "CSV reports identical with runtime column masked"
                     : "CSV reports differ with runtime column masked"};
}

}  // namespace

int main() {
  criterion(1, "solver vs closed form at x = 0", 10, solver_closed_form);
  criterion(2, "semicircle reduction", 1, semicircle);
  criterion(3, "potential identity", 120, potential_identity);
  criterion(4, "density properties", 120, density_properties);
  criterion(5, "pde identity", 60, pde_identity);
  criterion(6, "circular law generalization at n = 512", 600, circular_law);
  criterion(7, "convergence trend", 600, convergence_trend);
  criterion(8, "Fuss-Catalan moments", 300, fuss_catalan_moments);
  criterion(9, "empirical potential", 120, empirical_potential);
  criterion(10, "deterministic inequalities", 30, deterministic_inequalities);
  criterion(11, "reproducibility", 60, reproducibility);
  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
