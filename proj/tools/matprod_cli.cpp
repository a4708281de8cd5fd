// matprod: sample random matrix products and compare their spectra with the
// limiting law.
#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "matprod/ensembles.hpp"
#include "matprod/harness.hpp"
#include "matprod/limitlaw.hpp"
#include "matprod/linalg.hpp"
#include "matprod/report.hpp"
#include "matprod/stieltjes.hpp"

using namespace matprod;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> threads;
  std::string format = "csv";
};

ExperimentConfig resolve_config(const Options& opt) {
  ExperimentConfig c = load_config(opt.config_path);
  if (opt.seed) c.ensemble.seed = *opt.seed;
  if (opt.out) c.output_dir = *opt.out;
  if (opt.threads) c.threads = *opt.threads;
  if (const char* env = std::getenv("MATPROD_THREADS"); env && *env) {
    try {
      std::size_t used = 0;
      c.threads = std::stoi(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("MATPROD_THREADS is not an integer: ") + env);
    }
  }
  c.validate();
  return c;
}

void write(const ExperimentReport& r, const ExperimentConfig& c, ReportFormat format) {
  std::cout << emit_report(r, c.output_dir, format).string() << '\n';
}

bool any_convergence_metric(const MetricSelection& s) {
  return s.radial_ks || s.grid2d_ks || s.angular_ks;
}

int cmd_simulate(const ExperimentConfig& c) {
  std::filesystem::create_directories(c.output_dir);
  const auto path = c.output_dir / ("spectrum_" + std::to_string(c.ensemble.seed) + ".csv");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << "n,replica,re,im\n";
  out.precision(17);
  for (const int n : c.n_values) {
    const EnsembleSpec spec = c.ensemble_at(n);
    std::vector<EigenSpectrum> spectra(static_cast<std::size_t>(c.replicas));
    for_each_replica(c.replicas, c.threads, [&](int r) {
      spectra[static_cast<std::size_t>(r)] =
          eigenvalues(sample_product(spec, static_cast<std::uint64_t>(r)));
    });
    for (int r = 0; r < c.replicas; ++r) {
      for (const cplx& l : spectra[static_cast<std::size_t>(r)].values)
        out << n << ',' << r << ',' << l.real() << ',' << l.imag() << '\n';
    }
  }
  if (!out) throw std::runtime_error("write failed for " + path.string());
  std::cout << path.string() << '\n';
  return kExitOk;
}

int cmd_limit(const ExperimentConfig& c, ReportFormat format) {
  const int m = c.ensemble.m;
  const PowerDiscLaw law(m);
  ExperimentReport r;
  r.experiment = "limit";
  r.seed = c.ensemble.seed;
  r.timestamp = utc_timestamp();
  r.config = c;
  std::filesystem::create_directories(c.output_dir);
  r.rows.push_back({0, "support_edge", support_edge(m), 0.0, 1e-9});
  for (std::size_t k = 0; k < c.z_values.size(); ++k) {
    const cplx z = c.z_values[k];
    const std::string tag = "[z=" + format_shift(z) + "]";
    const auto start = std::chrono::steady_clock::now();
    const DensityCurve curve = density_curve(m, z, c.solver_grid);
    const double seconds = std::max(
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 1e-9);
    r.rows.push_back({0, "density_integral" + tag, curve.integral(), 0.0, seconds});
    r.rows.push_back({0, "potential_solver" + tag, curve.log_potential(), 0.0, seconds});
    r.rows.push_back({0, "potential_limit" + tag, law.potential(z), 0.0, 1e-9});
    const auto path = c.output_dir / ("density_" + std::to_string(c.ensemble.seed) + "_" +
                                      std::to_string(k) + ".csv");
    std::ofstream out(path);
    curve.write_csv(out);
    if (!out) throw std::runtime_error("write failed for " + path.string());
    std::cout << path.string() << '\n';
  }
  write(r, c, format);
  return kExitOk;
}

int cmd_compare(ExperimentConfig c, ReportFormat format) {
  const bool any = any_convergence_metric(c.metrics) || c.metrics.moments || c.metrics.potential;
  if (!any) {
    c.metrics.radial_ks = c.metrics.grid2d_ks = c.metrics.angular_ks = true;
    c.metrics.moments = c.metrics.potential = true;
  }
  if (any_convergence_metric(c.metrics)) write(run_convergence(c), c, format);
  if (c.metrics.moments) write(run_moment_check(c), c, format);
  if (c.metrics.potential) write(run_potential_check(c), c, format);
  return kExitOk;
}

int cmd_proptest(const ExperimentConfig& c, ReportFormat format) {
  const ExperimentReport r = run_property_suite(c);
  write(r, c, format);
  if (has_hard_violation(r)) {
    std::cerr << "product singular-value inequality violated\n";
    return kExitViolation;
  }
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& c, ReportFormat format) {
  if (any_convergence_metric(c.metrics)) write(run_convergence(c), c, format);
  if (c.metrics.moments) write(run_moment_check(c), c, format);
  if (c.metrics.potential) write(run_potential_check(c), c, format);
  if (c.metrics.properties) return cmd_proptest(c, format);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra of products of independent random matrices"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config_path, "Experiment config (JSON)")->required();
    sub->add_option("--seed", opt.seed, "Override the ensemble seed");
    sub->add_option("--out", opt.out, "Output directory");
    sub->add_option("--threads", opt.threads, "Replica workers (MATPROD_THREADS overrides)");
    sub->add_option("--format", opt.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
  };
  auto* simulate = app.add_subcommand("simulate", "Sample products and write eigenvalues");
  auto* limit = app.add_subcommand("limit", "Evaluate the limiting law and solver on grids");
  auto* compare = app.add_subcommand("compare", "Convergence, moment and potential checks");
  auto* proptest = app.add_subcommand("proptest", "Deterministic and Monte Carlo property suite");
  auto* sweep = app.add_subcommand("sweep", "Every metric selected in the config");
  for (auto* sub : {simulate, limit, compare, proptest, sweep}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    const ExperimentConfig config = resolve_config(opt);
    const ReportFormat format = report_format_from_string(opt.format);
    if (simulate->parsed()) return cmd_simulate(config);
    if (limit->parsed()) return cmd_limit(config, format);
    if (compare->parsed()) return cmd_compare(config, format);
    if (proptest->parsed()) return cmd_proptest(config, format);
    return cmd_sweep(config, format);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
