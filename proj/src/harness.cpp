#include "matprod/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "matprod/esd.hpp"
#include "matprod/limitlaw.hpp"
#include "matprod/linalg.hpp"
#include "matprod/stieltjes.hpp"

namespace matprod {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const std::pair<const char*, bool MetricSelection::*> kMetricNames[] = {
    {"radial_ks", &MetricSelection::radial_ks},   {"grid2d_ks", &MetricSelection::grid2d_ks},
    {"angular_ks", &MetricSelection::angular_ks}, {"moments", &MetricSelection::moments},
    {"potential", &MetricSelection::potential},   {"properties", &MetricSelection::properties},
};

nlohmann::json shift_to_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

cplx shift_from_json(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError("z_values entries must be a number or a [re, im] pair");
}

ExperimentReport new_report(const std::string& experiment, const ExperimentConfig& config) {
  ExperimentReport r;
  r.experiment = experiment;
  r.seed = config.ensemble.seed;
  r.timestamp = utc_timestamp();
  r.config = config;
  return r;
}

double mean_in_order(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

// Per-replica outcome: either a value bundle or a decomposition failure.
template <class T>
struct Outcome {
  bool ok = false;
  std::string failure;
  T value{};
  double seconds = 0.0;
};

template <class T>
std::vector<Outcome<T>> run_replicas(const ExperimentConfig& config,
                                     const std::function<T(int)>& body) {
  std::vector<Outcome<T>> out(static_cast<std::size_t>(config.replicas));
  for_each_replica(config.replicas, config.threads, [&](int r) {
    auto& slot = out[static_cast<std::size_t>(r)];
    const auto start = Clock::now();
    try {
      slot.value = body(r);
      slot.ok = true;
    } catch (const DecompositionError& e) {
      slot.failure = "replica " + std::to_string(r) + ": " + e.what();
    }
    slot.seconds = std::max(seconds_since(start), 1e-9);
  });
  return out;
}

template <class T>
ReplicaAccounting account(int n, const std::vector<Outcome<T>>& outcomes) {
  ReplicaAccounting a;
  a.n = n;
  for (const auto& o : outcomes) {
    if (o.ok) {
      ++a.included;
    } else {
      ++a.excluded;
      a.failures.push_back(o.failure);
    }
  }
  return a;
}

template <class T, class F>
std::vector<double> collect(const std::vector<Outcome<T>>& outcomes, F field) {
  std::vector<double> v;
  for (const auto& o : outcomes)
    if (o.ok) v.push_back(field(o.value));
  return v;
}

template <class T>
double total_seconds(const std::vector<Outcome<T>>& outcomes) {
  double s = 0.0;
  for (const auto& o : outcomes) s += o.seconds;
  return s;
}

void add_summary_row(ExperimentReport& r, int n, const std::string& metric,
                     const std::vector<double>& values, double seconds) {
  const double value = values.empty() ? 0.0 : median(values);
  const double iqr = values.empty() ? 0.0 : interquartile_range(values);
  r.rows.push_back({n, metric, value, iqr, seconds});
}

void add_mean_row(ExperimentReport& r, int n, const std::string& metric,
                  const std::vector<double>& values, double seconds) {
  r.rows.push_back({n, metric, mean_in_order(values),
                    values.empty() ? 0.0 : interquartile_range(values), seconds});
}

}  // namespace

void ExperimentConfig::validate() const {
  ensemble_at(n_values.empty() ? 2 : n_values.front()).validate();
  if (n_values.empty()) throw ConfigError("config: n_values must be nonempty");
  for (std::size_t k = 0; k < n_values.size(); ++k) {
    if (n_values[k] < 2) throw ConfigError("config: every n must be >= 2");
    if (k > 0 && n_values[k] <= n_values[k - 1]) {
      throw ConfigError("config: n_values must be strictly ascending");
    }
  }
  if (replicas < 1) throw ConfigError("config: replicas must be >= 1");
  if (threads < 1) throw ConfigError("config: threads must be >= 1");
  if (p_max < 0 || p_max > kMaxSpectralMomentOrder) {
    throw ConfigError("config: p_max must lie in [0, " + std::to_string(kMaxSpectralMomentOrder) +
                      "]");
  }
  if (z_values.empty()) throw ConfigError("config: z_values must be nonempty");
  if (grid2d_resolution < 2) throw ConfigError("config: grid2d_resolution must be >= 2");
  if (solver_grid < 4 || solver_grid % 2 != 0)
    throw ConfigError("config: solver_grid must be even and >= 4");
  if (!(log_floor > 0.0)) throw ConfigError("config: log_floor must be positive");
  if (product_pairs < 0 || linearization_instances < 0) {
    throw ConfigError("config: property counts must be nonnegative");
  }
}

EnsembleSpec ExperimentConfig::ensemble_at(int n) const {
  EnsembleSpec spec = ensemble;
  spec.n = n;
  return spec;
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  nlohmann::json metrics = nlohmann::json::array();
  for (const auto& [name, member] : kMetricNames)
    if (c.metrics.*member) metrics.push_back(name);
  nlohmann::json zs = nlohmann::json::array();
  for (const auto& z : c.z_values) zs.push_back(shift_to_json(z));
  j = nlohmann::json{{"ensemble", c.ensemble},
                     {"n_values", c.n_values},
                     {"replicas", c.replicas},
                     {"z_values", zs},
                     {"metrics", metrics},
                     {"p_max", c.p_max},
                     {"output_dir", c.output_dir.string()},
                     {"prod3_constant", c.prod3_constant},
                     {"min_singular_threshold", c.min_singular_threshold},
                     {"product_pairs", c.product_pairs},
                     {"linearization_instances", c.linearization_instances},
                     {"grid2d_resolution", c.grid2d_resolution},
                     {"grid2d_extent", c.grid2d_extent},
                     {"solver_grid", c.solver_grid},
                     {"log_floor", c.log_floor}};
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  try {
    ExperimentConfig out;
    j.at("ensemble").get_to(out.ensemble);
    if (j.contains("n_values")) {
      out.n_values = j["n_values"].get<std::vector<int>>();
    } else {
      out.n_values = {out.ensemble.n};
    }
    out.replicas = j.value("replicas", 1);
    if (j.contains("z_values")) {
      out.z_values.clear();
      for (const auto& z : j["z_values"]) out.z_values.push_back(shift_from_json(z));
    }
    if (j.contains("metrics")) {
      for (const auto& m : j["metrics"]) {
        const auto name = m.get<std::string>();
        bool known = false;
        for (const auto& [label, member] : kMetricNames) {
          if (name == label) {
            out.metrics.*member = true;
            known = true;
          }
        }
        if (!known) throw ConfigError("config: unknown metric '" + name + "'");
      }
    }
    out.p_max = j.value("p_max", out.p_max);
    out.output_dir = j.value("output_dir", out.output_dir.string());
    out.threads = j.value("threads", out.threads);
    out.prod3_constant = j.value("prod3_constant", out.prod3_constant);
    out.min_singular_threshold = j.value("min_singular_threshold", out.min_singular_threshold);
    out.product_pairs = j.value("product_pairs", out.product_pairs);
    out.linearization_instances = j.value("linearization_instances", out.linearization_instances);
    out.grid2d_resolution = j.value("grid2d_resolution", out.grid2d_resolution);
    out.grid2d_extent = j.value("grid2d_extent", out.grid2d_extent);
    out.solver_grid = j.value("solver_grid", out.solver_grid);
    out.log_floor = j.value("log_floor", out.log_floor);
    c = std::move(out);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  ExperimentConfig c = j.get<ExperimentConfig>();
  c.validate();
  return c;
}

void for_each_replica(int count, int threads, const std::function<void(int)>& fn) {
  const int workers = std::max(1, std::min(threads, count));
  if (workers == 1) {
    for (int r = 0; r < count; ++r) fn(r);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int r = next++; r < count; r = next++) {
        try {
          fn(r);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double interquartile_range(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("interquartile range of empty sample");
  std::sort(values.begin(), values.end());
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return quantile(0.75) - quantile(0.25);
}

int product_inequality_violations(const ComplexMatrix& a, const ComplexMatrix& b, double tol) {
  const auto sa = singular_values(a).values;
  const auto sb = singular_values(b).values;
  const auto sab = singular_values(multiply(a, b)).values;
  const std::size_t n = sa.size();
  int violations = 0;
  double lhs = 1.0, rhs = 1.0;
  for (std::size_t k = n; k-- > 0;) {
    lhs *= sab[k];
    rhs *= sa[k] * sb[k];
    if (lhs < rhs * (1.0 - tol)) ++violations;
  }
  return violations;
}

std::string format_shift(cplx z) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g%+gi", z.real(), z.imag());
  return buf;
}

ExperimentReport run_convergence(const ExperimentConfig& config) {
  config.validate();
  const auto& sel = config.metrics;
  if (!sel.radial_ks && !sel.grid2d_ks && !sel.angular_ks) {
    throw ConfigError("convergence: metrics must include radial_ks, grid2d_ks or angular_ks");
  }
  ExperimentReport report = new_report("convergence", config);
  const PowerDiscLaw law(config.ensemble.m);

  struct Values {
    double radial = 0.0, angular = 0.0, grid = 0.0;
    double t_radial = 0.0, t_angular = 0.0, t_grid = 0.0, t_sample = 0.0;
  };
  for (const int n : config.n_values) {
    const EnsembleSpec spec = config.ensemble_at(n);
    const auto outcomes = run_replicas<Values>(config, [&](int r) {
      Values v;
      auto start = Clock::now();
      const EigenSpectrum eig = eigenvalues(sample_product(spec, static_cast<std::uint64_t>(r)));
      v.t_sample = seconds_since(start);
      if (sel.radial_ks) {
        start = Clock::now();
        v.radial = ks_distance(radial_ecdf(eig), [&](double x) { return law.radial_cdf(x); });
        v.t_radial = seconds_since(start);
      }
      if (sel.angular_ks) {
        start = Clock::now();
        v.angular =
            ks_distance(angular_ecdf(eig), [](double t) { return std::clamp(t, 0.0, 1.0); });
        v.t_angular = seconds_since(start);
      }
      if (sel.grid2d_ks) {
        start = Clock::now();
        v.grid = grid2d_distance(
            eig, [&](double x, double y) { return law.cdf(x, y); }, config.grid2d_resolution,
            config.grid2d_extent);
        v.t_grid = seconds_since(start);
      }
      return v;
    });
    report.accounting.push_back(account(n, outcomes));
    auto cost = [&](double Values::* metric_time) {
      double s = 0.0;
      for (const auto& o : outcomes)
        if (o.ok) s += o.value.t_sample + o.value.*metric_time;
      return std::max(s, 1e-9);
    };
    if (sel.radial_ks) {
      add_summary_row(report, n, "radial_ks",
                      collect(outcomes, [](const Values& v) { return v.radial; }),
                      cost(&Values::t_radial));
    }
    if (sel.angular_ks) {
      add_summary_row(report, n, "angular_ks",
                      collect(outcomes, [](const Values& v) { return v.angular; }),
                      cost(&Values::t_angular));
    }
    if (sel.grid2d_ks) {
      add_summary_row(report, n, "grid2d_ks",
                      collect(outcomes, [](const Values& v) { return v.grid; }),
                      cost(&Values::t_grid));
    }
  }
  return report;
}

ExperimentReport run_moment_check(const ExperimentConfig& config) {
  config.validate();
  if (std::none_of(config.z_values.begin(), config.z_values.end(),
                   [](cplx z) { return z == cplx{0.0}; })) {
    throw ConfigError("moments: z_values must contain 0");
  }
  ExperimentReport report = new_report("moments", config);
  const int m = config.ensemble.m;
  for (const int n : config.n_values) {
    const EnsembleSpec spec = config.ensemble_at(n);
    const auto outcomes = run_replicas<std::vector<double>>(config, [&](int r) {
      const SingularSpectrum s =
          singular_values(sample_product(spec, static_cast<std::uint64_t>(r)));
      std::vector<double> moments;
      for (int p = 0; p <= config.p_max; ++p) moments.push_back(spectral_moment(s, p));
      return moments;
    });
    report.accounting.push_back(account(n, outcomes));
    const double seconds = total_seconds(outcomes);
    for (int p = 0; p <= config.p_max; ++p) {
      const auto values = collect(
          outcomes, [p](const std::vector<double>& v) { return v[static_cast<std::size_t>(p)]; });
      const double target = fuss_catalan(m, p).value();
      const double mean = mean_in_order(values);
      const std::string label = "moment_p" + std::to_string(p);
      add_mean_row(report, n, label, values, seconds);
      report.rows.push_back({n, label + "_fuss_catalan", target, 0.0, seconds});
      report.rows.push_back({n, label + "_relerr", std::abs(mean - target) / target, 0.0, seconds});
    }
  }
  return report;
}

ExperimentReport run_potential_check(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport report = new_report("potential", config);
  const int m = config.ensemble.m;
  const PowerDiscLaw law(m);

  struct SolverValue {
    double value;
    double seconds;
  };
  std::vector<SolverValue> solver;
  for (const cplx z : config.z_values) {
    const auto start = Clock::now();
    const double v = potential_from_solver(m, z, config.solver_grid);
    solver.push_back({v, std::max(seconds_since(start), 1e-9)});
  }

  struct Values {
    std::vector<double> potential;
    std::vector<int> floored;
  };
  for (const int n : config.n_values) {
    const EnsembleSpec spec = config.ensemble_at(n);
    const auto outcomes = run_replicas<Values>(config, [&](int r) {
      const ComplexMatrix w = sample_product(spec, static_cast<std::uint64_t>(r));
      Values v;
      for (const cplx z : config.z_values) {
        const PotentialEstimate est =
            empirical_log_potential(w, z, 0.0, 1, nullptr, config.log_floor);
        v.potential.push_back(est.value);
        v.floored.push_back(est.floored_count);
      }
      return v;
    });
    report.accounting.push_back(account(n, outcomes));
    const double seconds = total_seconds(outcomes);
    for (std::size_t k = 0; k < config.z_values.size(); ++k) {
      const std::string tag = "[z=" + format_shift(config.z_values[k]) + "]";
      const auto values = collect(outcomes, [k](const Values& v) { return v.potential[k]; });
      const double limit = law.potential(config.z_values[k]);
      double floored = 0.0;
      for (const auto& o : outcomes)
        if (o.ok) floored += o.value.floored[k];
      add_mean_row(report, n, "potential_empirical" + tag, values, seconds);
      report.rows.push_back({n, "potential_limit" + tag, limit, 0.0, 1e-9});
      report.rows.push_back({n, "potential_solver" + tag, solver[k].value, 0.0, solver[k].seconds});
      report.rows.push_back(
          {n, "potential_abs_error" + tag, std::abs(mean_in_order(values) - limit), 0.0, seconds});
      report.rows.push_back({n, "floored_count" + tag, floored, 0.0, seconds});
    }
  }
  return report;
}

ExperimentReport run_property_suite(const ExperimentConfig& config) {
  config.validate();
  ExperimentReport report = new_report("properties", config);
  const int m = config.ensemble.m;

  // Deterministic checks on small matrices, independent of n.
  auto start = Clock::now();
  int prod1 = 0;
  {
    EnsembleSpec small = config.ensemble;
    small.m = 2;
    small.n = 8;
    small.truncation.reset();
    small.seed = splitmix64(config.ensemble.seed ^ 0x9D0D1ull);
    for (int k = 0; k < config.product_pairs; ++k) {
      prod1 +=
          product_inequality_violations(sample_factor(small, 1, static_cast<std::uint64_t>(k)),
                                        sample_factor(small, 2, static_cast<std::uint64_t>(k)));
    }
  }
  const double prod1_seconds = std::max(seconds_since(start), 1e-9);

  start = Clock::now();
  double pairing_error = 0.0, agreement_error = 0.0;
  {
    constexpr int kSizes[] = {4, 16, 64};
    EnsembleSpec small = config.ensemble;
    small.m = 1;
    small.truncation.reset();
    small.seed = splitmix64(config.ensemble.seed ^ 0x11AE5ull);
    CounterStream shifts(stream_key(small.seed, 0, 0));
    for (int k = 0; k < config.linearization_instances; ++k) {
      small.n = kSizes[k % 3];
      const ComplexMatrix w = sample_factor(small, 1, static_cast<std::uint64_t>(k));
      const cplx z = 1.5 * shifts.uniform_in_disc();
      const auto raw = hermitian_eigenvalues(linearization(w, z));
      const auto sv = singular_values(w, z).values;
      const double scale = std::max(sv.front(), 1.0);
      const std::size_t total = raw.size();
      for (std::size_t i = 0; i < total; ++i) {
        pairing_error = std::max(pairing_error, std::abs(raw[i] + raw[total - 1 - i]) / scale);
      }
      for (std::size_t j = 0; j < sv.size(); ++j) {
        agreement_error = std::max(agreement_error, std::abs(raw[total - 1 - j] - sv[j]) / scale);
      }
    }
  }
  const double linearization_seconds = std::max(seconds_since(start), 1e-9);

  cplx z_probe = 0.5;
  for (const cplx z : config.z_values) {
    if (z != cplx{0.0}) {
      z_probe = z;
      break;
    }
  }

  struct Values {
    double bulk_fraction = 0.0;
    double s1 = 0.0;
    double frobenius_ratio = 0.0;
    bool smallest_above = false;
  };
  for (const int n : config.n_values) {
    const EnsembleSpec spec = config.ensemble_at(n);
    const auto outcomes = run_replicas<Values>(config, [&](int r) {
      const ComplexMatrix w = sample_product(spec, static_cast<std::uint64_t>(r));
      Values v;
      const double nd = n;
      v.frobenius_ratio = w.frobenius_norm_squared() / nd;
      v.s1 = singular_values(w).values.front();
      const auto shifted = singular_values(w, z_probe).values;
      // 1-based j <= n - n^0.6.
      const auto limit = static_cast<int>(std::floor(nd - std::pow(nd, 0.6)));
      int good = 0;
      for (int j = 1; j <= limit; ++j) {
        if (shifted[static_cast<std::size_t>(j - 1)] >=
            config.prod3_constant * std::sqrt((nd - j) / nd))
          ++good;
      }
      v.bulk_fraction = limit > 0 ? static_cast<double>(good) / limit : 1.0;
      v.smallest_above = shifted.back() >= config.min_singular_threshold;
      return v;
    });
    report.accounting.push_back(account(n, outcomes));
    const double seconds = total_seconds(outcomes);

    report.rows.push_back({n, "prod1_violations", static_cast<double>(prod1), 0.0, prod1_seconds});
    report.rows.push_back(
        {n, "linearization_pairing_error", pairing_error, 0.0, linearization_seconds});
    report.rows.push_back(
        {n, "linearization_svd_error", agreement_error, 0.0, linearization_seconds});
    add_mean_row(report, n, "bulk_singular_fraction",
                 collect(outcomes, [](const Values& v) { return v.bulk_fraction; }), seconds);
    const auto s1 = collect(outcomes, [](const Values& v) { return v.s1; });
    report.rows.push_back({n, "max_s1", s1.empty() ? 0.0 : *std::max_element(s1.begin(), s1.end()),
                           s1.empty() ? 0.0 : interquartile_range(s1), seconds});
    report.rows.push_back(
        {n, "s1_ge_n_count",
         static_cast<double>(std::count_if(s1.begin(), s1.end(), [n](double s) { return s >= n; })),
         0.0, seconds});
    add_summary_row(report, n, "frobenius_ratio",
                    collect(outcomes, [](const Values& v) { return v.frobenius_ratio; }), seconds);
    add_mean_row(report, n, "min_singular_above_threshold_frequency",
                 collect(outcomes, [](const Values& v) { return v.smallest_above ? 1.0 : 0.0; }),
                 seconds);

    if (spec.truncation) {
      const auto t0 = Clock::now();
      double ratio = 0.0;
      for (int nu = 1; nu <= m; ++nu) {
        ratio =
            std::max(ratio, lindeberg_ratio(sample_raw_entries(spec, nu, 0), spec.truncation->tau));
      }
      const double tau = spec.truncation->tau;
      const double t = std::max(seconds_since(t0), 1e-9);
      report.rows.push_back({n, "lindeberg_ratio", ratio, 0.0, t});
      report.rows.push_back(
          {n, "lindeberg_side_condition", ratio / (tau * tau) <= tau ? 1.0 : 0.0, 0.0, t});
    }
  }
  return report;
}

bool has_hard_violation(const ExperimentReport& property_report) {
  return std::any_of(
      property_report.rows.begin(), property_report.rows.end(),
      [](const ReportRow& r) { return r.metric == "prod1_violations" && r.value > 0.0; });
}

}  // namespace matprod
