#pragma once

#include <filesystem>
#include <functional>
#include <json.hpp>
#include <string>
#include <vector>

#include "matprod/complex_matrix.hpp"
#include "matprod/ensembles.hpp"
#include "matprod/report.hpp"

namespace matprod {

struct MetricSelection {
  bool radial_ks = false;
  bool grid2d_ks = false;
  bool angular_ks = false;
  bool moments = false;
  bool potential = false;
  bool properties = false;
  friend bool operator==(const MetricSelection&, const MetricSelection&) = default;
};

struct ExperimentConfig {
  EnsembleSpec ensemble;  // ensemble.n is replaced by each entry of n_values
  std::vector<int> n_values{256};
  int replicas = 1;
  std::vector<cplx> z_values{0.0};
  MetricSelection metrics;
  int p_max = 4;
  std::filesystem::path output_dir = "out";
  int threads = 1;

  // Property-suite knobs.
  double prod3_constant = 0.05;
  double min_singular_threshold = 1e-8;
  int product_pairs = 100;
  int linearization_instances = 50;

  int grid2d_resolution = 64;
  double grid2d_extent = 1.5;
  int solver_grid = 2048;
  double log_floor = 1e-300;

  /// Throws ConfigError.
  void validate() const;

  EnsembleSpec ensemble_at(int n) const;
};

void to_json(nlohmann::json& j, const ExperimentConfig& c);
/// Throws ConfigError on missing or ill-typed fields.
void from_json(const nlohmann::json& j, ExperimentConfig& c);

ExperimentConfig load_config(const std::filesystem::path& path);

/// Runs fn(replica) for replica = 0 .. count-1 on `threads` workers. Results
/// land in replica order regardless of scheduling.
void for_each_replica(int count, int threads, const std::function<void(int)>& fn);

/// Median and interquartile range (linear interpolation between order statistics).
double median(std::vector<double> values);
double interquartile_range(std::vector<double> values);

/// Number of k for which prod_{j>=k} s_j(AB) < (1 - tol) prod_{j>=k} s_j(A) s_j(B).
int product_inequality_violations(const ComplexMatrix& a, const ComplexMatrix& b,
                                  double tol = 1e-8);

/// Label used in metric names, e.g. "0.5+0i".
std::string format_shift(cplx z);

ExperimentReport run_convergence(const ExperimentConfig& config);
ExperimentReport run_moment_check(const ExperimentConfig& config);
ExperimentReport run_potential_check(const ExperimentConfig& config);
ExperimentReport run_property_suite(const ExperimentConfig& config);

/// True when the product singular-value inequality failed anywhere.
bool has_hard_violation(const ExperimentReport& property_report);

}  // namespace matprod
