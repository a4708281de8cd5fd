#pragma once

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "matprod/complex_matrix.hpp"

namespace matprod {

/// Rejected user input: bad spec fields, malformed config, shape mismatch.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Entry distributions. Every law has mean 0 and E|X|^2 = 1.
enum class EntryLaw {
  complex_gaussian,
  real_gaussian,
  rademacher,
  uniform_pm_sqrt3,
  truncated_pareto,
};

std::string to_string(EntryLaw law);
EntryLaw entry_law_from_string(const std::string& name);

struct Truncation {
  double tau = 0.0;
  friend bool operator==(const Truncation&, const Truncation&) = default;
};

/// One random-matrix-product experiment: m factors of size n x n.
struct EnsembleSpec {
  int m = 1;
  int n = 2;
  EntryLaw entry_law = EntryLaw::complex_gaussian;
  /// Tail exponent of truncated_pareto; ignored for other laws. Must exceed 2.
  double pareto_exponent = 4.5;
  std::optional<Truncation> truncation;
  std::uint64_t seed = 0;

  /// Throws ConfigError when an invariant is violated.
  void validate() const;

  /// Raw-entry cutoff tau * sqrt(n), or +inf without truncation.
  double truncation_threshold() const;

  friend bool operator==(const EnsembleSpec&, const EnsembleSpec&) = default;
};

/// Default truncation level n^{-1/4}.
double default_tau(int n);

void to_json(nlohmann::json& j, const EnsembleSpec& spec);
void from_json(const nlohmann::json& j, EnsembleSpec& spec);

/// Raw (unscaled) n x n entries of factor `factor_index` (1-based) for
/// `replica`. Pure function of (spec.seed, factor_index, replica).
ComplexMatrix sample_raw_entries(const EnsembleSpec& spec, int factor_index, std::uint64_t replica);

/// Scaled factor X / sqrt(n), truncated and recentered first when the spec
/// asks for it.
ComplexMatrix sample_factor(const EnsembleSpec& spec, int factor_index, std::uint64_t replica);

/// Zero every entry with modulus above `threshold`, then subtract the
/// empirical mean of what is left.
ComplexMatrix truncate_recenter(const ComplexMatrix& raw, double threshold);

/// (1/n^2) sum |X_jk|^2 1{|X_jk| >= tau sqrt(n)} for one square raw matrix.
double lindeberg_ratio(const ComplexMatrix& raw, double tau);

/// Left-to-right product X1 X2 ... Xm.
ComplexMatrix product_chain(std::span<const ComplexMatrix> factors);

/// Samples all m factors for `replica` and multiplies them.
ComplexMatrix sample_product(const EnsembleSpec& spec, std::uint64_t replica);

}  // namespace matprod
