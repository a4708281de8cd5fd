#include "matprod/ensembles.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "matprod/rng.hpp"

namespace matprod {

namespace {

constexpr std::pair<EntryLaw, const char*> kLawNames[] = {
    {EntryLaw::complex_gaussian, "complex_gaussian"},
    {EntryLaw::real_gaussian, "real_gaussian"},
    {EntryLaw::rademacher, "rademacher"},
    {EntryLaw::uniform_pm_sqrt3, "uniform_pm_sqrt3"},
    {EntryLaw::truncated_pareto, "truncated_pareto"},
};

std::uint64_t word(std::uint32_t lo, std::uint32_t hi) {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

// One entry from the 128 bits produced for its counter.
cplx draw_entry(EntryLaw law, double pareto_exponent, const PhiloxCounter& bits) {
  const std::uint64_t a = word(bits[0], bits[1]);
  const std::uint64_t b = word(bits[2], bits[3]);
  switch (law) {
    case EntryLaw::complex_gaussian: {
      const auto [g1, g2] = box_muller(a, b);
      return {g1 * std::numbers::sqrt2 / 2.0, g2 * std::numbers::sqrt2 / 2.0};
    }
    case EntryLaw::real_gaussian:
      return box_muller(a, b).first;
    case EntryLaw::rademacher:
      return (a >> 63) ? 1.0 : -1.0;
    case EntryLaw::uniform_pm_sqrt3:
      return std::sqrt(3.0) * (2.0 * to_unit_open0(a) - 1.0);
    case EntryLaw::truncated_pareto: {
      // |X| = U^{-1/a} on [1, inf) has E|X|^2 = a / (a - 2).
      const double scale = std::sqrt((pareto_exponent - 2.0) / pareto_exponent);
      const double magnitude = std::pow(to_unit_open0(a), -1.0 / pareto_exponent);
      return ((b >> 63) ? 1.0 : -1.0) * scale * magnitude;
    }
  }
  throw std::logic_error("unhandled entry law");
}

}  // namespace

std::string to_string(EntryLaw law) {
  for (const auto& [value, name] : kLawNames)
    if (value == law) return name;
  throw std::logic_error("unhandled entry law");
}

EntryLaw entry_law_from_string(const std::string& name) {
  for (const auto& [value, label] : kLawNames)
    if (name == label) return value;
  throw ConfigError("unknown entry_law '" + name + "'");
}

double default_tau(int n) { return std::pow(static_cast<double>(n), -0.25); }

void EnsembleSpec::validate() const {
  if (m < 1) throw ConfigError("ensemble: m must be >= 1, got " + std::to_string(m));
  if (n < 2) throw ConfigError("ensemble: n must be >= 2, got " + std::to_string(n));
  if (entry_law == EntryLaw::truncated_pareto && !(pareto_exponent > 2.0)) {
    throw ConfigError("ensemble: pareto_exponent must exceed 2 for unit variance");
  }
  if (truncation && !(truncation->tau > 0.0 && truncation->tau < 1.0)) {
    throw ConfigError("ensemble: truncation tau must lie in (0, 1)");
  }
}

double EnsembleSpec::truncation_threshold() const {
  // The constant c in c * tau * sqrt(n) is fixed to 1.
  if (!truncation) return std::numeric_limits<double>::infinity();
  return truncation->tau * std::sqrt(static_cast<double>(n));
}

void to_json(nlohmann::json& j, const EnsembleSpec& spec) {
  j = nlohmann::json{{"m", spec.m}, {"n", spec.n}, {"entry_law", to_string(spec.entry_law)}};
  if (spec.entry_law == EntryLaw::truncated_pareto) j["pareto_exponent"] = spec.pareto_exponent;
  if (spec.truncation) j["truncation"] = {{"tau", spec.truncation->tau}};
  j["seed"] = spec.seed;
}

void from_json(const nlohmann::json& j, EnsembleSpec& spec) {
  if (!j.is_object()) throw ConfigError("ensemble: expected a JSON object");
  try {
    EnsembleSpec out;
    out.m = j.at("m").get<int>();
    out.n = j.at("n").get<int>();
    out.entry_law = entry_law_from_string(j.at("entry_law").get<std::string>());
    out.pareto_exponent = j.value("pareto_exponent", 4.5);
    if (j.contains("truncation") && !j["truncation"].is_null()) {
      const auto& t = j["truncation"];
      out.truncation = Truncation{t.contains("tau") ? t["tau"].get<double>() : default_tau(out.n)};
    }
    out.seed = j.value("seed", std::uint64_t{0});
    spec = out;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("ensemble: ") + e.what());
  }
}

ComplexMatrix sample_raw_entries(const EnsembleSpec& spec, int factor_index,
                                 std::uint64_t replica) {
  if (factor_index < 1 || factor_index > spec.m) {
    throw ConfigError("sample_factor: factor_index " + std::to_string(factor_index) +
                      " outside [1, " + std::to_string(spec.m) + "]");
  }
  const auto n = static_cast<std::size_t>(spec.n);
  const PhiloxKey key = stream_key(spec.seed, static_cast<std::uint64_t>(factor_index), replica);
  ComplexMatrix raw(n, n);
  auto entries = raw.entries();
  for (std::size_t idx = 0; idx < entries.size(); ++idx) {
    const PhiloxCounter counter{static_cast<std::uint32_t>(idx),
                                static_cast<std::uint32_t>(idx >> 32), 0u, 0u};
    entries[idx] = draw_entry(spec.entry_law, spec.pareto_exponent, philox4x32(counter, key));
  }
  return raw;
}

ComplexMatrix sample_factor(const EnsembleSpec& spec, int factor_index, std::uint64_t replica) {
  ComplexMatrix x = sample_raw_entries(spec, factor_index, replica);
  if (spec.truncation) x = truncate_recenter(x, spec.truncation_threshold());
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(spec.n));
  for (auto& v : x.entries()) v *= inv_sqrt_n;
  return x;
}

ComplexMatrix truncate_recenter(const ComplexMatrix& raw, double threshold) {
  if (!(threshold > 0.0)) throw ConfigError("truncate_recenter: threshold must be positive");
  ComplexMatrix out = raw;
  auto entries = out.entries();
  if (entries.empty()) return out;
  cplx mean = 0.0;
  for (auto& v : entries) {
    if (std::abs(v) > threshold) v = 0.0;
    mean += v;
  }
  mean /= static_cast<double>(entries.size());
  for (auto& v : entries) v -= mean;
  return out;
}

double lindeberg_ratio(const ComplexMatrix& raw, double tau) {
  if (!(tau > 0.0)) throw ConfigError("lindeberg_ratio: tau must be positive");
  if (!raw.square()) throw ConfigError("lindeberg_ratio: matrix must be square");
  const double n = static_cast<double>(raw.rows());
  const double cutoff = tau * std::sqrt(n);
  double sum = 0.0;
  for (const auto& v : raw.entries()) {
    if (std::abs(v) >= cutoff) sum += std::norm(v);
  }
  return sum / (n * n);
}

ComplexMatrix product_chain(std::span<const ComplexMatrix> factors) {
  if (factors.empty()) throw ConfigError("product_chain: no factors");
  const std::size_t n = factors.front().rows();
  for (const auto& f : factors) {
    if (!f.square() || f.rows() != n) {
      throw ConfigError("product_chain: factors must be square with a common dimension");
    }
  }
  ComplexMatrix w = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) w = multiply(w, factors[k]);
  return w;
}

ComplexMatrix sample_product(const EnsembleSpec& spec, std::uint64_t replica) {
  std::vector<ComplexMatrix> factors;
  factors.reserve(static_cast<std::size_t>(spec.m));
  for (int nu = 1; nu <= spec.m; ++nu) factors.push_back(sample_factor(spec, nu, replica));
  return product_chain(factors);
}

}  // namespace matprod
