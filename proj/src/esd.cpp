#include "matprod/esd.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace matprod {

EmpiricalCDF::EmpiricalCDF(std::vector<double> samples) : samples_(std::move(samples)) {
  for (const double s : samples_) {
    if (std::isnan(s)) throw std::invalid_argument("EmpiricalCDF: NaN sample");
  }
  std::sort(samples_.begin(), samples_.end());
}

double EmpiricalCDF::operator()(double x) const {
  if (samples_.empty()) return 0.0;
  const auto it = std::upper_bound(samples_.begin(), samples_.end(), x);
  return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
}

double EmpiricalCDF::left_limit(double x) const {
  if (samples_.empty()) return 0.0;
  const auto it = std::lower_bound(samples_.begin(), samples_.end(), x);
  return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
}

void EmpiricalCDF::write_csv(std::ostream& out) const {
  out << "sample,cumulative_weight\n";
  const double total = static_cast<double>(samples_.size());
  char buf[64];
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", samples_[k],
                  static_cast<double>(k + 1) / total);
    out << buf;
  }
}

EmpiricalCDF radial_ecdf(const EigenSpectrum& spectrum) {
  std::vector<double> r;
  r.reserve(spectrum.values.size());
  for (const auto& v : spectrum.values) r.push_back(std::abs(v));
  return EmpiricalCDF(std::move(r));
}

EmpiricalCDF angular_ecdf(const EigenSpectrum& spectrum) {
  std::vector<double> a;
  a.reserve(spectrum.values.size());
  for (const auto& v : spectrum.values) {
    double t = std::arg(v) / (2.0 * std::numbers::pi);
    if (t < 0.0) t += 1.0;
    a.push_back(t >= 1.0 ? 0.0 : t);
  }
  return EmpiricalCDF(std::move(a));
}

EmpiricalCDF squared_ecdf(const SingularSpectrum& spectrum) {
  std::vector<double> sq;
  sq.reserve(spectrum.values.size());
  for (const double s : spectrum.values) sq.push_back(s * s);
  return EmpiricalCDF(std::move(sq));
}

double cdf2d(const EigenSpectrum& spectrum, double x, double y) {
  if (spectrum.values.empty()) return 0.0;
  const auto count = std::count_if(spectrum.values.begin(), spectrum.values.end(),
                                   [&](const cplx& v) { return v.real() <= x && v.imag() <= y; });
  return static_cast<double>(count) / static_cast<double>(spectrum.values.size());
}

double symmetrize(const EmpiricalCDF& squared_value_cdf, double x) {
  const double sign = x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
  return 0.5 * (1.0 + sign * squared_value_cdf(x * x));
}

double ks_distance(const EmpiricalCDF& empirical, const std::function<double(double)>& reference) {
  const auto& s = empirical.samples();
  const double total = static_cast<double>(s.size());
  double worst = 0.0;
  std::size_t k = 0;
  while (k < s.size()) {
    std::size_t next = k;
    while (next < s.size() && s[next] == s[k]) ++next;
    const double g = reference(s[k]);
    const double g_left = reference(std::nextafter(s[k], -std::numeric_limits<double>::infinity()));
    const double before = static_cast<double>(k) / total;
    const double after = static_cast<double>(next) / total;
    worst = std::max({worst, std::abs(after - g), std::abs(before - g_left)});
    k = next;
  }
  return std::min(worst, 1.0);
}

double grid2d_distance(const EigenSpectrum& spectrum,
                       const std::function<double(double, double)>& reference, int grid,
                       double extent) {
  double worst = 0.0;
  for (const auto& v : spectrum.values) {
    worst = std::max(worst,
                     std::abs(cdf2d(spectrum, v.real(), v.imag()) - reference(v.real(), v.imag())));
  }
  for (int i = 0; i < grid; ++i) {
    const double x = -extent + 2.0 * extent * i / (grid - 1);
    for (int j = 0; j < grid; ++j) {
      const double y = -extent + 2.0 * extent * j / (grid - 1);
      worst = std::max(worst, std::abs(cdf2d(spectrum, x, y) - reference(x, y)));
    }
  }
  return worst;
}

PotentialEstimate empirical_log_potential(const ComplexMatrix& w, cplx z, double smoothing_radius,
                                          int smoothing_draws, CounterStream* stream,
                                          double floor) {
  if (smoothing_radius < 0.0) {
    throw std::invalid_argument("empirical_log_potential: smoothing_radius must be >= 0");
  }
  const double n = static_cast<double>(w.rows());
  PotentialEstimate out;
  out.smoothing_radius = smoothing_radius;
  if (smoothing_radius == 0.0) {
    const LogAbsDet d = log_abs_det(w, z, floor);
    out.value = -d.value / n;
    out.floored_count = d.floored_count;
    return out;
  }
  if (smoothing_draws < 1 || stream == nullptr) {
    throw std::invalid_argument(
        "empirical_log_potential: smoothing needs smoothing_draws >= 1 and a random stream");
  }
  double sum = 0.0;
  for (int k = 0; k < smoothing_draws; ++k) {
    const LogAbsDet d = log_abs_det(w, z + smoothing_radius * stream->uniform_in_disc(), floor);
    sum += -d.value / n;
    out.floored_count += d.floored_count;
  }
  out.value = sum / smoothing_draws;
  out.replica_count = smoothing_draws;
  return out;
}

double spectral_moment(const SingularSpectrum& singulars, int p) {
  if (p < 0 || p > kMaxSpectralMomentOrder) {
    throw std::invalid_argument("spectral_moment: p must lie in [0, " +
                                std::to_string(kMaxSpectralMomentOrder) + "]");
  }
  if (singulars.values.empty()) return 0.0;
  double sum = 0.0;
  for (const double s : singulars.values) sum += std::pow(s * s, p);
  return sum / static_cast<double>(singulars.values.size());
}

}  // namespace matprod
