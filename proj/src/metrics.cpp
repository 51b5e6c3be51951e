#include "fuelrod/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "fuelrod/error.hpp"

namespace fuelrod {

namespace {

void check_lengths(std::span<const double> p, std::span<const double> t, const char* who) {
  if (p.empty() || p.size() != t.size()) {
    fail(ErrorKind::Domain, std::string(who) + ": need equal, nonempty vectors");
  }
}

RegionMetrics region_metrics(std::span<const double> p, std::span<const double> t) {
  RegionMetrics m;
  m.count = p.size();
  if (p.empty()) return m;
  const auto [lo, hi] = std::minmax_element(t.begin(), t.end());
  if (*hi > *lo) m.r_squared = r_squared(p, t);
  m.nl2 = nl2_norm(p, t);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double e = std::abs(p[i] - t[i]);
    m.max_abs_error = std::max(m.max_abs_error, e);
    m.max_rel_error = std::max(m.max_rel_error, e / std::abs(t[i]));
  }
  return m;
}

}  // namespace

double r_squared(std::span<const double> predicted, std::span<const double> truth) {
  check_lengths(predicted, truth, "r_squared");
  double mean = 0.0;
  for (double v : truth) mean += v;
  mean /= static_cast<double>(truth.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    ss_res += (predicted[i] - truth[i]) * (predicted[i] - truth[i]);
    ss_tot += (truth[i] - mean) * (truth[i] - mean);
  }
  if (!(ss_tot > 0.0)) fail(ErrorKind::Metric, "r_squared: truth vector is constant");
  return 1.0 - ss_res / ss_tot;
}

double nl2_norm(std::span<const double> predicted, std::span<const double> truth) {
  check_lengths(predicted, truth, "nl2_norm");
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    num += (predicted[i] - truth[i]) * (predicted[i] - truth[i]);
    den += truth[i] * truth[i];
  }
  if (!(den > 0.0)) fail(ErrorKind::Metric, "nl2_norm: truth vector has zero norm");
  return std::sqrt(num / den);
}

MetricsReport compare_fields(const TemperatureField& predicted, const TemperatureField& truth) {
  const auto& a = predicted.mesh;
  const auto& b = truth.mesh;
  if (a.node_count() != b.node_count() || predicted.temperature.size() != a.node_count() ||
      truth.temperature.size() != b.node_count()) {
    fail(ErrorKind::Config, "compare_fields: fields have different node counts");
  }
  for (std::size_t i = 0; i < a.node_count(); ++i) {
    if (a.node_region(i) != b.node_region(i) || std::abs(a.node_r(i) - b.node_r(i)) > 1e-12 ||
        std::abs(a.node_z(i) - b.node_z(i)) > 1e-9) {
      fail(ErrorKind::Config, "compare_fields: fields are not on the same mesh");
    }
  }
  const std::span<const double> p = predicted.temperature;
  const std::span<const double> t = truth.temperature;
  const std::size_t nf = a.fuel_node_count();
  MetricsReport r;
  r.r_squared = r_squared(p, t);
  const RegionMetrics all = region_metrics(p, t);
  r.nl2 = all.nl2;
  r.max_abs_error = all.max_abs_error;
  r.max_rel_error = all.max_rel_error;
  r.fuel = region_metrics(p.first(nf), t.first(nf));
  r.cladding = region_metrics(p.subspan(nf), t.subspan(nf));
  return r;
}

}  // namespace fuelrod
