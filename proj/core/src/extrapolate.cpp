#include "curlspec/extrapolate.hpp"

#include <cmath>
#include <limits>

#include "curlspec/error.hpp"

namespace curlspec {

double observed_rate(std::span<const double> h, std::span<const double> v) {
  if (h.size() < 3 || v.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t n = v.size();
  const double d1 = v[n - 3] - v[n - 2];
  const double d2 = v[n - 2] - v[n - 1];
  if (d1 == 0.0 || d2 == 0.0 || (d1 > 0) != (d2 > 0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log(d1 / d2) / std::log(h[n - 2] / h[n - 1]);
}

Extrapolation richardson(std::span<const double> h, std::span<const double> v, double default_rate) {
  if (h.size() != v.size() || v.empty()) throw InvalidSpecError("richardson: need matching, non-empty h and values");
  const std::size_t n = v.size();
  Extrapolation e;
  e.rate = default_rate;
  if (n == 1) {
    e.value = v[0];
    return e;
  }
  const double ratio = h[n - 2] / h[n - 1];
  auto limit = [&](double p) { return v[n - 1] + (v[n - 1] - v[n - 2]) / (std::pow(ratio, p) - 1.0); };

  const double nominal = limit(default_rate);
  if (n >= 3) {
    const double p = observed_rate(h, v);
    if (std::isfinite(p) && p >= kMinRate && p <= kMaxRate) {
      e.rate = p;
      e.rate_fitted = true;
      e.value = limit(p);
      e.residual = std::abs(e.value - nominal);
      return e;
    }
  }
  e.value = nominal;
  e.residual = std::abs(nominal - v[n - 1]);
  return e;
}

}  // namespace curlspec
