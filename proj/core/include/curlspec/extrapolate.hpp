#pragma once

#include <span>
#include <vector>

namespace curlspec {

struct Extrapolation {
  double value = 0.0;     // limit estimate
  double rate = 2.0;      // fitted (or assumed) exponent p in v(h) = v0 + C h^p
  bool rate_fitted = false;
  double residual = 0.0;  // model uncertainty of `value`
};

inline constexpr double kDefaultRate = 2.0;
inline constexpr double kMinRate = 1.0;
inline constexpr double kMaxRate = 4.0;

// Richardson extrapolation of one eigenvalue track over decreasing mesh sizes.
//  - 1 level: the value itself, residual 0 (nothing to extrapolate).
//  - 2 levels: assumed rate `default_rate`; residual = |limit - finest|.
//  - >= 3 levels: rate fitted from the three finest levels when the
//    differences are monotone and the fit lands in [1, 4]; otherwise the
//    default rate is used. Residual = |limit(fitted) - limit(default)|, or
//    |limit - finest| when the fit was rejected.
Extrapolation richardson(std::span<const double> h, std::span<const double> values,
                         double default_rate = kDefaultRate);

// Observed rate log(|v1 - v2| / |v2 - v3|) / log(h1/h2) for three levels with
// a common refinement ratio; NaN when undefined.
double observed_rate(std::span<const double> h, std::span<const double> values);

}  // namespace curlspec
