#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "curlspec/eigensolve.hpp"

namespace curlspec {

inline constexpr double kClusterGap = 1e-6;

// Ascending eigenvalues with residuals and multiplicity clusters.
struct Spectrum {
  std::string op;  // "dirichlet", "curlcurl", ..., or "oracle:dirichlet" etc.
  double h = 0.0;
  int order = 1;
  std::size_t dofs = 0;
  std::vector<double> values;
  std::vector<double> residuals;
  std::vector<bool> converged;
  std::vector<std::pair<int, int>> clusters;  // inclusive 0-based index ranges
};

// Groups consecutive values whose relative gap is <= `gap`.
std::vector<std::pair<int, int>> cluster_values(const std::vector<double>& values, double gap = kClusterGap);

Spectrum make_spectrum(std::string op, const std::vector<EigenPair>& pairs, double h, int order, std::size_t dofs);
Spectrum make_oracle_spectrum(std::string family, std::vector<double> values);

// {operator, h, order, dofs, values, residuals, converged, clusters:[[i,j]...]}
nlohmann::json spectrum_to_json(const Spectrum& s);
Spectrum spectrum_from_json(const nlohmann::json& j);

}  // namespace curlspec
