#include "curlspec/spectrum.hpp"

#include <algorithm>
#include <cmath>

#include "curlspec/error.hpp"

namespace curlspec {

std::vector<std::pair<int, int>> cluster_values(const std::vector<double>& values, double gap) {
  std::vector<std::pair<int, int>> out;
  const int n = static_cast<int>(values.size());
  int start = 0;
  for (int i = 1; i <= n; ++i) {
    bool split = i == n;
    if (!split) {
      const double a = values[i - 1];
      const double b = values[i];
      const double scale = std::max(std::abs(a), std::abs(b));
      const bool both_zero = scale < 1e-10;
      split = !both_zero && (b - a) > gap * scale;
    }
    if (split) {
      out.emplace_back(start, i - 1);
      start = i;
    }
  }
  return out;
}

Spectrum make_spectrum(std::string op, const std::vector<EigenPair>& pairs, double h, int order,
                       std::size_t dofs) {
  Spectrum s;
  s.op = std::move(op);
  s.h = h;
  s.order = order;
  s.dofs = dofs;
  for (const auto& p : pairs) {
    s.values.push_back(p.value);
    s.residuals.push_back(p.residual);
    s.converged.push_back(p.converged);
  }
  s.clusters = cluster_values(s.values);
  return s;
}

Spectrum make_oracle_spectrum(std::string family, std::vector<double> values) {
  Spectrum s;
  s.op = "oracle:" + family;
  s.values = std::move(values);
  s.residuals.assign(s.values.size(), 0.0);
  s.converged.assign(s.values.size(), true);
  s.clusters = cluster_values(s.values);
  return s;
}

nlohmann::json spectrum_to_json(const Spectrum& s) {
  nlohmann::json j;
  j["operator"] = s.op;
  j["h"] = s.h;
  j["order"] = s.order;
  j["dofs"] = s.dofs;
  j["values"] = s.values;
  j["residuals"] = s.residuals;
  j["converged"] = s.converged;
  auto& c = j["clusters"] = nlohmann::json::array();
  for (const auto& [a, b] : s.clusters) c.push_back({a, b});
  return j;
}

Spectrum spectrum_from_json(const nlohmann::json& j) {
  try {
    Spectrum s;
    s.op = j.at("operator").get<std::string>();
    s.h = j.value("h", 0.0);
    s.order = j.value("order", 1);
    s.dofs = j.value("dofs", std::size_t{0});
    s.values = j.at("values").get<std::vector<double>>();
    s.residuals = j.value("residuals", std::vector<double>(s.values.size(), 0.0));
    s.converged = j.value("converged", std::vector<bool>(s.values.size(), true));
    if (j.contains("clusters")) {
      for (const auto& c : j["clusters"]) s.clusters.emplace_back(c.at(0).get<int>(), c.at(1).get<int>());
    } else {
      s.clusters = cluster_values(s.values);
    }
    if (!std::is_sorted(s.values.begin(), s.values.end())) throw ParseError("spectrum values not ascending");
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed spectrum JSON: ") + e.what());
  }
}

}  // namespace curlspec
