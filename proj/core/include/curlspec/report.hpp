#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "curlspec/verify.hpp"

namespace curlspec {

// {domain, kmax, pass, records:[{k, alpha_2k1, lambda_k, margin, tolerance, verdict, strict, resolved}],
//  provenance, convergence, levels, spectra:{alpha:[...], lambda:[...]}}
nlohmann::json to_json(const InterlaceReport& r);
// Rebuilds the report from the embedded spectra; verdicts are recomputed.
InterlaceReport interlace_report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const UnionReport& r);
nlohmann::json to_json(const TrialSubspaceReport& r);
nlohmann::json to_json(const NeumannReport& r);
nlohmann::json to_json(const DivTraceReport& r);
nlohmann::json to_json(const Track& t);
nlohmann::json to_json(const KernelInfo& k);

std::string to_markdown(const InterlaceReport& r);
std::string to_markdown(const UnionReport& r);
std::string to_markdown(const TrialSubspaceReport& r);
std::string to_markdown(const NeumannReport& r);
std::string to_markdown(const DivTraceReport& r);

// operator,level,h,dofs,index,value,residual,converged (one row per value).
std::string spectra_csv(const std::vector<Spectrum>& levels);

// %.17g
std::string format_number(double x);

}  // namespace curlspec
