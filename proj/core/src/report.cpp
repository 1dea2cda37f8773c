#include "curlspec/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "curlspec/error.hpp"

namespace curlspec {

using nlohmann::json;

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_from(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

const char* verdict(bool pass) { return pass ? "pass" : "fail"; }

json spectra_json(const std::vector<Spectrum>& levels) {
  json a = json::array();
  for (const auto& s : levels) a.push_back(spectrum_to_json(s));
  return a;
}

std::vector<Spectrum> spectra_from(const json& j) {
  std::vector<Spectrum> out;
  for (const auto& s : j) out.push_back(spectrum_from_json(s));
  return out;
}

// Fixed-width-free Markdown table.
class Table {
public:
  explicit Table(std::vector<std::string> head) : head_(std::move(head)) {}
  void row(std::vector<std::string> r) { rows_.push_back(std::move(r)); }
  std::string str() const {
    std::ostringstream o;
    line(o, head_);
    o << '|';
    for (std::size_t i = 0; i < head_.size(); ++i) o << "---|";
    o << '\n';
    for (const auto& r : rows_) line(o, r);
    return o.str();
  }

private:
  static void line(std::ostringstream& o, const std::vector<std::string>& r) {
    o << '|';
    for (const auto& c : r) o << ' ' << c << " |";
    o << '\n';
  }
  std::vector<std::string> head_;
  std::vector<std::vector<std::string>> rows_;
};

std::string fmt(double x, const char* f = "%.6g") {
  if (!std::isfinite(x)) return format_number(x);
  char buf[40];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

}  // namespace

json to_json(const KernelInfo& k) {
  return {{"interior_vertices", k.interior_vertices},
          {"deflated", k.deflated},
          {"kg_ratio", k.kg_ratio},
          {"extra_zero_modes", k.extra_zero_modes},
          {"exact", k.exact()}};
}

json to_json(const Track& t) {
  return {{"operator", t.op},
          {"index", t.index},
          {"h", t.h},
          {"values", t.values},
          {"extrapolated", t.extrapolation.value},
          {"rate", t.extrapolation.rate},
          {"rate_fitted", t.extrapolation.rate_fitted},
          {"residual", t.extrapolation.residual},
          {"observed_rate", number(t.observed_rate)},
          {"resolved", t.resolved}};
}

json to_json(const InterlaceReport& r) {
  json j;
  j["domain"] = r.domain;
  j["kmax"] = r.kmax;
  j["pass"] = r.pass;
  auto& rec = j["records"] = json::array();
  for (const auto& x : r.check.records) {
    rec.push_back({{"k", x.k},
                   {"alpha_2k1", x.alpha_2k1},
                   {"lambda_k", x.lambda_k},
                   {"margin", x.margin},
                   {"tolerance", x.tolerance},
                   {"verdict", verdict(x.pass)},
                   {"strict", x.strict},
                   {"resolved", x.resolved}});
  }
  auto& prov = j["provenance"] = json::array();
  for (const auto& p : r.provenance) prov.push_back({{"spectrum", p.spectrum}, {"source", p.source}, {"h", p.h}});
  auto& conv = j["convergence"] = json::array();
  for (const auto& t : r.convergence) conv.push_back(to_json(t));
  auto& lv = j["levels"] = json::array();
  for (const auto& l : r.levels) {
    json e{{"n", l.n}, {"h", l.h}, {"curl_dofs", l.curl_dofs}, {"lagrange_dofs", l.lagrange_dofs}};
    e["kernel"] = l.kernel ? to_json(*l.kernel) : json(nullptr);
    lv.push_back(std::move(e));
  }
  j["spectra"] = {{"alpha", spectra_json(r.alpha_levels)}, {"lambda", spectra_json(r.lambda_levels)}};
  return j;
}

InterlaceReport interlace_report_from_json(const json& j) {
  try {
    InterlaceReport r = build_interlace_report(j.at("domain").get<std::string>(),
                                               spectra_from(j.at("spectra").at("alpha")),
                                               spectra_from(j.at("spectra").at("lambda")), j.at("kmax").get<int>());
    for (const auto& e : j.value("levels", json::array())) {
      LevelInfo l;
      l.n = e.at("n").get<int>();
      l.h = e.at("h").get<double>();
      l.curl_dofs = e.at("curl_dofs").get<std::size_t>();
      l.lagrange_dofs = e.at("lagrange_dofs").get<std::size_t>();
      if (const auto& k = e.at("kernel"); !k.is_null()) {
        KernelInfo info;
        info.interior_vertices = k.at("interior_vertices").get<std::size_t>();
        info.deflated = k.at("deflated").get<std::size_t>();
        info.kg_ratio = number_from(k.at("kg_ratio"));
        info.extra_zero_modes = k.at("extra_zero_modes").get<std::size_t>();
        l.kernel = info;
      }
      r.levels.push_back(l);
    }
    return r;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed interlace report: ") + e.what());
  }
}

json to_json(const UnionReport& r) {
  json j;
  j["domain"] = r.domain;
  j["nev"] = r.nev;
  j["pass"] = r.pass;
  j["oracle"] = {{"dirichlet", r.dirichlet}, {"maxwell", r.maxwell}, {"merged", r.merged}};
  j["counting"] = {{"ceiling", r.count_ceiling},
                   {"union", r.count_union},
                   {"dirichlet", r.count_dirichlet},
                   {"maxwell", r.count_maxwell},
                   {"identity", r.counting_identity}};
  auto& t = j["tracks"] = json::array();
  for (const auto& u : r.tracks) {
    t.push_back({{"index", u.index},
                 {"oracle", u.oracle},
                 {"family", u.family},
                 {"extrapolated", u.track.extrapolation.value},
                 {"rel_error", u.rel_error},
                 {"verdict", verdict(u.pass)},
                 {"track", to_json(u.track)}});
  }
  j["spectra"] = spectra_json(r.levels);
  return j;
}

json to_json(const TrialSubspaceReport& r) {
  json rows = json::array();
  for (const auto& x : r.rows) {
    rows.push_back({{"l", x.l}, {"component", x.component}, {"gradient_energy", x.gradient_energy}, {"sb", x.sb}});
  }
  return {{"k", r.k},
          {"lambda_k", r.lambda_k},
          {"lambda_k_ritz", r.lambda_k_ritz},
          {"max_quotient", r.max_quotient},
          {"gradient_sum", r.gradient_sum},
          {"sb_sum", r.sb_sum},
          {"cross_term", r.cross_term},
          {"rows", rows},
          {"verdict", verdict(r.pass)}};
}

json to_json(const NeumannReport& r) {
  json rec = json::array();
  for (const auto& x : r.records) {
    rec.push_back({{"k", x.k}, {"mu_k3", x.mu_k3}, {"lambda_k", x.lambda_k}, {"margin", x.margin}, {"holds", x.holds}});
  }
  return {{"domain", r.domain},
          {"source", r.source},
          {"status", "exploratory"},
          {"holds", r.holds},
          {"records", rec}};
}

json to_json(const DivTraceReport& r) {
  auto rec = [](const DivTraceRecord& x) {
    return json{{"value", x.value},
                {"div_fraction", x.div_fraction},
                {"interior_rms", x.interior_rms},
                {"boundary_rms", x.boundary_rms},
                {"ratio", number(x.ratio)}};
  };
  json levels = json::array();
  for (const auto& l : r.levels) {
    json rs = json::array();
    for (const auto& x : l.records) rs.push_back(rec(x));
    levels.push_back({{"n", l.n}, {"h", l.h}, {"records", rs}});
  }
  return {{"domain", r.domain}, {"status", "diagnostic"}, {"levels", levels}, {"control", rec(r.control)}};
}

std::string to_markdown(const InterlaceReport& r) {
  std::ostringstream o;
  o << "# Interlacing alpha_{2k+1} <= lambda_k on " << r.domain << "\n\n";
  o << "Overall: **" << verdict(r.pass) << "**\n\n";
  Table t({"k", "alpha_2k+1", "lambda_k", "margin", "tolerance", "verdict", "strict"});
  for (const auto& x : r.check.records) {
    t.row({std::to_string(x.k), fmt(x.alpha_2k1, "%.10g"), fmt(x.lambda_k, "%.10g"), fmt(x.margin, "%.6g"),
           fmt(x.tolerance, "%.3g"), std::string(verdict(x.pass)) + (x.resolved ? "" : " (unresolved)"),
           x.strict ? "yes" : "no"});
  }
  o << t.str() << "\n## Provenance\n\n";
  for (const auto& p : r.provenance) {
    o << "- " << p.spectrum << ": " << p.source;
    if (!p.h.empty()) {
      o << " (h =";
      for (double h : p.h) o << ' ' << fmt(h, "%.4g");
      o << ')';
    }
    o << '\n';
  }
  if (!r.levels.empty()) {
    o << "\n## Levels\n\n";
    Table l({"n", "h", "curl dofs", "Lagrange dofs", "interior vertices", "deflated", "||KG||/||K||"});
    for (const auto& x : r.levels) {
      l.row({std::to_string(x.n), fmt(x.h, "%.4g"), std::to_string(x.curl_dofs), std::to_string(x.lagrange_dofs),
             x.kernel ? std::to_string(x.kernel->interior_vertices) : "-",
             x.kernel ? std::to_string(x.kernel->deflated) : "-", x.kernel ? fmt(x.kernel->kg_ratio, "%.2e") : "-"});
    }
    o << l.str();
  }
  if (!r.convergence.empty()) {
    o << "\n## Convergence\n\n";
    Table c({"track", "values", "extrapolated", "rate", "residual", "observed rate"});
    for (const auto& x : r.convergence) {
      std::string vals;
      for (double v : x.values) vals += (vals.empty() ? "" : ", ") + fmt(v, "%.8g");
      c.row({x.op + " " + std::to_string(x.index), vals, fmt(x.extrapolation.value, "%.8g"),
             fmt(x.extrapolation.rate, "%.3g") + (x.extrapolation.rate_fitted ? "" : " (default)"),
             fmt(x.extrapolation.residual, "%.2e"), fmt(x.observed_rate, "%.3g")});
    }
    o << c.str();
  }
  return o.str();
}

std::string to_markdown(const UnionReport& r) {
  std::ostringstream o;
  o << "# Spectrum union on " << r.domain << "\n\nOverall: **" << verdict(r.pass) << "**\n\n";
  o << "Counting at V = " << fmt(r.count_ceiling) << ": union " << r.count_union << " = Dirichlet "
    << r.count_dirichlet << " + Maxwell " << r.count_maxwell << " (" << (r.counting_identity ? "exact" : "MISMATCH")
    << ")\n\n";
  Table t({"index", "oracle", "family", "extrapolated", "rel. error", "verdict"});
  for (std::size_t i = 0; i < r.merged.size(); ++i) {
    if (i < r.tracks.size()) {
      const auto& u = r.tracks[i];
      t.row({std::to_string(u.index), fmt(u.oracle, "%.10g"), u.family, fmt(u.track.extrapolation.value, "%.8g"),
             fmt(u.rel_error, "%.2e"), verdict(u.pass)});
    } else {
      t.row({std::to_string(i + 1), fmt(r.merged[i], "%.10g"), "", "", "", ""});
    }
  }
  o << t.str();
  return o.str();
}

std::string to_markdown(const TrialSubspaceReport& r) {
  std::ostringstream o;
  o << "# Trial subspace, k = " << r.k << "\n\n";
  o << "max quotient " << fmt(r.max_quotient, "%.12g") << " vs lambda_k " << fmt(r.lambda_k_ritz, "%.12g") << ": **"
    << verdict(r.pass) << "**\n\n";
  Table t({"l", "component", "grad energy", "sb(u,u)"});
  for (const auto& x : r.rows) {
    t.row({std::to_string(x.l), std::to_string(x.component), fmt(x.gradient_energy, "%.12g"), fmt(x.sb, "%.12g")});
  }
  o << t.str() << "\ngradient sum " << fmt(r.gradient_sum, "%.12g") << ", sb trace " << fmt(r.sb_sum, "%.12g")
    << ", max cross term " << fmt(r.cross_term, "%.3e") << '\n';
  return o.str();
}

std::string to_markdown(const NeumannReport& r) {
  std::ostringstream o;
  o << "# Neumann exploration mu_{k+3} <= lambda_k on " << r.domain << " (" << r.source << ")\n\n";
  o << "Exploratory; holds for all k: " << (r.holds ? "yes" : "no") << "\n\n";
  Table t({"k", "mu_k+3", "lambda_k", "margin"});
  for (const auto& x : r.records) {
    t.row({std::to_string(x.k), fmt(x.mu_k3, "%.10g"), fmt(x.lambda_k, "%.10g"), fmt(x.margin, "%.6g")});
  }
  o << t.str();
  return o.str();
}

std::string to_markdown(const DivTraceReport& r) {
  std::ostringstream o;
  o << "# Divergence boundary trace on " << r.domain << "\n\n";
  Table t({"n", "eta", "div fraction", "interior rms", "boundary rms", "ratio"});
  for (const auto& l : r.levels) {
    for (const auto& x : l.records) {
      t.row({std::to_string(l.n), fmt(x.value, "%.8g"), fmt(x.div_fraction, "%.3g"), fmt(x.interior_rms, "%.3e"),
             fmt(x.boundary_rms, "%.3e"), fmt(x.ratio, "%.3g")});
    }
  }
  o << t.str() << "\nControl u = (x, 0, 0): ratio " << fmt(r.control.ratio, "%.3g") << '\n';
  return o.str();
}

std::string spectra_csv(const std::vector<Spectrum>& levels) {
  std::ostringstream o;
  o << "operator,level,h,dofs,index,value,residual,converged\n";
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const auto& s = levels[l];
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      o << s.op << ',' << l << ',' << format_number(s.h) << ',' << s.dofs << ',' << i + 1 << ','
        << format_number(s.values[i]) << ',' << format_number(i < s.residuals.size() ? s.residuals[i] : 0.0) << ','
        << (i < s.converged.size() && s.converged[i] ? 1 : 0) << '\n';
    }
  }
  return o.str();
}

}  // namespace curlspec
