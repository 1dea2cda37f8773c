#include "cli.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "curlspec/assembly.hpp"
#include "curlspec/error.hpp"
#include "curlspec/gmsh.hpp"
#include "curlspec/mesh_json.hpp"
#include "curlspec/report.hpp"
#include "curlspec/verify.hpp"

namespace curlspec::cli {

namespace fs = std::filesystem;
using nlohmann::json;

nlohmann::json RunConfig::to_json() const {
  json j{{"subcommand", subcommand},
         {"action", action},
         {"domain", domain},
         {"a", a},
         {"b", b},
         {"c", c},
         {"nx", nx},
         {"ny", ny},
         {"nz", nz},
         {"input", input},
         {"operator", op},
         {"family", family},
         {"order", order},
         {"nev", nev},
         {"count", count},
         {"kmax", kmax},
         {"trial_n", trial_n},
         {"levels", levels},
         {"tol", tol},
         {"max_iterations", max_iterations},
         {"preconditioner", preconditioner},
         {"oracle_only", oracle_only},
         {"union_tol", union_tol},
         {"output", output},
         {"out_dir", out_dir},
         {"dump_matrices", dump_matrices},
         {"replay", replay},
         {"seed", seed},
         {"threads", threads}};
  j["sigma"] = sigma ? json(*sigma) : json(nullptr);
  return j;
}

double parse_length(const std::string& token) {
  std::string t;
  for (char ch : token) {
    if (!std::isspace(static_cast<unsigned char>(ch))) t += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  }
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw InvalidSpecError("not a length: '" + token + "'");
    return v;
  };
  double v = 0.0;
  const auto p = t.find("pi");
  if (p == std::string::npos) {
    v = number(t);
  } else {
    std::string head = t.substr(0, p);
    std::string tail = t.substr(p + 2);
    if (!head.empty() && head.back() == '*') head.pop_back();
    v = std::numbers::pi * (head.empty() ? 1.0 : number(head));
    if (!tail.empty()) {
      if (tail.front() != '/') throw InvalidSpecError("not a length: '" + token + "'");
      v /= number(tail.substr(1));
    }
  }
  if (!(v > 0.0) || !std::isfinite(v)) throw InvalidSpecError("length must be positive: '" + token + "'");
  return v;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream o(path, std::ios::binary);
  if (!o) throw Error("cannot write '" + path.string() + "'");
  o << content;
  if (!o) throw Error("write failed for '" + path.string() + "'");
}

struct Stamp {
  json config;
  std::string hash;

  void into(json& j) const {
    j["run_config"] = config;
    j["input_hash"] = hash;
  }
  std::string markdown() const {
    return "\n## Run\n\ninput hash `" + hash + "`\n\n```json\n" + config.dump(2) + "\n```\n";
  }
  std::string csv_header() const { return "# run_config=" + config.dump() + " input_hash=" + hash + "\n"; }
};

Stamp make_stamp(const RunConfig& cfg) {
  Stamp s;
  s.config = cfg.to_json();
  std::string bytes = s.config.dump();
  for (const auto& f : {cfg.input, cfg.replay}) {
    if (!f.empty()) bytes += '\0' + read_file(f);
  }
  s.hash = fnv1a_hex(bytes);
  return s;
}

TetMesh load_mesh(const std::string& path) {
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return read_mesh_json(path);
  return read_gmsh(path);
}

PreconditionerKind parse_preconditioner(const std::string& s) {
  if (s == "factorized") return PreconditionerKind::Factorized;
  if (s == "diagonal") return PreconditionerKind::Diagonal;
  throw InvalidSpecError("unknown preconditioner '" + s + "' (factorized|diagonal)");
}

void parse_box(const std::string& token, RunConfig& cfg) {
  std::vector<std::string> parts;
  std::stringstream ss(token);
  for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
  if (parts.size() == 1) {
    cfg.a = cfg.b = cfg.c = parse_length(parts[0]);
  } else if (parts.size() == 3) {
    cfg.a = parse_length(parts[0]);
    cfg.b = parse_length(parts[1]);
    cfg.c = parse_length(parts[2]);
  } else {
    throw InvalidSpecError("--box takes one side or three comma-separated sides");
  }
}

json mesh_summary(const TetMesh& m) {
  std::size_t bv = 0;
  for (auto f : m.boundary_vertex_flags()) bv += f;
  return {{"vertices", m.num_vertices()},
          {"edges", m.num_edges()},
          {"faces", m.num_faces()},
          {"tets", m.num_tets()},
          {"boundary_faces", m.num_boundary_faces()},
          {"boundary_vertices", bv},
          {"boundary_edges", m.num_boundary_edges()},
          {"interior_vertices", m.num_interior_vertices()},
          {"euler_characteristic", m.euler_characteristic()},
          {"h", m.max_edge_length()},
          {"convex", m.is_convex()}};
}

StudySpec study_of(const RunConfig& cfg) {
  StudySpec s;
  if (!cfg.input.empty()) {
    s.domain = DomainKind::File;
    s.mesh_path = cfg.input;
  } else if (cfg.domain == "box") {
    s.domain = DomainKind::Box;
  } else if (cfg.domain == "lshape") {
    s.domain = DomainKind::LShape;
  } else if (cfg.domain == "fichera") {
    s.domain = DomainKind::Fichera;
  } else {
    throw InvalidSpecError("unknown domain '" + cfg.domain + "' (box|lshape|fichera)");
  }
  s.a = cfg.a;
  s.b = cfg.b;
  s.c = cfg.c;
  s.kmax = cfg.kmax;
  s.levels = cfg.levels;
  s.order = cfg.order;
  s.nev = cfg.nev;
  s.oracle_only = cfg.oracle_only;
  s.solver_tol = cfg.tol;
  s.max_iterations = cfg.max_iterations;
  s.preconditioner = parse_preconditioner(cfg.preconditioner);
  s.threads = cfg.threads;
  s.union_rel_tol = cfg.union_tol;
  s.seed = cfg.seed;
  s.validate();
  return s;
}

SolverSettings settings_of(const RunConfig& cfg) {
  SolverSettings st;
  st.order = cfg.order;
  st.tol = cfg.tol;
  st.max_iterations = cfg.max_iterations;
  st.preconditioner = parse_preconditioner(cfg.preconditioner);
  st.threads = cfg.threads;
  st.seed = cfg.seed;
  return st;
}

int cmd_mesh(const RunConfig& cfg, std::ostream& out) {
  TetMesh mesh;
  if (cfg.action == "import") {
    mesh = load_mesh(cfg.input);
  } else {
    const BoxSpec spec{cfg.a, cfg.b, cfg.c, cfg.nx, cfg.ny, cfg.nz};
    if (cfg.action == "box") mesh = build_box_mesh(spec);
    else if (cfg.action == "lshape") mesh = build_lshape_mesh(spec);
    else mesh = build_fichera_mesh(spec);
  }
  const Stamp stamp = make_stamp(cfg);
  json j = mesh_to_json(mesh);
  const json summary = mesh_summary(mesh);
  j["summary"] = summary;
  stamp.into(j);
  write_file(cfg.output, j.dump());
  out << "mesh " << mesh.descriptor << " -> " << cfg.output << '\n';
  for (const auto& [k, v] : summary.items()) out << "  " << k << ' ' << v.dump() << '\n';
  return kOk;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  const TetMesh mesh = load_mesh(cfg.input);
  const OperatorKind op = parse_operator(cfg.op);
  const SolverSettings st = settings_of(cfg);
  const Stamp stamp = make_stamp(cfg);

  json j;
  Spectrum spectrum;
  if (cfg.sigma) {
    const bool lagrange = op == OperatorKind::DirichletLaplacian || op == OperatorKind::NeumannLaplacian;
    const Pencil pencil = assemble(mesh, op, {lagrange ? cfg.order : 1, cfg.threads, true});
    SolveResult res = solve_shift_invert(pencil.K, pencil.M, *cfg.sigma, cfg.nev, cfg.tol, cfg.seed);
    if (op == OperatorKind::CurlCurl) res.pairs = drop_zero_modes(std::move(res.pairs), *cfg.sigma);
    spectrum = make_spectrum(to_string(op), res.pairs, pencil.h, pencil.order, pencil.dofs.free_count);
    j = spectrum_to_json(spectrum);
    j["solver"] = {{"method", "shift-invert"}, {"sigma", *cfg.sigma}, {"iterations", res.iterations}};
    if (!cfg.dump_matrices.empty()) {
      std::ostringstream k, m;
      write_matrix_market(pencil.K, k);
      write_matrix_market(pencil.M, m);
      write_file(cfg.dump_matrices + "_K.mtx", k.str());
      write_file(cfg.dump_matrices + "_M.mtx", m.str());
    }
  } else {
    const OperatorSolve s = solve_operator(mesh, op, cfg.nev, st);
    spectrum = s.spectrum;
    j = spectrum_to_json(spectrum);
    j["solver"] = {{"method", "lobpcg"},
                   {"preconditioner", cfg.preconditioner},
                   {"iterations", s.result.iterations},
                   {"converged", s.result.converged}};
    if (s.kernel) j["kernel"] = to_json(*s.kernel);
    if (!cfg.dump_matrices.empty()) {
      std::ostringstream k, m;
      write_matrix_market(s.pencil.K, k);
      write_matrix_market(s.pencil.M, m);
      write_file(cfg.dump_matrices + "_K.mtx", k.str());
      write_file(cfg.dump_matrices + "_M.mtx", m.str());
    }
  }
  j["mesh"] = mesh.descriptor;
  stamp.into(j);
  if (cfg.output.empty()) {
    out << j.dump(2) << '\n';
  } else {
    write_file(cfg.output, j.dump(2));
    out << spectrum.op << " on " << mesh.descriptor << " (" << spectrum.dofs << " dofs, h=" << format_number(spectrum.h)
        << ")\n";
    for (std::size_t i = 0; i < spectrum.values.size(); ++i) {
      out << "  " << i + 1 << ' ' << format_number(spectrum.values[i]) << "  residual "
          << format_number(spectrum.residuals[i]) << (spectrum.converged[i] ? "" : "  [not converged]") << '\n';
    }
  }
  return kOk;
}

int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
  if (cfg.count < 1) throw InvalidSpecError("count must be >= 1");
  std::vector<double> values;
  if (cfg.family == "maxwell-tetm") {
    values = box_maxwell_te_tm_spectrum(cfg.a, cfg.b, cfg.c, cfg.count);
  } else if (cfg.family == "dirichlet") {
    values = box_dirichlet_spectrum(cfg.a, cfg.b, cfg.c, cfg.count);
  } else if (cfg.family == "neumann") {
    values = box_neumann_spectrum(cfg.a, cfg.b, cfg.c, cfg.count);
  } else if (cfg.family == "maxwell") {
    values = box_maxwell_spectrum(cfg.a, cfg.b, cfg.c, cfg.count);
  } else {
    throw InvalidSpecError("unknown family '" + cfg.family + "' (dirichlet|neumann|maxwell|maxwell-tetm)");
  }
  json j = spectrum_to_json(make_oracle_spectrum(cfg.family, std::move(values)));
  make_stamp(cfg).into(j);
  if (cfg.output.empty()) {
    out << j.dump(2) << '\n';
  } else {
    write_file(cfg.output, j.dump(2));
    out << "oracle:" << cfg.family << " -> " << cfg.output << '\n';
  }
  return kOk;
}

void emit(const RunConfig& cfg, const Stamp& stamp, const std::string& name, json j, const std::string& md,
          std::ostream& out) {
  const fs::path dir(cfg.out_dir);
  stamp.into(j);
  write_file(dir / (name + ".json"), j.dump(2));
  write_file(dir / (name + ".md"), md + stamp.markdown());
  out << md;
}

void emit_csv(const RunConfig& cfg, const Stamp& stamp, const std::string& name, const std::vector<Spectrum>& levels) {
  write_file(fs::path(cfg.out_dir) / (name + "_spectra.csv"), stamp.csv_header() + spectra_csv(levels));
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  const Stamp stamp = make_stamp(cfg);
  if (cfg.action == "interlace") {
    InterlaceReport r;
    if (!cfg.replay.empty()) {
      json in;
      try {
        in = json::parse(read_file(cfg.replay));
      } catch (const json::exception& e) {
        throw ParseError("'" + cfg.replay + "' is not JSON: " + e.what());
      }
      r = interlace_report_from_json(in);
    } else {
      r = run_interlace_study(study_of(cfg));
    }
    emit(cfg, stamp, "interlace", to_json(r), to_markdown(r), out);
    std::vector<Spectrum> all = r.alpha_levels;
    all.insert(all.end(), r.lambda_levels.begin(), r.lambda_levels.end());
    emit_csv(cfg, stamp, "interlace", all);
    return r.pass ? kOk : kCheckFailed;
  }
  if (cfg.action == "union") {
    const UnionReport r = run_union_check(study_of(cfg));
    emit(cfg, stamp, "union", to_json(r), to_markdown(r), out);
    emit_csv(cfg, stamp, "union", r.levels);
    return r.pass ? kOk : kCheckFailed;
  }
  if (cfg.action == "trial") {
    const StudySpec spec = study_of(cfg);
    const TetMesh mesh = build_level_mesh(spec, cfg.trial_n);
    json j{{"domain", spec.describe()}, {"n", cfg.trial_n}, {"reports", json::array()}};
    std::string md;
    bool pass = true;
    for (int k = 1; k <= cfg.kmax; ++k) {
      const TrialSubspaceReport r = run_trial_subspace_check(mesh, k, settings_of(cfg));
      j["reports"].push_back(to_json(r));
      md += to_markdown(r) + "\n";
      pass = pass && r.pass;
    }
    j["pass"] = pass;
    emit(cfg, stamp, "trial", std::move(j), md, out);
    return pass ? kOk : kCheckFailed;
  }
  if (cfg.action == "neumann") {
    const NeumannReport r = run_neumann_exploration(study_of(cfg));
    emit(cfg, stamp, "neumann", to_json(r), to_markdown(r), out);
    return kOk;
  }
  const DivTraceReport r = run_div_trace_diagnostic(study_of(cfg));
  emit(cfg, stamp, "divtrace", to_json(r), to_markdown(r), out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"curlspec: curl-curl, Laplacian and div-curl eigenvalues on tetrahedral meshes"};
  app.set_version_flag("--version", std::string(CURLSPEC_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  cfg.levels = {4, 8, 16};
  int threads = 0;
  std::string a_tok = "1", b_tok, c_tok, box_tok = "pi", precond = "factorized";
  std::optional<int> n_all;
  double sigma = 0.0;
  app.add_option("--threads", threads, "worker cap (default: CURLSPEC_THREADS or 1)")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", cfg.seed, "seed for randomized starting blocks");

  auto add_box_flags = [&](CLI::App* s) {
    s->add_option("--a", a_tok, "side along x (accepts pi, 2pi, pi/2)");
    s->add_option("--b", b_tok, "side along y (default: a)");
    s->add_option("--c", c_tok, "side along z (default: a)");
    s->add_option("--n", n_all, "subdivisions on every axis");
    s->add_option("--nx", cfg.nx);
    s->add_option("--ny", cfg.ny);
    s->add_option("--nz", cfg.nz);
    s->add_option("-o,--output", cfg.output, "mesh JSON")->capture_default_str();
  };
  auto add_solver_flags = [&](CLI::App* s) {
    s->add_option("--tol", cfg.tol, "residual tolerance")->capture_default_str();
    s->add_option("--max-iter", cfg.max_iterations)->capture_default_str();
    s->add_option("--precond", precond, "factorized|diagonal")->capture_default_str();
    s->add_option("--order", cfg.order, "Lagrange order (1|2)")->capture_default_str();
  };

  cfg.output = "mesh.json";
  auto* mesh = app.add_subcommand("mesh", "build or import a mesh and write it as JSON");
  mesh->require_subcommand(1);
  for (const char* kind : {"box", "lshape", "fichera"}) {
    auto* s = mesh->add_subcommand(kind, std::string(kind) + " mesh of [0,a]x[0,b]x[0,c]");
    add_box_flags(s);
  }
  auto* imp = mesh->add_subcommand("import", "read a Gmsh MSH 2.2/4.1 (or mesh JSON) file");
  imp->add_option("path", cfg.input, "input file")->required();
  imp->add_option("-o,--output", cfg.output, "mesh JSON")->capture_default_str();

  std::string solve_out;
  auto* solve = app.add_subcommand("solve", "lowest eigenpairs of one operator");
  solve->add_option("--op", cfg.op, "dirichlet|neumann|curlcurl|bform")->required();
  solve->add_option("--nev", cfg.nev, "number of eigenvalues")->capture_default_str();
  solve->add_option("--mesh", cfg.input, "mesh JSON or MSH file")->required();
  solve->add_option("--sigma", sigma, "shift-invert around sigma instead of the lowest values");
  solve->add_option("--dump-matrices", cfg.dump_matrices, "write <prefix>_K.mtx and <prefix>_M.mtx");
  solve->add_option("-o,--output", solve_out, "spectrum JSON (default: stdout)");
  add_solver_flags(solve);

  std::string oracle_out;
  auto* oracle = app.add_subcommand("oracle", "closed-form box spectra");
  oracle->add_option("--family", cfg.family, "dirichlet|neumann|maxwell|maxwell-tetm")->required();
  oracle->add_option("--box", box_tok, "side, or a,b,c (accepts pi)")->capture_default_str();
  oracle->add_option("--count", cfg.count)->capture_default_str();
  oracle->add_option("-o,--output", oracle_out, "spectrum JSON (default: stdout)");

  auto* verify = app.add_subcommand("verify", "interlacing and decomposition studies");
  verify->require_subcommand(1);
  cfg.out_dir = "curlspec-out";
  const std::vector<std::pair<const char*, const char*>> checks{
      {"interlace", "alpha_{2k+1} <= lambda_k on extrapolated spectra"},
      {"union", "BForm spectrum = Dirichlet union Maxwell"},
      {"trial", "Rayleigh bound over the 3k-dimensional trial span"},
      {"neumann", "exploratory mu_{k+3} <= lambda_k table"},
      {"divtrace", "boundary trace of div u for BForm eigenvectors"}};
  for (const auto& [name, help] : checks) {
    auto* s = verify->add_subcommand(name, help);
    s->add_option("--box", box_tok, "side, or a,b,c (accepts pi)")->capture_default_str();
    s->add_option("--domain", cfg.domain, "box|lshape|fichera")->capture_default_str();
    s->add_option("--mesh", cfg.input, "mesh file instead of generated levels");
    s->add_option("--kmax", cfg.kmax)->capture_default_str();
    s->add_option("--levels", cfg.levels, "subdivisions per level")->delimiter(',')->capture_default_str();
    s->add_option("--nev", cfg.nev)->capture_default_str();
    s->add_flag("--oracle-only", cfg.oracle_only, "closed-form spectra only");
    s->add_option("--out-dir", cfg.out_dir)->capture_default_str();
    add_solver_flags(s);
    if (std::string(name) == "union") s->add_option("--union-tol", cfg.union_tol)->capture_default_str();
    if (std::string(name) == "interlace") s->add_option("--replay", cfg.replay, "rebuild from a report JSON");
    if (std::string(name) == "trial") s->add_option("--n", cfg.trial_n, "subdivisions of the trial mesh")->capture_default_str();
  }

  std::vector<const char*> argv{"curlspec"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kError;
  }

  try {
    cfg.threads = resolve_thread_count(threads);
    cfg.preconditioner = precond;
    if (solve->parsed()) {
      cfg.subcommand = "solve";
      cfg.output = solve_out;
      if (solve->count("--sigma")) cfg.sigma = sigma;
      return cmd_solve(cfg, out);
    }
    if (oracle->parsed()) {
      cfg.subcommand = "oracle";
      cfg.output = oracle_out;
      parse_box(box_tok, cfg);
      return cmd_oracle(cfg, out);
    }
    if (mesh->parsed()) {
      cfg.subcommand = "mesh";
      cfg.action = mesh->get_subcommands().front()->get_name();
      if (cfg.action != "import") {
        cfg.a = parse_length(a_tok);
        cfg.b = b_tok.empty() ? cfg.a : parse_length(b_tok);
        cfg.c = c_tok.empty() ? cfg.a : parse_length(c_tok);
        if (n_all) cfg.nx = cfg.ny = cfg.nz = *n_all;
        BoxSpec{cfg.a, cfg.b, cfg.c, cfg.nx, cfg.ny, cfg.nz}.validate();
      }
      return cmd_mesh(cfg, out);
    }
    cfg.subcommand = "verify";
    cfg.action = verify->get_subcommands().front()->get_name();
    parse_box(box_tok, cfg);
    return cmd_verify(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
}

}  // namespace curlspec::cli
