#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace curlspec::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kError = 2 };

// Everything that determines a run; embedded in every output file.
struct RunConfig {
  std::string subcommand;  // mesh | solve | oracle | verify
  std::string action;      // mesh: box|lshape|fichera|import; verify: interlace|union|...
  std::string domain = "box";
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  int nx = 1;
  int ny = 1;
  int nz = 1;
  std::string input;  // mesh file (import, solve, verify on a file)
  std::string op;
  std::string family;
  int order = 1;
  int nev = 4;
  int count = 10;
  int kmax = 3;
  int trial_n = 8;
  std::vector<int> levels;
  double tol = 1e-9;
  int max_iterations = 500;
  std::string preconditioner = "factorized";
  std::optional<double> sigma;
  bool oracle_only = false;
  double union_tol = 0.02;
  std::string output;
  std::string out_dir;
  std::string dump_matrices;
  std::string replay;
  std::uint64_t seed = 0x5eed;
  int threads = 0;  // resolved before serialization

  nlohmann::json to_json() const;
};

// "pi", "2pi", "2*pi", "pi/2" or a plain number. Throws curlspec::InvalidSpecError.
double parse_length(const std::string& token);

// 64-bit FNV-1a, hex encoded.
std::string fnv1a_hex(const std::string& bytes);

// Runs one command; args exclude the program name. Returns an ExitCode.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace curlspec::cli
