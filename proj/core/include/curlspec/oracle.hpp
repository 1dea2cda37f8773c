#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace curlspec {

enum class ModeFamily { Dirichlet, Neumann, Maxwell };

std::string to_string(ModeFamily f);

struct ModeIndex {
  int l = 0;
  int m = 0;
  int n = 0;
  ModeFamily family = ModeFamily::Dirichlet;

  // Dirichlet: all >= 1. Neumann: all >= 0. Maxwell: at most one zero, not all zero.
  bool admissible() const noexcept;
  // Number of independent fields per index triple: 2 for Maxwell with all
  // indices positive, 1 otherwise.
  int multiplicity() const noexcept;
};

struct BoxModes {
  std::vector<double> values;  // ascending, repeated by multiplicity
  double ceiling = 0.0;        // every admissible mode with value <= ceiling was visited
  std::array<int, 3> index_bound{};  // l <= a sqrt(ceiling)/pi, etc.
  long visited = 0;
};

// Every mode of the box (0,a)x(0,b)x(0,c) with pi^2 (l^2/a^2 + m^2/b^2 + n^2/c^2) <= ceiling.
BoxModes enumerate_box_modes(ModeFamily family, double a, double b, double c, double ceiling);

// First `count` eigenvalues with multiplicity, ascending. Equal sides go
// through the integer enumeration so ties are exact.
std::vector<double> box_dirichlet_spectrum(double a, double b, double c, int count);
std::vector<double> box_neumann_spectrum(double a, double b, double c, int count);
std::vector<double> box_maxwell_spectrum(double a, double b, double c, int count);
std::vector<double> box_spectrum(ModeFamily family, double a, double b, double c, int count);

// Cube of side s: the eigenvalues are q (pi/s)^2 for the integers q returned
// here (q = l^2 + m^2 + n^2, repeated by multiplicity).
std::vector<std::int64_t> cube_spectrum_integers(ModeFamily family, int count);

// Maxwell cavity values by separate TM (l,m >= 1, n >= 0) and TE (n >= 1,
// (l,m) != (0,0)) enumeration; independent of the index-triple rule above.
std::vector<std::int64_t> cube_maxwell_te_tm_integers(int count);
std::vector<double> box_maxwell_te_tm_spectrum(double a, double b, double c, int count);

struct InterlaceRecord {
  int k = 0;
  double alpha_2k1 = 0.0;
  double lambda_k = 0.0;
  double margin = 0.0;  // lambda_k - alpha_{2k+1}
  double tolerance = 0.0;
  bool pass = false;    // margin >= -tolerance
  bool strict = false;  // margin > tolerance
  bool resolved = true;
};

struct InterlaceCheck {
  std::vector<InterlaceRecord> records;
  bool pass = false;
};

// alpha_{2k+1} <= lambda_k for k = 1..kmax, 1-based with multiplicities.
// Throws InsufficientSpectrumError when alpha has fewer than 2 kmax + 1 or
// lambda fewer than kmax entries.
InterlaceCheck interlace_check(std::span<const double> alpha, std::span<const double> lambda, int kmax,
                               double tol = 0.0);
InterlaceCheck interlace_check(std::span<const double> alpha, std::span<const double> lambda, int kmax,
                               std::span<const double> tol_per_k);
// Exact variant on integer spectra (tolerance 0).
InterlaceCheck interlace_check_exact(std::span<const std::int64_t> alpha, std::span<const std::int64_t> lambda,
                                     int kmax);

// Counting function N(V) = #{values <= V}.
std::size_t counting_function(std::span<const double> ascending, double V);

// Sorted merge of two ascending lists.
std::vector<double> merge_spectra(std::span<const double> a, std::span<const double> b);

}  // namespace curlspec
