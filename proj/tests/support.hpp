#pragma once

// Independent reference computations for the unit tests. Nothing here calls
// the library routine it is used to check.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curlspec/mesh.hpp"

namespace testing_support {

inline constexpr double kPi = std::numbers::pi;

enum class Family { Dirichlet, Neumann, Maxwell };

// Brute-force box eigenvalues: every triple with indices up to `bound`,
// multiplicity by the rule for each family, sorted, first `count`.
inline std::vector<double> brute_box(Family f, double a, double b, double c, int count, int bound = 24) {
  std::vector<double> v;
  for (int l = 0; l <= bound; ++l) {
    for (int m = 0; m <= bound; ++m) {
      for (int n = 0; n <= bound; ++n) {
        const int zeros = (l == 0) + (m == 0) + (n == 0);
        int mult = 0;
        if (f == Family::Dirichlet) mult = zeros == 0 ? 1 : 0;
        if (f == Family::Neumann) mult = 1;
        if (f == Family::Maxwell) mult = zeros == 0 ? 2 : (zeros == 1 ? 1 : 0);
        const double x = kPi * kPi * (l * l / (a * a) + m * m / (b * b) + n * n / (c * c));
        for (int r = 0; r < mult; ++r) v.push_back(x);
      }
    }
  }
  std::sort(v.begin(), v.end());
  v.resize(static_cast<std::size_t>(count));
  return v;
}

// Integer q = l^2 + m^2 + n^2 for the unit-scaled cube.
inline std::vector<std::int64_t> brute_cube_q(Family f, int count, int bound = 24) {
  std::vector<std::int64_t> out;
  for (double x : brute_box(f, kPi, kPi, kPi, count, bound)) out.push_back(std::llround(x));
  return out;
}

inline double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// Integral over a tet of volume V of l1^a l2^b l3^c l4^d.
inline double monomial_integral(int a, int b, int c, int d, double volume) {
  return factorial(a) * factorial(b) * factorial(c) * factorial(d) * 6.0 * volume / factorial(a + b + c + d + 3);
}

inline std::array<curlspec::Vec3, 4> reference_tet() {
  return {{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
}

// Random tet with volume bounded away from zero, positively oriented.
inline std::array<curlspec::Vec3, 4> random_tet(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    std::array<curlspec::Vec3, 4> p;
    for (auto& x : p) x = {u(rng), u(rng), u(rng)};
    const Eigen::Vector3d e1(p[1][0] - p[0][0], p[1][1] - p[0][1], p[1][2] - p[0][2]);
    const Eigen::Vector3d e2(p[2][0] - p[0][0], p[2][1] - p[0][1], p[2][2] - p[0][2]);
    const Eigen::Vector3d e3(p[3][0] - p[0][0], p[3][1] - p[0][1], p[3][2] - p[0][2]);
    const double vol = e1.dot(e2.cross(e3)) / 6.0;
    if (std::abs(vol) < 0.02) continue;
    if (vol < 0) std::swap(p[2], p[3]);
    return p;
  }
}

// Barycentric gradients from the inverse Jacobian of the reference map.
inline Eigen::Matrix<double, 4, 3> barycentric_gradients(const std::array<curlspec::Vec3, 4>& p) {
  Eigen::Matrix3d J;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) J(i, j) = p[j + 1][i] - p[0][i];
  }
  const Eigen::Matrix3d JinvT = J.inverse().transpose();
  Eigen::Matrix<double, 4, 3> ref;
  ref << -1, -1, -1, 1, 0, 0, 0, 1, 0, 0, 0, 1;
  Eigen::Matrix<double, 4, 3> g;
  for (int a = 0; a < 4; ++a) g.row(a) = (JinvT * ref.row(a).transpose()).transpose();
  return g;
}

inline double tet_volume(const std::array<curlspec::Vec3, 4>& p) {
  Eigen::Matrix3d J;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) J(i, j) = p[j + 1][i] - p[0][i];
  }
  return J.determinant() / 6.0;
}

// Box-mesh vertex is on the boundary iff a coordinate sits on a face plane.
inline bool on_box_boundary(const curlspec::Vec3& x, double a, double b, double c, double tol = 1e-12) {
  return std::abs(x[0]) < tol || std::abs(x[1]) < tol || std::abs(x[2]) < tol || std::abs(x[0] - a) < tol ||
         std::abs(x[1] - b) < tol || std::abs(x[2] - c) < tol;
}

// Both endpoints on a common face plane of the box.
inline bool edge_on_box_boundary(const curlspec::Vec3& x, const curlspec::Vec3& y, double a, double b, double c,
                                 double tol = 1e-12) {
  const std::array<double, 3> side{a, b, c};
  for (int k = 0; k < 3; ++k) {
    if (std::abs(x[k]) < tol && std::abs(y[k]) < tol) return true;
    if (std::abs(x[k] - side[k]) < tol && std::abs(y[k] - side[k]) < tol) return true;
  }
  return false;
}

inline std::set<std::pair<int, int>> brute_edges(const curlspec::TetMesh& m) {
  std::set<std::pair<int, int>> s;
  for (const auto& t : m.tets()) {
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) s.insert({std::min(t[i], t[j]), std::max(t[i], t[j])});
    }
  }
  return s;
}

inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("curlspec_test_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing_support
