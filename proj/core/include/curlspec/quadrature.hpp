#pragma once

#include <array>
#include <vector>

namespace curlspec {

// Rule on the reference tet in barycentric coordinates. Weights sum to 1 and
// are multiplied by the tet volume at the point of use.
struct QuadratureRule {
  int degree = 0;
  std::vector<std::array<double, 4>> points;
  std::vector<double> weights;
};

// Positive-weight rules exact up to `degree` (1..4). Degrees 1 and 2 are the
// centroid and the symmetric 4-point rule; 3 and 4 are collapsed
// Gauss-Jacobi product rules (8 and 27 points).
const QuadratureRule& quadrature(int degree);

// Closed form of the integral of l1^a l2^b l3^c l4^d over a tet of volume
// `volume`: a! b! c! d! 3! / (a+b+c+d+3)! * volume.
double barycentric_monomial_integral(int a, int b, int c, int d, double volume);

// Nodes and weights of the n-point Gauss rule for the weight (1-t)^alpha on
// [0, 1]; weights sum to 1/(alpha+1).
void gauss_jacobi_unit(int n, int alpha, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace curlspec
