#pragma once

#include <array>

#include <Eigen/Dense>

#include "curlspec/mesh.hpp"

namespace curlspec {

struct LocalMatrices {
  Eigen::MatrixXd stiffness;
  Eigen::MatrixXd mass;
};

// Gradients of the four barycentric coordinates (rows) and the volume.
// Throws DegenerateElementError for non-positive or vanishing volume.
struct TetGeometry {
  Eigen::Matrix<double, 4, 3> grad;
  double volume;
};
TetGeometry tet_geometry(const std::array<Vec3, 4>& p);

// P1 (n = 4) or P2 (n = 10) Lagrange. P2 ordering: 4 vertex functions, then
// the 6 edge functions in kTetEdgeVertices order.
LocalMatrices lagrange_local(const std::array<Vec3, 4>& p, int order);

// Lowest-order Nedelec (first kind) on the six edges in kTetEdgeVertices
// order, basis l_i grad l_j - l_j grad l_i. Rows/columns are multiplied by the
// per-edge orientation sign.
LocalMatrices nedelec_local(const std::array<Vec3, 4>& p, const std::array<std::int8_t, 6>& signs);
LocalMatrices nedelec_local(const std::array<Vec3, 4>& p);

// Vector P1 for the div-curl form: index 3*vertex + component. Stiffness is
// int(div u div v + curl u . curl v), mass is the P1 mass times I3.
LocalMatrices vector_p1_divcurl_local(const std::array<Vec3, 4>& p);

// Constant curl of every (unsigned) Nedelec basis function.
Eigen::Matrix<double, 6, 3> nedelec_curls(const TetGeometry& g);

}  // namespace curlspec
