#include "curlspec/elements.hpp"

#include <cmath>

#include "curlspec/error.hpp"
#include "curlspec/quadrature.hpp"

namespace curlspec {

TetGeometry tet_geometry(const std::array<Vec3, 4>& p) {
  Eigen::Matrix3d J;
  for (int k = 0; k < 3; ++k) {
    for (int d = 0; d < 3; ++d) J(d, k) = p[k + 1][d] - p[0][d];
  }
  const double det = J.determinant();
  double longest = 0.0;
  for (const auto& e : kTetEdgeVertices) {
    Eigen::Vector3d d(p[e[1]][0] - p[e[0]][0], p[e[1]][1] - p[e[0]][1], p[e[1]][2] - p[e[0]][2]);
    longest = std::max(longest, d.norm());
  }
  if (!(det / 6.0 > 1e-14 * longest * longest * longest)) {
    throw DegenerateElementError("degenerate or inverted tetrahedron");
  }
  const Eigen::Matrix3d Jinv = J.inverse();
  TetGeometry g;
  g.grad.block<3, 3>(1, 0) = Jinv;
  g.grad.row(0) = -Jinv.colwise().sum();
  g.volume = det / 6.0;
  return g;
}

LocalMatrices lagrange_local(const std::array<Vec3, 4>& p, int order) {
  const TetGeometry g = tet_geometry(p);
  LocalMatrices lm;
  if (order == 1) {
    lm.stiffness = g.volume * g.grad * g.grad.transpose();
    lm.mass = Eigen::MatrixXd::Constant(4, 4, g.volume / 20.0);
    lm.mass.diagonal().array() = g.volume / 10.0;
    return lm;
  }
  if (order != 2) throw InvalidSpecError("Lagrange order must be 1 or 2");

  auto eval = [&](const std::array<double, 4>& l, Eigen::Matrix<double, 10, 1>& phi,
                  Eigen::Matrix<double, 10, 3>& dphi) {
    for (int i = 0; i < 4; ++i) {
      phi(i) = l[i] * (2.0 * l[i] - 1.0);
      dphi.row(i) = (4.0 * l[i] - 1.0) * g.grad.row(i);
    }
    for (int e = 0; e < 6; ++e) {
      const int i = kTetEdgeVertices[e][0];
      const int j = kTetEdgeVertices[e][1];
      phi(4 + e) = 4.0 * l[i] * l[j];
      dphi.row(4 + e) = 4.0 * (l[j] * g.grad.row(i) + l[i] * g.grad.row(j));
    }
  };

  lm.stiffness = Eigen::MatrixXd::Zero(10, 10);
  lm.mass = Eigen::MatrixXd::Zero(10, 10);
  Eigen::Matrix<double, 10, 1> phi;
  Eigen::Matrix<double, 10, 3> dphi;
  const QuadratureRule& q2 = quadrature(2);
  for (std::size_t k = 0; k < q2.points.size(); ++k) {
    eval(q2.points[k], phi, dphi);
    lm.stiffness.noalias() += (q2.weights[k] * g.volume) * dphi * dphi.transpose();
  }
  const QuadratureRule& q4 = quadrature(4);
  for (std::size_t k = 0; k < q4.points.size(); ++k) {
    eval(q4.points[k], phi, dphi);
    lm.mass.noalias() += (q4.weights[k] * g.volume) * phi * phi.transpose();
  }
  return lm;
}

Eigen::Matrix<double, 6, 3> nedelec_curls(const TetGeometry& g) {
  Eigen::Matrix<double, 6, 3> curls;
  for (int e = 0; e < 6; ++e) {
    const Eigen::Vector3d gi = g.grad.row(kTetEdgeVertices[e][0]).transpose();
    const Eigen::Vector3d gj = g.grad.row(kTetEdgeVertices[e][1]).transpose();
    curls.row(e) = 2.0 * gi.cross(gj).transpose();
  }
  return curls;
}

LocalMatrices nedelec_local(const std::array<Vec3, 4>& p, const std::array<std::int8_t, 6>& signs) {
  const TetGeometry g = tet_geometry(p);
  const Eigen::Matrix<double, 6, 3> curls = nedelec_curls(g);

  LocalMatrices lm;
  lm.stiffness = g.volume * curls * curls.transpose();
  lm.mass = Eigen::MatrixXd::Zero(6, 6);
  Eigen::Matrix<double, 6, 3> w;
  const QuadratureRule& q = quadrature(2);
  for (std::size_t k = 0; k < q.points.size(); ++k) {
    const auto& l = q.points[k];
    for (int e = 0; e < 6; ++e) {
      const int i = kTetEdgeVertices[e][0];
      const int j = kTetEdgeVertices[e][1];
      w.row(e) = l[i] * g.grad.row(j) - l[j] * g.grad.row(i);
    }
    lm.mass.noalias() += (q.weights[k] * g.volume) * w * w.transpose();
  }

  Eigen::Matrix<double, 6, 1> s;
  for (int e = 0; e < 6; ++e) s(e) = signs[e];
  lm.stiffness = s.asDiagonal() * lm.stiffness * s.asDiagonal();
  lm.mass = s.asDiagonal() * lm.mass * s.asDiagonal();
  return lm;
}

LocalMatrices nedelec_local(const std::array<Vec3, 4>& p) {
  return nedelec_local(p, {1, 1, 1, 1, 1, 1});
}

LocalMatrices vector_p1_divcurl_local(const std::array<Vec3, 4>& p) {
  const TetGeometry g = tet_geometry(p);
  LocalMatrices lm;
  lm.stiffness = Eigen::MatrixXd::Zero(12, 12);
  lm.mass = Eigen::MatrixXd::Zero(12, 12);
  // curl(phi_a e_i) = grad phi_a x e_i
  std::array<std::array<Eigen::Vector3d, 3>, 4> curl;
  for (int a = 0; a < 4; ++a) {
    const Eigen::Vector3d ga = g.grad.row(a).transpose();
    for (int i = 0; i < 3; ++i) curl[a][i] = ga.cross(Eigen::Vector3d::Unit(i));
  }
  for (int a = 0; a < 4; ++a) {
    for (int i = 0; i < 3; ++i) {
      for (int b = 0; b < 4; ++b) {
        for (int j = 0; j < 3; ++j) {
          lm.stiffness(3 * a + i, 3 * b + j) =
              g.volume * (g.grad(a, i) * g.grad(b, j) + curl[a][i].dot(curl[b][j]));
        }
        lm.mass(3 * a + i, 3 * b + i) = g.volume * (a == b ? 0.1 : 0.05);
      }
    }
  }
  return lm;
}

}  // namespace curlspec
