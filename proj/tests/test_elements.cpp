#include <gtest/gtest.h>

#include "curlspec/elements.hpp"
#include "curlspec/error.hpp"
#include "curlspec/quadrature.hpp"
#include "support.hpp"

using namespace curlspec;
using testing_support::monomial_integral;

namespace {

double quad_monomial(const QuadratureRule& q, int a, int b, int c, int d) {
  double s = 0.0;
  for (std::size_t i = 0; i < q.points.size(); ++i) {
    const auto& p = q.points[i];
    s += q.weights[i] * std::pow(p[0], a) * std::pow(p[1], b) * std::pow(p[2], c) * std::pow(p[3], d);
  }
  return s;
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Gradient coefficients of lambda_p in the edge basis: +1 where the local
// edge ends at p, -1 where it starts there.
Eigen::Matrix<double, 6, 4> local_gradients() {
  Eigen::Matrix<double, 6, 4> g = Eigen::Matrix<double, 6, 4>::Zero();
  for (int e = 0; e < 6; ++e) {
    g(e, kTetEdgeVertices[e][0]) = -1.0;
    g(e, kTetEdgeVertices[e][1]) = 1.0;
  }
  return g;
}

}  // namespace

TEST(Quadrature, WeightsPositiveSumToOne) {
  for (int d = 1; d <= 4; ++d) {
    const auto& q = quadrature(d);
    EXPECT_EQ(q.degree, d);
    double s = 0.0;
    for (double w : q.weights) {
      EXPECT_GT(w, 0.0);
      s += w;
    }
    EXPECT_NEAR(s, 1.0, 1e-14);
  }
  EXPECT_EQ(quadrature(1).points.size(), 1u);
  EXPECT_NEAR(quadrature(1).points[0][0], 0.25, 1e-16);
}

TEST(Quadrature, ExactOnAllMonomialsUpToDegree) {
  for (int deg = 1; deg <= 4; ++deg) {
    const auto& q = quadrature(deg);
    for (int a = 0; a <= deg; ++a) {
      for (int b = 0; a + b <= deg; ++b) {
        for (int c = 0; a + b + c <= deg; ++c) {
          for (int d = 0; a + b + c + d <= deg; ++d) {
            // Unit-volume scaling: rule weights sum to one.
            EXPECT_LT(rel(quad_monomial(q, a, b, c, d), monomial_integral(a, b, c, d, 1.0)), 1e-13)
                << "deg " << deg << " monomial " << a << b << c << d;
          }
        }
      }
    }
  }
}

TEST(Quadrature, SecondMomentAnchor) {
  // integral of lambda_1^2 = vol / 10
  EXPECT_NEAR(quad_monomial(quadrature(2), 2, 0, 0, 0), 0.1, 1e-15);
  EXPECT_NEAR(monomial_integral(2, 0, 0, 0, 1.0), 0.1, 1e-15);
}

TEST(Quadrature, DegreeThreeMissesDegreeFour) {
  EXPECT_GT(rel(quad_monomial(quadrature(3), 4, 0, 0, 0), monomial_integral(4, 0, 0, 0, 1.0)), 1e-6);
}

TEST(Quadrature, UnsupportedDegree) {
  EXPECT_THROW(quadrature(0), InvalidSpecError);
  EXPECT_THROW(quadrature(5), InvalidSpecError);
}

TEST(LagrangeP1, ReferenceMassAndStiffness) {
  const auto p = testing_support::reference_tet();
  const double V = 1.0 / 6.0;
  const auto lm = lagrange_local(p, 1);
  for (int i = 0; i < 4; ++i) {
    EXPECT_NEAR(lm.stiffness.row(i).sum(), 0.0, 1e-15);
    for (int j = 0; j < 4; ++j) EXPECT_NEAR(lm.mass(i, j), V / 20.0 * (1.0 + (i == j)), 1e-16);
  }
}

TEST(LagrangeP1, RandomTetsPsdWithConstantKernelAndPushforward) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = testing_support::random_tet(rng);
    const auto lm = lagrange_local(p, 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lm.stiffness);
    const auto ev = es.eigenvalues();
    EXPECT_LT(std::abs(ev(0)), 1e-12 * ev(3));
    EXPECT_GT(ev(1), 1e-10 * ev(3));
    const auto g = testing_support::barycentric_gradients(p);
    const Eigen::Matrix4d ref = testing_support::tet_volume(p) * g * g.transpose();
    EXPECT_LT((ref - lm.stiffness).cwiseAbs().maxCoeff(), 1e-12 * ref.cwiseAbs().maxCoeff());
    EXPECT_LT((lm.mass - lm.mass.transpose()).cwiseAbs().maxCoeff(), 1e-14 * lm.mass.cwiseAbs().maxCoeff());
  }
}

TEST(LagrangeP2, ExactOnQuadratics) {
  const auto p = testing_support::reference_tet();
  const auto lm = lagrange_local(p, 2);
  ASSERT_EQ(lm.stiffness.rows(), 10);
  // u = x at the 4 vertices and 6 edge midpoints.
  auto nodal = [&](auto f) {
    Eigen::VectorXd u(10);
    for (int a = 0; a < 4; ++a) u(a) = f(p[a]);
    for (int e = 0; e < 6; ++e) {
      const auto& x = p[kTetEdgeVertices[e][0]];
      const auto& y = p[kTetEdgeVertices[e][1]];
      u(4 + e) = f(Vec3{(x[0] + y[0]) / 2, (x[1] + y[1]) / 2, (x[2] + y[2]) / 2});
    }
    return u;
  };
  const Eigen::VectorXd one = nodal([](const Vec3&) { return 1.0; });
  const Eigen::VectorXd x = nodal([](const Vec3& q) { return q[0]; });
  const Eigen::VectorXd x2 = nodal([](const Vec3& q) { return q[0] * q[0]; });
  EXPECT_NEAR((lm.stiffness * one).cwiseAbs().maxCoeff(), 0.0, 1e-14);
  EXPECT_NEAR(one.dot(lm.mass * one), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(x.dot(lm.stiffness * x), 1.0 / 6.0, 1e-15);
  // integral of |d(x^2)/dx|^2 = 4 int x^2 = 4/60; integral of x^4 = 1/210
  EXPECT_NEAR(x2.dot(lm.stiffness * x2), 4.0 / 60.0, 1e-15);
  EXPECT_NEAR(x2.dot(lm.mass * x2), 1.0 / 210.0, 1e-15);
  EXPECT_THROW(lagrange_local(p, 3), InvalidSpecError);
}

TEST(Nedelec, CurlCurlRankThreeAndKillsGradients) {
  std::mt19937_64 rng(11);
  const auto G = local_gradients();
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = testing_support::random_tet(rng);
    const auto lm = nedelec_local(p);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(lm.stiffness);
    const auto s = svd.singularValues();
    EXPECT_GT(s(2), 1e-10 * s(0));
    EXPECT_LT(s(3), 1e-12 * s(0));
    EXPECT_LT((lm.stiffness * G).cwiseAbs().maxCoeff(), 1e-14 * lm.stiffness.cwiseAbs().maxCoeff());
    Eigen::LLT<Eigen::MatrixXd> llt(lm.mass);
    EXPECT_EQ(llt.info(), Eigen::Success);
  }
}

TEST(Nedelec, MassMatchesClosedForm) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = testing_support::random_tet(rng);
    const auto g = testing_support::barycentric_gradients(p);
    const double V = testing_support::tet_volume(p);
    auto lam = [&](int a, int b) { return V * (1.0 + (a == b)) / 20.0; };  // int lambda_a lambda_b
    auto dot = [&](int a, int b) { return g.row(a).dot(g.row(b)); };
    Eigen::Matrix<double, 6, 6> ref;
    for (int e = 0; e < 6; ++e) {
      const int i = kTetEdgeVertices[e][0], j = kTetEdgeVertices[e][1];
      for (int f = 0; f < 6; ++f) {
        const int k = kTetEdgeVertices[f][0], l = kTetEdgeVertices[f][1];
        ref(e, f) = lam(i, k) * dot(j, l) - lam(i, l) * dot(j, k) - lam(j, k) * dot(i, l) + lam(j, l) * dot(i, k);
      }
    }
    const auto lm = nedelec_local(p);
    EXPECT_LT((lm.mass - ref).cwiseAbs().maxCoeff(), 1e-13 * ref.cwiseAbs().maxCoeff());
  }
}

TEST(Nedelec, SignsScaleRowsAndColumns) {
  const auto p = testing_support::reference_tet();
  const std::array<std::int8_t, 6> signs{1, -1, 1, -1, -1, 1};
  const auto plain = nedelec_local(p);
  const auto signed_ = nedelec_local(p, signs);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      EXPECT_DOUBLE_EQ(signed_.mass(i, j), signs[i] * signs[j] * plain.mass(i, j));
      EXPECT_DOUBLE_EQ(signed_.stiffness(i, j), signs[i] * signs[j] * plain.stiffness(i, j));
    }
  }
}

TEST(VectorP1, DivCurlEnergiesOfLinearFields) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = testing_support::random_tet(rng);
    const double V = testing_support::tet_volume(p);
    const auto lm = vector_p1_divcurl_local(p);
    auto field = [&](auto f) {
      Eigen::VectorXd u(12);
      for (int a = 0; a < 4; ++a) {
        const auto v = f(p[a]);
        for (int i = 0; i < 3; ++i) u(3 * a + i) = v[i];
      }
      return u;
    };
    const auto c = field([](const Vec3&) { return Vec3{0.3, -1.0, 2.0}; });
    EXPECT_LT((lm.stiffness * c).cwiseAbs().maxCoeff(), 1e-12 * lm.stiffness.cwiseAbs().maxCoeff());
    // (x, 0, 0): div 1, curl 0. (y, 0, 0): div 0, |curl| 1. (y, x, 0): div 0, curl 0.
    EXPECT_NEAR(field([](const Vec3& q) { return Vec3{q[0], 0, 0}; }).dot(lm.stiffness * field([](const Vec3& q) { return Vec3{q[0], 0, 0}; })), V, 1e-12);
    const auto y = field([](const Vec3& q) { return Vec3{q[1], 0, 0}; });
    EXPECT_NEAR(y.dot(lm.stiffness * y), V, 1e-12);
    const auto yx = field([](const Vec3& q) { return Vec3{q[1], q[0], 0}; });
    EXPECT_NEAR(yx.dot(lm.stiffness * yx), 0.0, 1e-12);
    const auto p1 = lagrange_local(p, 1);
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) {
            EXPECT_DOUBLE_EQ(lm.mass(3 * a + i, 3 * b + j), i == j ? p1.mass(a, b) : 0.0);
          }
        }
      }
    }
  }
}

TEST(Elements, DegenerateTetRejected) {
  const std::array<Vec3, 4> flat{{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}}};
  EXPECT_THROW(lagrange_local(flat, 1), DegenerateElementError);
  EXPECT_THROW(nedelec_local(flat), DegenerateElementError);
  EXPECT_THROW(vector_p1_divcurl_local(flat), DegenerateElementError);
}
