#include "curlspec/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "curlspec/error.hpp"

namespace curlspec {

void gauss_jacobi_unit(int n, int alpha, std::vector<double>& nodes, std::vector<double>& weights) {
  // Golub-Welsch on the monic Jacobi recurrence for (1-x)^alpha on [-1, 1], beta = 0.
  const double a = alpha;
  const double b = 0.0;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double s = 2.0 * k + a + b;
    J(k, k) = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (s * (s + 2.0));
    if (k + 1 < n) {
      const double m = k + 1.0;
      const double t = 2.0 * m + a + b;
      const double beta = 4.0 * m * (m + a) * (m + b) * (m + a + b) / (t * t * (t + 1.0) * (t - 1.0));
      J(k, k + 1) = J(k + 1, k) = std::sqrt(beta);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  // mu0 = int_{-1}^{1} (1-x)^a dx = 2^{a+1}/(a+1); mapping to [0,1] divides by 2^{a+1}.
  const double mu0_unit = 1.0 / (a + 1.0);
  nodes.resize(n);
  weights.resize(n);
  for (int k = 0; k < n; ++k) {
    nodes[k] = 0.5 * (1.0 + es.eigenvalues()(k));
    const double v0 = es.eigenvectors()(0, k);
    weights[k] = mu0_unit * v0 * v0;
  }
}

namespace {

QuadratureRule collapsed_rule(int degree) {
  // x = u(1-v)(1-w), y = v(1-w), z = w on the unit cube; Jacobian (1-v)(1-w)^2.
  const int n = (degree + 2) / 2;
  std::vector<double> tu, wu, tv, wv, tw, ww;
  gauss_jacobi_unit(n, 0, tu, wu);
  gauss_jacobi_unit(n, 1, tv, wv);
  gauss_jacobi_unit(n, 2, tw, ww);
  QuadratureRule rule;
  rule.degree = degree;
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        const double w = tw[k];
        const double v = tv[j];
        const double u = tu[i];
        const double x = u * (1.0 - v) * (1.0 - w);
        const double y = v * (1.0 - w);
        const double z = w;
        rule.points.push_back({1.0 - x - y - z, x, y, z});
        rule.weights.push_back(6.0 * wu[i] * wv[j] * ww[k]);
      }
    }
  }
  return rule;
}

std::array<QuadratureRule, 4> make_rules() {
  std::array<QuadratureRule, 4> rules;
  rules[0].degree = 1;
  rules[0].points = {{0.25, 0.25, 0.25, 0.25}};
  rules[0].weights = {1.0};

  const double a = 0.5854101966249685;  // (5 + 3 sqrt 5) / 20
  const double b = 0.1381966011250105;  // (5 - sqrt 5) / 20
  rules[1].degree = 2;
  rules[1].points = {{a, b, b, b}, {b, a, b, b}, {b, b, a, b}, {b, b, b, a}};
  rules[1].weights = {0.25, 0.25, 0.25, 0.25};

  rules[2] = collapsed_rule(3);
  rules[3] = collapsed_rule(4);
  return rules;
}

}  // namespace

const QuadratureRule& quadrature(int degree) {
  if (degree < 1 || degree > 4) throw InvalidSpecError("unsupported quadrature degree " + std::to_string(degree));
  static const std::array<QuadratureRule, 4> rules = make_rules();
  return rules[degree - 1];
}

double barycentric_monomial_integral(int a, int b, int c, int d, double volume) {
  auto fact = [](int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
  };
  return fact(a) * fact(b) * fact(c) * fact(d) * 6.0 / fact(a + b + c + d + 3) * volume;
}

}  // namespace curlspec
