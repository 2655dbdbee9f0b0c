#include "chaos_ns/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Eigenvalues>

#include "chaos_ns/errors.hpp"

namespace chaos_ns {

namespace {

QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag, double mass) {
  const auto n = diag.size();
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) jacobi(i, i) = diag(i);
  for (Eigen::Index i = 0; i + 1 < n; ++i) jacobi(i, i + 1) = jacobi(i + 1, i) = offdiag(i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = eig.eigenvalues()(i);
    const double v0 = eig.eigenvectors()(0, i);
    rule.weights[static_cast<std::size_t>(i)] = mass * v0 * v0;
  }
  return rule;
}

}  // namespace

QuadratureRule gauss_hermite_normal(int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "quadrature needs at least one node");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int i = 0; i + 1 < n; ++i) off(i) = std::sqrt(static_cast<double>(i + 1));
  return golub_welsch(diag, off, 1.0);
}

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "quadrature needs at least one node");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(std::max(n - 1, 0));
  for (int i = 0; i + 1 < n; ++i) {
    const double k = i + 1;
    off(i) = k / std::sqrt(4.0 * k * k - 1.0);
  }
  QuadratureRule ref = golub_welsch(diag, off, 2.0);
  const double half = 0.5 * (b - a);
  for (std::size_t i = 0; i < ref.nodes.size(); ++i) {
    ref.nodes[i] = a + half * (ref.nodes[i] + 1.0);
    ref.weights[i] *= half;
  }
  return ref;
}

double hermite_series(int n, double x) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "Hermite degree must be >= 0");
  double sum = 0.0;
  for (int m = 0; 2 * m <= n; ++m) {
    const double term = std::tgamma(n + 1.0) / (std::tgamma(m + 1.0) * std::tgamma(n - 2.0 * m + 1.0)) /
                        std::pow(2.0, m) * std::pow(x, n - 2 * m);
    sum += (m % 2 == 0) ? term : -term;
  }
  return sum;
}

double triple_expectation_oracle(const MultiIndex& alpha, const MultiIndex& beta, const MultiIndex& gamma) {
  std::set<Slot> support;
  for (const auto* m : {&alpha, &beta, &gamma})
    for (const auto& e : m->entries()) support.insert(e.slot);
  if (support.empty()) return 1.0;

  const int total = alpha.order() + beta.order() + gamma.order();
  const QuadratureRule rule = gauss_hermite_normal(total / 2 + 1);
  const std::vector<Slot> axes(support.begin(), support.end());
  const std::size_t dims = axes.size();
  const std::size_t nodes = rule.nodes.size();

  std::vector<std::size_t> counter(dims, 0);
  double sum = 0.0;
  while (true) {
    double weight = 1.0;
    double value = 1.0;
    for (std::size_t d = 0; d < dims; ++d) {
      const double x = rule.nodes[counter[d]];
      weight *= rule.weights[counter[d]];
      value *= hermite_series(alpha.at(axes[d]), x) * hermite_series(beta.at(axes[d]), x) *
               hermite_series(gamma.at(axes[d]), x);
    }
    sum += weight * value;
    std::size_t d = 0;
    while (d < dims && ++counter[d] == nodes) counter[d++] = 0;
    if (d == dims) break;
  }
  return sum;
}

}  // namespace chaos_ns
