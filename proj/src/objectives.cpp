#include "psd/objectives.hpp"

#include <cmath>

namespace psd {

namespace {

inline double sign0(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }

/// Diagonal-band sums of G: out_0 = trace, out_l = sum of the l-th sub- and
/// super-diagonal entries. This is sum_{|i-j|=l} G_ij, the matrix analogue
/// of lag_correlation.
VectorXd diagonal_band_sums(const MatrixXd& G) {
  const Eigen::Index n = G.rows();
  VectorXd out = VectorXd::Zero(n);
  out(0) = G.trace();
  for (Eigen::Index l = 1; l < n; ++l) {
    double acc = 0.0;
    for (Eigen::Index i = l; i < n; ++i) acc += G(i, i - l) + G(i - l, i);
    out(l) = acc;
  }
  return out;
}

/// Shared penalty tail for every pattern objective.
double pattern_penalties(const VectorXd& lambda, const PenaltyWeights& w) {
  return w.rho1 * row_sum_penalty(lambda) + w.rho2 * lambda.lpNorm<1>();
}

VectorXd pattern_penalty_gradient(const VectorXd& lambda, const PenaltyWeights& w) {
  VectorXd g = w.rho1 * row_sum_penalty_gradient(lambda);
  for (Eigen::Index l = 0; l < lambda.size(); ++l)
    g(l) += w.rho2 * sign0(lambda(l));
  return g;
}

}  // namespace

double row_sum_penalty(const VectorXd& lambda) {
  const VectorXd s = toeplitz_row_abs_sums(lambda);
  return (s.array() - 1.0).square().sum();
}

VectorXd row_sum_penalty_gradient(const VectorXd& lambda) {
  const Eigen::Index n = lambda.size();
  const VectorXd s = toeplitz_row_abs_sums(lambda);
  // d/d lambda_l = sum_i 2 (s_i - 1) c_{i,l} sign(lambda_l) where c_{i,l}
  // counts how often lag l appears in row i: always once for l = 0, and
  // [i >= l] + [i + l <= n-1] otherwise. Prefix sums give all l at once.
  VectorXd t = 2.0 * (s.array() - 1.0);
  VectorXd prefix(n);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    acc += t(i);
    prefix(i) = acc;
  }
  const double total = prefix(n - 1);
  VectorXd g(n);
  g(0) = total * sign0(lambda(0));
  for (Eigen::Index l = 1; l < n; ++l) {
    const double suffix = total - prefix(l - 1);          // sum_{i >= l} t_i
    const double head = prefix(n - 1 - l);                // sum_{i <= n-1-l} t_i
    g(l) = (suffix + head) * sign0(lambda(l));
  }
  return g;
}

double l1_value(const VectorXd& lambda, const VectorXd& z, const PenaltyWeights& w) {
  if (lambda.size() != z.size()) throw DimensionError("l1_value size mismatch");
  const MatrixXd S = build_S(lambda);
  return (z - S * z).squaredNorm() + pattern_penalties(lambda, w);
}

VectorXd l1_gradient(const VectorXd& lambda, const VectorXd& z, const PenaltyWeights& w) {
  if (lambda.size() != z.size()) throw DimensionError("l1_gradient size mismatch");
  const MatrixXd S = build_S(lambda);
  const VectorXd r = z - S * z;
  return -2.0 * lag_correlation(r, z) + pattern_penalty_gradient(lambda, w);
}

double l2_value(const VectorXd& a, const VectorXd& y, const VectorXd& e,
                const MatrixXd& R, const PenaltyWeights& w) {
  const VectorXd u = y - a - e;
  return (u - R * u).squaredNorm() + w.beta1 * a.lpNorm<1>();
}

VectorXd l2_gradient(const VectorXd& a, const VectorXd& y, const VectorXd& e,
                     const MatrixXd& R, const PenaltyWeights& w) {
  const VectorXd u = y - a - e;
  const VectorXd r = u - R * u;
  VectorXd g = -2.0 * (r - R.transpose() * r);
  for (Eigen::Index i = 0; i < g.size(); ++i) g(i) += w.beta1 * sign0(a(i));
  return g;
}

double l3_value(const VectorXd& e, const VectorXd& y, const VectorXd& a,
                const MatrixXd& R, const PenaltyWeights& w) {
  const VectorXd u = y - a - e;
  return (u - R * u).squaredNorm() + w.beta2 * e.squaredNorm();
}

VectorXd l3_gradient(const VectorXd& e, const VectorXd& y, const VectorXd& a,
                     const MatrixXd& R, const PenaltyWeights& w) {
  const VectorXd u = y - a - e;
  const VectorXd r = u - R * u;
  return -2.0 * (r - R.transpose() * r) + 2.0 * w.beta2 * e;
}

double l4_value(const VectorXd& lambda, const MatrixXd& Z, const PenaltyWeights& w) {
  if (lambda.size() != Z.rows()) throw DimensionError("l4_value size mismatch");
  const MatrixXd S = build_S(lambda);
  return (Z - S * Z).squaredNorm() + pattern_penalties(lambda, w);
}

VectorXd l4_gradient(const VectorXd& lambda, const MatrixXd& Z, const PenaltyWeights& w) {
  if (lambda.size() != Z.rows()) throw DimensionError("l4_gradient size mismatch");
  const MatrixXd S = build_S(lambda);
  const MatrixXd R = Z - S * Z;
  // d/d lambda of ||Z - S Z||_F^2 summed over columns collapses to the
  // diagonal band sums of R Z^T.
  const MatrixXd G = R * Z.transpose();
  return -2.0 * diagonal_band_sums(G) + pattern_penalty_gradient(lambda, w);
}

double l5_value(const VectorXd& lambda, const MatrixXd& Z, const PenaltyWeights& w) {
  if (lambda.size() != Z.cols()) throw DimensionError("l5_value size mismatch");
  const MatrixXd S = build_S(lambda);
  return (Z - Z * S).squaredNorm() + pattern_penalties(lambda, w);
}

VectorXd l5_gradient(const VectorXd& lambda, const MatrixXd& Z, const PenaltyWeights& w) {
  if (lambda.size() != Z.cols()) throw DimensionError("l5_gradient size mismatch");
  const MatrixXd S = build_S(lambda);
  const MatrixXd R = Z - Z * S;
  const MatrixXd G = R.transpose() * Z;
  return -2.0 * diagonal_band_sums(G) + pattern_penalty_gradient(lambda, w);
}

JointOperator JointOperator::build(const VectorXd& lambda1, const VectorXd& lambda2) {
  JointOperator op;
  const SelfRepOperator o1 = build_operator(lambda1);
  const SelfRepOperator o2 = build_operator(lambda2);
  op.R1 = o1.w.asDiagonal() * o1.S;
  op.R1t = o1.S * o1.w.asDiagonal();
  op.B = o2.S * o2.w.asDiagonal();
  op.Bt = o2.w.asDiagonal() * o2.S;
  return op;
}

double l6_value(const MatrixXd& A, const MatrixXd& Y, const MatrixXd& E,
                const JointOperator& op, const PenaltyWeights& w) {
  const MatrixXd Z = Y - A - E;
  return op.forward(Z).squaredNorm() + w.beta1 * A.cwiseAbs().sum();
}

MatrixXd l6_gradient(const MatrixXd& A, const MatrixXd& Y, const MatrixXd& E,
                     const JointOperator& op, const PenaltyWeights& w) {
  const MatrixXd Z = Y - A - E;
  MatrixXd g = -2.0 * op.adjoint(op.forward(Z));
  g += w.beta1 * A.unaryExpr([](double x) { return sign0(x); });
  return g;
}

double l7_value(const MatrixXd& E, const MatrixXd& Y, const MatrixXd& A,
                const JointOperator& op, const PenaltyWeights& w) {
  const MatrixXd Z = Y - A - E;
  return op.forward(Z).squaredNorm() + w.beta2 * E.squaredNorm();
}

MatrixXd l7_gradient(const MatrixXd& E, const MatrixXd& Y, const MatrixXd& A,
                     const JointOperator& op, const PenaltyWeights& w) {
  const MatrixXd Z = Y - A - E;
  return -2.0 * op.adjoint(op.forward(Z)) + 2.0 * w.beta2 * E;
}

VectorXd ridge_solve_e(const VectorXd& y, const VectorXd& a, const MatrixXd& R,
                       double beta2) {
  const Eigen::Index n = y.size();
  if (a.size() != n || R.rows() != n || R.cols() != n)
    throw DimensionError("ridge_solve_e size mismatch");
  const MatrixXd X = MatrixXd::Identity(n, n) - R;
  MatrixXd lhs = X.transpose() * X;
  lhs.diagonal().array() += beta2;
  const VectorXd rhs = X.transpose() * (X * (y - a));
  Eigen::LDLT<MatrixXd> ldlt(lhs);
  if (ldlt.info() != Eigen::Success ||
      (beta2 <= 0.0 && ldlt.rcond() < 1e-14)) {
    throw SingularityError("ridge_solve_e: X^T X + beta2 I is singular");
  }
  return ldlt.solve(rhs);
}

VectorXd ridge_solve_e(const VectorXd& y, const VectorXd& a,
                       const PeriodicPatternVector& lambda, double beta2) {
  return ridge_solve_e(y, a, build_operator(lambda).dense_R(), beta2);
}

}  // namespace psd
