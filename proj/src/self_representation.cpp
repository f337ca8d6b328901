#include "psd/self_representation.hpp"

#include <cmath>

namespace psd {

void PeriodicPatternVector::apply_guard() {
  const Eigen::Index n = values.size();
  const Eigen::Index p = guard_p;
  if (p < 0 || 2 * p > n) {
    throw ConfigError("guard_p out of range for pattern vector of length " +
                      std::to_string(n));
  }
  values.head(p).setZero();
  values.tail(p).setZero();
}

bool PeriodicPatternVector::guard_consistent() const {
  const Eigen::Index n = values.size();
  const Eigen::Index p = guard_p;
  if (p < 0 || 2 * p > n) return false;
  if (!values.allFinite()) return false;
  return values.head(p).isZero(0.0) && values.tail(p).isZero(0.0);
}

PeriodicPatternVector PeriodicPatternVector::zeros(Eigen::Index n, int guard_p) {
  return PeriodicPatternVector(VectorXd::Zero(n), guard_p);
}

MatrixXd build_S(const VectorXd& lambda) {
  const Eigen::Index n = lambda.size();
  if (n < 2) throw DimensionError("build_S requires n >= 2");
  MatrixXd S(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) S(i, j) = lambda(std::abs(i - j));
  return S;
}

MatrixXd build_S(const PeriodicPatternVector& lambda) {
  return build_S(lambda.values);
}

VectorXd toeplitz_row_abs_sums(const VectorXd& lambda) {
  const Eigen::Index n = lambda.size();
  // s_i = P(i) + P(n-1-i) - |lambda_0| with P the prefix sum of |lambda|.
  VectorXd prefix(n);
  double acc = 0.0;
  for (Eigen::Index l = 0; l < n; ++l) {
    acc += std::abs(lambda(l));
    prefix(l) = acc;
  }
  VectorXd s(n);
  const double a0 = std::abs(lambda(0));
  for (Eigen::Index i = 0; i < n; ++i)
    s(i) = prefix(i) + prefix(n - 1 - i) - a0;
  return s;
}

VectorXd build_W_diagonal(const VectorXd& lambda, bool* degenerate) {
  const VectorXd s = toeplitz_row_abs_sums(lambda);
  VectorXd w(s.size());
  bool any_floor = false;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    double denom = s(i);
    if (denom < kWeightEpsilon) {
      denom = kWeightEpsilon;
      any_floor = true;
    }
    w(i) = 1.0 / denom;
  }
  if (degenerate) *degenerate = any_floor;
  return w;
}

MatrixXd build_W(const PeriodicPatternVector& lambda) {
  if (lambda.size() < 2) throw DimensionError("build_W requires n >= 2");
  return build_W_diagonal(lambda.values).asDiagonal();
}

SelfRepOperator build_operator(const VectorXd& lambda) {
  SelfRepOperator op;
  op.S = build_S(lambda);
  op.w = build_W_diagonal(lambda, &op.degenerate);
  return op;
}

SelfRepOperator build_operator(const PeriodicPatternVector& lambda) {
  return build_operator(lambda.values);
}

VectorXd SelfRepOperator::apply(const VectorXd& x) const {
  if (x.size() != S.rows())
    throw DimensionError("operator/vector size mismatch");
  return w.cwiseProduct(S * x);
}

MatrixXd SelfRepOperator::dense_R() const {
  return w.asDiagonal() * S;
}

VectorXd lag_correlation(const VectorXd& u, const VectorXd& z) {
  const Eigen::Index n = u.size();
  if (z.size() != n) throw DimensionError("lag_correlation size mismatch");
  VectorXd out = VectorXd::Zero(n);
  out(0) = u.dot(z);
  for (Eigen::Index l = 1; l < n; ++l) {
    const Eigen::Index m = n - l;
    out(l) = u.tail(m).dot(z.head(m)) + u.head(m).dot(z.tail(m));
  }
  return out;
}

VectorXd apply_R_1d(const PeriodicPatternVector& lambda, const VectorXd& y) {
  if (lambda.size() != y.size())
    throw DimensionError("apply_R_1d: lambda/signal size mismatch");
  return build_operator(lambda).apply(y);
}

Residual residual_1d(const PeriodicPatternVector& lambda, const VectorXd& y) {
  if (lambda.size() != y.size())
    throw DimensionError("residual_1d: lambda/signal size mismatch");
  const SelfRepOperator op = build_operator(lambda);
  Residual r;
  r.value = (y - op.apply(y)).squaredNorm();
  r.degenerate = op.degenerate;
  return r;
}

MatrixXd apply_R_2d(const PeriodicPatternVector& lambda1,
                    const PeriodicPatternVector& lambda2, const MatrixXd& Y) {
  if (Y.rows() != Y.cols()) throw DimensionError("apply_R_2d: image not square");
  if (lambda1.size() != Y.rows() || lambda2.size() != Y.rows())
    throw DimensionError("apply_R_2d: lambda/image size mismatch");
  const SelfRepOperator op1 = build_operator(lambda1);
  const SelfRepOperator op2 = build_operator(lambda2);
  // R1 * Y * R2^T with R = diag(w) * S and S symmetric.
  MatrixXd cols = op2.w.asDiagonal() * (op2.S * Y.transpose());
  return op1.w.asDiagonal() * (op1.S * cols.transpose());
}

}  // namespace psd
