#pragma once

#include <Eigen/Dense>

#include "psd/errors.hpp"

namespace psd {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Floor applied to the row absolute sums when inverting them for W.
inline constexpr double kWeightEpsilon = 1e-12;

/// Continuous pattern vector lambda. Entry l weights the contribution of
/// samples at lag l to the self-representation; the first and last guard_p
/// entries are pinned to zero so the trivial identity solution is excluded.
struct PeriodicPatternVector {
  VectorXd values;
  int guard_p = 1;

  PeriodicPatternVector() = default;
  PeriodicPatternVector(VectorXd v, int p) : values(std::move(v)), guard_p(p) {}

  Eigen::Index size() const { return values.size(); }

  /// Zero the guard entries in place.
  void apply_guard();

  /// True when all guard entries are exactly zero and all entries finite.
  bool guard_consistent() const;

  static PeriodicPatternVector zeros(Eigen::Index n, int guard_p);
};

/// Dense realization of S(lambda) and W(lambda) for one direction.
/// S is the symmetric Toeplitz matrix S_ij = lambda_|i-j|; W holds the
/// reciprocal row absolute sums of S on its diagonal (stored as a vector).
struct SelfRepOperator {
  MatrixXd S;
  VectorXd w;            // diagonal of W
  bool degenerate = false;  // some row abs-sum fell below kWeightEpsilon

  Eigen::Index size() const { return S.rows(); }

  /// R(lambda) * x = W * S * x.
  VectorXd apply(const VectorXd& x) const;

  /// Dense R = W * S (rows of S scaled by w).
  MatrixXd dense_R() const;
};

MatrixXd build_S(const PeriodicPatternVector& lambda);
MatrixXd build_S(const VectorXd& lambda);

/// Diagonal of W as a vector; degenerate is set when the epsilon floor
/// engaged for at least one row (e.g. an all-zero lambda).
VectorXd build_W_diagonal(const VectorXd& lambda, bool* degenerate = nullptr);
MatrixXd build_W(const PeriodicPatternVector& lambda);

SelfRepOperator build_operator(const PeriodicPatternVector& lambda);
SelfRepOperator build_operator(const VectorXd& lambda);

/// Row absolute sums of S(lambda): s_i = sum_j |lambda_|i-j||, in O(n).
VectorXd toeplitz_row_abs_sums(const VectorXd& lambda);

/// Lag correlation: out_l = sum over pairs (i,j) with |i-j| = l of u_i * z_j.
/// This is the adjoint of lambda -> S(lambda) * z and drives every gradient
/// with respect to a pattern vector.
VectorXd lag_correlation(const VectorXd& u, const VectorXd& z);

/// W(lambda) S(lambda) y.
VectorXd apply_R_1d(const PeriodicPatternVector& lambda, const VectorXd& y);

struct Residual {
  double value = 0.0;
  bool degenerate = false;
};

/// ||y - R(lambda) y||_2^2.
Residual residual_1d(const PeriodicPatternVector& lambda, const VectorXd& y);

/// W(l1) S(l1) [W(l2) S(l2) Y^T]^T  ==  R(l1) * Y * R(l2)^T.
MatrixXd apply_R_2d(const PeriodicPatternVector& lambda1,
                    const PeriodicPatternVector& lambda2, const MatrixXd& Y);

}  // namespace psd
