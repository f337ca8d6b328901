#pragma once

#include <Eigen/Dense>

#include "psd/adam.hpp"
#include "psd/self_representation.hpp"

namespace psd {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Weights of the alternating sub-problems.
struct PenaltyWeights {
  double rho1 = 100.0;   // row-sum-to-one penalty on S(lambda)
  double rho2 = 100.0;   // L1 sparsity of lambda
  double beta1 = 0.3;    // L1 weight on anomalies
  double beta2 = 10.0;   // L2 weight on noise
};

/// sum_i (s_i(lambda) - 1)^2 with s the row absolute sums of S(lambda).
double row_sum_penalty(const VectorXd& lambda);

/// Gradient of row_sum_penalty; uses sign(0) = 0.
VectorXd row_sum_penalty_gradient(const VectorXd& lambda);

// Pattern objective (1-D): ||z - S(l) z||^2 + rho1 * row_sum_penalty
// + rho2 * ||l||_1, with z = y - a - e held fixed.
double l1_value(const VectorXd& lambda, const VectorXd& z, const PenaltyWeights& w);
VectorXd l1_gradient(const VectorXd& lambda, const VectorXd& z, const PenaltyWeights& w);

// Anomaly objective (1-D): ||u - R u||^2 + beta1 ||a||_1 with u = y - a - e
// and R = W S held fixed (dense_R passed in).
double l2_value(const VectorXd& a, const VectorXd& y, const VectorXd& e,
                const MatrixXd& R, const PenaltyWeights& w);
VectorXd l2_gradient(const VectorXd& a, const VectorXd& y, const VectorXd& e,
                     const MatrixXd& R, const PenaltyWeights& w);

// Noise objective (1-D): ||u - R u||^2 + beta2 ||e||^2.
double l3_value(const VectorXd& e, const VectorXd& y, const VectorXd& a,
                const MatrixXd& R, const PenaltyWeights& w);
VectorXd l3_gradient(const VectorXd& e, const VectorXd& y, const VectorXd& a,
                     const MatrixXd& R, const PenaltyWeights& w);

// Pattern objectives (2-D). l4 acts down columns (Z - S(l) Z), l5 along rows
// (Z - Z S(l)); both share the 1-D penalty structure.
double l4_value(const VectorXd& lambda, const MatrixXd& Z, const PenaltyWeights& w);
VectorXd l4_gradient(const VectorXd& lambda, const MatrixXd& Z, const PenaltyWeights& w);
double l5_value(const VectorXd& lambda, const MatrixXd& Z, const PenaltyWeights& w);
VectorXd l5_gradient(const VectorXd& lambda, const MatrixXd& Z, const PenaltyWeights& w);

/// Fixed operators for the 2-D anomaly/noise phases: the data map is
/// Phi(Z) = Z - R1 Z B with R1 = W1 S1 and B = S2 W2, so that
/// R1 Z B == W(l1) S(l1) [W(l2) S(l2) Z^T]^T.
struct JointOperator {
  MatrixXd R1;    // W1 S1
  MatrixXd R1t;   // S1 W1
  MatrixXd B;     // S2 W2
  MatrixXd Bt;    // W2 S2

  static JointOperator build(const VectorXd& lambda1, const VectorXd& lambda2);

  MatrixXd forward(const MatrixXd& Z) const { return Z - R1 * Z * B; }
  MatrixXd adjoint(const MatrixXd& M) const { return M - R1t * M * Bt; }
};

// Anomaly objective (2-D): ||Phi(Y - A - E)||_F^2 + beta1 * sum |A_ij|.
double l6_value(const MatrixXd& A, const MatrixXd& Y, const MatrixXd& E,
                const JointOperator& op, const PenaltyWeights& w);
MatrixXd l6_gradient(const MatrixXd& A, const MatrixXd& Y, const MatrixXd& E,
                     const JointOperator& op, const PenaltyWeights& w);

// Noise objective (2-D): ||Phi(Y - A - E)||_F^2 + beta2 ||E||_F^2.
double l7_value(const MatrixXd& E, const MatrixXd& Y, const MatrixXd& A,
                const JointOperator& op, const PenaltyWeights& w);
MatrixXd l7_gradient(const MatrixXd& E, const MatrixXd& Y, const MatrixXd& A,
                     const JointOperator& op, const PenaltyWeights& w);

/// Exact minimizer of the 1-D noise objective:
/// e = (X^T X + beta2 I)^-1 X^T [X (y - a)] with X = I - W S.
VectorXd ridge_solve_e(const VectorXd& y, const VectorXd& a,
                       const PeriodicPatternVector& lambda, double beta2);
VectorXd ridge_solve_e(const VectorXd& y, const VectorXd& a, const MatrixXd& R,
                       double beta2);

}  // namespace psd
