#pragma once

#include <vector>

#include <Eigen/Dense>

#include "psd/adam.hpp"
#include "psd/objectives.hpp"
#include "psd/self_representation.hpp"

namespace psd {

/// Configuration of the alternating solver. Defaults were pinned against the
/// synthetic detection suite; every field is exposed through the CLI config.
struct PsdConfig {
  PenaltyWeights penalties;
  int guard_p = 0;          // 0 = auto: max(4, n / 32)
  double eps_conv = 1e-3;   // stationarity tolerance on ||dlambda||_inf
  int inner_K = 5;          // fixed anomaly/noise blocks per outer iteration
  AdamParams adam;
  int max_outer = 50;
  int max_lambda_blocks = 40;  // safety cap on the lambda stabilization loop

  void validate() const;
  int resolve_guard(Eigen::Index n) const;
};

struct Decomposition1D {
  VectorXd periodic;   // y* = y - a - e, exact by construction
  VectorXd anomalies;  // a
  VectorXd noise;      // e
  PeriodicPatternVector lambda;
  std::vector<double> trace;  // master objective per outer iteration
  bool converged = false;
  int outer_iterations = 0;
};

struct Decomposition2D {
  MatrixXd periodic;   // Y* = Y - A - E, exact by construction
  MatrixXd anomalies;  // A
  MatrixXd noise;      // E
  PeriodicPatternVector lambda1;  // down columns (vertical periodicity)
  PeriodicPatternVector lambda2;  // along rows (horizontal periodicity)
  std::vector<double> trace;
  bool converged = false;
  int outer_iterations = 0;
};

/// Alternating minimization for a 1-D signal: stabilize lambda with Adam
/// blocks, then inner_K Adam blocks on the anomalies, then inner_K
/// applications of the closed-form noise update, repeated until lambda
/// stops moving. Never throws on slow convergence; the converged flag and
/// trace report what happened.
Decomposition1D run_psd_1d(const VectorXd& y, const PsdConfig& cfg);

/// 2-D variant: lambda1/lambda2 alternate inside the stabilization loop;
/// anomalies and noise are both updated with Adam blocks (the noise normal
/// equations would be an n^2 x n^2 system, so no closed form here).
Decomposition2D run_psd_2d(const MatrixXd& Y, const PsdConfig& cfg);

}  // namespace psd
