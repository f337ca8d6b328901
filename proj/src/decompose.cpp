#include "psd/decompose.hpp"

#include <algorithm>
#include <cmath>

namespace psd {

void PsdConfig::validate() const {
  if (penalties.rho1 < 0 || penalties.rho2 < 0 || penalties.beta1 < 0 ||
      penalties.beta2 < 0)
    throw ConfigError("penalty weights must be nonnegative");
  if (eps_conv <= 0) throw ConfigError("eps_conv must be > 0");
  if (inner_K < 1) throw ConfigError("inner_K must be >= 1");
  if (max_outer < 1) throw ConfigError("max_outer must be >= 1");
  if (max_lambda_blocks < 1) throw ConfigError("max_lambda_blocks must be >= 1");
  if (guard_p < 0) throw ConfigError("guard_p must be >= 1 (or 0 for auto)");
  adam.validate();
}

int PsdConfig::resolve_guard(Eigen::Index n) const {
  int p = guard_p > 0 ? guard_p : std::max<int>(4, static_cast<int>(n / 32));
  if (n < 4 * p)
    throw ConfigError("signal length " + std::to_string(n) +
                      " is below 4 * guard_p = " + std::to_string(4 * p));
  return p;
}

namespace {

// eps_conv compares iterates between whole Adam blocks (the algorithm's
// "calls"); inside a block the stop threshold is finer, since slow sorting
// of pattern mass advances in sub-eps steps that still add up.
constexpr double kStepEpsFactor = 1e-2;

Projector guard_projector(Eigen::Index n, int p) {
  return [n, p](VectorXd& x) {
    x.head(p).setZero();
    x.tail(p).setZero();
  };
}

/// Repeated Adam blocks until one block moves lambda by at most eps_conv.
/// Returns the total movement across the whole phase.
double stabilize_lambda(VectorXd& lambda, const Objective& obj,
                        const PsdConfig& cfg, const Projector& proj) {
  const VectorXd start = lambda;
  AdamState state;
  for (int block = 0; block < cfg.max_lambda_blocks; ++block) {
    AdamResult res = adam_minimize(obj, lambda, cfg.adam, proj,
                                   cfg.eps_conv * kStepEpsFactor, &state);
    const double moved = (res.x - lambda).lpNorm<Eigen::Infinity>();
    lambda = std::move(res.x);
    if (moved <= cfg.eps_conv) break;
  }
  return (lambda - start).lpNorm<Eigen::Infinity>();
}

Objective wrap_matrix_objective(std::function<double(const MatrixXd&)> value,
                                std::function<MatrixXd(const MatrixXd&)> gradient,
                                Eigen::Index rows, Eigen::Index cols) {
  Objective obj;
  obj.value = [value, rows, cols](const VectorXd& x) {
    return value(Eigen::Map<const MatrixXd>(x.data(), rows, cols));
  };
  obj.gradient = [gradient, rows, cols](const VectorXd& x) {
    MatrixXd g = gradient(Eigen::Map<const MatrixXd>(x.data(), rows, cols));
    return VectorXd(Eigen::Map<VectorXd>(g.data(), rows * cols));
  };
  return obj;
}

}  // namespace

Decomposition1D run_psd_1d(const VectorXd& y, const PsdConfig& cfg) {
  cfg.validate();
  if (!y.allFinite()) throw DimensionError("run_psd_1d: non-finite input");
  const Eigen::Index n = y.size();
  const int p = cfg.resolve_guard(n);
  const PenaltyWeights& w = cfg.penalties;
  const Projector proj = guard_projector(n, p);

  VectorXd lambda = VectorXd::Zero(n);
  VectorXd a = VectorXd::Zero(n);
  VectorXd e = VectorXd::Zero(n);

  Decomposition1D out;
  out.lambda.guard_p = p;

  for (int t = 1; t <= cfg.max_outer; ++t) {
    out.outer_iterations = t;
    const VectorXd lambda_before = lambda;

    // Pattern phase: z = y - a - e is fixed while lambda moves.
    {
      const VectorXd z = y - a - e;
      Objective obj;
      obj.value = [&z, &w](const VectorXd& l) { return l1_value(l, z, w); };
      obj.gradient = [&z, &w](const VectorXd& l) { return l1_gradient(l, z, w); };
      stabilize_lambda(lambda, obj, cfg, proj);
    }

    const MatrixXd R = build_operator(lambda).dense_R();

    // Anomaly phase: inner_K Adam blocks on the same objective.
    {
      Objective obj;
      obj.value = [&](const VectorXd& x) { return l2_value(x, y, e, R, w); };
      obj.gradient = [&](const VectorXd& x) { return l2_gradient(x, y, e, R, w); };
      AdamState state;
      for (int k = 0; k < cfg.inner_K; ++k) {
        AdamResult res = adam_minimize(obj, a, cfg.adam, identity_projector,
                                       cfg.eps_conv * kStepEpsFactor, &state);
        a = std::move(res.x);
      }
    }

    // Noise phase: exact ridge solution (idempotent, run inner_K times as
    // the alternation prescribes).
    for (int k = 0; k < cfg.inner_K; ++k) e = ridge_solve_e(y, a, R, w.beta2);

    const VectorXd z = y - a - e;
    out.trace.push_back((z - R * z).squaredNorm() + w.beta1 * a.lpNorm<1>() +
                        w.beta2 * e.squaredNorm());

    if ((lambda - lambda_before).lpNorm<Eigen::Infinity>() <= cfg.eps_conv) {
      out.converged = true;
      break;
    }
  }

  out.anomalies = a;
  out.noise = e;
  out.periodic = y - a - e;
  out.lambda.values = lambda;
  return out;
}

Decomposition2D run_psd_2d(const MatrixXd& Y, const PsdConfig& cfg) {
  cfg.validate();
  if (Y.rows() != Y.cols()) throw DimensionError("run_psd_2d: image not square");
  if (!Y.allFinite()) throw DimensionError("run_psd_2d: non-finite input");
  const Eigen::Index n = Y.rows();
  const int p = cfg.resolve_guard(n);
  const PenaltyWeights& w = cfg.penalties;
  const Projector proj = guard_projector(n, p);

  VectorXd lambda1 = VectorXd::Zero(n);
  VectorXd lambda2 = VectorXd::Zero(n);
  MatrixXd A = MatrixXd::Zero(n, n);
  MatrixXd E = MatrixXd::Zero(n, n);

  Decomposition2D out;
  out.lambda1.guard_p = p;
  out.lambda2.guard_p = p;

  for (int t = 1; t <= cfg.max_outer; ++t) {
    out.outer_iterations = t;
    const VectorXd l1_before = lambda1;
    const VectorXd l2_before = lambda2;

    // Pattern phase: alternate one Adam block per direction until both
    // directions stall.
    {
      const MatrixXd Z = Y - A - E;
      Objective obj4;
      obj4.value = [&Z, &w](const VectorXd& l) { return l4_value(l, Z, w); };
      obj4.gradient = [&Z, &w](const VectorXd& l) { return l4_gradient(l, Z, w); };
      Objective obj5;
      obj5.value = [&Z, &w](const VectorXd& l) { return l5_value(l, Z, w); };
      obj5.gradient = [&Z, &w](const VectorXd& l) { return l5_gradient(l, Z, w); };

      AdamState st1, st2;
      const double step_eps = cfg.eps_conv * kStepEpsFactor;
      for (int block = 0; block < cfg.max_lambda_blocks; ++block) {
        AdamResult r1 = adam_minimize(obj4, lambda1, cfg.adam, proj, step_eps, &st1);
        const double d1 = (r1.x - lambda1).lpNorm<Eigen::Infinity>();
        lambda1 = std::move(r1.x);
        AdamResult r2 = adam_minimize(obj5, lambda2, cfg.adam, proj, step_eps, &st2);
        const double d2 = (r2.x - lambda2).lpNorm<Eigen::Infinity>();
        lambda2 = std::move(r2.x);
        if (d1 <= cfg.eps_conv && d2 <= cfg.eps_conv) break;
      }
    }

    const JointOperator op = JointOperator::build(lambda1, lambda2);

    // Anomaly phase.
    {
      Objective obj = wrap_matrix_objective(
          [&](const MatrixXd& X) { return l6_value(X, Y, E, op, w); },
          [&](const MatrixXd& X) { return l6_gradient(X, Y, E, op, w); }, n, n);
      AdamState state;
      VectorXd a_flat = Eigen::Map<VectorXd>(A.data(), n * n);
      for (int k = 0; k < cfg.inner_K; ++k) {
        AdamResult res = adam_minimize(obj, a_flat, cfg.adam, identity_projector,
                                       cfg.eps_conv * kStepEpsFactor, &state);
        a_flat = std::move(res.x);
      }
      A = Eigen::Map<MatrixXd>(a_flat.data(), n, n);
    }

    // Noise phase (iterative; the closed form would be an n^2 x n^2 solve).
    {
      Objective obj = wrap_matrix_objective(
          [&](const MatrixXd& X) { return l7_value(X, Y, A, op, w); },
          [&](const MatrixXd& X) { return l7_gradient(X, Y, A, op, w); }, n, n);
      AdamState state;
      VectorXd e_flat = Eigen::Map<VectorXd>(E.data(), n * n);
      for (int k = 0; k < cfg.inner_K; ++k) {
        AdamResult res = adam_minimize(obj, e_flat, cfg.adam, identity_projector,
                                       cfg.eps_conv * kStepEpsFactor, &state);
        e_flat = std::move(res.x);
      }
      E = Eigen::Map<MatrixXd>(e_flat.data(), n, n);
    }

    const MatrixXd Z = Y - A - E;
    out.trace.push_back(op.forward(Z).squaredNorm() + w.beta1 * A.cwiseAbs().sum() +
                        w.beta2 * E.squaredNorm());

    if ((lambda1 - l1_before).lpNorm<Eigen::Infinity>() <= cfg.eps_conv &&
        (lambda2 - l2_before).lpNorm<Eigen::Infinity>() <= cfg.eps_conv) {
      out.converged = true;
      break;
    }
  }

  out.anomalies = A;
  out.noise = E;
  out.periodic = Y - A - E;
  out.lambda1.values = lambda1;
  out.lambda2.values = lambda2;
  return out;
}

}  // namespace psd
