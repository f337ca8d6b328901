#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "psd/errors.hpp"

namespace psd {

using Eigen::VectorXd;

struct AdamParams {
  double step_size = 1e-2;
  double decay1 = 0.9;
  double decay2 = 0.999;
  double eps_adam = 1e-8;
  int steps_per_block = 200;
  // The objective is evaluated at this cadence (and at the block ends) for
  // best-iterate selection, which keeps whole blocks non-increasing even
  // though individual subgradient steps oscillate.
  int value_check_every = 1;
  // Early stop fires only after this many consecutive steps whose movement
  // stayed within eps_conv; single small steps at momentum reversals do not
  // abort a block.
  int stall_patience = 10;

  void validate() const;
};

/// Value/gradient pair for one of the alternating sub-problems. Matrix
/// variables are optimized through their flattened (column-major) view.
struct Objective {
  std::function<double(const VectorXd&)> value;
  std::function<VectorXd(const VectorXd&)> gradient;
};

/// Applied to the iterate after every step; used to pin guard entries.
using Projector = std::function<void(VectorXd&)>;

inline void identity_projector(VectorXd&) {}

/// First/second moment state, reusable across blocks of the same phase.
struct AdamState {
  VectorXd m, v;
  long t = 0;

  void reset(Eigen::Index n) {
    m = VectorXd::Zero(n);
    v = VectorXd::Zero(n);
    t = 0;
  }
};

struct AdamResult {
  VectorXd x;                  // best evaluated iterate of the block
  double value = 0.0;          // objective at x
  double last_step_inf = 0.0;  // max-norm of the final step taken
  int steps = 0;
  bool early_stopped = false;
};

/// Runs up to params.steps_per_block Adam steps, projecting after each one,
/// stopping early once a step moves the iterate by at most eps_conv in
/// max-norm. Returns the best iterate among the sampled evaluations (the
/// start point included), so a block never increases the objective. Throws
/// DivergenceError when the objective or iterate stops being finite.
AdamResult adam_minimize(const Objective& objective, const VectorXd& init,
                         const AdamParams& params, const Projector& projector,
                         double eps_conv, AdamState* state = nullptr);

}  // namespace psd
