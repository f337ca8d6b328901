#include "psd/adam.hpp"

#include <cmath>
#include <sstream>

namespace psd {

void AdamParams::validate() const {
  if (step_size <= 0) throw ConfigError("adam step_size must be > 0");
  if (decay1 <= 0 || decay1 >= 1) throw ConfigError("adam decay1 must be in (0,1)");
  if (decay2 <= 0 || decay2 >= 1) throw ConfigError("adam decay2 must be in (0,1)");
  if (eps_adam <= 0) throw ConfigError("adam eps must be > 0");
  if (steps_per_block < 1) throw ConfigError("adam steps_per_block must be >= 1");
  if (value_check_every < 1) throw ConfigError("adam value_check_every must be >= 1");
  if (stall_patience < 1) throw ConfigError("adam stall_patience must be >= 1");
}

namespace {

[[noreturn]] void throw_divergence(const char* what, long t, double value) {
  std::ostringstream msg;
  msg << "adam_minimize diverged: " << what << " at step " << t
      << " (last objective " << value << ")";
  throw DivergenceError(msg.str());
}

}  // namespace

AdamResult adam_minimize(const Objective& objective, const VectorXd& init,
                         const AdamParams& params, const Projector& projector,
                         double eps_conv, AdamState* state) {
  params.validate();
  const Eigen::Index n = init.size();

  AdamState local;
  AdamState& st = state ? *state : local;
  if (st.m.size() != n) st.reset(n);

  VectorXd x = init;
  projector(x);

  AdamResult res;
  res.value = objective.value(x);
  if (!std::isfinite(res.value)) throw_divergence("non-finite objective", st.t, res.value);
  res.x = x;

  const auto consider = [&](const VectorXd& candidate) {
    const double v = objective.value(candidate);
    if (!std::isfinite(v)) throw_divergence("non-finite objective", st.t, res.value);
    if (v < res.value) {
      res.value = v;
      res.x = candidate;
    }
  };

  int calm_steps = 0;
  for (int step = 0; step < params.steps_per_block; ++step) {
    VectorXd g = objective.gradient(x);
    if (!g.allFinite()) throw_divergence("non-finite gradient", st.t, res.value);

    ++st.t;
    st.m = params.decay1 * st.m + (1.0 - params.decay1) * g;
    st.v = params.decay2 * st.v + (1.0 - params.decay2) * g.cwiseAbs2();
    const double c1 = 1.0 - std::pow(params.decay1, static_cast<double>(st.t));
    const double c2 = 1.0 - std::pow(params.decay2, static_cast<double>(st.t));

    VectorXd prev = x;
    x -= (params.step_size / c1) * st.m.cwiseQuotient(
             ((st.v / c2).cwiseSqrt().array() + params.eps_adam).matrix());
    projector(x);
    if (!x.allFinite()) throw_divergence("non-finite iterate", st.t, res.value);

    res.last_step_inf = (x - prev).lpNorm<Eigen::Infinity>();
    ++res.steps;

    calm_steps = res.last_step_inf <= eps_conv ? calm_steps + 1 : 0;
    const bool stalled = calm_steps >= params.stall_patience;
    const bool last = stalled || step + 1 == params.steps_per_block;
    if (last || (step + 1) % params.value_check_every == 0) consider(x);
    if (stalled) {
      res.early_stopped = true;
      break;
    }
  }
  return res;
}

}  // namespace psd
