#include <doctest.h>

#include "psd/adam.hpp"
#include "psd/objectives.hpp"
#include "test_util.hpp"

using namespace psd;

TEST_CASE("zero gradient at init returns init unchanged") {
  Objective obj;
  obj.value = [](const VectorXd&) { return 1.0; };
  obj.gradient = [](const VectorXd& x) { return VectorXd::Zero(x.size()).eval(); };
  AdamParams p;
  const VectorXd x0 = VectorXd::Constant(5, 3.25);
  const AdamResult r = adam_minimize(obj, x0, p, identity_projector, 1e-6);
  CHECK(r.x.isApprox(x0, 0.0));
  CHECK(r.early_stopped);
}

TEST_CASE("first step on f(x) = x^2 moves by about -step_size") {
  Objective obj;
  obj.value = [](const VectorXd& x) { return x(0) * x(0); };
  obj.gradient = [](const VectorXd& x) {
    VectorXd g(1);
    g(0) = 2.0 * x(0);
    return g;
  };
  AdamParams p;
  p.step_size = 0.05;
  p.steps_per_block = 1;
  const AdamResult r =
      adam_minimize(obj, VectorXd::Ones(1), p, identity_projector, 0.0);
  // m_hat = 2, v_hat = 4 after one step, so the move is step * 2/(2 + eps).
  CHECK(r.x(0) == doctest::Approx(1.0 - 0.05).epsilon(1e-6));
}

TEST_CASE("projector pins guard entries after every step") {
  auto g = testutil::rng(31);
  const int n = 12, p = 3;
  const VectorXd target = testutil::random_vector(g, n);
  Objective obj;
  obj.value = [&](const VectorXd& x) { return (x - target).squaredNorm(); };
  obj.gradient = [&](const VectorXd& x) { return (2.0 * (x - target)).eval(); };
  AdamParams params;
  params.step_size = 0.05;
  params.steps_per_block = 600;
  Projector proj = [p](VectorXd& x) {
    x.head(p).setZero();
    x.tail(p).setZero();
  };
  const AdamResult r =
      adam_minimize(obj, VectorXd::Zero(n), params, proj, 1e-12);
  CHECK(r.x.head(p).isZero(0.0));
  CHECK(r.x.tail(p).isZero(0.0));
  CHECK(r.x.segment(p, n - 2 * p).isApprox(target.segment(p, n - 2 * p), 0.2));
}

TEST_CASE("divergence raises with a diagnostic") {
  Objective obj;
  obj.value = [](const VectorXd& x) { return x(0); };
  obj.gradient = [](const VectorXd&) {
    VectorXd g(1);
    g(0) = std::numeric_limits<double>::quiet_NaN();
    return g;
  };
  AdamParams p;
  CHECK_THROWS_AS(adam_minimize(obj, VectorXd::Ones(1), p, identity_projector, 0.0),
                  DivergenceError);
}

TEST_CASE("a block on a convex sub-problem does not increase the objective") {
  auto g = testutil::rng(32);
  const int n = 24;
  const VectorXd y = testutil::random_vector(g, n, 0.0, 1.0);
  const VectorXd l = testutil::random_vector(g, n, 0.0, 0.5);
  const MatrixXd R = build_operator(l).dense_R();
  PenaltyWeights w;

  Objective obj;
  obj.value = [&](const VectorXd& a) {
    return l2_value(a, y, VectorXd::Zero(n), R, w);
  };
  obj.gradient = [&](const VectorXd& a) {
    return l2_gradient(a, y, VectorXd::Zero(n), R, w);
  };

  AdamParams params;
  VectorXd a = VectorXd::Zero(n);
  AdamState state;
  for (int block = 0; block < 5; ++block) {
    const double before = obj.value(a);
    const AdamResult r = adam_minimize(obj, a, params, identity_projector, 1e-5, &state);
    a = r.x;
    CHECK(obj.value(a) <= before + 1e-6);
  }
}
