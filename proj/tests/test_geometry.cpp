#include <doctest.h>

#include <cmath>

#include "psd/geometry.hpp"
#include "psd/synthetic.hpp"
#include "test_util.hpp"

using namespace psd;

namespace {

MatrixXd sincos_image(int n, double T1, double T2, double noise_sigma, uint64_t seed) {
  SynthSpec spec;
  spec.n = n;
  spec.t1 = T1;
  spec.t2 = T2;
  spec.noise_sigma = noise_sigma;
  spec.seed = seed;
  return generate(spec).first;
}

/// Exactly periodic image from random per-phase tiles.
MatrixXd tiled_image(int n, int T, uint64_t seed) {
  auto g = testutil::rng(seed);
  MatrixXd tile = testutil::random_matrix(g, T, T, 0.0, 1.0);
  MatrixXd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = tile(i % T, j % T);
  return out;
}

/// Mesh texture: bright cells separated by dark gutter lines, axis-dominant
/// spectrum (a checkerboard has only diagonal peaks and would defeat any
/// axis-direction estimate).
MatrixXd mesh_image(int n, int tile_h, int tile_w, int line = 2, double hi = 0.8,
                    double lo = 0.2) {
  MatrixXd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const bool gutter = (i % tile_h) < line || (j % tile_w) < line;
      out(i, j) = gutter ? lo : hi;
    }
  return out;
}

}  // namespace

TEST_CASE("angle folding lands in (-45, 45]") {
  CHECK(fold_angle_deg(0.0) == 0.0);
  CHECK(fold_angle_deg(45.0) == doctest::Approx(45.0));
  CHECK(fold_angle_deg(-45.0) == doctest::Approx(45.0));
  CHECK(fold_angle_deg(50.0) == doctest::Approx(-40.0));
  CHECK(fold_angle_deg(-50.0) == doctest::Approx(40.0));
  CHECK(fold_angle_deg(90.0) == doctest::Approx(0.0));
  CHECK(fold_angle_deg(135.0) == doctest::Approx(45.0));
  CHECK(fold_angle_deg(25.0 + 360.0) == doctest::Approx(25.0));
}

TEST_CASE("direction of an axis-aligned background is zero") {
  const MatrixXd Y = sincos_image(128, 16, 16, 0.01, 51);
  CHECK(std::abs(estimate_direction(Y)) <= 1.0);
}

TEST_CASE("synthesize-and-recover rotation angles") {
  const MatrixXd Y = sincos_image(128, 16, 16, 0.0, 52);
  for (double theta : {-10.0, 10.0, 25.0, 40.0}) {
    const MatrixXd rotated = rotate_image(Y, theta);
    CHECK(std::abs(estimate_direction(rotated) - theta) <= 2.0);
  }
}

TEST_CASE("direction estimates compose with rotations modulo 90 degrees") {
  const MatrixXd Y = sincos_image(128, 16, 16, 0.005, 53);
  const double base = estimate_direction(Y);
  for (double theta : {40.0, 30.0, -35.0}) {
    const double est = estimate_direction(rotate_image(Y, theta));
    const double expected = fold_angle_deg(base + theta);
    const double diff = std::abs(fold_angle_deg(est - expected));
    CHECK(diff <= 2.0);
  }
}

TEST_CASE("flat image has no periodic direction") {
  CHECK_THROWS_AS(estimate_direction(MatrixXd::Constant(64, 64, 0.4)),
                  NoPeriodicityError);
}

TEST_CASE("rotation by zero is a bit-exact copy") {
  auto g = testutil::rng(54);
  const MatrixXd Y = testutil::random_matrix(g, 33, 33, 0.0, 1.0);
  CHECK(rotate_image(Y, 0.0).isApprox(Y, 0.0));
  RotationPlan plan;
  plan.crop_edge = 33;
  CHECK(rotate_and_crop(Y, plan).isApprox(Y, 0.0));
}

TEST_CASE("rotation round trip keeps interior pixels") {
  const MatrixXd Y = sincos_image(96, 20, 20, 0.0, 55);
  const double theta = 17.0;
  const MatrixXd back = rotate_image(rotate_image(Y, theta), -theta);
  double max_err = 0.0;
  for (int i = 2; i < 94; ++i)
    for (int j = 2; j < 94; ++j) {
      // only compare pixels whose round trip stayed inside the frame
      const double r = std::hypot(i - 47.5, j - 47.5);
      if (r < 40.0) max_err = std::max(max_err, std::abs(back(i, j) - Y(i, j)));
    }
  CHECK(max_err <= 0.02);
}

TEST_CASE("largest inscribed crop at 45 degrees") {
  const RotationPlan plan = plan_rotation(256, 45.0, 16);
  // continuous bound is floor(256 / sqrt 2) = 181; integer-aligned crops may
  // give up one pixel to stay off-center-safe
  CHECK(std::abs(plan.crop_edge - 181) <= 1);
  const RotationPlan same = plan_rotation(200, 0.0, 16);
  CHECK(same.crop_edge == 200);
  CHECK_THROWS_AS(plan_rotation(20, 45.0, 16), TooSmallError);
}

TEST_CASE("cropped pixels are all genuinely valid") {
  const MatrixXd Y = sincos_image(100, 10, 10, 0.0, 56);
  const RotationPlan plan = plan_rotation(100, 30.0, 8);
  BoolMatrix valid;
  const MatrixXd rotated = rotate_image(Y, -plan.angle_degrees, &valid);
  for (int i = 0; i < plan.crop_edge; ++i)
    for (int j = 0; j < plan.crop_edge; ++j)
      CHECK(valid(plan.crop_row0 + i, plan.crop_col0 + j));
}

TEST_CASE("expansion reproduces the periodic continuation exactly") {
  auto g = testutil::rng(57);
  for (int T : {16, 24}) {
    const int n = 96, grow = 17;
    const int big = n + 2 * grow + 2;
    MatrixXd tile = testutil::random_matrix(g, T, T, 0.0, 1.0);
    MatrixXd bigimg(big, big);
    for (int i = 0; i < big; ++i)
      for (int j = 0; j < big; ++j) bigimg(i, j) = tile(i % T, j % T);
    // Any window of the periodic image continues into the surrounding big
    // image, which therefore serves as the oracle.
    const MatrixXd Yref = bigimg.block(grow, grow, n, n);

    PeriodicPatternVector l1{testutil::lambda_on_multiples(g, n, T, 4), 4};
    PeriodicPatternVector l2{testutil::lambda_on_multiples(g, n, T, 4), 4};
    const ExpandedImage ex = expand_reference(Yref, l1, l2, n + 2 * grow, n + 2 * grow);

    CHECK(ex.top_rows == grow);
    CHECK(ex.left_cols == grow);
    const MatrixXd oracle = bigimg.block(0, 0, n + 2 * grow, n + 2 * grow);
    CHECK((ex.values - oracle).lpNorm<Eigen::Infinity>() <= 1e-6);
  }
}

TEST_CASE("expansion no-op and constants") {
  auto g = testutil::rng(58);
  const int n = 32, T = 8;
  const MatrixXd Y = tiled_image(n, T, 59);
  PeriodicPatternVector l{testutil::lambda_on_multiples(g, n, T, 4), 4};

  const ExpandedImage same = expand_reference(Y, l, l, n, n);
  CHECK(same.values.isApprox(Y, 0.0));
  CHECK(same.top_rows == 0);

  const MatrixXd C = MatrixXd::Constant(n, n, 0.7);
  const ExpandedImage grown = expand_reference(C, l, l, n + 5, n + 3);
  CHECK((grown.values.array() - 0.7).abs().maxCoeff() <= 1e-12);
  CHECK(grown.top_rows == 3);
  CHECK(grown.left_cols == 2);
}

TEST_CASE("expansion rejects a zero-sum pattern vector") {
  const int n = 32;
  VectorXd bad = VectorXd::Zero(n);
  bad(8) = 0.5;
  bad(16) = -0.5;
  PeriodicPatternVector l{bad, 4};
  const MatrixXd Y = MatrixXd::Constant(n, n, 0.3);
  CHECK_THROWS_AS(expand_reference(Y, l, l, n + 2, n), DegenerateLambdaError);
}

TEST_CASE("reference for an axis-aligned periodic image stays close to it") {
  const int n = 64;
  const double sigma = 0.01;
  const MatrixXd Y = sincos_image(n, 16, 12, sigma, 60);
  PsdConfig cfg;
  const ReferenceResult res = build_reference(Y, cfg, true);
  CHECK(res.reference.pixels.rows() == n);
  CHECK(res.reference.pixels.cols() == n);
  const double mae = (res.reference.pixels - Y).cwiseAbs().mean();
  CHECK(mae <= 3.0 * sigma);
}

TEST_CASE("rotation-disabled path equals the raw decomposition") {
  const MatrixXd Y = sincos_image(64, 16, 16, 0.01, 61);
  PsdConfig cfg;
  const ReferenceResult res = build_reference(Y, cfg, false);
  const Decomposition2D direct = run_psd_2d(Y, cfg);
  CHECK(res.reference.pixels.isApprox(direct.periodic, 0.0));
  CHECK(res.plan.angle_degrees == 0.0);
}

TEST_CASE("reference construction for a rotated grid texture") {
  // Build a big aligned tile texture, rotate its content, use a fully valid
  // central crop as the input, and compare against the noise-free rotated
  // truth on the interior.
  const int big = 160, n = 96;
  const MatrixXd clean_big = mesh_image(big, 16, 20);
  const MatrixXd rot_big = rotate_image(clean_big, 20.0);
  const int off = (big - n) / 2;
  const MatrixXd truth = rot_big.block(off, off, n, n);

  Rng noise_rng(63);
  MatrixXd input = truth;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) input(i, j) += 0.01 * noise_rng.normal();

  PsdConfig cfg;
  const ReferenceResult res = build_reference(input, cfg, true);
  CHECK(std::abs(std::abs(res.plan.angle_degrees) - 20.0) <= 2.0);

  // Interior = pixels whose reverse-rotation source lies inside the measured
  // crop (backed by real data); the expansion ring is judged more loosely.
  const double rad = res.plan.angle_degrees * M_PI / 180.0;
  const double ca = std::cos(rad), sa = std::sin(rad);
  const double center = (n - 1) / 2.0;
  double acc = 0.0, acc_all = 0.0;
  int count = 0, count_all = 0;
  for (int i = 4; i < n - 4; ++i)
    for (int j = 4; j < n - 4; ++j) {
      if (!res.reference.is_valid(i, j)) continue;
      const double err = std::abs(res.reference.pixels(i, j) - truth(i, j));
      acc_all += err;
      ++count_all;
      const double qr = center + ca * (i - center) + sa * (j - center);
      const double qc = center - sa * (i - center) + ca * (j - center);
      if (qr >= res.plan.crop_row0 && qr <= res.plan.crop_row0 + res.plan.crop_edge - 1 &&
          qc >= res.plan.crop_col0 && qc <= res.plan.crop_col0 + res.plan.crop_edge - 1) {
        acc += err;
        ++count;
      }
    }
  REQUIRE(count > 0);
  CHECK(acc / count <= 0.05);
  CHECK(acc_all / count_all <= 0.08);
}
