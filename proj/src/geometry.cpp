#include "psd/geometry.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <vector>

namespace psd {

namespace {

constexpr double kDegToRad = M_PI / 180.0;
constexpr double kAngleEpsilon = 1e-9;   // below this the identity path is used
constexpr double kInsideTol = 1e-9;      // slack for "sample inside the frame"

// FFTW plan creation/destruction is not thread-safe.
std::mutex& fftw_guard() {
  static std::mutex m;
  return m;
}

struct BilinearSample {
  double value;
  bool inside;
};

BilinearSample sample_bilinear(const MatrixXd& img, double r, double c) {
  const Eigen::Index rows = img.rows(), cols = img.cols();
  const bool inside = r >= -kInsideTol && r <= rows - 1 + kInsideTol &&
                      c >= -kInsideTol && c <= cols - 1 + kInsideTol;
  double rc = std::min(std::max(r, 0.0), static_cast<double>(rows - 1));
  double cc = std::min(std::max(c, 0.0), static_cast<double>(cols - 1));
  Eigen::Index r0 = std::min(static_cast<Eigen::Index>(rc), rows - 2);
  Eigen::Index c0 = std::min(static_cast<Eigen::Index>(cc), cols - 2);
  if (rows == 1) r0 = 0;
  if (cols == 1) c0 = 0;
  const double dr = rc - r0, dc = cc - c0;
  const Eigen::Index r1 = std::min(r0 + 1, rows - 1);
  const Eigen::Index c1 = std::min(c0 + 1, cols - 1);
  const double v = (1 - dr) * (1 - dc) * img(r0, c0) + (1 - dr) * dc * img(r0, c1) +
                   dr * (1 - dc) * img(r1, c0) + dr * dc * img(r1, c1);
  return {v, inside};
}

/// Back-map an output pixel through a content rotation by angle about the
/// center of an rows x cols frame.
inline void back_rotate(double r, double c, double center_r, double center_c,
                        double cos_a, double sin_a, double& sr, double& sc) {
  const double dr = r - center_r, dc = c - center_c;
  // content rotated by +a means sources come from rotation by -a
  sr = center_r + cos_a * dr + sin_a * dc;
  sc = center_c - sin_a * dr + cos_a * dc;
}

bool crop_fits(Eigen::Index n, int edge, double angle_deg) {
  const double a = angle_deg * kDegToRad;
  const double ca = std::cos(a), sa = std::sin(a);
  const double center = (n - 1) / 2.0;
  const int r0 = static_cast<int>((n - edge) / 2);
  for (int ci = 0; ci < 4; ++ci) {
    const double r = r0 + (ci / 2) * (edge - 1);
    const double c = r0 + (ci % 2) * (edge - 1);
    double sr, sc;
    back_rotate(r, c, center, center, ca, sa, sr, sc);
    if (sr < -kInsideTol || sr > n - 1 + kInsideTol || sc < -kInsideTol ||
        sc > n - 1 + kInsideTol)
      return false;
  }
  return true;
}

/// Append one line to the top/bottom/left/right using the lag weights.
/// weights are read at lag k for the line k steps away; the normalizer is
/// the signed total of the (possibly truncated) weight vector.
VectorXd continuation_line(const MatrixXd& M, const VectorXd& lambda, bool leading,
                           bool rows) {
  const Eigen::Index extent = rows ? M.rows() : M.cols();
  const Eigen::Index breadth = rows ? M.cols() : M.rows();
  double norm = 0.0;
  for (Eigen::Index k = 0; k < extent && k < lambda.size(); ++k) norm += lambda(k);
  if (std::abs(norm) < 1e-12)
    throw DegenerateLambdaError(
        "expand_reference: pattern weight total is zero; cannot normalize");
  VectorXd line = VectorXd::Zero(breadth);
  for (Eigen::Index k = 1; k < extent && k < lambda.size(); ++k) {
    const double w = lambda(k);
    if (w == 0.0) continue;
    const Eigen::Index src = leading ? k - 1 : extent - k;
    if (rows)
      line += w * M.row(src).transpose();
    else
      line += w * M.col(src);
  }
  return line / norm;
}

MatrixXd with_top_row(const MatrixXd& M, const VectorXd& line) {
  MatrixXd out(M.rows() + 1, M.cols());
  out.row(0) = line.transpose();
  out.bottomRows(M.rows()) = M;
  return out;
}

MatrixXd with_bottom_row(const MatrixXd& M, const VectorXd& line) {
  MatrixXd out(M.rows() + 1, M.cols());
  out.topRows(M.rows()) = M;
  out.row(M.rows()) = line.transpose();
  return out;
}

MatrixXd with_left_col(const MatrixXd& M, const VectorXd& line) {
  MatrixXd out(M.rows(), M.cols() + 1);
  out.col(0) = line;
  out.rightCols(M.cols()) = M;
  return out;
}

MatrixXd with_right_col(const MatrixXd& M, const VectorXd& line) {
  MatrixXd out(M.rows(), M.cols() + 1);
  out.leftCols(M.cols()) = M;
  out.col(M.cols()) = line;
  return out;
}

}  // namespace

double fold_angle_deg(double deg) {
  double r = std::remainder(deg, 90.0);  // (-45, 45] up to the boundary case
  if (r <= -45.0) r += 90.0;
  return r;
}

double estimate_direction(const MatrixXd& Y) {
  if (Y.rows() != Y.cols()) throw DimensionError("estimate_direction: image not square");
  const int n = static_cast<int>(Y.rows());
  if (n < 8) throw DimensionError("estimate_direction: image too small");
  const int N = 4 * n;  // zero-padding refines the frequency grid

  // Mean-subtract and apply a separable Hann window to localize peaks.
  const double mean = Y.mean();
  VectorXd hann(n);
  for (int i = 0; i < n; ++i)
    hann(i) = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / (n - 1)));

  std::vector<double> in(static_cast<size_t>(N) * N, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      in[static_cast<size_t>(i) * N + j] = (Y(i, j) - mean) * hann(i) * hann(j);

  const int out_cols = N / 2 + 1;
  fftw_complex* out = fftw_alloc_complex(static_cast<size_t>(N) * out_cols);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_guard());
    plan = fftw_plan_dft_r2c_2d(N, N, in.data(), out, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_guard());
    fftw_destroy_plan(plan);
  }

  // Half-plane magnitudes; the conjugate half carries the same peaks.
  const auto mag = [&](int ku, int kv) {
    // map (ku, kv) with kv possibly negative onto the stored half plane
    int u = ku, v = kv;
    if (v < 0 || v >= out_cols) {
      u = (N - ku) % N;
      v = (N - kv) % N;
    }
    const fftw_complex& z = out[static_cast<size_t>(u) * out_cols + v];
    return std::hypot(z[0], z[1]);
  };
  const auto tofreq = [N](int k) { return k <= N / 2 ? k : k - N; };

  const double exclusion = 3.0 * N / n;  // 3 bins at the native resolution
  double best = 0.0;
  int best_u = -1, best_v = -1;
  for (int ku = 0; ku < N; ++ku) {
    const double fu = tofreq(ku);
    for (int kv = 0; kv < out_cols; ++kv) {
      const double fv = kv;
      if (fu * fu + fv * fv <= exclusion * exclusion) continue;
      const double m = mag(ku, kv);
      if (m > best) {
        best = m;
        best_u = ku;
        best_v = kv;
      }
    }
  }
  const double floor_mag = 1e-9 * static_cast<double>(n) * n;
  if (best_u < 0 || best <= floor_mag) {
    fftw_free(out);
    throw NoPeriodicityError("estimate_direction: no spectral peak above the noise floor");
  }

  // Sub-bin peak position from a log-magnitude parabola in each axis.
  const auto refine = [&](double m_minus, double m_0, double m_plus) {
    const double l0 = std::log(std::max(m_0, 1e-300));
    const double lm = std::log(std::max(m_minus, 1e-300));
    const double lp = std::log(std::max(m_plus, 1e-300));
    const double denom = lm - 2.0 * l0 + lp;
    if (std::abs(denom) < 1e-300) return 0.0;
    double d = 0.5 * (lm - lp) / denom;
    return std::min(std::max(d, -0.5), 0.5);
  };
  const double du = refine(mag((best_u + N - 1) % N, best_v), best,
                           mag((best_u + 1) % N, best_v));
  const double dv = refine(mag(best_u, best_v - 1), best, mag(best_u, best_v + 1));
  const double fu = tofreq(best_u) + du;
  const double fv = best_v + dv;
  fftw_free(out);

  return fold_angle_deg(std::atan2(fv, fu) / kDegToRad);
}

MatrixXd rotate_image(const MatrixXd& src, double angle_deg, BoolMatrix* valid) {
  const Eigen::Index rows = src.rows(), cols = src.cols();
  if (std::abs(angle_deg) < kAngleEpsilon) {
    if (valid) valid->setConstant(rows, cols, true);
    return src;
  }
  const double a = angle_deg * kDegToRad;
  const double ca = std::cos(a), sa = std::sin(a);
  const double cr = (rows - 1) / 2.0, cc = (cols - 1) / 2.0;
  MatrixXd out(rows, cols);
  if (valid) valid->resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      double sr, sc;
      back_rotate(static_cast<double>(i), static_cast<double>(j), cr, cc, ca, sa,
                  sr, sc);
      const BilinearSample s = sample_bilinear(src, sr, sc);
      out(i, j) = s.value;
      if (valid) (*valid)(i, j) = s.inside;
    }
  return out;
}

RotationPlan plan_rotation(Eigen::Index n, double angle_deg, int min_edge) {
  RotationPlan plan;
  plan.angle_degrees = fold_angle_deg(angle_deg);
  if (std::abs(plan.angle_degrees) < kAngleEpsilon) {
    plan.crop_edge = static_cast<int>(n);
    return plan;
  }
  const double a = std::abs(plan.angle_degrees) * kDegToRad;
  int edge = static_cast<int>(std::floor((n - 1) / (std::cos(a) + std::sin(a)))) + 1;
  edge = std::min<int>(edge, static_cast<int>(n));
  while (edge > 0 && !crop_fits(n, edge, -plan.angle_degrees)) --edge;
  if (edge < min_edge)
    throw TooSmallError("rotation crop " + std::to_string(edge) +
                        " is below the minimum usable size " +
                        std::to_string(min_edge));
  plan.crop_edge = edge;
  plan.crop_row0 = static_cast<int>((n - edge) / 2);
  plan.crop_col0 = plan.crop_row0;
  return plan;
}

MatrixXd rotate_and_crop(const MatrixXd& Y, const RotationPlan& plan) {
  if (Y.rows() != Y.cols()) throw DimensionError("rotate_and_crop: image not square");
  if (std::abs(plan.angle_degrees) < kAngleEpsilon) {
    return Y.block(plan.crop_row0, plan.crop_col0, plan.crop_edge, plan.crop_edge);
  }
  const MatrixXd rotated = rotate_image(Y, -plan.angle_degrees, nullptr);
  return rotated.block(plan.crop_row0, plan.crop_col0, plan.crop_edge, plan.crop_edge);
}

ExpandedImage expand_reference(const MatrixXd& Yref,
                               const PeriodicPatternVector& lambda1,
                               const PeriodicPatternVector& lambda2,
                               int target_rows, int target_cols) {
  if (lambda1.size() != Yref.rows() || lambda2.size() != Yref.cols())
    throw DimensionError("expand_reference: pattern vector / image size mismatch");
  if (target_rows < Yref.rows() || target_cols < Yref.cols())
    throw DimensionError("expand_reference: target smaller than the input");

  ExpandedImage out;
  out.values = Yref;
  bool top_next = true;
  while (out.values.rows() < target_rows) {
    if (top_next) {
      out.values = with_top_row(
          out.values, continuation_line(out.values, lambda1.values, true, true));
      ++out.top_rows;
    } else {
      out.values = with_bottom_row(
          out.values, continuation_line(out.values, lambda1.values, false, true));
    }
    top_next = !top_next;
  }
  bool left_next = true;
  while (out.values.cols() < target_cols) {
    if (left_next) {
      out.values = with_left_col(
          out.values, continuation_line(out.values, lambda2.values, true, false));
      ++out.left_cols;
    } else {
      out.values = with_right_col(
          out.values, continuation_line(out.values, lambda2.values, false, false));
    }
    left_next = !left_next;
  }
  return out;
}

ReferenceResult build_reference(const MatrixXd& Y, const PsdConfig& cfg,
                                bool enable_rotation) {
  if (Y.rows() != Y.cols()) throw DimensionError("build_reference: image not square");
  const Eigen::Index n = Y.rows();

  ReferenceResult res;
  double angle = 0.0;
  if (enable_rotation) angle = estimate_direction(Y);

  const int min_edge = cfg.guard_p > 0 ? 4 * cfg.guard_p : 16;
  res.plan = plan_rotation(n, angle, min_edge);

  if (std::abs(res.plan.angle_degrees) < kAngleEpsilon) {
    // Identity path: no resampling anywhere.
    res.rotated = Image2D(Y);
    res.decomposition = run_psd_2d(Y, cfg);
    res.expanded.values = res.decomposition.periodic;
    res.reference = Image2D(res.decomposition.periodic,
                            BoolMatrix::Constant(n, n, true));
    return res;
  }

  res.rotated = Image2D(rotate_and_crop(Y, res.plan));
  res.decomposition = run_psd_2d(res.rotated.pixels, cfg);

  // Coverage needed so that every original-frame pixel back-maps inside the
  // expanded reference. back_rotate with +angle applies Rot(-angle), the
  // inverse of the alignment rotation.
  const double a = res.plan.angle_degrees * kDegToRad;
  const double ca = std::cos(a), sa = std::sin(a);
  const double center = (n - 1) / 2.0;
  double qmin_r = 1e300, qmax_r = -1e300, qmin_c = 1e300, qmax_c = -1e300;
  for (int ci = 0; ci < 4; ++ci) {
    const double r = (ci / 2) * (n - 1.0);
    const double c = (ci % 2) * (n - 1.0);
    double qr, qc;
    back_rotate(r, c, center, center, ca, sa, qr, qc);
    qmin_r = std::min(qmin_r, qr);
    qmax_r = std::max(qmax_r, qr);
    qmin_c = std::min(qmin_c, qc);
    qmax_c = std::max(qmax_c, qc);
  }
  const int m = res.plan.crop_edge;
  const auto need = [](double lo, double hi, int offset, int edge) {
    const int before = static_cast<int>(std::ceil(std::max(0.0, offset - lo))) + 2;
    const int after =
        static_cast<int>(std::ceil(std::max(0.0, hi - (offset + edge - 1)))) + 2;
    return std::max(before, after);
  };
  const int grow_r = need(qmin_r, qmax_r, res.plan.crop_row0, m);
  const int grow_c = need(qmin_c, qmax_c, res.plan.crop_col0, m);

  res.expanded = expand_reference(res.decomposition.periodic,
                                  res.decomposition.lambda1,
                                  res.decomposition.lambda2, m + 2 * grow_r,
                                  m + 2 * grow_c);

  // Reverse rotation: sample the expanded reference at the back-mapped
  // position of every original pixel.
  const double off_r = res.plan.crop_row0 - res.expanded.top_rows;
  const double off_c = res.plan.crop_col0 - res.expanded.left_cols;
  MatrixXd ref(n, n);
  BoolMatrix valid(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double qr, qc;
      back_rotate(static_cast<double>(i), static_cast<double>(j), center, center,
                  ca, sa, qr, qc);
      const BilinearSample s =
          sample_bilinear(res.expanded.values, qr - off_r, qc - off_c);
      ref(i, j) = s.value;
      valid(i, j) = s.inside;
    }
  res.reference = Image2D(std::move(ref), std::move(valid));
  return res;
}

}  // namespace psd
