#pragma once

#include <Eigen/Dense>

#include "psd/decompose.hpp"
#include "psd/self_representation.hpp"

namespace psd {

using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Pixel matrix plus an optional validity mask (empty mask = all valid).
struct Image2D {
  MatrixXd pixels;
  BoolMatrix valid;

  Image2D() = default;
  explicit Image2D(MatrixXd px) : pixels(std::move(px)) {}
  Image2D(MatrixXd px, BoolMatrix v) : pixels(std::move(px)), valid(std::move(v)) {}

  bool has_mask() const { return valid.size() != 0; }
  bool is_valid(Eigen::Index i, Eigen::Index j) const {
    return !has_mask() || valid(i, j);
  }
};

/// Fold an angle into (-45, 45] degrees (the spectrum cannot distinguish
/// directions that differ by a quarter turn).
double fold_angle_deg(double deg);

/// Orientation of the dominant periodic direction, in degrees, read off the
/// strongest non-DC peak of the windowed, zero-padded magnitude spectrum
/// (sub-bin peak position by parabolic interpolation). Returns the angle by
/// which the pattern is tilted away from the image axes; rotating the
/// content by its negative axis-aligns the pattern. Throws
/// NoPeriodicityError when no spectral peak rises above the flat-image
/// floor.
double estimate_direction(const MatrixXd& Y);

/// Rotate image content by angle_deg about the image center, bilinear
/// sampling. Output has the same frame; *valid (if given) marks pixels whose
/// source sample fell fully inside the input frame.
MatrixXd rotate_image(const MatrixXd& src, double angle_deg,
                      BoolMatrix* valid = nullptr);

struct RotationPlan {
  double angle_degrees = 0.0;  // pattern misalignment, in (-45, 45]
  int crop_row0 = 0;
  int crop_col0 = 0;
  int crop_edge = 0;  // side of the largest valid axis-aligned square
};

/// Largest centered axis-aligned square fully covered by valid pixels after
/// rotating content by -angle. Throws TooSmallError when the crop would be
/// smaller than min_edge.
RotationPlan plan_rotation(Eigen::Index n, double angle_deg, int min_edge);

/// Rotate the content by -plan.angle_degrees and cut the planned crop.
/// An exact copy for angle 0 (no resampling).
MatrixXd rotate_and_crop(const MatrixXd& Y, const RotationPlan& plan);

struct ExpandedImage {
  MatrixXd values;
  int top_rows = 0;   // rows added above the source image
  int left_cols = 0;  // columns added left of the source image
};

/// Grow the reference one line at a time to the target size, alternating
/// top/bottom then left/right (the extra line of an odd count goes
/// top/left). Each new line is the lag-weighted combination of existing
/// lines, renormalized by the signed weight total; pattern vectors are
/// zero-padded as the image outgrows them.
ExpandedImage expand_reference(const MatrixXd& Yref,
                               const PeriodicPatternVector& lambda1,
                               const PeriodicPatternVector& lambda2,
                               int target_rows, int target_cols);

struct ReferenceResult {
  RotationPlan plan;
  Image2D rotated;              // the axis-aligned crop fed to the solver
  Decomposition2D decomposition;
  ExpandedImage expanded;
  Image2D reference;            // original frame, validity marks real support
};

/// Full reference-construction pipeline: direction estimate, rotation and
/// crop, decomposition, expansion to cover the reverse-rotated frame, and
/// reverse rotation back onto the input frame. Pixels falling outside the
/// expanded support are filled from the nearest supported sample and
/// flagged invalid.
ReferenceResult build_reference(const MatrixXd& Y, const PsdConfig& cfg,
                                bool enable_rotation = true);

}  // namespace psd
