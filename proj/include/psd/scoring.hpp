#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "psd/geometry.hpp"
#include "psd/metrics.hpp"

namespace psd {

struct ScoreConfig {
  int patch_edge = 8;
  int stride = 4;
  int knn_k = 10;
  double eps_sigma = 1e-3;    // floor on per-pixel standard deviations
  double kernel_sigma = 2.0;  // Gaussian aggregation, radius 3 sigma
};

/// Row-major patch grid. The final row/column of origins is clamped so every
/// pixel is covered; patches are flattened row-major.
struct PatchGrid {
  int patch_edge = 0;
  int stride = 0;
  Eigen::Index image_rows = 0, image_cols = 0;
  std::vector<int> origin_rows;  // grid axis positions (shared by rows/cols)
  std::vector<int> origin_cols;
  MatrixXd patches;  // N x M, one flattened patch per row

  int count() const { return static_cast<int>(patches.rows()); }
  int pixels_per_patch() const { return patch_edge * patch_edge; }
  /// Top-left corner of patch i (row-major over the origin grid).
  std::pair<int, int> origin(int i) const {
    const int per_row = static_cast<int>(origin_cols.size());
    return {origin_rows[i / per_row], origin_cols[i % per_row]};
  }
};

PatchGrid extract_patches(const MatrixXd& img, int patch_edge, int stride);

/// Indices of the K reference patches closest (Euclidean) to reference patch
/// `query`; the query itself is eligible. Ties break on the lower index.
std::vector<int> knn_patches(const PatchGrid& reference_grid, int query, int K);

/// Per-position mean and sample standard deviation (K-1 denominator, floored
/// at eps_sigma) over the original-image patches at the given indices.
void patch_statistics(const std::vector<int>& indices, const PatchGrid& original_grid,
                      double eps_sigma, VectorXd& mu, VectorXd& sigma);

/// |P - mu| / sigma elementwise.
VectorXd normalized_distance(const VectorXd& patch, const VectorXd& mu,
                             const VectorXd& sigma);

struct ScoreMap {
  MatrixXd scores;
  BoolMatrix validity;  // invalid pixels carry score 0
};

/// Direct anomaly score for a decomposition result: |A| * n / ||A||_F
/// (all zero when A is identically zero).
ScoreMap score_direct(const MatrixXd& A);

/// Normalized Gaussian blur with reflect padding.
MatrixXd gaussian_blur(const MatrixXd& img, double sigma);

/// Fuse per-patch distance vectors into a pixel map (mean over covering
/// patches) and smooth with the Gaussian kernel.
ScoreMap aggregate_scores(const std::vector<VectorXd>& patch_distances,
                          const PatchGrid& grid, double kernel_sigma);

/// Full patch-KNN scoring path: neighbors found in the reference, statistics
/// taken from the original image at those locations, Eq.-style normalized
/// distances aggregated and smoothed. Pixels invalid in the reference are
/// zeroed and marked.
ScoreMap score_knn(const MatrixXd& original, const Image2D& reference,
                   const ScoreConfig& cfg);

struct DetectionReport {
  ScoreMap score_map;
  double threshold = 0.0;
  BoolMatrix mask;
  std::optional<MetricSet> metrics;
};

/// mask = (scores > threshold) AND validity; metrics filled when ground
/// truth is supplied.
DetectionReport threshold_mask(const ScoreMap& score_map, double threshold,
                               const BoolMatrixM* ground_truth = nullptr);

}  // namespace psd
