#include "psd/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace psd {

namespace {

std::vector<int> grid_axis(Eigen::Index extent, int patch_edge, int stride) {
  std::vector<int> origins;
  for (int r = 0; r + patch_edge <= extent; r += stride) origins.push_back(r);
  const int last = static_cast<int>(extent) - patch_edge;
  if (origins.empty() || origins.back() != last) origins.push_back(last);
  return origins;
}

Eigen::Index reflect(Eigen::Index idx, Eigen::Index size) {
  while (idx < 0 || idx >= size) {
    if (idx < 0) idx = -idx - 1;
    if (idx >= size) idx = 2 * size - idx - 1;
  }
  return idx;
}

}  // namespace

PatchGrid extract_patches(const MatrixXd& img, int patch_edge, int stride) {
  if (patch_edge < 1 || patch_edge > img.rows() || patch_edge > img.cols())
    throw DimensionError("extract_patches: patch_edge exceeds the image");
  if (stride < 1) throw ConfigError("extract_patches: stride must be >= 1");

  PatchGrid grid;
  grid.patch_edge = patch_edge;
  grid.stride = stride;
  grid.image_rows = img.rows();
  grid.image_cols = img.cols();
  grid.origin_rows = grid_axis(img.rows(), patch_edge, stride);
  grid.origin_cols = grid_axis(img.cols(), patch_edge, stride);

  const int M = patch_edge * patch_edge;
  grid.patches.resize(static_cast<Eigen::Index>(grid.origin_rows.size()) *
                          grid.origin_cols.size(),
                      M);
  Eigen::Index p = 0;
  for (int r : grid.origin_rows)
    for (int c : grid.origin_cols) {
      Eigen::Index k = 0;
      for (int i = 0; i < patch_edge; ++i)
        for (int j = 0; j < patch_edge; ++j) grid.patches(p, k++) = img(r + i, c + j);
      ++p;
    }
  return grid;
}

std::vector<int> knn_patches(const PatchGrid& reference_grid, int query, int K) {
  const int N = reference_grid.count();
  if (K < 1 || K > N) throw ConfigError("knn_patches: K out of range");
  if (query < 0 || query >= N) throw DimensionError("knn_patches: bad query index");

  const VectorXd q = reference_grid.patches.row(query).transpose();
  std::vector<std::pair<double, int>> dist(N);
  for (int i = 0; i < N; ++i)
    dist[i] = {(reference_grid.patches.row(i).transpose() - q).squaredNorm(), i};
  std::partial_sort(dist.begin(), dist.begin() + K, dist.end());
  std::vector<int> out(K);
  for (int k = 0; k < K; ++k) out[k] = dist[k].second;
  return out;
}

void patch_statistics(const std::vector<int>& indices, const PatchGrid& original_grid,
                      double eps_sigma, VectorXd& mu, VectorXd& sigma) {
  const int K = static_cast<int>(indices.size());
  if (K < 2) throw ConfigError("patch_statistics: needs at least two patches");
  const int M = static_cast<int>(original_grid.patches.cols());
  mu = VectorXd::Zero(M);
  for (int idx : indices) mu += original_grid.patches.row(idx).transpose();
  mu /= K;
  VectorXd var = VectorXd::Zero(M);
  for (int idx : indices) {
    const VectorXd d = original_grid.patches.row(idx).transpose() - mu;
    var += d.cwiseAbs2();
  }
  var /= (K - 1);
  sigma = var.cwiseSqrt().cwiseMax(eps_sigma);
}

VectorXd normalized_distance(const VectorXd& patch, const VectorXd& mu,
                             const VectorXd& sigma) {
  if (patch.size() != mu.size() || patch.size() != sigma.size())
    throw DimensionError("normalized_distance: size mismatch");
  return (patch - mu).cwiseAbs().cwiseQuotient(sigma);
}

ScoreMap score_direct(const MatrixXd& A) {
  ScoreMap map;
  map.validity = BoolMatrix::Constant(A.rows(), A.cols(), true);
  const double fro = A.norm();
  if (fro == 0.0) {
    map.scores = MatrixXd::Zero(A.rows(), A.cols());
    return map;
  }
  map.scores = A.cwiseAbs() * (static_cast<double>(A.rows()) / fro);
  return map;
}

MatrixXd gaussian_blur(const MatrixXd& img, double sigma) {
  if (sigma <= 0) throw ConfigError("gaussian_blur: sigma must be > 0");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  VectorXd kernel(2 * radius + 1);
  for (int k = -radius; k <= radius; ++k)
    kernel(k + radius) = std::exp(-0.5 * k * k / (sigma * sigma));
  kernel /= kernel.sum();

  const Eigen::Index rows = img.rows(), cols = img.cols();
  MatrixXd tmp(rows, cols), out(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k)
        acc += kernel(k + radius) * img(i, reflect(j + k, cols));
      tmp(i, j) = acc;
    }
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k)
        acc += kernel(k + radius) * tmp(reflect(i + k, rows), j);
      out(i, j) = acc;
    }
  return out;
}

ScoreMap aggregate_scores(const std::vector<VectorXd>& patch_distances,
                          const PatchGrid& grid, double kernel_sigma) {
  if (static_cast<int>(patch_distances.size()) != grid.count())
    throw DimensionError("aggregate_scores: one distance vector per patch required");
  MatrixXd sum = MatrixXd::Zero(grid.image_rows, grid.image_cols);
  MatrixXd cover = MatrixXd::Zero(grid.image_rows, grid.image_cols);
  for (int p = 0; p < grid.count(); ++p) {
    const auto [r0, c0] = grid.origin(p);
    const VectorXd& d = patch_distances[p];
    Eigen::Index k = 0;
    for (int i = 0; i < grid.patch_edge; ++i)
      for (int j = 0; j < grid.patch_edge; ++j) {
        sum(r0 + i, c0 + j) += d(k++);
        cover(r0 + i, c0 + j) += 1.0;
      }
  }
  ScoreMap map;
  map.scores = gaussian_blur(sum.cwiseQuotient(cover), kernel_sigma);
  map.validity = BoolMatrix::Constant(grid.image_rows, grid.image_cols, true);
  return map;
}

ScoreMap score_knn(const MatrixXd& original, const Image2D& reference,
                   const ScoreConfig& cfg) {
  if (original.rows() != reference.pixels.rows() ||
      original.cols() != reference.pixels.cols())
    throw DimensionError("score_knn: original/reference shape mismatch");

  const PatchGrid ref_grid =
      extract_patches(reference.pixels, cfg.patch_edge, cfg.stride);
  const PatchGrid orig_grid = extract_patches(original, cfg.patch_edge, cfg.stride);

  std::vector<VectorXd> distances(ref_grid.count());
  VectorXd mu, sigma;
  for (int p = 0; p < ref_grid.count(); ++p) {
    const std::vector<int> neighbors = knn_patches(ref_grid, p, cfg.knn_k);
    patch_statistics(neighbors, orig_grid, cfg.eps_sigma, mu, sigma);
    distances[p] =
        normalized_distance(orig_grid.patches.row(p).transpose(), mu, sigma);
  }

  ScoreMap map = aggregate_scores(distances, ref_grid, cfg.kernel_sigma);
  if (reference.has_mask()) {
    map.validity = reference.valid;
    for (Eigen::Index j = 0; j < map.scores.cols(); ++j)
      for (Eigen::Index i = 0; i < map.scores.rows(); ++i)
        if (!map.validity(i, j)) map.scores(i, j) = 0.0;
  }
  return map;
}

DetectionReport threshold_mask(const ScoreMap& score_map, double threshold,
                               const BoolMatrixM* ground_truth) {
  if (threshold < 0) throw ConfigError("threshold_mask: threshold must be >= 0");
  DetectionReport report;
  report.score_map = score_map;
  report.threshold = threshold;
  const Eigen::Index rows = score_map.scores.rows(), cols = score_map.scores.cols();
  report.mask.resize(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i)
      report.mask(i, j) =
          score_map.scores(i, j) > threshold &&
          (score_map.validity.size() == 0 || score_map.validity(i, j));
  if (ground_truth) report.metrics = compute_metrics(report.mask, *ground_truth);
  return report;
}

}  // namespace psd
