#pragma once

#include <string>

#include <Eigen/Dense>

#include "psd/errors.hpp"
#include "psd/metrics.hpp"

namespace psd {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// CSV is the lossless interchange format: one row per line, comma separated,
// printed with enough digits (%.17g) to round-trip doubles exactly.
void write_csv(const std::string& path, const MatrixXd& m);
void write_csv(const std::string& path, const VectorXd& v);
MatrixXd read_csv(const std::string& path);
VectorXd read_csv_vector(const std::string& path);

// 8-bit grayscale images for viewing. Values are clamped to [0, 1] and
// quantized with round(v * 255).
void write_pgm(const std::string& path, const MatrixXd& img);
MatrixXd read_pgm(const std::string& path);
void write_png(const std::string& path, const MatrixXd& img);
MatrixXd read_png(const std::string& path);

uint8_t quantize_intensity(double v);

/// Reads .csv, .pgm, or .png by extension; image intensities map to [0, 1].
MatrixXd read_image_any(const std::string& path);

/// Ground-truth mask: any nonzero pixel is anomalous.
BoolMatrixM read_mask_any(const std::string& path);

/// Center-crop to the largest square when the input is not square.
MatrixXd center_crop_square(const MatrixXd& img, bool* cropped = nullptr);

/// Area-average resize to target x target (used to bring large inputs down
/// to a tractable working size).
MatrixXd resize_area(const MatrixXd& img, int target);

/// Mask downsampling companion to resize_area: a target cell is anomalous
/// when any source pixel inside it is.
BoolMatrixM resize_mask_any(const BoolMatrixM& mask, int target);

}  // namespace psd
