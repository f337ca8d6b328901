#include "psd/io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace psd {

namespace {

std::string lower_ext(const std::string& path) {
  const size_t dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  for (char& c : ext) c = static_cast<char>(std::tolower(c));
  return ext;
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

void write_csv(const std::string& path, const MatrixXd& m) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open for writing: " + path);
  FilePtr guard(f);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) std::fputc(',', f);
      std::fprintf(f, "%.17g", m(i, j));
    }
    std::fputc('\n', f);
  }
  if (std::ferror(f)) throw IoError("write failed: " + path);
}

void write_csv(const std::string& path, const VectorXd& v) {
  write_csv(path, MatrixXd(v));
}

MatrixXd read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.c_str();
    char* end = nullptr;
    while (*p) {
      const double v = std::strtod(p, &end);
      if (end == p) throw IoError("bad number in " + path + ": '" + line + "'");
      row.push_back(v);
      p = end;
      while (*p == ',' || *p == ' ' || *p == '\t' || *p == ';') ++p;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError("ragged CSV rows in " + path);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("empty CSV: " + path);
  MatrixXd m(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

VectorXd read_csv_vector(const std::string& path) {
  const MatrixXd m = read_csv(path);
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw IoError("expected a one-column or one-row CSV in " + path);
}

uint8_t quantize_intensity(double v) {
  const double clamped = std::min(std::max(v, 0.0), 1.0);
  return static_cast<uint8_t>(std::lround(clamped * 255.0));
}

void write_pgm(const std::string& path, const MatrixXd& img) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open for writing: " + path);
  FilePtr guard(f);
  std::fprintf(f, "P5\n%ld %ld\n255\n", static_cast<long>(img.cols()),
               static_cast<long>(img.rows()));
  std::vector<uint8_t> row(img.cols());
  for (Eigen::Index i = 0; i < img.rows(); ++i) {
    for (Eigen::Index j = 0; j < img.cols(); ++j) row[j] = quantize_intensity(img(i, j));
    std::fwrite(row.data(), 1, row.size(), f);
  }
  if (std::ferror(f)) throw IoError("write failed: " + path);
}

MatrixXd read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  std::string magic;
  in >> magic;
  if (magic != "P5" && magic != "P2") throw IoError("not a PGM file: " + path);
  const auto next_token = [&]() {
    std::string tok;
    while (in >> tok) {
      if (tok[0] == '#') {
        std::string rest;
        std::getline(in, rest);
        continue;
      }
      return tok;
    }
    throw IoError("truncated PGM header: " + path);
  };
  const int cols = std::stoi(next_token());
  const int rows = std::stoi(next_token());
  const int maxval = std::stoi(next_token());
  if (cols < 1 || rows < 1 || maxval < 1 || maxval > 65535)
    throw IoError("bad PGM header: " + path);

  MatrixXd img(rows, cols);
  if (magic == "P2") {
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) {
        int v;
        if (!(in >> v)) throw IoError("truncated PGM data: " + path);
        img(i, j) = static_cast<double>(v) / maxval;
      }
    return img;
  }
  in.get();  // single whitespace after maxval
  const int bytes = maxval > 255 ? 2 : 1;
  std::vector<uint8_t> buf(static_cast<size_t>(rows) * cols * bytes);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size()))
    throw IoError("truncated PGM data: " + path);
  size_t k = 0;
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      int v = buf[k++];
      if (bytes == 2) v = (v << 8) | buf[k++];
      img(i, j) = static_cast<double>(v) / maxval;
    }
  return img;
}

void write_png(const std::string& path, const MatrixXd& img) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw IoError("cannot open for writing: " + path);
  FilePtr guard(f);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng write failed: " + path);
  }
  png_init_io(png, f);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.cols()),
               static_cast<png_uint_32>(img.rows()), 8, PNG_COLOR_TYPE_GRAY,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<uint8_t> row(img.cols());
  for (Eigen::Index i = 0; i < img.rows(); ++i) {
    for (Eigen::Index j = 0; j < img.cols(); ++j) row[j] = quantize_intensity(img(i, j));
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

MatrixXd read_png(const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open: " + path);
  FilePtr guard(f);
  uint8_t sig[8];
  if (std::fread(sig, 1, 8, f) != 8 || png_sig_cmp(sig, 0, 8))
    throw IoError("not a PNG file: " + path);
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng init failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng read failed: " + path);
  }
  png_init_io(png, f);
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  // normalize everything to 8-bit grayscale
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_palette_to_rgb(png);
  png_set_expand_gray_1_2_4_to_8(png);
  const png_byte color = png_get_color_type(png, info);
  if (color & PNG_COLOR_MASK_COLOR)
    png_set_rgb_to_gray_fixed(png, 1, -1, -1);  // BT.709 defaults
  png_read_update_info(png, info);

  const png_uint_32 rows = png_get_image_height(png, info);
  const png_uint_32 cols = png_get_image_width(png, info);
  std::vector<uint8_t> data(static_cast<size_t>(rows) * cols);
  std::vector<png_bytep> row_ptrs(rows);
  for (png_uint_32 i = 0; i < rows; ++i)
    row_ptrs[i] = data.data() + static_cast<size_t>(i) * cols;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  MatrixXd img(rows, cols);
  for (png_uint_32 i = 0; i < rows; ++i)
    for (png_uint_32 j = 0; j < cols; ++j)
      img(i, j) = data[static_cast<size_t>(i) * cols + j] / 255.0;
  return img;
}

MatrixXd read_image_any(const std::string& path) {
  const std::string ext = lower_ext(path);
  if (ext == "csv") return read_csv(path);
  if (ext == "pgm") return read_pgm(path);
  if (ext == "png") return read_png(path);
  throw IoError("unsupported image format '" + ext + "' for " + path);
}

BoolMatrixM read_mask_any(const std::string& path) {
  const MatrixXd img = read_image_any(path);
  BoolMatrixM mask(img.rows(), img.cols());
  for (Eigen::Index j = 0; j < img.cols(); ++j)
    for (Eigen::Index i = 0; i < img.rows(); ++i) mask(i, j) = img(i, j) != 0.0;
  return mask;
}

MatrixXd center_crop_square(const MatrixXd& img, bool* cropped) {
  const Eigen::Index edge = std::min(img.rows(), img.cols());
  if (cropped) *cropped = img.rows() != img.cols();
  if (img.rows() == img.cols()) return img;
  const Eigen::Index r0 = (img.rows() - edge) / 2;
  const Eigen::Index c0 = (img.cols() - edge) / 2;
  return img.block(r0, c0, edge, edge);
}

MatrixXd resize_area(const MatrixXd& img, int target) {
  if (target < 1) throw ConfigError("resize_area: target must be >= 1");
  const Eigen::Index rows = img.rows(), cols = img.cols();
  if (rows == target && cols == target) return img;
  MatrixXd out(target, target);
  const double sr = static_cast<double>(rows) / target;
  const double sc = static_cast<double>(cols) / target;
  for (int i = 0; i < target; ++i) {
    const Eigen::Index r0 = static_cast<Eigen::Index>(i * sr);
    const Eigen::Index r1 = std::max<Eigen::Index>(
        r0 + 1, std::min<Eigen::Index>(rows, static_cast<Eigen::Index>((i + 1) * sr)));
    for (int j = 0; j < target; ++j) {
      const Eigen::Index c0 = static_cast<Eigen::Index>(j * sc);
      const Eigen::Index c1 = std::max<Eigen::Index>(
          c0 + 1,
          std::min<Eigen::Index>(cols, static_cast<Eigen::Index>((j + 1) * sc)));
      out(i, j) = img.block(r0, c0, r1 - r0, c1 - c0).mean();
    }
  }
  return out;
}

BoolMatrixM resize_mask_any(const BoolMatrixM& mask, int target) {
  if (target < 1) throw ConfigError("resize_mask_any: target must be >= 1");
  const Eigen::Index rows = mask.rows(), cols = mask.cols();
  if (rows == target && cols == target) return mask;
  BoolMatrixM out(target, target);
  const double sr = static_cast<double>(rows) / target;
  const double sc = static_cast<double>(cols) / target;
  for (int i = 0; i < target; ++i) {
    const Eigen::Index r0 = static_cast<Eigen::Index>(i * sr);
    const Eigen::Index r1 = std::max<Eigen::Index>(
        r0 + 1, std::min<Eigen::Index>(rows, static_cast<Eigen::Index>((i + 1) * sr)));
    for (int j = 0; j < target; ++j) {
      const Eigen::Index c0 = static_cast<Eigen::Index>(j * sc);
      const Eigen::Index c1 = std::max<Eigen::Index>(
          c0 + 1,
          std::min<Eigen::Index>(cols, static_cast<Eigen::Index>((j + 1) * sc)));
      bool any = false;
      for (Eigen::Index r = r0; r < r1 && !any; ++r)
        for (Eigen::Index c = c0; c < c1 && !any; ++c) any = mask(r, c);
      out(i, j) = any;
    }
  }
  return out;
}

}  // namespace psd
