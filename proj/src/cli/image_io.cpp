// Copyright 2026 The ivakit Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ivakit/cli/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "ivakit/error.hpp"

namespace ivakit::cli {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  require(f != nullptr, ErrorCode::kIo, std::string("cannot open ") + path.string());
  return f;
}

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return ext;
}

Image read_png(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  png_byte sig[8];
  require(std::fread(sig, 1, 8, file.get()) == 8 && png_sig_cmp(sig, 0, 8) == 0, ErrorCode::kDataValidation,
          path.string() + " is not a PNG file");

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  require(png && info, ErrorCode::kIo, "libpng initialization failed");
  Image img;
  std::string error;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorCode::kDataValidation, "corrupt PNG data in " + path.string());
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int color = png_get_color_type(png, info);
  const int depth = png_get_bit_depth(png, info);  // 16-bit samples stay big-endian
  const bool alpha = (color & PNG_COLOR_MASK_ALPHA) != 0 || png_get_valid(png, info, PNG_INFO_tRNS);
  if (alpha) error = "images with an alpha channel are not supported";
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);

  img.width = static_cast<int>(png_get_image_width(png, info));
  img.height = static_cast<int>(png_get_image_height(png, info));
  img.channels = png_get_channels(png, info);
  const int out_depth = png_get_bit_depth(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  std::vector<png_byte> data(rowbytes * static_cast<std::size_t>(img.height));
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
  for (int r = 0; r < img.height; ++r) rows[r] = data.data() + rowbytes * static_cast<std::size_t>(r);
  if (error.empty()) {
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  }
  png_destroy_read_struct(&png, &info, nullptr);
  require(error.empty(), ErrorCode::kDataValidation, "unsupported pixel format in " + path.string() + ": " + error);
  require(img.channels == 1 || img.channels == 3, ErrorCode::kDataValidation,
          "unsupported pixel format in " + path.string());

  const std::size_t count = static_cast<std::size_t>(img.width) * img.height * img.channels;
  img.pixels.resize(count);
  const std::size_t row_len = static_cast<std::size_t>(img.width) * img.channels;
  for (int r = 0; r < img.height; ++r)
    for (std::size_t c = 0; c < row_len; ++c) {
      double v;
      if (out_depth == 16) {
        v = ((rows[r][2 * c] << 8) | rows[r][2 * c + 1]) / 65535.0;
      } else {
        v = rows[r][c] / 255.0;
      }
      img.pixels[r * row_len + c] = v;
    }
  return img;
}

void write_png(const std::filesystem::path& path, const Image& img) {
  FilePtr file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  require(png && info, ErrorCode::kIo, "libpng initialization failed");
  const std::size_t row_len = static_cast<std::size_t>(img.width) * img.channels;
  std::vector<png_byte> data(row_len * static_cast<std::size_t>(img.height));
  for (std::size_t i = 0; i < data.size(); ++i)
    data[i] = static_cast<png_byte>(std::lround(std::clamp(img.pixels[i], 0.0, 1.0) * 255.0));
  std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
  for (int r = 0; r < img.height; ++r) rows[r] = data.data() + row_len * static_cast<std::size_t>(r);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorCode::kIo, "failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
               img.channels == 3 ? PNG_COLOR_TYPE_RGB : PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// Reads the next header token, skipping whitespace and comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

int pnm_int(std::istream& in, const std::filesystem::path& path) {
  const std::string tok = pnm_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used == tok.size() && v > 0) return v;
  } catch (const std::exception&) {
  }
  fail(ErrorCode::kDataValidation, "malformed PNM header in " + path.string());
}

Image read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::kIo, "cannot open " + path.string());
  const std::string magic = pnm_token(in);
  const bool binary = magic == "P5" || magic == "P6";
  const bool ascii = magic == "P2" || magic == "P3";
  require(binary || ascii, ErrorCode::kDataValidation, "unsupported pixel format in " + path.string() + " (" + magic + ")");
  Image img;
  img.channels = (magic == "P6" || magic == "P3") ? 3 : 1;
  img.width = pnm_int(in, path);
  img.height = pnm_int(in, path);
  const int maxval = pnm_int(in, path);
  require(maxval <= 65535, ErrorCode::kDataValidation, "PNM maxval above 65535 in " + path.string());
  const std::size_t count = static_cast<std::size_t>(img.width) * img.height * img.channels;
  img.pixels.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    int v = 0;
    if (ascii) {
      const std::string tok = pnm_token(in);
      require(!tok.empty(), ErrorCode::kDataValidation, "truncated PNM data in " + path.string());
      v = std::stoi(tok);
    } else if (maxval < 256) {
      const int c = in.get();
      require(c != EOF, ErrorCode::kDataValidation, "truncated PNM data in " + path.string());
      v = c;
    } else {
      const int hi = in.get(), lo = in.get();
      require(lo != EOF, ErrorCode::kDataValidation, "truncated PNM data in " + path.string());
      v = (hi << 8) | lo;
    }
    require(v >= 0 && v <= maxval, ErrorCode::kDataValidation, "PNM sample out of range in " + path.string());
    img.pixels[i] = static_cast<double>(v) / maxval;
  }
  return img;
}

void write_pnm(const std::filesystem::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorCode::kIo, "cannot open " + path.string());
  out << (img.channels == 3 ? "P6" : "P5") << "\n" << img.width << " " << img.height << "\n255\n";
  for (double v : img.pixels) out.put(static_cast<char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  require(out.good(), ErrorCode::kIo, "failed writing " + path.string());
}

}  // namespace

Image read_image(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  Image img;
  if (ext == ".png")
    img = read_png(path);
  else if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm")
    img = read_pnm(path);
  else
    fail(ErrorCode::kDataValidation,
         "unsupported image format '" + ext + "' for " + path.string() + " (PNG, PPM or PGM)");
  require(img.width > 0 && img.height > 0, ErrorCode::kDataValidation, "empty image " + path.string());
  return img;
}

void write_image(const std::filesystem::path& path, const Image& image) {
  require(image.channels == 1 || image.channels == 3, ErrorCode::kDataValidation, "images need 1 or 3 channels");
  require(image.pixels.size() == static_cast<std::size_t>(image.width) * image.height * image.channels,
          ErrorCode::kShape, "pixel buffer does not match the image shape");
  const std::string ext = lower_extension(path);
  if (ext == ".png") {
    write_png(path, image);
  } else if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") {
    write_pnm(path, image);
  } else {
    fail(ErrorCode::kDataValidation, "unsupported output format '" + ext + "'");
  }
}

Eigen::RowVectorXd channel_row(const Image& image, int c) {
  const Eigen::Index n = static_cast<Eigen::Index>(image.width) * image.height;
  Eigen::RowVectorXd row(n);
  for (Eigen::Index i = 0; i < n; ++i) row(i) = image.pixels[static_cast<std::size_t>(i) * image.channels + c];
  return row;
}

void set_channel(Image& image, int c, const Eigen::RowVectorXd& values) {
  const Eigen::Index n = static_cast<Eigen::Index>(image.width) * image.height;
  require(values.size() == n, ErrorCode::kShape, "channel length does not match the image");
  image.pixels.resize(static_cast<std::size_t>(n) * image.channels);
  for (Eigen::Index i = 0; i < n; ++i) image.pixels[static_cast<std::size_t>(i) * image.channels + c] = values(i);
}

Eigen::RowVectorXd min_max_scale(const Eigen::RowVectorXd& values) {
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  if (!(hi > lo)) return Eigen::RowVectorXd::Zero(values.size());
  return (values.array() - lo) / (hi - lo);
}

}  // namespace ivakit::cli
