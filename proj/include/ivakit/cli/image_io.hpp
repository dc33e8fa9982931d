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

#pragma once

#include <filesystem>
#include <vector>

#include "ivakit/types.hpp"

namespace ivakit::cli {

/// Interleaved row-major pixels in [0, 1]; channels is 1 (gray) or 3 (RGB).
struct Image {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> pixels;

  double& at(int row, int col, int c) { return pixels[(static_cast<std::size_t>(row) * width + col) * channels + c]; }
  double at(int row, int col, int c) const {
    return pixels[(static_cast<std::size_t>(row) * width + col) * channels + c];
  }
};

/// PNG (8 or 16 bit gray, RGB or palette) and binary or ASCII PPM/PGM.
/// Images with an alpha channel are rejected as an unsupported pixel format.
Image read_image(const std::filesystem::path& path);

/// 8-bit output; the format follows the extension (.png, .ppm or .pgm).
void write_image(const std::filesystem::path& path, const Image& image);

/// Channel c flattened row-major: one row of length width * height.
Eigen::RowVectorXd channel_row(const Image& image, int c);

/// Inverse of channel_row for an image of the given shape.
void set_channel(Image& image, int c, const Eigen::RowVectorXd& values);

/// Affine map of `values` onto [0, 1] (constant input maps to 0).
Eigen::RowVectorXd min_max_scale(const Eigen::RowVectorXd& values);

}  // namespace ivakit::cli
