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

#include <array>
#include <filesystem>

#include "ivakit/model.hpp"

namespace ivakit::io {

/// 16-byte header of the binary container: "IVAKIT-DATA" followed by five NULs.
inline constexpr std::array<char, 16> kContainerMagic = {'I', 'V', 'A', 'K', 'I', 'T', '-', 'D',
                                                         'A', 'T', 'A', 0,   0,   0,   0,   0};

/// Binary container: magic, then K, p, n as little-endian uint64, then K*p*n
/// little-endian float64 values in dataset-major, channel-major order.
/// The container holds any K stacked p x n matrices (datasets, per-dataset
/// sources, unmixing or mixing stacks with n = p).
void write_container(const std::filesystem::path& path, const MatrixList& matrices);
MatrixList read_container(const std::filesystem::path& path);

/// One headerless CSV per dataset (dataset_000.csv, ...), p rows by n columns,
/// written with 17 significant digits so values round-trip exactly.
void write_csv_directory(const std::filesystem::path& dir, const MatrixList& matrices);
MatrixList read_csv_directory(const std::filesystem::path& dir);

void write_csv_matrix(const std::filesystem::path& path, const Matrix& m);
Matrix read_csv_matrix(const std::filesystem::path& path);

}  // namespace ivakit::io
