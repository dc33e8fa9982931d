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

#include "ivakit/dataset_io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "ivakit/error.hpp"

namespace ivakit::io {

namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put_le(std::ostream& out, T value) {
  std::uint64_t bits = 0;
  static_assert(sizeof(T) == sizeof(bits));
  std::memcpy(&bits, &value, sizeof(bits));
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), 8);
}

template <typename T>
T get_le(std::istream& in, const fs::path& path) {
  unsigned char bytes[8];
  in.read(reinterpret_cast<char*>(bytes), 8);
  if (!in) fail(ErrorCode::kIo, "truncated container: " + path.string());
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
  T value;
  std::memcpy(&value, &bits, sizeof(value));
  return value;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open for writing: " + path.string());
  return out;
}

}  // namespace

void write_container(const fs::path& path, const MatrixList& matrices) {
  require(!matrices.empty(), ErrorCode::kShape, "container needs at least one matrix");
  const auto rows = static_cast<std::uint64_t>(matrices.front().rows());
  const auto cols = static_cast<std::uint64_t>(matrices.front().cols());
  std::ofstream out = open_out(path, std::ios::binary);
  out.write(kContainerMagic.data(), kContainerMagic.size());
  put_le<std::uint64_t>(out, matrices.size());
  put_le<std::uint64_t>(out, rows);
  put_le<std::uint64_t>(out, cols);
  for (const Matrix& m : matrices) {
    require(static_cast<std::uint64_t>(m.rows()) == rows &&
                static_cast<std::uint64_t>(m.cols()) == cols,
            ErrorCode::kShape, "container matrices must share one shape");
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) put_le<double>(out, m(r, c));
  }
  if (!out) fail(ErrorCode::kIo, "write failed: " + path.string());
}

MatrixList read_container(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open container: " + path.string());
  std::array<char, 16> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kContainerMagic) fail(ErrorCode::kIo, "bad container header: " + path.string());
  const auto k_count = get_le<std::uint64_t>(in, path);
  const auto rows = get_le<std::uint64_t>(in, path);
  const auto cols = get_le<std::uint64_t>(in, path);
  const std::uint64_t expected_bytes = 16 + 24 + 8 * k_count * rows * cols;
  std::error_code ec;
  const auto actual = fs::file_size(path, ec);
  if (ec || actual != expected_bytes)
    fail(ErrorCode::kIo, "container size does not match its header: " + path.string());
  MatrixList out;
  out.reserve(k_count);
  for (std::uint64_t k = 0; k < k_count; ++k) {
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = get_le<double>(in, path);
    out.push_back(std::move(m));
  }
  return out;
}

void write_csv_matrix(const fs::path& path, const Matrix& m) {
  std::ofstream out = open_out(path);
  char buf[64];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out.put(',');
      const auto res = std::to_chars(buf, buf + sizeof(buf), m(r, c));
      out.write(buf, res.ptr - buf);
    }
    out.put('\n');
  }
  if (!out) fail(ErrorCode::kIo, "write failed: " + path.string());
}

Matrix read_csv_matrix(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open csv: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p <= end) {
      while (p < end && *p == ' ') ++p;
      double v = 0.0;
      const auto res = std::from_chars(p, end, v);
      if (res.ec != std::errc())
        fail(ErrorCode::kIo, "malformed number in " + path.string() + " row " +
                                 std::to_string(rows.size()));
      row.push_back(v);
      p = res.ptr;
      while (p < end && *p == ' ') ++p;
      if (p == end) break;
      if (*p != ',') fail(ErrorCode::kIo, "expected ',' in " + path.string());
      ++p;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      fail(ErrorCode::kShape, "ragged csv: " + path.string());
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorCode::kIo, "empty csv: " + path.string());
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

void write_csv_directory(const fs::path& dir, const MatrixList& matrices) {
  fs::create_directories(dir);
  for (std::size_t k = 0; k < matrices.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "dataset_%03zu.csv", k);
    write_csv_matrix(dir / name, matrices[k]);
  }
}

MatrixList read_csv_directory(const fs::path& dir) {
  if (!fs::is_directory(dir)) fail(ErrorCode::kIo, "not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) fail(ErrorCode::kIo, "no csv files in " + dir.string());
  MatrixList out;
  for (const auto& f : files) out.push_back(read_csv_matrix(f));
  return out;
}

}  // namespace ivakit::io
