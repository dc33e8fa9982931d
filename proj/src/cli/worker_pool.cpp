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

#include "ivakit/cli/worker_pool.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

#include "ivakit/error.hpp"

namespace ivakit::cli {

std::size_t worker_count_from_env() {
  if (const char* env = std::getenv("IVAKIT_THREADS"); env != nullptr && *env != '\0') {
    const std::string s(env);
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
    require(ec == std::errc() && ptr == s.data() + s.size() && n > 0, ErrorCode::kConfig,
            "IVAKIT_THREADS must be a positive integer, got '" + s + "'");
    return n;
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t width, const std::function<void(std::size_t)>& body) {
  if (count == 0) return;
  width = std::clamp<std::size_t>(width, 1, count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (width == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(width);
    for (std::size_t t = 0; t < width; ++t) threads.emplace_back(worker);
    for (std::thread& t : threads) t.join();
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace ivakit::cli
