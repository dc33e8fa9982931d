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

#include <cstddef>
#include <functional>

namespace ivakit::cli {

/// Worker count: IVAKIT_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1). Throws kConfig on a malformed value.
std::size_t worker_count_from_env();

/// Runs body(0..count-1) on at most `width` threads. Indices are claimed in
/// increasing order; after all workers finish, the exception of the lowest
/// failing index (if any) is rethrown.
void parallel_for(std::size_t count, std::size_t width, const std::function<void(std::size_t)>& body);

}  // namespace ivakit::cli
