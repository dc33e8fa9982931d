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

#include <cstdint>
#include <string>

#include "ivakit/cli/serialization.hpp"

namespace ivakit::cli::fields {

/// Null when the key is absent.
const Json* find(const Json& object, const char* key);

double number(const Json& value, const std::string& where);
std::int64_t integer(const Json& value, const std::string& where);
int small_int(const Json& value, const std::string& where);
/// Nonnegative integer, or a decimal string for values above 2^63 - 1.
std::uint64_t seed(const Json& value, const std::string& where);
bool boolean(const Json& value, const std::string& where);
std::string string(const Json& value, const std::string& where);

}  // namespace ivakit::cli::fields
