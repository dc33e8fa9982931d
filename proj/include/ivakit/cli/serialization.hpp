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

#include <initializer_list>
#include <string>
#include <string_view>

#include "json.hpp"
#include "ivakit/densities.hpp"
#include "ivakit/metrics.hpp"
#include "ivakit/optimizers.hpp"
#include "ivakit/simgen.hpp"

namespace ivakit::cli {

using Json = nlohmann::ordered_json;

/// Throws kConfig when `object` has a key outside `allowed`.
void check_keys(const Json& object, std::initializer_list<std::string_view> allowed, const std::string& where);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& rows, const std::string& where);

/// Descriptor {"family": ..., "location": [...], "scatter": [[...]], params}.
/// Location and scatter default to zero and the identity of size k_dim.
Json density_to_json(const DensityModel& model);
DensityModel density_from_json(const Json& descriptor, int k_dim);

Json spec_to_json(const ScvSpec& spec);
ScvSpec spec_from_json(const Json& object);

/// Every OptimizerConfig field except the observer and the provided start.
Json optimizer_config_to_json(const OptimizerConfig& cfg);
void apply_optimizer_json(const Json& object, OptimizerConfig& cfg);

/// Wall time is written only when requested, so reports stay byte-stable.
Json report_to_json(const ConvergenceReport& report, bool include_wall_time = false);
ConvergenceReport report_from_json(const Json& object);

Json alignment_to_json(const Alignment& alignment);

}  // namespace ivakit::cli
