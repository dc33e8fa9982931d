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

#include "ivakit/error.hpp"

namespace ivakit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDataValidation: return "data_validation";
    case ErrorCode::kRankDeficiency: return "rank_deficiency";
    case ErrorCode::kShape: return "shape";
    case ErrorCode::kParameter: return "parameter";
    case ErrorCode::kSingularity: return "singularity";
    case ErrorCode::kDomain: return "domain";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kNearSingularUnmixing: return "near_singular_unmixing";
    case ErrorCode::kDegenerateUnmixing: return "degenerate_unmixing";
    case ErrorCode::kNumericalFailure: return "numerical_failure";
    case ErrorCode::kUndefinedMetric: return "undefined_metric";
    case ErrorCode::kCombinatorialLimit: return "combinatorial_limit";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace ivakit
