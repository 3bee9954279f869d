// Copyright 2026 The sgk Authors
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

#include "sgk/error.hpp"
#include "sgk/series.hpp"

namespace sgk {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::ring_mismatch: return "ring_mismatch";
    case ErrorCode::not_invertible: return "not_invertible";
    case ErrorCode::unsupported: return "unsupported";
    case ErrorCode::parameter_domain: return "parameter_domain";
    case ErrorCode::singular_k: return "singular_k";
    case ErrorCode::no_solution: return "no_solution";
    case ErrorCode::stiffness: return "stiffness";
    case ErrorCode::diverged: return "diverged";
    case ErrorCode::conditioning: return "conditioning";
    case ErrorCode::sample_set: return "sample_set";
    case ErrorCode::not_applicable: return "not_applicable";
    case ErrorCode::validation: return "validation";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

// Explicit instantiations for the scalar rings used across the library.
template class LaurentSeries<double>;
template class LaurentSeries<std::complex<double>>;

}  // namespace sgk
