// Copyright 2026 The atpqnn Authors
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

#include "atpqnn/error.hpp"

namespace atpqnn {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidCircuit: return "invalid-circuit";
    case ErrorKind::kDegenerateBipartition: return "degenerate-bipartition";
    case ErrorKind::kInvalidState: return "invalid-state";
    case ErrorKind::kEmptyClass: return "empty-class";
    case ErrorKind::kInvalidThreshold: return "invalid-threshold";
    case ErrorKind::kShapeMismatch: return "shape-mismatch";
    case ErrorKind::kUndefinedNormalization: return "undefined-normalization";
    case ErrorKind::kInvalidRank: return "invalid-rank";
    case ErrorKind::kEmptyDataset: return "empty-dataset";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kLength: return "length";
    case ErrorKind::kConsistency: return "consistency";
    case ErrorKind::kCapacity: return "capacity";
    case ErrorKind::kIo: return "io";
    case ErrorKind::kUnsupportedGradient: return "unsupported-gradient";
    case ErrorKind::kInvalidArgument: return "invalid-argument";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIncompatibleResults: return "incompatible-results";
  }
  return "unknown";
}

}  // namespace atpqnn
