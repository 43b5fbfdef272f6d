// Copyright 2026 The Tundra Authors. All Rights Reserved.
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

#include "tundra/common/error.hpp"

namespace tundra {

std::string_view errorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::InvalidPartitionCount: return "InvalidPartitionCount";
    case ErrorCode::UnknownColumn: return "UnknownColumn";
    case ErrorCode::UnhashableKey: return "UnhashableKey";
    case ErrorCode::JobError: return "JobError";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::FitError: return "FitError";
    case ErrorCode::UnknownStageName: return "UnknownStageName";
    case ErrorCode::CorruptStageFile: return "CorruptStageFile";
    case ErrorCode::InvalidParam: return "InvalidParam";
    case ErrorCode::EmptyPipeline: return "EmptyPipeline";
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::ShapeInconsistency: return "ShapeInconsistency";
    case ErrorCode::UnknownOp: return "UnknownOp";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::VectorSizeMismatch: return "VectorSizeMismatch";
    case ErrorCode::NoJobYet: return "NoJobYet";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::TruncatedData: return "TruncatedData";
    case ErrorCode::CropOutOfBounds: return "CropOutOfBounds";
    case ErrorCode::InvalidChain: return "InvalidChain";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonBinaryLabel: return "NonBinaryLabel";
    case ErrorCode::RaggedVector: return "RaggedVector";
    case ErrorCode::DegenerateLabels: return "DegenerateLabels";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::SourceUnavailable: return "SourceUnavailable";
    case ErrorCode::MalformedManifest: return "MalformedManifest";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::BadRequest: return "BadRequest";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(errorCodeName(code)) + ": " + message),
      code_(code) {}

JobError::JobError(int64_t partition, ErrorCode cause, const std::string& message)
    : Error(ErrorCode::JobError,
            "partition " + std::to_string(partition) + ": " + message),
      partition_(partition),
      cause_(cause) {}

StageError::StageError(size_t stageIndex, ErrorCode cause, const std::string& message)
    : Error(cause, "stage " + std::to_string(stageIndex) + ": " + message),
      stageIndex_(stageIndex) {}

}  // namespace tundra
