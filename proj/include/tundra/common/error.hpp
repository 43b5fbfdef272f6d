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

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tundra {

// Every failure raised by the library carries one of these codes. The names
// are part of the RPC surface (error.code) and must stay stable.
enum class ErrorCode {
  // dataframe / engine
  SchemaMismatch,
  InvalidPartitionCount,
  UnknownColumn,
  UnhashableKey,
  JobError,
  OutOfBounds,
  // pipeline
  MissingColumn,
  FitError,
  UnknownStageName,
  CorruptStageFile,
  InvalidParam,
  EmptyPipeline,
  // graph
  BadMagic,
  ChecksumMismatch,
  ShapeInconsistency,
  UnknownOp,
  UnknownNode,
  ShapeMismatch,
  // network stage
  VectorSizeMismatch,
  NoJobYet,
  // images
  UnsupportedFormat,
  MalformedHeader,
  TruncatedData,
  CropOutOfBounds,
  InvalidChain,
  // learners
  DimensionMismatch,
  NonBinaryLabel,
  RaggedVector,
  DegenerateLabels,
  // model repo
  UnknownModel,
  SourceUnavailable,
  MalformedManifest,
  // generic
  InvalidArgument,
  Io,
  ParseError,
  BadRequest,
};

std::string_view errorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  std::string_view codeName() const noexcept { return errorCodeName(code_); }

 private:
  ErrorCode code_;
};

// Raised when a task fails at execution time. Carries the failing partition
// and the code of the underlying cause, when the cause was itself an Error.
class JobError : public Error {
 public:
  JobError(int64_t partition, ErrorCode cause, const std::string& message);

  int64_t partition() const noexcept { return partition_; }
  ErrorCode cause() const noexcept { return cause_; }

 private:
  int64_t partition_;
  ErrorCode cause_;
};

// Raised by pipeline fitting; names the stage that aborted the fit.
class StageError : public Error {
 public:
  StageError(size_t stageIndex, ErrorCode cause, const std::string& message);

  size_t stageIndex() const noexcept { return stageIndex_; }

 private:
  size_t stageIndex_;
};

}  // namespace tundra
