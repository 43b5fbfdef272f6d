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

#include "tundra/pipeline/registry.hpp"

namespace tundra {

class SelectColumns : public StageImpl<SelectColumns, Transformer> {
 public:
  explicit SelectColumns(ParamMap params);
  static const StageDescriptor& describe();
  Schema transformSchema(const Schema& in) const override;
  Dataset transform(const Dataset& ds) const override;
};

class DropColumns : public StageImpl<DropColumns, Transformer> {
 public:
  explicit DropColumns(ParamMap params);
  static const StageDescriptor& describe();
  Schema transformSchema(const Schema& in) const override;
  Dataset transform(const Dataset& ds) const override;
};

class RepartitionStage : public StageImpl<RepartitionStage, Transformer> {
 public:
  explicit RepartitionStage(ParamMap params);
  static const StageDescriptor& describe();
  Schema transformSchema(const Schema& in) const override { return in; }
  Dataset transform(const Dataset& ds) const override;

 protected:
  void validateParams() const override;
};

class CacheStage : public StageImpl<CacheStage, Transformer> {
 public:
  explicit CacheStage(ParamMap params = {});
  static const StageDescriptor& describe();
  Schema transformSchema(const Schema& in) const override { return in; }
  Dataset transform(const Dataset& ds) const override { return ds.cache(); }
};

void registerUtilityStages(StageRegistry& registry);

}  // namespace tundra
