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

#include "tundra/pipeline/utility_stages.hpp"

namespace tundra {

namespace {

void requireAll(const Schema& in, const StringList& cols) {
  for (const auto& c : cols) {
    if (!in.has(c)) throw Error(ErrorCode::UnknownColumn, "no column named '" + c + "'");
  }
}

}  // namespace

const StageDescriptor& SelectColumns::describe() {
  static const StageDescriptor d{
      "SelectColumns",
      StageKind::Transformer,
      "Keeps the listed columns, in the listed order.",
      {{"cols", ParamKind::StringList, std::nullopt, "Columns to keep."}}};
  return d;
}

SelectColumns::SelectColumns(ParamMap params) : StageImpl(describe(), std::move(params)) {
  finishConfigure();
}

Schema SelectColumns::transformSchema(const Schema& in) const {
  auto cols = getStringList("cols");
  requireAll(in, cols);
  return in.select(cols);
}

Dataset SelectColumns::transform(const Dataset& ds) const {
  transformSchema(ds.schema());
  return ds.select(getStringList("cols"));
}

const StageDescriptor& DropColumns::describe() {
  static const StageDescriptor d{
      "DropColumns",
      StageKind::Transformer,
      "Removes the listed columns.",
      {{"cols", ParamKind::StringList, std::nullopt, "Columns to remove."}}};
  return d;
}

DropColumns::DropColumns(ParamMap params) : StageImpl(describe(), std::move(params)) {
  finishConfigure();
}

Schema DropColumns::transformSchema(const Schema& in) const {
  auto cols = getStringList("cols");
  requireAll(in, cols);
  return in.drop(cols);
}

Dataset DropColumns::transform(const Dataset& ds) const {
  transformSchema(ds.schema());
  return ds.drop(getStringList("cols"));
}

const StageDescriptor& RepartitionStage::describe() {
  static const StageDescriptor d{
      "RepartitionStage",
      StageKind::Transformer,
      "Redistributes rows into a fixed number of partitions.",
      {{"numPartitions", ParamKind::Int, std::nullopt, "Partition count, at least 1."}}};
  return d;
}

RepartitionStage::RepartitionStage(ParamMap params) : StageImpl(describe(), std::move(params)) {
  finishConfigure();
}

void RepartitionStage::validateParams() const {
  if (hasParam("numPartitions") && getInt("numPartitions") < 1) {
    throw Error(ErrorCode::InvalidPartitionCount, "numPartitions must be >= 1");
  }
}

Dataset RepartitionStage::transform(const Dataset& ds) const {
  return ds.repartition(static_cast<int>(getInt("numPartitions")));
}

const StageDescriptor& CacheStage::describe() {
  static const StageDescriptor d{"CacheStage", StageKind::Transformer,
                                 "Materializes its input once and reuses it in later actions.",
                                 {}};
  return d;
}

CacheStage::CacheStage(ParamMap params) : StageImpl(describe(), std::move(params)) {}

void registerUtilityStages(StageRegistry& registry) {
  registry.add(SelectColumns::describe(), statelessFactory<SelectColumns>());
  registry.add(DropColumns::describe(), statelessFactory<DropColumns>());
  registry.add(RepartitionStage::describe(), statelessFactory<RepartitionStage>());
  registry.add(CacheStage::describe(), statelessFactory<CacheStage>());
}

}  // namespace tundra
