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
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "tundra/dataframe/value.hpp"

namespace tundra {

class TaskContext;

using Rows = std::vector<Row>;
using PartitionFn = std::function<Rows(const Rows& input, TaskContext& ctx)>;
using RowPredicate = std::function<bool(const Row&)>;
using SourceFn = std::function<Rows(int partition, TaskContext& ctx)>;

enum class PlanKind { Source, MapPartitions, Filter, Repartition, GroupByKey, Union, Cache };

std::string_view planKindName(PlanKind k);

// Materialized partitions of a Cache node. Shared by every Dataset that
// references the node; safe for concurrent use.
class CacheStore {
 public:
  std::shared_ptr<const Rows> get(int partition) const;
  void put(int partition, std::shared_ptr<const Rows> rows);
  bool evict(int partition);
  void clear();
  size_t size() const;

 private:
  mutable std::mutex mu_;
  std::map<int, std::shared_ptr<const Rows>> parts_;
};

struct PlanNode;
using PlanPtr = std::shared_ptr<const PlanNode>;

// One node of a lazy logical plan. Immutable once built, except for the
// cache store of Cache nodes.
struct PlanNode {
  PlanKind kind = PlanKind::Source;
  uint64_t id = 0;
  Schema schema;
  int numPartitions = 1;
  std::vector<PlanPtr> children;

  // Source: either stored partitions or a generator.
  std::shared_ptr<const std::vector<Rows>> sourceData;
  SourceFn sourceFn;
  // MapPartitions
  PartitionFn fn;
  // Filter
  RowPredicate predicate;
  // GroupByKey
  size_t keyIndex = 0;
  // Cache
  std::shared_ptr<CacheStore> cache;

  std::string label;

  static uint64_t nextId();
};

}  // namespace tundra
