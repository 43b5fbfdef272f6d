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

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tundra/dataframe/plan.hpp"
#include "tundra/dataframe/value.hpp"
#include "tundra/exec/engine.hpp"

namespace tundra {

// A schema plus a lazy logical plan, bound to the engine that will execute
// it. Cheap to copy; copies share the plan.
class Dataset {
 public:
  Dataset() = default;

  // Rows are split round-robin. Partition count defaults to the engine's
  // default parallelism. Throws SchemaMismatch / InvalidPartitionCount.
  static Dataset fromRows(std::shared_ptr<Engine> engine, std::vector<Row> rows, Schema schema,
                          std::optional<int> numPartitions = std::nullopt);
  // Source whose partitions are produced on demand inside tasks.
  static Dataset fromGenerator(std::shared_ptr<Engine> engine, Schema schema, int numPartitions,
                               SourceFn generator, std::string label = "generator");

  const Schema& schema() const { return schema_; }
  const PlanPtr& plan() const { return plan_; }
  const std::shared_ptr<Engine>& engine() const { return engine_; }
  int numPartitions() const { return plan_->numPartitions; }

  // ---- transformations (lazy) ----
  Dataset mapPartitions(PartitionFn fn, Schema outSchema, std::string label = "map") const;
  // Row-at-a-time convenience over mapPartitions.
  Dataset map(std::function<Row(const Row&)> fn, Schema outSchema) const;
  Dataset filter(RowPredicate predicate) const;
  Dataset repartition(int n) const;
  // Output schema: (keyCol, rows: RowList). Shuffles on the key hash.
  Dataset groupByKey(std::string_view keyCol, std::optional<int> numPartitions = std::nullopt) const;
  // Inverse of groupByKey: flattens the RowList column back to rows.
  Dataset ungroup(std::string_view rowsCol = "rows") const;
  Dataset unionWith(const Dataset& other) const;
  Dataset cache() const;
  Dataset select(const std::vector<std::string>& cols) const;
  Dataset drop(const std::vector<std::string>& cols) const;
  // Appends a column computed per row.
  Dataset withColumn(Column column, std::function<Cell(const Row&)> fn) const;

  // ---- actions ----
  std::vector<Row> collect() const;
  std::vector<Partition> collectPartitions() const;
  JobResult run() const;
  int64_t count() const;

  // Drops one materialized partition of a cached dataset so the next action
  // recomputes it from lineage. Returns false when nothing was cached there.
  bool evictCachedPartition(int partition) const;

 private:
  Dataset(std::shared_ptr<Engine> engine, Schema schema, PlanPtr plan)
      : engine_(std::move(engine)), schema_(std::move(schema)), plan_(std::move(plan)) {}

  Dataset derive(PlanNode node) const;

  std::shared_ptr<Engine> engine_;
  Schema schema_;
  PlanPtr plan_;
};

}  // namespace tundra
