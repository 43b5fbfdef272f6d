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

#include "tundra/dataframe/dataset.hpp"

#include "tundra/common/error.hpp"
#include "tundra/dataframe/encoding.hpp"

namespace tundra {

namespace {
void checkPartitionCount(int n) {
  if (n < 1) {
    throw Error(ErrorCode::InvalidPartitionCount,
                "partition count must be >= 1, got " + std::to_string(n));
  }
}
}  // namespace

Dataset Dataset::fromRows(std::shared_ptr<Engine> engine, std::vector<Row> rows, Schema schema,
                          std::optional<int> numPartitions) {
  const int n = numPartitions.value_or(engine->defaultParallelism());
  checkPartitionCount(n);
  for (const auto& r : rows) schema.check(r);
  auto parts = std::make_shared<std::vector<Rows>>(static_cast<size_t>(n));
  for (size_t i = 0; i < rows.size(); ++i) {
    (*parts)[i % static_cast<size_t>(n)].push_back(std::move(rows[i]));
  }
  auto node = std::make_shared<PlanNode>();
  node->kind = PlanKind::Source;
  node->id = PlanNode::nextId();
  node->schema = schema;
  node->numPartitions = n;
  node->sourceData = std::move(parts);
  node->label = "rows";
  return Dataset(std::move(engine), std::move(schema), std::move(node));
}

Dataset Dataset::fromGenerator(std::shared_ptr<Engine> engine, Schema schema, int numPartitions,
                               SourceFn generator, std::string label) {
  checkPartitionCount(numPartitions);
  auto node = std::make_shared<PlanNode>();
  node->kind = PlanKind::Source;
  node->id = PlanNode::nextId();
  node->schema = schema;
  node->numPartitions = numPartitions;
  node->sourceFn = std::move(generator);
  node->label = std::move(label);
  return Dataset(std::move(engine), std::move(schema), std::move(node));
}

Dataset Dataset::derive(PlanNode node) const {
  node.id = PlanNode::nextId();
  auto schema = node.schema;
  return Dataset(engine_, std::move(schema), std::make_shared<const PlanNode>(std::move(node)));
}

Dataset Dataset::mapPartitions(PartitionFn fn, Schema outSchema, std::string label) const {
  PlanNode node;
  node.kind = PlanKind::MapPartitions;
  node.schema = std::move(outSchema);
  node.numPartitions = numPartitions();
  node.children = {plan_};
  node.fn = std::move(fn);
  node.label = std::move(label);
  return derive(std::move(node));
}

Dataset Dataset::map(std::function<Row(const Row&)> fn, Schema outSchema) const {
  return mapPartitions(
      [fn = std::move(fn)](const Rows& in, TaskContext&) {
        Rows out;
        out.reserve(in.size());
        for (const auto& r : in) out.push_back(fn(r));
        return out;
      },
      std::move(outSchema), "map");
}

Dataset Dataset::filter(RowPredicate predicate) const {
  PlanNode node;
  node.kind = PlanKind::Filter;
  node.schema = schema_;
  node.numPartitions = numPartitions();
  node.children = {plan_};
  node.predicate = std::move(predicate);
  node.label = "filter";
  return derive(std::move(node));
}

Dataset Dataset::repartition(int n) const {
  checkPartitionCount(n);
  PlanNode node;
  node.kind = PlanKind::Repartition;
  node.schema = schema_;
  node.numPartitions = n;
  node.children = {plan_};
  node.label = "repartition";
  return derive(std::move(node));
}

Dataset Dataset::groupByKey(std::string_view keyCol, std::optional<int> numPartitions) const {
  const size_t key = schema_.indexOf(keyCol, ErrorCode::UnknownColumn);
  const Column& keyColumn = schema_.column(key);
  if (!isHashableKey(keyColumn.dtype)) {
    throw Error(ErrorCode::UnhashableKey, "column '" + keyColumn.name + "' of type " +
                                              std::string(dtypeName(keyColumn.dtype)) +
                                              " cannot be a grouping key");
  }
  const int n = numPartitions.value_or(this->numPartitions());
  checkPartitionCount(n);
  PlanNode node;
  node.kind = PlanKind::GroupByKey;
  node.schema = Schema(std::vector<Column>{
      Column{keyColumn.name, keyColumn.dtype, nullptr},
      Column{keyColumn.name == "rows" ? "group_rows" : "rows", DType::RowList,
             std::make_shared<const Schema>(schema_)}});
  node.numPartitions = n;
  node.children = {plan_};
  node.keyIndex = key;
  node.label = "groupByKey";
  return derive(std::move(node));
}

Dataset Dataset::ungroup(std::string_view rowsCol) const {
  const size_t idx = schema_.indexOf(rowsCol, ErrorCode::UnknownColumn);
  const Column& col = schema_.column(idx);
  if (col.dtype != DType::RowList || !col.nested) {
    throw Error(ErrorCode::SchemaMismatch, "column '" + col.name + "' is not a row list");
  }
  return mapPartitions(
      [idx](const Rows& in, TaskContext&) {
        Rows out;
        for (const auto& r : in) {
          const auto& nested = asRows(r[idx]);
          out.insert(out.end(), nested.begin(), nested.end());
        }
        return out;
      },
      *col.nested, "ungroup");
}

Dataset Dataset::unionWith(const Dataset& other) const {
  if (!(schema_ == other.schema_)) {
    throw Error(ErrorCode::SchemaMismatch, "union of datasets with different schemas");
  }
  PlanNode node;
  node.kind = PlanKind::Union;
  node.schema = schema_;
  node.numPartitions = numPartitions() + other.numPartitions();
  node.children = {plan_, other.plan_};
  node.label = "union";
  return derive(std::move(node));
}

Dataset Dataset::cache() const {
  PlanNode node;
  node.kind = PlanKind::Cache;
  node.schema = schema_;
  node.numPartitions = numPartitions();
  node.children = {plan_};
  node.cache = std::make_shared<CacheStore>();
  node.label = "cache";
  return derive(std::move(node));
}

Dataset Dataset::select(const std::vector<std::string>& cols) const {
  Schema out = schema_.select(cols);
  std::vector<size_t> idx;
  for (const auto& c : cols) idx.push_back(schema_.indexOf(c));
  return map(
      [idx](const Row& r) {
        Row o;
        o.values.reserve(idx.size());
        for (size_t i : idx) o.values.push_back(r[i]);
        return o;
      },
      std::move(out));
}

Dataset Dataset::drop(const std::vector<std::string>& cols) const {
  Schema out = schema_.drop(cols);
  std::vector<size_t> idx;
  for (const auto& c : out.columns()) idx.push_back(schema_.indexOf(c.name));
  return map(
      [idx](const Row& r) {
        Row o;
        o.values.reserve(idx.size());
        for (size_t i : idx) o.values.push_back(r[i]);
        return o;
      },
      std::move(out));
}

Dataset Dataset::withColumn(Column column, std::function<Cell(const Row&)> fn) const {
  Schema out = schema_.withColumn(std::move(column));
  return map([fn = std::move(fn)](const Row& r) { return appendCell(r, fn(r)); }, std::move(out));
}

JobResult Dataset::run() const { return engine_->runJob(plan_); }

std::vector<Partition> Dataset::collectPartitions() const { return run().partitions; }

std::vector<Row> Dataset::collect() const {
  auto parts = collectPartitions();
  std::vector<Row> out;
  for (auto& p : parts) {
    for (auto& r : p.rows) out.push_back(std::move(r));
  }
  return out;
}

int64_t Dataset::count() const { return run().metrics.rowsProcessed; }

bool Dataset::evictCachedPartition(int partition) const {
  if (plan_->kind != PlanKind::Cache) {
    throw Error(ErrorCode::InvalidArgument, "dataset is not cached");
  }
  return plan_->cache->evict(partition);
}

}  // namespace tundra
