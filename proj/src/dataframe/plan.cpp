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

#include "tundra/dataframe/plan.hpp"

#include <atomic>

namespace tundra {

std::string_view planKindName(PlanKind k) {
  switch (k) {
    case PlanKind::Source: return "Source";
    case PlanKind::MapPartitions: return "MapPartitions";
    case PlanKind::Filter: return "Filter";
    case PlanKind::Repartition: return "Repartition";
    case PlanKind::GroupByKey: return "GroupByKey";
    case PlanKind::Union: return "Union";
    case PlanKind::Cache: return "Cache";
  }
  return "?";
}

std::shared_ptr<const Rows> CacheStore::get(int partition) const {
  std::lock_guard lock(mu_);
  auto it = parts_.find(partition);
  return it == parts_.end() ? nullptr : it->second;
}

void CacheStore::put(int partition, std::shared_ptr<const Rows> rows) {
  std::lock_guard lock(mu_);
  parts_[partition] = std::move(rows);
}

bool CacheStore::evict(int partition) {
  std::lock_guard lock(mu_);
  return parts_.erase(partition) > 0;
}

void CacheStore::clear() {
  std::lock_guard lock(mu_);
  parts_.clear();
}

size_t CacheStore::size() const {
  std::lock_guard lock(mu_);
  return parts_.size();
}

uint64_t PlanNode::nextId() {
  static std::atomic<uint64_t> counter{1};
  return counter.fetch_add(1);
}

}  // namespace tundra
