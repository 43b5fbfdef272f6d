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

#include "tundra/exec/engine.hpp"

#include <algorithm>
#include <condition_variable>
#include <cstdlib>
#include <deque>
#include <string>
#include <thread>
#include <tuple>

#include "tundra/common/error.hpp"
#include "tundra/dataframe/encoding.hpp"

namespace tundra {

struct BroadcastHandle::State {
  uint64_t id = 0;
  std::vector<uint8_t> payload;
  mutable std::mutex mu;
  std::map<int, int> lastJob;
  int total = 0;
};

struct JobState {
  uint64_t id = 0;
  uint64_t seed = 0;
  bool validateRows = true;
  std::vector<FaultSpec> faults;
  std::chrono::steady_clock::time_point start;
  // Guarded by the active stage's mutex.
  std::map<int, int> ordinals;
  JobMetrics metrics;

  std::mutex mu;
  // Shuffle node -> map partition -> destination bucket.
  std::map<const PlanNode*, std::vector<std::vector<Rows>>> shuffle;
  std::map<std::pair<int, uint64_t>, std::shared_ptr<const void>> materialized;
  std::map<uint64_t, std::map<int, int>> counts;
  std::map<uint64_t, std::shared_ptr<BroadcastHandle::State>> touched;

  double elapsedMs() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  }
};

struct Engine::StageRun {
  JobState* job = nullptr;
  const TaskBody* body = nullptr;
  int stageIndex = 0;

  std::mutex mu;
  std::condition_variable cv;
  std::deque<Task> queue;
  int inflight = 0;
  bool finished = false;
  bool aborted = false;
  std::exception_ptr error;
  int errorPartition = -1;
  std::vector<std::thread> threads;
  std::map<int, bool> alive;
  std::map<int, int> taken;
};

// ---- configuration -------------------------------------------------------

void EngineConfig::validate() const {
  if (minWorkers < 1 || minWorkers > maxWorkers) {
    throw Error(ErrorCode::OutOfBounds, "worker bounds must satisfy 1 <= min <= max");
  }
  if (workers < minWorkers || workers > maxWorkers) {
    throw Error(ErrorCode::OutOfBounds, "workers=" + std::to_string(workers) +
                                            " outside [" + std::to_string(minWorkers) + ", " +
                                            std::to_string(maxWorkers) + "]");
  }
}

EngineConfig EngineConfig::fromEnvironment(int fallback) {
  EngineConfig cfg;
  cfg.workers = fallback;
  if (const char* env = std::getenv("TUNDRA_WORKERS")) {
    try {
      cfg.workers = std::stoi(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, std::string("bad TUNDRA_WORKERS: ") + env);
    }
  }
  cfg.maxWorkers = std::max(cfg.maxWorkers, cfg.workers);
  return cfg;
}

// ---- broadcast -----------------------------------------------------------

uint64_t BroadcastHandle::id() const { return state_ ? state_->id : 0; }

std::span<const uint8_t> BroadcastHandle::payload() const {
  if (!state_) return {};
  return state_->payload;
}

std::map<int, int> BroadcastHandle::materializations() const {
  if (!state_) return {};
  std::lock_guard lock(state_->mu);
  return state_->lastJob;
}

int BroadcastHandle::lastJobMaterializations() const {
  int n = 0;
  for (const auto& [_, c] : materializations()) n += c;
  return n;
}

int BroadcastHandle::totalMaterializations() const {
  if (!state_) return 0;
  std::lock_guard lock(state_->mu);
  return state_->total;
}

uint64_t TaskContext::jobId() const { return job_->id; }
uint64_t TaskContext::seed() const { return job_->seed; }

std::shared_ptr<const void> TaskContext::materializeErased(
    const BroadcastHandle& handle,
    const std::function<std::shared_ptr<const void>(std::span<const uint8_t>)>& decode) {
  if (!handle.state_) throw Error(ErrorCode::InvalidArgument, "invalid broadcast handle");
  auto key = std::make_pair(worker_, handle.state_->id);
  {
    std::lock_guard lock(job_->mu);
    auto it = job_->materialized.find(key);
    if (it != job_->materialized.end()) return it->second;
  }
  // A worker is a single thread, so nobody else can be materializing this key.
  auto value = decode(handle.state_->payload);
  std::lock_guard lock(job_->mu);
  job_->materialized.emplace(key, value);
  job_->counts[handle.state_->id][worker_] += 1;
  job_->touched[handle.state_->id] = handle.state_;
  return value;
}

// ---- plan evaluation -----------------------------------------------------

namespace {

struct TaskScratch {
  std::vector<std::tuple<CacheStore*, int, std::shared_ptr<const Rows>>> cachePuts;
};

void validateRows(const PlanNode& node, const Rows& rows, const JobState& job) {
  if (!job.validateRows) return;
  for (const auto& r : rows) node.schema.check(r);
}

Rows groupRows(const PlanNode& node, const Rows& input) {
  std::map<std::vector<uint8_t>, size_t> slot;
  std::vector<std::pair<Cell, std::vector<Row>>> groups;
  for (const auto& row : input) {
    auto key = encodeCell(row[node.keyIndex]);
    auto [it, inserted] = slot.emplace(std::move(key), groups.size());
    if (inserted) groups.emplace_back(row[node.keyIndex], std::vector<Row>{});
    groups[it->second].second.push_back(row);
  }
  Rows out;
  out.reserve(groups.size());
  for (auto& [key, rows] : groups) {
    out.push_back(Row({key, RowListValue{std::make_shared<const std::vector<Row>>(std::move(rows))}}));
  }
  return out;
}

std::shared_ptr<const Rows> computePartition(const PlanNode& node, int index, TaskContext& ctx,
                                             JobState& job, TaskScratch& scratch) {
  switch (node.kind) {
    case PlanKind::Source: {
      if (node.sourceData) {
        return std::shared_ptr<const Rows>(node.sourceData, &(*node.sourceData)[index]);
      }
      auto rows = std::make_shared<Rows>(node.sourceFn(index, ctx));
      validateRows(node, *rows, job);
      return rows;
    }
    case PlanKind::MapPartitions: {
      auto input = computePartition(*node.children[0], index, ctx, job, scratch);
      auto rows = std::make_shared<Rows>(node.fn(*input, ctx));
      validateRows(node, *rows, job);
      return rows;
    }
    case PlanKind::Filter: {
      auto input = computePartition(*node.children[0], index, ctx, job, scratch);
      auto rows = std::make_shared<Rows>();
      for (const auto& r : *input) {
        if (node.predicate(r)) rows->push_back(r);
      }
      return rows;
    }
    case PlanKind::Cache: {
      if (auto hit = node.cache->get(index)) return hit;
      for (const auto& [store, i, rows] : scratch.cachePuts) {
        if (store == node.cache.get() && i == index) return rows;
      }
      auto rows = computePartition(*node.children[0], index, ctx, job, scratch);
      scratch.cachePuts.emplace_back(node.cache.get(), index, rows);
      return rows;
    }
    case PlanKind::Repartition:
    case PlanKind::GroupByKey: {
      const std::vector<std::vector<Rows>>* buckets;
      {
        std::lock_guard lock(job.mu);
        buckets = &job.shuffle.at(&node);
      }
      Rows gathered;
      for (const auto& mapOut : *buckets) {
        const auto& part = mapOut[static_cast<size_t>(index)];
        gathered.insert(gathered.end(), part.begin(), part.end());
      }
      if (node.kind == PlanKind::Repartition) {
        return std::make_shared<Rows>(std::move(gathered));
      }
      return std::make_shared<Rows>(groupRows(node, gathered));
    }
    case PlanKind::Union: {
      int i = index;
      for (const auto& child : node.children) {
        if (i < child->numPartitions) return computePartition(*child, i, ctx, job, scratch);
        i -= child->numPartitions;
      }
      throw Error(ErrorCode::OutOfBounds, "union partition out of range");
    }
  }
  throw Error(ErrorCode::InvalidArgument, "unknown plan node");
}

bool fullyCached(const PlanNode& node) {
  return node.kind == PlanKind::Cache &&
         node.cache->size() == static_cast<size_t>(node.numPartitions);
}

// Shuffle nodes the plan still needs, dependencies first.
void collectShuffles(const PlanNode& node, std::vector<const PlanNode*>& out) {
  if (fullyCached(node)) return;
  for (const auto& child : node.children) collectShuffles(*child, out);
  if (node.kind == PlanKind::Repartition || node.kind == PlanKind::GroupByKey) {
    if (std::find(out.begin(), out.end(), &node) == out.end()) out.push_back(&node);
  }
}

void commitScratch(TaskScratch& scratch) {
  for (auto& [store, i, rows] : scratch.cachePuts) store->put(i, rows);
}

}  // namespace

// ---- engine --------------------------------------------------------------

Engine::Engine(EngineConfig config)
    : config_(std::move(config)),
      target_(config_.workers),
      created_(std::chrono::steady_clock::now()) {
  config_.validate();
  timeline_.emplace_back(0.0, config_.workers);
}

std::shared_ptr<Engine> Engine::create(EngineConfig config) {
  return std::make_shared<Engine>(std::move(config));
}

double Engine::msSinceStart() const {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - created_)
      .count();
}

void Engine::setWorkerCount(int n) {
  if (n < config_.minWorkers || n > config_.maxWorkers) {
    throw Error(ErrorCode::OutOfBounds, "worker count " + std::to_string(n) + " outside [" +
                                            std::to_string(config_.minWorkers) + ", " +
                                            std::to_string(config_.maxWorkers) + "]");
  }
  std::lock_guard lock(mu_);
  target_.store(n);
  timeline_.emplace_back(msSinceStart(), n);
  for (StageRun* run : activeRuns_) {
    std::lock_guard runLock(run->mu);
    run->job->metrics.workerCountTimeline.emplace_back(run->job->elapsedMs(), n);
    spawnWorkersLocked(*run, n);
    run->cv.notify_all();
  }
}

std::vector<std::pair<double, int>> Engine::workerTimeline() const {
  std::lock_guard lock(mu_);
  return timeline_;
}

void Engine::setFaultPlan(std::vector<FaultSpec> plan) {
  std::lock_guard lock(mu_);
  config_.faultPlan = std::move(plan);
}

BroadcastHandle Engine::broadcast(std::vector<uint8_t> payload) {
  if (payload.empty()) throw Error(ErrorCode::InvalidArgument, "broadcast payload is empty");
  BroadcastHandle h;
  h.state_ = std::make_shared<BroadcastHandle::State>();
  h.state_->id = nextBroadcastId_.fetch_add(1);
  h.state_->payload = std::move(payload);
  return h;
}

JobMetrics Engine::lastMetrics() const {
  std::lock_guard lock(mu_);
  if (!lastMetrics_) throw Error(ErrorCode::NoJobYet, "no job has run on this engine");
  return *lastMetrics_;
}

void Engine::spawnWorkersLocked(StageRun& run, int upTo) {
  if (run.finished || run.aborted) return;
  for (int w = 0; w < upTo; ++w) {
    if (run.alive[w]) continue;
    run.alive[w] = true;
    run.threads.emplace_back([this, &run, w] { workerLoop(run, w); });
  }
}

void Engine::workerLoop(StageRun& run, int worker) {
  JobState& job = *run.job;
  std::unique_lock lk(run.mu);
  for (;;) {
    if (run.aborted || run.finished) break;
    const int target = target_.load();
    if (worker >= target) break;

    int otherAlive = 0;
    int fresh = 0;
    for (const auto& [w, isAlive] : run.alive) {
      if (!isAlive || w >= target || w == worker) continue;
      ++otherAlive;
      if (run.taken[w] == 0) ++fresh;
    }
    // Every live worker gets one task before anybody takes a second one, as
    // long as there are enough tasks to go round.
    const bool mayTake = run.taken[worker] == 0 || static_cast<int>(run.queue.size()) > fresh;
    auto pick = run.queue.end();
    if (mayTake) {
      for (auto it = run.queue.begin(); it != run.queue.end(); ++it) {
        if (it->excludedWorker != worker || otherAlive == 0) {
          pick = it;
          break;
        }
      }
    }

    if (pick != run.queue.end()) {
      Task task = *pick;
      run.queue.erase(pick);
      ++run.inflight;
      ++run.taken[worker];
      const int ordinal = job.ordinals[worker]++;
      const bool inject =
          std::any_of(job.faults.begin(), job.faults.end(), [&](const FaultSpec& f) {
            return f.worker == worker && f.taskOrdinal == ordinal;
          });
      lk.unlock();

      TaskContext ctx(this, &job, worker, task.partition, run.stageIndex);
      std::exception_ptr err;
      std::function<void()> commit;
      auto t0 = std::chrono::steady_clock::now();
      try {
        commit = (*run.body)(task, ctx);
        if (!inject && commit) commit();
      } catch (...) {
        err = std::current_exception();
      }
      double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
              .count();

      lk.lock();
      --run.inflight;
      if (err) {
        if (!run.error) {
          run.error = err;
          run.errorPartition = task.partition;
        }
        run.aborted = true;
        run.queue.clear();
      } else if (inject) {
        // The attempt's output is dropped; recompute the partition from its
        // lineage on another worker.
        run.queue.push_back(Task{task.partition, worker, true});
        job.metrics.recomputedPartitions += 1;
        job.metrics.failedAttemptMs.push_back(ms);
      } else {
        job.metrics.perPartitionMs.push_back(ms);
      }
      run.cv.notify_all();
      continue;
    }

    if (run.queue.empty() && run.inflight == 0) break;
    run.cv.wait(lk);
  }
  run.alive[worker] = false;
  run.cv.notify_all();
}

void Engine::runStage(JobState& job, int numTasks, const TaskBody& body) {
  if (numTasks <= 0) return;
  StageRun run;
  run.job = &job;
  run.body = &body;
  run.stageIndex = job.metrics.stages++;
  for (int i = 0; i < numTasks; ++i) run.queue.push_back(Task{i, -1, false});

  {
    std::lock_guard lock(mu_);
    activeRuns_.push_back(&run);
    std::lock_guard runLock(run.mu);
    spawnWorkersLocked(run, target_.load());
  }
  {
    std::unique_lock lk(run.mu);
    run.cv.wait(lk, [&] { return run.inflight == 0 && (run.aborted || run.queue.empty()); });
    run.finished = true;
    run.cv.notify_all();
  }
  {
    std::lock_guard lock(mu_);
    activeRuns_.erase(std::find(activeRuns_.begin(), activeRuns_.end(), &run));
  }
  for (auto& t : run.threads) t.join();

  if (run.error) {
    try {
      std::rethrow_exception(run.error);
    } catch (const JobError&) {
      throw;
    } catch (const Error& e) {
      throw JobError(run.errorPartition, e.code(), e.what());
    } catch (const std::exception& e) {
      throw JobError(run.errorPartition, ErrorCode::JobError, e.what());
    }
  }
}

JobResult Engine::runJob(const PlanPtr& plan) {
  JobState job;
  job.id = nextJobId_.fetch_add(1);
  job.seed = config_.seed;
  job.validateRows = config_.validateRows;
  {
    std::lock_guard lock(mu_);
    job.faults = config_.faultPlan;
  }
  job.start = std::chrono::steady_clock::now();
  job.metrics.jobId = job.id;
  job.metrics.workerCountTimeline.emplace_back(0.0, target_.load());

  std::vector<const PlanNode*> shuffles;
  collectShuffles(*plan, shuffles);
  for (const PlanNode* s : shuffles) {
    job.shuffle[s].assign(static_cast<size_t>(s->children[0]->numPartitions),
                          std::vector<Rows>(static_cast<size_t>(s->numPartitions)));
  }

  for (const PlanNode* s : shuffles) {
    const PlanNode& child = *s->children[0];
    TaskBody mapTask = [&job, s, &child](const Task& task, TaskContext& ctx) {
      TaskScratch scratch;
      auto rows = computePartition(child, task.partition, ctx, job, scratch);
      auto buckets = std::make_shared<std::vector<Rows>>(static_cast<size_t>(s->numPartitions));
      const auto n = static_cast<uint64_t>(s->numPartitions);
      for (size_t k = 0; k < rows->size(); ++k) {
        const Row& row = (*rows)[k];
        uint64_t dest = s->kind == PlanKind::Repartition
                            ? (static_cast<uint64_t>(task.partition) + k) % n
                            : hashCell(row[s->keyIndex]) % n;
        (*buckets)[dest].push_back(row);
      }
      return std::function<void()>([&job, s, buckets, scratch, p = task.partition]() mutable {
        commitScratch(scratch);
        std::lock_guard lock(job.mu);
        job.shuffle[s][static_cast<size_t>(p)] = std::move(*buckets);
      });
    };
    runStage(job, child.numPartitions, mapTask);
  }

  std::vector<Partition> results(static_cast<size_t>(plan->numPartitions));
  TaskBody resultTask = [&job, &plan, &results](const Task& task, TaskContext& ctx) {
    TaskScratch scratch;
    auto rows = computePartition(*plan, task.partition, ctx, job, scratch);
    return std::function<void()>([&results, rows, scratch, p = task.partition]() mutable {
      commitScratch(scratch);
      results[static_cast<size_t>(p)] = Partition{p, *rows};
    });
  };
  runStage(job, plan->numPartitions, resultTask);

  job.metrics.wallTimeMs = job.elapsedMs();
  for (const auto& p : results) job.metrics.rowsProcessed += static_cast<int64_t>(p.rows.size());
  for (auto& [id, state] : job.touched) {
    std::lock_guard lock(state->mu);
    state->lastJob = job.counts[id];
    for (const auto& [_, c] : job.counts[id]) state->total += c;
  }
  job.metrics.broadcastMaterializations = job.counts;
  {
    std::lock_guard lock(mu_);
    lastMetrics_ = job.metrics;
  }
  return JobResult{std::move(results), job.metrics};
}

void Engine::runTasks(int n, const std::function<void(int, TaskContext&)>& fn) {
  JobState job;
  job.id = nextJobId_.fetch_add(1);
  job.seed = config_.seed;
  job.start = std::chrono::steady_clock::now();
  TaskBody body = [&fn](const Task& task, TaskContext& ctx) {
    fn(task.partition, ctx);
    return std::function<void()>();
  };
  runStage(job, n, body);
}

}  // namespace tundra
