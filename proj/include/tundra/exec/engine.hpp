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

#include <atomic>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "tundra/dataframe/plan.hpp"

namespace tundra {

// Inject a failure into the `taskOrdinal`-th task (0-based, counted per worker
// per job) that `worker` executes.
struct FaultSpec {
  int worker = 0;
  int taskOrdinal = 0;
};

struct EngineConfig {
  int workers = 1;
  int minWorkers = 1;
  int maxWorkers = 64;
  uint64_t seed = 0;
  // Applied to every job the engine runs.
  std::vector<FaultSpec> faultPlan;
  // Check every produced row against the node schema at partition boundaries.
  bool validateRows = true;

  void validate() const;

  // Worker count from TUNDRA_WORKERS when set, otherwise `fallback`.
  static EngineConfig fromEnvironment(int fallback = 1);
};

struct JobMetrics {
  uint64_t jobId = 0;
  double wallTimeMs = 0;
  // One entry per (stage, partition) task: time of its successful attempt.
  std::vector<double> perPartitionMs;
  // Time burnt in attempts that were discarded by an injected failure.
  std::vector<double> failedAttemptMs;
  int64_t rowsProcessed = 0;
  int recomputedPartitions = 0;
  int stages = 0;
  // (ms since job start, worker count). First entry is the count at start.
  std::vector<std::pair<double, int>> workerCountTimeline;
  // Broadcast id -> worker -> materializations during this job.
  std::map<uint64_t, std::map<int, int>> broadcastMaterializations;
};

struct Partition {
  int index = 0;
  Rows rows;
};

struct JobResult {
  std::vector<Partition> partitions;
  JobMetrics metrics;
};

class Engine;
struct JobState;

// Read-only payload published by the driver. Workers materialize it through
// TaskContext::materialize, at most once per worker per job.
class BroadcastHandle {
 public:
  BroadcastHandle() = default;

  uint64_t id() const;
  std::span<const uint8_t> payload() const;
  // Per-worker materializations in the most recent job that used the handle.
  std::map<int, int> materializations() const;
  int lastJobMaterializations() const;
  int totalMaterializations() const;
  bool valid() const { return state_ != nullptr; }

  struct State;

 private:
  friend class Engine;
  friend class TaskContext;
  std::shared_ptr<State> state_;
};

class TaskContext {
 public:
  int partition() const { return partition_; }
  int worker() const { return worker_; }
  int stage() const { return stage_; }
  uint64_t jobId() const;
  uint64_t seed() const;
  Engine& engine() const { return *engine_; }

  template <class T>
  std::shared_ptr<const T> materialize(
      const BroadcastHandle& handle,
      const std::function<std::shared_ptr<const T>(std::span<const uint8_t>)>& decode) {
    auto erased = materializeErased(handle, [&](std::span<const uint8_t> bytes) {
      return std::static_pointer_cast<const void>(decode(bytes));
    });
    return std::static_pointer_cast<const T>(erased);
  }

 private:
  friend class Engine;
  TaskContext(Engine* engine, JobState* job, int worker, int partition, int stage)
      : engine_(engine), job_(job), worker_(worker), partition_(partition), stage_(stage) {}

  std::shared_ptr<const void> materializeErased(
      const BroadcastHandle& handle,
      const std::function<std::shared_ptr<const void>(std::span<const uint8_t>)>& decode);

  Engine* engine_;
  JobState* job_;
  int worker_;
  int partition_;
  int stage_;
};

// Single-process stand-in for a cluster: a pool of worker threads that pull
// (stage, partition) tasks from a FIFO queue.
class Engine : public std::enable_shared_from_this<Engine> {
 public:
  explicit Engine(EngineConfig config);
  static std::shared_ptr<Engine> create(EngineConfig config = {});

  const EngineConfig& config() const { return config_; }
  int workerCount() const { return target_.load(); }
  int defaultParallelism() const { return 2 * workerCount(); }

  // Live reconfiguration. Pending tasks schedule onto the new pool size;
  // in-flight tasks complete. Throws OutOfBounds outside [min, max].
  void setWorkerCount(int n);
  // (ms since engine creation, workers), one entry per setWorkerCount call.
  std::vector<std::pair<double, int>> workerTimeline() const;

  void setFaultPlan(std::vector<FaultSpec> plan);

  // Throws InvalidArgument on an empty payload.
  BroadcastHandle broadcast(std::vector<uint8_t> payload);

  // Executes every partition of `plan`. Throws JobError when a user function
  // fails.
  JobResult runJob(const PlanPtr& plan);

  // Runs `n` independent tasks on the pool (no fault injection, not recorded
  // as a job). Rethrows the first task failure as JobError.
  void runTasks(int n, const std::function<void(int task, TaskContext& ctx)>& fn);

  // Throws NoJobYet before the first job.
  JobMetrics lastMetrics() const;

  struct StageRun;

 private:
  struct Task {
    int partition = 0;
    int excludedWorker = -1;
    bool retry = false;
  };

  // Computes a task and returns the action that publishes its output. The
  // action is dropped when the attempt is failed by fault injection.
  using TaskBody = std::function<std::function<void()>(const Task&, TaskContext&)>;
  void runStage(JobState& job, int numTasks, const TaskBody& body);
  void workerLoop(StageRun& run, int worker);
  void spawnWorkersLocked(StageRun& run, int upTo);
  double msSinceStart() const;

  EngineConfig config_;
  std::atomic<int> target_;
  std::chrono::steady_clock::time_point created_;

  mutable std::mutex mu_;
  std::vector<std::pair<double, int>> timeline_;
  std::vector<StageRun*> activeRuns_;
  std::optional<JobMetrics> lastMetrics_;
  std::atomic<uint64_t> nextJobId_{1};
  std::atomic<uint64_t> nextBroadcastId_{1};
};

}  // namespace tundra
