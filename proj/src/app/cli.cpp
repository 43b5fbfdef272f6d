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

#include "tundra/app/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "tundra/app/bench.hpp"
#include "tundra/app/builtin.hpp"
#include "tundra/app/experiment.hpp"
#include "tundra/app/rpc.hpp"
#include "tundra/dataframe/text_format.hpp"
#include "tundra/graph/model_io.hpp"
#include "tundra/graph/reference_net.hpp"
#include "tundra/image/corpus.hpp"
#include "tundra/pipeline/serialize.hpp"
#include "tundra/repo/repo.hpp"

namespace fs = std::filesystem;

namespace tundra {

int exitCodeFor(const Error& e) {
  if (dynamic_cast<const JobError*>(&e) != nullptr) return kExitExecution;
  switch (e.code()) {
    case ErrorCode::SchemaMismatch:
    case ErrorCode::InvalidPartitionCount:
    case ErrorCode::UnknownColumn:
    case ErrorCode::MissingColumn:
    case ErrorCode::UnknownStageName:
    case ErrorCode::CorruptStageFile:
    case ErrorCode::InvalidParam:
    case ErrorCode::EmptyPipeline:
    case ErrorCode::BadMagic:
    case ErrorCode::UnknownNode:
    case ErrorCode::ShapeMismatch:
    case ErrorCode::VectorSizeMismatch:
    case ErrorCode::UnsupportedFormat:
    case ErrorCode::MalformedHeader:
    case ErrorCode::InvalidChain:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::NonBinaryLabel:
    case ErrorCode::DegenerateLabels:
    case ErrorCode::UnknownModel:
    case ErrorCode::MalformedManifest:
    case ErrorCode::InvalidArgument:
    case ErrorCode::ParseError:
    case ErrorCode::BadRequest:
    case ErrorCode::OutOfBounds:
      return kExitValidation;
    default:
      return kExitExecution;
  }
}

namespace {

std::shared_ptr<Engine> makeEngine(int workers) {
  EngineConfig cfg = EngineConfig::fromEnvironment(
      static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
  if (workers > 0) cfg.workers = workers;
  cfg.maxWorkers = std::max(cfg.maxWorkers, cfg.workers);
  cfg.validate();
  return Engine::create(cfg);
}

std::vector<std::string> splitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> parseWorkerList(const std::string& text) {
  std::vector<int> out;
  for (const auto& s : splitList(text)) {
    size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size() || v < 1) {
      throw Error(ErrorCode::InvalidArgument, "bad worker count '" + s + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no worker counts given");
  return out;
}

void writeText(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  f << text;
  if (!f) throw Error(ErrorCode::Io, "cannot write " + path.string());
}

Dataset readInput(const std::shared_ptr<Engine>& engine, const fs::path& input,
                  std::optional<int> partitions) {
  if (fs::is_directory(input)) return readImages(engine, input, partitions);
  std::ifstream f(input, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open " + input.string());
  TextTable t = readTextTable(f);
  return Dataset::fromRows(engine, std::move(t.rows), std::move(t.schema), partitions);
}

}  // namespace

int runCli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Distributed image pipelines and transfer learning", "tundra"};
  app.require_subcommand(1);
  std::function<void()> action;

  // run
  auto* run = app.add_subcommand("run", "Fit a pipeline spec on an input and export the result");
  std::string specPath, runInput, runOutput;
  int runWorkers = 0, runPartitions = 0;
  run->add_option("--pipeline", specPath, "Pipeline spec (JSON)")->required();
  run->add_option("--input", runInput, "Image corpus directory or row text file")->required();
  run->add_option("--output", runOutput, "Output directory")->required();
  run->add_option("--workers", runWorkers, "Worker count (default: TUNDRA_WORKERS or cores)");
  run->add_option("--partitions", runPartitions, "Input partitions");
  run->callback([&] {
    action = [&] {
      auto engine = makeEngine(runWorkers);
      Pipeline pipeline = loadPipelineSpec(specPath, builtinRegistry());
      Dataset ds = readInput(engine, runInput,
                             runPartitions > 0 ? std::optional<int>(runPartitions) : std::nullopt);
      PipelineModel model = pipeline.fit(ds);
      Dataset result = model.transform(ds);
      std::vector<Row> rows = result.collect();
      const fs::path outDir(runOutput);
      writeText(outDir / "rows.txt", toTextTable(result.schema(), rows));
      savePipelineModel(model, outDir / "model");
      out << rows.size() << " rows written to " << (outDir / "rows.txt").string() << "\n";
    };
  });

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run the variant ladder on a labelled corpus");
  std::string expData, expOut, expVariants = "LR120,RN1,RN2,RN2+A,RN2+A+E";
  ExperimentOptions expOpts;
  int expWorkers = 0;
  exp->add_option("--data", expData, "Corpus directory")->required();
  exp->add_option("--out", expOut, "Output directory")->required();
  exp->add_option("--seed", expOpts.seed, "Root seed")->capture_default_str();
  exp->add_option("--variants", expVariants, "Comma-separated variants")->capture_default_str();
  exp->add_option("--workers", expWorkers, "Worker count (default: TUNDRA_WORKERS or cores)");
  exp->add_option("--epochs", expOpts.epochs, "Logistic regression epochs")->capture_default_str();
  exp->add_option("--partitions", expOpts.partitions, "Corpus partitions")->capture_default_str();
  exp->callback([&] {
    action = [&] {
      expOpts.variants = splitList(expVariants);
      auto results = runExperiment(makeEngine(expWorkers), expData, expOut, expOpts);
      out << summaryCsv(results);
    };
  });

  // gen-corpus
  auto* gen = app.add_subcommand("gen-corpus", "Write a synthetic camera-trap corpus");
  std::string genOut;
  CorpusOptions corpus;
  gen->add_option("--out", genOut, "Output directory")->required();
  gen->add_option("--cameras", corpus.cameras)->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--bursts-per-camera", corpus.burstsPerCamera)
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  gen->add_option("--burst-len", corpus.burstLength)->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--leopard-frac", corpus.leopardFraction)
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  gen->add_option("--seed", corpus.seed)->capture_default_str();
  gen->callback([&] {
    action = [&] {
      auto entries = generateCorpus(corpus, genOut);
      int64_t leopards = std::count_if(entries.begin(), entries.end(),
                                       [](const CorpusEntry& e) { return e.label == 1; });
      out << entries.size() << " images (" << leopards << " leopard) in " << genOut << "\n";
    };
  });

  // bench
  auto* bench = app.add_subcommand("bench", "Time the featurizer at several worker counts");
  int benchImages = 2000, benchReps = 3, benchPartitions = 16;
  uint64_t benchSeed = 7;
  std::string benchWorkers = "1,2,4", benchOut, benchModel;
  bench->add_option("--images", benchImages)->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--workers", benchWorkers, "Comma-separated worker counts")->capture_default_str();
  bench->add_option("--reps", benchReps, "Timed runs per worker count")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  bench->add_option("--partitions", benchPartitions)->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--seed", benchSeed)->capture_default_str();
  bench->add_option("--model", benchModel, "Graph manifest (default: reference network)");
  bench->add_option("--out", benchOut, "CSV path (default: stdout)");
  bench->callback([&] {
    action = [&] {
      const std::vector<int> counts = parseWorkerList(benchWorkers);
      std::string model = benchModel;
      std::optional<fs::path> scratch;
      if (model.empty()) {
        scratch = fs::temp_directory_path() / ("tundra_bench_" + std::to_string(::getpid()));
        saveGraph(buildReferenceNetwork(), *scratch / "reference.tgraph");
        model = (*scratch / "reference.tgraph").string();
      }
      auto pgm = std::make_shared<const std::vector<std::vector<uint8_t>>>(
          scalingImages(benchImages, benchSeed));
      EngineConfig base;
      base.maxWorkers = std::max(base.maxWorkers, *std::max_element(counts.begin(), counts.end()));
      auto points = benchmarkScaling(featurizerWorkload(pgm, model, benchPartitions), counts,
                                     benchReps, base, true);
      if (scratch) fs::remove_all(*scratch);
      if (benchOut.empty()) {
        writeScalingCsv(out, points);
      } else {
        std::ostringstream csv;
        writeScalingCsv(csv, points);
        writeText(benchOut, csv.str());
        out << "wrote " << benchOut << "\n";
      }
    };
  });

  // repo
  auto* repo = app.add_subcommand("repo", "Query and fetch content-addressed models");
  repo->require_subcommand(1);
  std::string manifest, cacheDir;
  std::vector<std::string> names;
  auto addRepoOptions = [&](CLI::App* sub, bool takesNames) {
    sub->add_option("--manifest", manifest, "Manifest file")->required();
    sub->add_option("--cache", cacheDir, "Cache directory (default: TUNDRA_CACHE)");
    if (takesNames) sub->add_option("names", names, "Model names (default: all)");
  };
  auto* list = repo->add_subcommand("list", "List manifest entries and cache state");
  addRepoOptions(list, false);
  list->callback([&] {
    action = [&] {
      ModelRepo r(manifest, cacheDir);
      for (const auto& e : r.entries()) {
        const bool cached = verifyFile(r.cachePath(e.name), e.sha256);
        out << e.name << "\t" << e.sizeBytes << "\t" << e.sha256 << "\t"
            << (cached ? "cached" : "-") << "\n";
      }
    };
  });
  auto* fetch = repo->add_subcommand("fetch", "Fetch models into the cache");
  addRepoOptions(fetch, true);
  fetch->callback([&] {
    action = [&] {
      ModelRepo r(manifest, cacheDir);
      std::vector<std::string> todo = names;
      if (todo.empty()) {
        for (const auto& e : r.entries()) todo.push_back(e.name);
      }
      for (const auto& n : todo) {
        FetchResult res = r.fetch(n);
        out << n << "\t" << res.path.string() << "\t"
            << (res.cacheHit ? "hit" : res.repaired ? "repaired" : "fetched") << "\n";
      }
    };
  });
  auto* verify = repo->add_subcommand("verify", "Re-hash cached models");
  addRepoOptions(verify, true);
  int verifyStatus = kExitOk;
  verify->callback([&] {
    action = [&] {
      ModelRepo r(manifest, cacheDir);
      std::vector<std::string> todo = names;
      if (todo.empty()) {
        for (const auto& e : r.entries()) todo.push_back(e.name);
      }
      for (const auto& n : todo) {
        r.entry(n);
        std::string state = "ok";
        try {
          r.checkCached(n);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::ChecksumMismatch && e.code() != ErrorCode::Io) throw;
          state = e.code() == ErrorCode::Io ? "missing" : "corrupt";
          if (e.code() == ErrorCode::ChecksumMismatch) verifyStatus = kExitExecution;
        }
        out << n << "\t" << state << "\n";
      }
    };
  });

  // gen-bindings
  auto* bindings = app.add_subcommand("gen-bindings", "Write the stage registry document");
  std::string bindingsOut;
  bindings->add_option("--out", bindingsOut, "Output directory")->required();
  bindings->callback([&] {
    action = [&] {
      const fs::path path = fs::path(bindingsOut) / "registry.json";
      writeText(path, builtinRegistry().document() + "\n");
      out << "wrote " << path.string() << " (" << builtinRegistry().names().size()
          << " stages)\n";
    };
  });

  // serve-rpc
  auto* serve = app.add_subcommand("serve-rpc", "Line-delimited JSON-RPC on stdin/stdout");
  int serveWorkers = 0;
  serve->add_option("--workers", serveWorkers, "Worker count (default: TUNDRA_WORKERS or cores)");
  serve->callback([&] {
    action = [&] {
      RpcServer server(makeEngine(serveWorkers));
      server.serve(in, out);
    };
  });

  // build-model
  auto* build = app.add_subcommand("build-model", "Write a deterministic network to disk");
  std::string buildKind = "reference", buildOut;
  uint64_t buildSeed = kRefSeed;
  build->add_option("--kind", buildKind)
      ->capture_default_str()
      ->check(CLI::IsMember({"reference", "tiny"}));
  build->add_option("--seed", buildSeed)->capture_default_str();
  build->add_option("--out", buildOut, "Manifest path; weights go next to it")->required();
  build->callback([&] {
    action = [&] {
      ComputationGraph g =
          buildKind == "tiny" ? buildTinyNetwork(buildSeed) : buildReferenceNetwork(buildSeed);
      if (fs::path(buildOut).has_parent_path()) fs::create_directories(fs::path(buildOut).parent_path());
      saveGraph(g, buildOut);
      out << "wrote " << buildOut << "\n";
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kExitOk : kExitValidation;
  }
  try {
    if (action) action();
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exitCodeFor(e);
  } catch (const fs::filesystem_error& e) {
    err << "error: Io: " << e.what() << "\n";
    return kExitExecution;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitExecution;
  }
  return verifyStatus;
}

}  // namespace tundra
