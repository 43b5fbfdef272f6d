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

#include "tundra/app/rpc.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "tundra/app/builtin.hpp"
#include "tundra/app/row_json.hpp"
#include "tundra/dataframe/text_format.hpp"
#include "tundra/image/reader.hpp"
#include "tundra/pipeline/serialize.hpp"

namespace tundra {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

Error badRequest(const std::string& message) { return Error(ErrorCode::BadRequest, message); }

std::string requireString(const json& params, const char* key) {
  auto it = params.find(key);
  if (it == params.end() || !it->is_string()) {
    throw badRequest(std::string("missing string param '") + key + "'");
  }
  return it->get<std::string>();
}

std::optional<int> optionalInt(const json& params, const char* key) {
  auto it = params.find(key);
  if (it == params.end() || it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) throw badRequest(std::string("param '") + key + "' must be an integer");
  return it->get<int>();
}

ojson errorBody(std::string_view code, const std::string& message) {
  return ojson{{"code", std::string(code)}, {"message", message}};
}

}  // namespace

RpcServer::RpcServer(std::shared_ptr<Engine> engine, const StageRegistry& registry)
    : engine_(std::move(engine)), registry_(registry) {}

RpcServer::RpcServer(std::shared_ptr<Engine> engine)
    : RpcServer(std::move(engine), builtinRegistry()) {}

std::string RpcServer::putStage(StagePtr stage) {
  std::string h = "stage-" + std::to_string(nextId_++);
  stages_.emplace(h, std::move(stage));
  return h;
}

std::string RpcServer::putData(Dataset ds) {
  std::string h = "data-" + std::to_string(nextId_++);
  datasets_.emplace(h, std::move(ds));
  return h;
}

const StagePtr& RpcServer::stage(const json& params, const char* key) const {
  const std::string h = requireString(params, key);
  auto it = stages_.find(h);
  if (it == stages_.end()) throw badRequest("unknown stage handle '" + h + "'");
  return it->second;
}

const Dataset& RpcServer::data(const json& params, const char* key) const {
  const std::string h = requireString(params, key);
  auto it = datasets_.find(h);
  if (it == datasets_.end()) throw badRequest("unknown data handle '" + h + "'");
  return it->second;
}

ojson RpcServer::describeStage(const std::string& handle) const {
  const StagePtr& s = stages_.at(handle);
  return ojson{{"handle", handle},
               {"stageName", s->stageName()},
               {"kind", std::string(stageKindName(s->kind()))},
               {"params", paramsToJson(s->params())}};
}

ojson RpcServer::dispatch(const std::string& method, const json& params) {
  if (method == "describeStages") {
    return ojson::parse(registry_.document());
  }
  if (method == "createStage") {
    const std::string name = requireString(params, "stageName");
    ParamMap p;
    if (auto it = params.find("params"); it != params.end()) {
      p = paramsFromJson(*it, registry_.describe(name));
    }
    return describeStage(putStage(registry_.create(name, p)));
  }
  if (method == "setParams") {
    const StagePtr& s = stage(params, "handle");
    if (!params.contains("params")) throw badRequest("missing param 'params'");
    return describeStage(putStage(s->withParams(paramsFromJson(params["params"], s->descriptor()))));
  }
  if (method == "getParams") {
    stage(params, "handle");
    return describeStage(params["handle"].get<std::string>());
  }
  if (method == "fit") {
    const StagePtr& s = stage(params, "handle");
    const Dataset& ds = data(params, "data");
    auto est = std::dynamic_pointer_cast<Estimator>(s);
    if (!est) throw Error(ErrorCode::InvalidArgument, s->stageName() + " is not an estimator");
    return describeStage(putStage(est->fit(ds)));
  }
  if (method == "transform") {
    const StagePtr& s = stage(params, "handle");
    const Dataset& ds = data(params, "data");
    auto tr = std::dynamic_pointer_cast<Transformer>(s);
    if (!tr) throw Error(ErrorCode::InvalidArgument, s->stageName() + " must be fit first");
    Dataset out = tr->transform(ds);
    ojson schema = schemaToJson(out.schema());
    return ojson{{"data", putData(std::move(out))}, {"schema", std::move(schema)}};
  }
  if (method == "readImages" || method == "readTable") {
    const std::string path = requireString(params, method == "readImages" ? "dir" : "path");
    const auto parts = optionalInt(params, "partitions");
    Dataset ds;
    if (method == "readImages") {
      ds = readImages(engine_, path, parts);
    } else {
      std::ifstream in(path, std::ios::binary);
      if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
      TextTable t = readTextTable(in);
      ds = Dataset::fromRows(engine_, std::move(t.rows), std::move(t.schema), parts);
    }
    ojson schema = schemaToJson(ds.schema());
    return ojson{{"data", putData(std::move(ds))}, {"schema", std::move(schema)}};
  }
  if (method == "count") {
    return ojson{{"count", data(params, "data").count()}};
  }
  if (method == "collect") {
    const Dataset& ds = data(params, "data");
    const auto limit = optionalInt(params, "limit");
    if (limit && *limit < 0) throw badRequest("limit must be >= 0");
    std::vector<Row> rows = ds.collect();
    if (limit && rows.size() > static_cast<size_t>(*limit)) rows.resize(*limit);
    return ojson{{"schema", schemaToJson(ds.schema())}, {"rows", rowsToJson(rows)}};
  }
  if (method == "savePipeline") {
    auto it = params.find("handles");
    if (it == params.end() || !it->is_array()) throw badRequest("missing array param 'handles'");
    const std::string path = requireString(params, "path");
    std::vector<StagePtr> stages;
    for (const auto& h : *it) {
      stages.push_back(stage(json{{"handle", h}}, "handle"));
    }
    if (stages.empty()) throw Error(ErrorCode::EmptyPipeline, "no stages to save");
    const bool fitted = std::all_of(stages.begin(), stages.end(), [](const StagePtr& s) {
      return std::dynamic_pointer_cast<Transformer>(s) != nullptr;
    });
    if (fitted) {
      std::vector<TransformerPtr> ts;
      for (const auto& s : stages) ts.push_back(std::dynamic_pointer_cast<Transformer>(s));
      savePipelineModel(PipelineModel(std::move(ts)), path);
    } else {
      std::ofstream out(path, std::ios::binary);
      out << pipelineSpecJson(stages) << "\n";
      if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
    }
    return ojson{{"path", path}, {"fitted", fitted}};
  }
  if (method == "shutdown") {
    shutdown_ = true;
    return ojson::object();
  }
  throw badRequest("unknown method '" + method + "'");
}

std::string RpcServer::handle(std::string_view line) {
  ojson response;
  json id = nullptr;
  try {
    json req;
    try {
      req = json::parse(line);
    } catch (const json::exception& e) {
      throw badRequest(std::string("malformed request: ") + e.what());
    }
    if (!req.is_object()) throw badRequest("request must be an object");
    auto idIt = req.find("id");
    if (idIt == req.end() || !idIt->is_number_integer()) throw badRequest("request needs an integer id");
    id = *idIt;
    auto m = req.find("method");
    if (m == req.end() || !m->is_string()) throw badRequest("request needs a method");
    json params = req.value("params", json::object());
    if (!params.is_object()) throw badRequest("params must be an object");
    ojson result = dispatch(m->get<std::string>(), params);
    response = ojson{{"id", id}, {"ok", true}, {"result", std::move(result)}};
  } catch (const Error& e) {
    response = ojson{{"id", id}, {"ok", false}, {"error", errorBody(e.codeName(), e.what())}};
  } catch (const json::exception& e) {
    response = ojson{{"id", id}, {"ok", false}, {"error", errorBody("BadRequest", e.what())}};
  } catch (const std::exception& e) {
    response = ojson{{"id", id}, {"ok", false}, {"error", errorBody("InvalidArgument", e.what())}};
  }
  return response.dump(-1, ' ', false, json::error_handler_t::replace);
}

int64_t RpcServer::serve(std::istream& in, std::ostream& out) {
  int64_t n = 0;
  std::string line;
  while (!shutdown_ && std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out << handle(line) << "\n";
    out.flush();
    ++n;
  }
  return n;
}

}  // namespace tundra
