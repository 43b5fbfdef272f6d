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

#include "tundra/app/builtin.hpp"

#include "tundra/image/stages.hpp"
#include "tundra/learn/grouping.hpp"
#include "tundra/network/network_model.hpp"
#include "tundra/pipeline/utility_stages.hpp"

namespace tundra {

const StageRegistry& builtinRegistry() {
  static const StageRegistry registry = [] {
    StageRegistry r;
    registerUtilityStages(r);
    registerNetworkStages(r);
    registerImageStages(r);
    registerLearnerStages(r);
    return r;
  }();
  return registry;
}

}  // namespace tundra
