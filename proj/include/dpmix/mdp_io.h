//
// Copyright 2026 The dpmix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// JSON documents describing MDP instances.
//
// Tabular:
//   {"S":3,"A":2,"H":5,"kind":"tabular","initial_state":0,
//    "P":[h][s][a][s'], "R":[h][s][a]}
// Mixture:
//   {"S":..,"A":..,"H":..,"kind":"mixture","initial_state":0,
//    "psi":[s][a][s'][d1], "varphi":[s][a][d2],
//    "theta_p":[h][d1], "theta_r":[h][d2]}
// "initial_state" is optional and defaults to 0.

#ifndef DPMIX_MDP_IO_H_
#define DPMIX_MDP_IO_H_

#include <filesystem>

#include <json.hpp>

#include "dpmix/linmix_mdp.h"

namespace dpmix {

// Throws DomainError on malformed documents or invalid MDPs.
LinearMixtureMDP mdp_from_json(const nlohmann::json& doc);
LinearMixtureMDP load_mdp(const std::filesystem::path& path);

// Always emits the "mixture" kind.
nlohmann::json mdp_to_json(const LinearMixtureMDP& mdp);

}  // namespace dpmix

#endif  // DPMIX_MDP_IO_H_
