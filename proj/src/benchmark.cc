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

#include "dpmix/benchmark.h"

namespace dpmix {
namespace {

constexpr int kStates = 3;
constexpr int kActions = 2;
constexpr int kHorizon = 5;

}  // namespace

TabularTables benchmark_tables() {
  MatrixXd p(kStates * kActions, kStates);
  // clang-format off
  p << 0.1, 0.0, 0.9,   // s0 a0: slide into the trap
       0.1, 0.9, 0.0,   // s0 a1: climb to the good state
       0.1, 0.2, 0.7,   // s1 a0: drift into the trap
       0.1, 0.9, 0.0,   // s1 a1: stay
       0.1, 0.0, 0.9,   // s2 a0: stay trapped
       0.8, 0.0, 0.2;   // s2 a1: escape to the start
  MatrixXd r(kStates, kActions);
  r << 0.0, 0.5,
       0.2, 1.0,
       0.0, 0.2;
  // clang-format on
  TabularTables tables;
  tables.transitions.assign(kHorizon, p);
  tables.rewards.assign(kHorizon, r);
  return tables;
}

LinearMixtureMDP benchmark_mdp() {
  return make_tabular_mixture(kStates, kActions, benchmark_tables(), 0);
}

}  // namespace dpmix
