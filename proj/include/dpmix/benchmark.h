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

// The in-repo 3-state, 2-action, H = 5 benchmark, embedded as a tabular
// linear mixture MDP.  The same tables ship as data/benchmark_3s2a.json.
//
//   state 0 (start)  a0: slide into the trap, reward 0.0
//                    a1: climb to the good state, reward 0.5
//   state 1 (good)   a0: drift into the trap, reward 0.2
//                    a1: stay, reward 1.0
//   state 2 (trap)   a0: stay, reward 0.0
//                    a1: escape to the start, reward 0.2
//
// Action 0 is never better than action 1.  Lowest-index tie-breaking on a
// saturated optimistic Q therefore starts every greedy learner on the worst
// policy, and any step that leaves it lowers the regret.

#ifndef DPMIX_BENCHMARK_H_
#define DPMIX_BENCHMARK_H_

#include "dpmix/linmix_mdp.h"

namespace dpmix {

TabularTables benchmark_tables();
LinearMixtureMDP benchmark_mdp();

}  // namespace dpmix

#endif  // DPMIX_BENCHMARK_H_
