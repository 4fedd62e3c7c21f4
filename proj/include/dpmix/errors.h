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

#ifndef DPMIX_ERRORS_H_
#define DPMIX_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dpmix {

// Index outside the state/action/step range of an MDP.
class IndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Argument outside its mathematical domain (invalid tables, negative
// epsilon, value vectors outside [0, H], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Episode protocol violated: double ingest, release past the ingested count.
class ProtocolError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Matrix was not positive definite even after the jitter retry.
class SingularityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by the agents when an episode fails; carries the 1-based episode.
class EpisodeError : public std::runtime_error {
 public:
  EpisodeError(int episode, const std::string& what)
      : std::runtime_error("episode " + std::to_string(episode) + ": " + what),
        episode_(episode) {}
  int episode() const { return episode_; }

 private:
  int episode_;
};

}  // namespace dpmix

#endif  // DPMIX_ERRORS_H_
