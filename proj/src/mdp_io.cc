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

#include "dpmix/mdp_io.h"

#include <fstream>
#include <string>

#include "dpmix/errors.h"

namespace dpmix {
namespace {

using nlohmann::json;

const json& Field(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw DomainError(std::string("missing field \"") + key + "\"");
  return *it;
}

int PositiveInt(const json& doc, const char* key) {
  const json& v = Field(doc, key);
  if (!v.is_number_integer() || v.get<long long>() < 1) {
    throw DomainError(std::string("field \"") + key + "\" must be a positive integer");
  }
  return v.get<int>();
}

void ExpectArray(const json& v, std::size_t n, const std::string& what) {
  if (!v.is_array() || v.size() != n) {
    throw DomainError(what + " must be an array of length " + std::to_string(n));
  }
}

VectorXd ToVector(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) throw DomainError(what + " must be a non-empty array");
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) throw DomainError(what + " must contain numbers");
    out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
  }
  return out;
}

LinearMixtureMDP FromJsonUnchecked(const json& doc) {
  if (!doc.is_object()) throw DomainError("MDP document must be a JSON object");
  const int num_states = PositiveInt(doc, "S");
  const int num_actions = PositiveInt(doc, "A");
  const int horizon = PositiveInt(doc, "H");
  const int initial_state = doc.value("initial_state", 0);
  const std::string kind = Field(doc, "kind").get<std::string>();
  const auto ns = static_cast<std::size_t>(num_states);
  const auto na = static_cast<std::size_t>(num_actions);
  const auto nh = static_cast<std::size_t>(horizon);

  if (kind == "tabular") {
    const json& p = Field(doc, "P");
    const json& r = Field(doc, "R");
    ExpectArray(p, nh, "P");
    ExpectArray(r, nh, "R");
    TabularTables tables;
    for (std::size_t h = 0; h < nh; ++h) {
      MatrixXd ph(num_states * num_actions, num_states);
      MatrixXd rh(num_states, num_actions);
      ExpectArray(p[h], ns, "P[h]");
      ExpectArray(r[h], ns, "R[h]");
      for (std::size_t s = 0; s < ns; ++s) {
        ExpectArray(p[h][s], na, "P[h][s]");
        ExpectArray(r[h][s], na, "R[h][s]");
        for (std::size_t a = 0; a < na; ++a) {
          ExpectArray(p[h][s][a], ns, "P[h][s][a]");
          ph.row(static_cast<Eigen::Index>(s * na + a)) =
              ToVector(p[h][s][a], "P[h][s][a]").transpose();
          rh(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(a)) =
              r[h][s][a].get<double>();
        }
      }
      tables.transitions.push_back(std::move(ph));
      tables.rewards.push_back(std::move(rh));
    }
    return make_tabular_mixture(num_states, num_actions, tables, initial_state);
  }

  if (kind == "mixture") {
    const json& psi = Field(doc, "psi");
    const json& varphi = Field(doc, "varphi");
    ExpectArray(psi, ns, "psi");
    ExpectArray(varphi, ns, "varphi");
    const VectorXd first_psi = ToVector(psi.at(0).at(0).at(0), "psi[s][a][s']");
    const VectorXd first_varphi = ToVector(varphi.at(0).at(0), "varphi[s][a]");
    MatrixXd psi_m(num_states * num_actions * num_states, first_psi.size());
    MatrixXd varphi_m(num_states * num_actions, first_varphi.size());
    for (std::size_t s = 0; s < ns; ++s) {
      ExpectArray(psi[s], na, "psi[s]");
      ExpectArray(varphi[s], na, "varphi[s]");
      for (std::size_t a = 0; a < na; ++a) {
        ExpectArray(psi[s][a], ns, "psi[s][a]");
        ExpectArray(varphi[s][a], static_cast<std::size_t>(first_varphi.size()), "varphi[s][a]");
        varphi_m.row(static_cast<Eigen::Index>(s * na + a)) =
            ToVector(varphi[s][a], "varphi[s][a]").transpose();
        for (std::size_t s2 = 0; s2 < ns; ++s2) {
          ExpectArray(psi[s][a][s2], static_cast<std::size_t>(first_psi.size()), "psi[s][a][s']");
          psi_m.row(static_cast<Eigen::Index>((s * na + a) * ns + s2)) =
              ToVector(psi[s][a][s2], "psi[s][a][s']").transpose();
        }
      }
    }
    const json& tp = Field(doc, "theta_p");
    const json& tr = Field(doc, "theta_r");
    ExpectArray(tp, nh, "theta_p");
    ExpectArray(tr, nh, "theta_r");
    std::vector<VectorXd> theta_p;
    std::vector<VectorXd> theta_r;
    for (std::size_t h = 0; h < nh; ++h) {
      theta_p.push_back(ToVector(tp[h], "theta_p[h]"));
      theta_r.push_back(ToVector(tr[h], "theta_r[h]"));
    }
    return LinearMixtureMDP(num_states, num_actions, horizon, std::move(psi_m),
                            std::move(varphi_m), std::move(theta_p),
                            std::move(theta_r), initial_state);
  }
  throw DomainError("unknown MDP kind \"" + kind + "\"");
}

}  // namespace

LinearMixtureMDP mdp_from_json(const json& doc) {
  try {
    return FromJsonUnchecked(doc);
  } catch (const json::exception& e) {
    throw DomainError(std::string("malformed MDP document: ") + e.what());
  }
}

LinearMixtureMDP load_mdp(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open MDP file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw DomainError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return mdp_from_json(doc);
}

json mdp_to_json(const LinearMixtureMDP& mdp) {
  const int ns = mdp.num_states();
  const int na = mdp.num_actions();
  json psi = json::array();
  json varphi = json::array();
  for (int s = 0; s < ns; ++s) {
    json psi_s = json::array();
    json varphi_s = json::array();
    for (int a = 0; a < na; ++a) {
      json psi_sa = json::array();
      for (int s2 = 0; s2 < ns; ++s2) {
        auto row = mdp.psi_row(s, a, s2);
        psi_sa.push_back(std::vector<double>(row.begin(), row.end()));
      }
      psi_s.push_back(std::move(psi_sa));
      auto vrow = mdp.varphi_row(s, a);
      varphi_s.push_back(std::vector<double>(vrow.begin(), vrow.end()));
    }
    psi.push_back(std::move(psi_s));
    varphi.push_back(std::move(varphi_s));
  }
  json theta_p = json::array();
  json theta_r = json::array();
  for (int h = 0; h < mdp.horizon(); ++h) {
    const VectorXd& p = mdp.theta_p(h);
    const VectorXd& r = mdp.theta_r(h);
    theta_p.push_back(std::vector<double>(p.begin(), p.end()));
    theta_r.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return json{{"S", ns},          {"A", na},
              {"H", mdp.horizon()}, {"kind", "mixture"},
              {"initial_state", mdp.initial_state()},
              {"psi", psi},       {"varphi", varphi},
              {"theta_p", theta_p}, {"theta_r", theta_r}};
}

}  // namespace dpmix
