// Copyright 2026 The D2P-Fed Authors.
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

#include "d2pfed/config.h"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "d2pfed/errors.h"

namespace d2pfed {

namespace {

namespace pt = boost::property_tree;

template <typename T>
T ParseScalar(const std::string& key, const std::string& text) {
  std::istringstream in(text);
  T value{};
  in >> value;
  if (!in || !(in >> std::ws).eof()) {
    throw ConfigError("bad value '" + text + "' for " + key);
  }
  return value;
}

template <>
bool ParseScalar<bool>(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("bad boolean '" + text + "' for " + key);
}

template <typename T>
std::vector<T> ParseList(const std::string& key, const std::string& text) {
  std::vector<T> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) continue;
    out.push_back(ParseScalar<T>(key, item.substr(first, last - first + 1)));
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string&)>;

#define D2PFED_FIELD(expr, type)                                             \
  [](ExperimentConfig& c, const std::string& k, const std::string& v) {     \
    expr = ParseScalar<type>(k, v);                                          \
  }
#define D2PFED_LIST(expr, type)                                              \
  [](ExperimentConfig& c, const std::string& k, const std::string& v) {     \
    expr = ParseList<type>(k, v);                                            \
  }

const std::map<std::string, Setter>& Setters() {
  static const std::map<std::string, Setter> table = {
      {"federation.clients", D2PFED_FIELD(c.round.n, int64_t)},
      {"federation.gamma", D2PFED_FIELD(c.round.gamma, double)},
      {"federation.rounds", D2PFED_FIELD(c.round.rounds, int64_t)},
      {"federation.seed", D2PFED_FIELD(c.round.seed, uint64_t)},
      {"federation.threads", D2PFED_FIELD(c.threads, int)},
      {"protocol.clip", D2PFED_FIELD(c.round.clip, double)},
      {"protocol.levels", D2PFED_FIELD(c.round.k, int64_t)},
      {"protocol.group_size", D2PFED_FIELD(c.round.q, int64_t)},
      {"protocol.sigma", D2PFED_FIELD(c.round.sigma, double)},
      {"protocol.target_epsilon", D2PFED_FIELD(c.target_epsilon, double)},
      {"protocol.delta", D2PFED_FIELD(c.round.delta, double)},
      {"protocol.g_max", D2PFED_FIELD(c.round.g_max, double)},
      {"protocol.override_overflow_check",
       D2PFED_FIELD(c.round.override_overflow_check, bool)},
      {"local.steps", D2PFED_FIELD(c.round.local.steps, int64_t)},
      {"local.learning_rate", D2PFED_FIELD(c.round.local.learning_rate, double)},
      {"local.batch_size", D2PFED_FIELD(c.round.local.batch_size, int64_t)},
      {"data.task",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         try {
           c.round.data.task = ParseTaskKind(v);
         } catch (const InvalidArgument& e) {
           throw ConfigError(e.what());
         }
       }},
      {"data.dim", D2PFED_FIELD(c.round.data.dim, Eigen::Index)},
      {"data.samples_per_client", D2PFED_FIELD(c.round.data.samples_per_client, int64_t)},
      {"data.test_samples", D2PFED_FIELD(c.round.data.test_samples, int64_t)},
      {"data.partition",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.round.data.partition = ParsePartition(v);
       }},
      {"data.separation", D2PFED_FIELD(c.round.data.separation, double)},
      {"data.noise", D2PFED_FIELD(c.round.data.noise, double)},
      {"output.transcript",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.transcript_path = v;
       }},
      {"mse.dims", D2PFED_LIST(c.mse.dims, int64_t)},
      {"mse.clients", D2PFED_LIST(c.mse.populations, int64_t)},
      {"mse.sigma_units", D2PFED_LIST(c.mse.sigma_units, double)},
      {"mse.levels", D2PFED_LIST(c.mse.levels, int64_t)},
      {"mse.gamma", D2PFED_FIELD(c.mse.gamma, double)},
      {"mse.clip", D2PFED_FIELD(c.mse.clip, double)},
      {"mse.trials", D2PFED_FIELD(c.mse.trials, int64_t)},
      {"mse.reading",
       [](ExperimentConfig& c, const std::string&, const std::string& v) {
         c.mse.reading = ParsePhiReading(v);
       }},
      {"sample.sigma", D2PFED_FIELD(c.sample_sigma, double)},
      {"sample.count", D2PFED_FIELD(c.sample_count, int64_t)},
  };
  return table;
}

#undef D2PFED_FIELD
#undef D2PFED_LIST

}  // namespace

PhiReading ParsePhiReading(const std::string& name) {
  if (name == "literal") return PhiReading::kLiteral;
  if (name == "noise-scaled") return PhiReading::kNoiseScaled;
  if (name == "conservative") return PhiReading::kConservative;
  throw ConfigError("unknown bound reading '" + name + "'");
}

Partition ParsePartition(const std::string& name) {
  if (name == "iid") return Partition::kIid;
  if (name == "by-label") return Partition::kByLabel;
  throw ConfigError("unknown partition '" + name + "'");
}

ExperimentConfig ParseConfig(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.message() + " at line " +
                      std::to_string(e.line()));
  }
  ExperimentConfig cfg;
  const auto& setters = Setters();
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("key '" + section + "' must sit inside a section");
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const auto it = setters.find(full);
      if (it == setters.end()) throw ConfigError("unknown config key '" + full + "'");
      it->second(cfg, full, value.data());
    }
  }
  return cfg;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  try {
    return ParseConfig(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

}  // namespace d2pfed
