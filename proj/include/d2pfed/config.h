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

#ifndef D2PFED_CONFIG_H_
#define D2PFED_CONFIG_H_

#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "d2pfed/fed_sim.h"
#include "d2pfed/metrics.h"

namespace d2pfed {

// Cartesian grid swept by the mse-bench command.
struct MseGridSpec {
  std::vector<int64_t> dims{16, 256};
  std::vector<int64_t> populations{20, 100};
  std::vector<double> sigma_units{0.5, 2.0, 8.0};
  // Quantization levels; empty picks the smallest odd k >= sqrt(d_pad) + 1.
  std::vector<int64_t> levels;
  double gamma = 0.1;
  double clip = 1.0;
  int64_t trials = 1000;
  PhiReading reading = PhiReading::kConservative;
};

struct ExperimentConfig {
  RoundConfig round;
  // When positive, sigma is calibrated so the run reports this epsilon.
  double target_epsilon = 0;
  int threads = 1;
  // Optional per-round payload dump written by train.
  std::string transcript_path;
  MseGridSpec mse;
  double sample_sigma = 1.0;  // lattice units
  int64_t sample_count = 1000;
};

// Parses "[section]" / "key = value" text. Unknown sections or keys and
// malformed values raise ConfigError.
ExperimentConfig ParseConfig(std::istream& in);
// Reads and parses a file; ConfigError names the path if it cannot be read.
ExperimentConfig LoadConfig(const std::string& path);

PhiReading ParsePhiReading(const std::string& name);
Partition ParsePartition(const std::string& name);

}  // namespace d2pfed

#endif  // D2PFED_CONFIG_H_
