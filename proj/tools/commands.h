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

#ifndef D2PFED_TOOLS_COMMANDS_H_
#define D2PFED_TOOLS_COMMANDS_H_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "d2pfed/config.h"

namespace d2pfed::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Reals in CSV output: 17 significant digits, "inf"/"nan" spelled out.
std::string FormatReal(double x);

// Per-round CSV: round,epsilon,delta,loss,accuracy,bytes_per_client,mse_round.
// Accuracy is left empty for regression.
void CmdTrain(const ExperimentConfig& cfg, std::ostream& out);

struct MseBenchRow {
  int64_t d = 0;
  int64_t d_pad = 0;
  int64_t clients = 0;
  int64_t participants = 0;
  int64_t k = 0;
  int64_t q = 0;
  double gamma = 0;
  double g_max = 0;
  double sigma_units = 0;
  int64_t trials = 0;
  double empirical = 0;
  double std_error = 0;
  double bound = 0;  // NaN when the hypothesis fails
  // "", "exceeds" (empirical > bound + 3 SE) or "hypothesis".
  std::string flag;
};

std::vector<MseBenchRow> RunMseBench(const MseGridSpec& grid, uint64_t seed, int threads = 1);
void WriteMseBenchCsv(const std::vector<MseBenchRow>& rows, std::ostream& out);

// Summary row (epsilon,alpha_star,delta,rounds,sigma,sensitivity,gamma), a
// blank line, then the cumulative curve as alpha,rdp_epsilon.
void CmdAccountant(const ExperimentConfig& cfg, std::ostream& out);

// sample_count draws of N_Z(sample_sigma), one integer per line.
void CmdSample(const ExperimentConfig& cfg, std::ostream& out);

// Full command line (args[0] is the program name). Returns the exit code.
int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace d2pfed::cli

#endif  // D2PFED_TOOLS_COMMANDS_H_
