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

#ifndef D2PFED_PROTOCOL_H_
#define D2PFED_PROTOCOL_H_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "d2pfed/lattice.h"

namespace d2pfed {

// Tail multiplier: the group reserves ceil(kTailMultiplier * sigma') lattice
// units on each side for the noise.
inline constexpr double kTailMultiplier = 12.0;
// Largest tolerated per-round probability that the aggregate wraps.
inline constexpr double kMaxOverflowProbability = 1e-9;

// User-facing knobs of one compress -> noise -> mask round.
struct ProtocolInputs {
  Eigen::Index d = 1;    // model dimension
  int64_t n = 1;         // population size
  double gamma = 1.0;    // subsampling rate
  double clip = 1.0;     // l2 clip bound D
  int64_t k = 3;         // quantization levels (odd)
  int64_t q = 0;         // coarse per-client group size; 0 = automatic
  double sigma = 0.0;    // noise scale in real units; 0 disables noise
  double delta = 1e-5;   // used for the default g_max
  double g_max = 0.0;    // quantization range; 0 = automatic
  bool override_overflow_check = false;
};

// Everything derived from ProtocolInputs once, at validation time.
struct ProtocolParams {
  ProtocolInputs inputs;
  int64_t participants = 1;  // m = floor(gamma n)
  Eigen::Index d_pad = 1;
  double g_max = 0;
  LatticeSpec spec{1.0, 3, 1, 1};
  double sigma_units = 0;    // sigma' = sigma / step
  int64_t tail_units = 0;    // ceil(kTailMultiplier * sigma')
  int64_t wire_modulus = 1;  // Q
  int bits_per_coordinate = 1;
  int64_t plaintext_bound = 0;
  double overflow_probability = 0;
  double sensitivity = 0;    // real units

  // m / n, the realized sampling rate.
  double effective_gamma() const;
};

// Number of clients sampled per round, floor(gamma n) tolerant of decimal
// round-off. Throws InvalidArgument if it is below 1.
int64_t ParticipantCount(int64_t n, double gamma);

// Validates the inputs and derives the lattice and wire parameters. Throws
// ConfigError on invalid combinations, including an overflow probability
// above kMaxOverflowProbability unless the override is set.
ProtocolParams MakeProtocolParams(const ProtocolInputs& inputs);

struct PipelineResult {
  Eigen::VectorXd aggregate;     // unrotated mean update, length d
  Eigen::VectorXd rotated_mean;  // server output before unrotation
  LatticeVector fine_sum;
  LatticeVector noise;           // coarse nu
  LatticeVector quantized_sum;   // sum of coarse client points
  std::vector<LatticeVector> payloads;
  std::vector<int64_t> byte_len;
  Eigen::VectorXd clipped_mean;  // exact mean of clipped inputs, length d
  Eigen::Index clamped = 0;
};

// Runs one round for the given client updates (one per participant id, in
// rank order). With masked = false the pairwise masks are skipped; the
// aggregate is unchanged. threads > 1 processes clients concurrently with
// identical results.
PipelineResult RunPipeline(const std::vector<Eigen::VectorXd>& updates,
                           const std::vector<int64_t>& ids, const ProtocolParams& params,
                           uint64_t round_seed, bool masked = true, int threads = 1);

}  // namespace d2pfed

#endif  // D2PFED_PROTOCOL_H_
