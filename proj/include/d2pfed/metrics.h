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

#ifndef D2PFED_METRICS_H_
#define D2PFED_METRICS_H_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "d2pfed/protocol.h"

namespace d2pfed {

// How the standard normal CDF arguments of the overflow terms are scaled.
enum class PhiReading {
  kLiteral,      // Phi(n q), Phi(n (q - k - 1))
  kNoiseScaled,  // the same arguments divided by sigma'
  kConservative  // the larger of the two resulting bounds
};

struct MseBoundInputs {
  double d = 1;      // rotated (padded) dimension
  double n = 1;      // contributing clients
  double k = 3;      // quantization levels
  double q = 1;      // coarse per-client group size
  double sigma = 1;  // lattice units
  double gamma = 1;
  double g_max = 1;
};

// Smallest sigma' for which the bound applies, 1 / sqrt(2 pi).
double MinBoundSigma();

// Upper bound on E||g~ - g_bar||^2:
//   (1 - (1 - Phi(n q)) / (1 + 3 exp(-2 pi^2 sigma^2)))
//     * 4 d g_max^2 / (n (k - 1)^2) * (1/4 + sigma^2 / (gamma^2 n^2))
//   + (1 - Phi(n (q - k - 1))) q^2.
// Upper normal tails below 1e-300 count as 0. Throws HypothesisViolated if
// sigma < MinBoundSigma() and InvalidArgument on non-positive inputs.
double MseBound(const MseBoundInputs& in, PhiReading reading = PhiReading::kConservative);

// Bound inputs describing one protocol configuration (d = d_pad, n = m).
MseBoundInputs BoundInputsFor(const ProtocolParams& params);

struct MseEstimate {
  double mean = 0;
  double std_error = 0;
  int64_t trials = 0;
};

// Runs the aggregation pipeline `trials` times on the fixed updates with
// fresh quantizer, noise and mask randomness, and reports the mean squared
// l2 error against the exact mean of the clipped updates.
MseEstimate EmpiricalMse(int64_t trials, const ProtocolParams& params,
                         const std::vector<Eigen::VectorXd>& updates, uint64_t seed,
                         int threads = 1);

// Fixed per-client overhead for ids and seeds, outside the payload.
inline constexpr int64_t kHeaderBitsPerClient = 128;

struct CommCost {
  int64_t payload_bits_per_client = 0;  // d * ceil(log2(n q_wire + 1))
  int64_t header_bits_per_client = kHeaderBitsPerClient;
  int64_t total_bits = 0;               // n * (payload + header)

  int64_t payload_bytes_per_client() const { return (payload_bits_per_client + 7) / 8; }
};

// Per-round cost for n participants sending d coordinates each, q_wire
// being the per-client group size in fine units. Throws InvalidArgument
// unless all are >= 1.
CommCost ComputeCommCost(int64_t n, int64_t d, int64_t q_wire);

}  // namespace d2pfed

#endif  // D2PFED_METRICS_H_
