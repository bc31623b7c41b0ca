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

#include "d2pfed/metrics.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "d2pfed/discrete_gaussian.h"
#include "d2pfed/errors.h"
#include "d2pfed/random.h"
#include "parallel.h"

namespace d2pfed {

namespace {

// 1 - Phi(x), flushed to zero below 1e-300.
double UpperTail(double x) {
  const double t = NormalUpperTail(x);
  return t < 1e-300 ? 0.0 : t;
}

double BoundWithArgs(const MseBoundInputs& in, double phi_scale) {
  const double s2 = in.sigma * in.sigma;
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double shrink = 1.0 / (1.0 + 3.0 * std::exp(-2.0 * pi2 * s2));
  const double keep = 1.0 - shrink * UpperTail(in.n * in.q / phi_scale);
  const double km1 = in.k - 1;
  const double main = keep * (4.0 * in.d * in.g_max * in.g_max / (in.n * km1 * km1)) *
                      (0.25 + s2 / (in.gamma * in.gamma * in.n * in.n));
  const double overflow = UpperTail(in.n * (in.q - in.k - 1) / phi_scale) * in.q * in.q;
  return main + overflow;
}

}  // namespace

double MinBoundSigma() { return 1.0 / std::sqrt(2.0 * std::numbers::pi); }

double MseBound(const MseBoundInputs& in, PhiReading reading) {
  if (!(in.d > 0 && in.n > 0 && in.q > 0 && in.gamma > 0 && in.g_max > 0) || in.k < 2) {
    throw InvalidArgument("bound inputs must be positive with k >= 2");
  }
  if (!(in.sigma >= MinBoundSigma())) {
    std::ostringstream msg;
    msg << "sigma' = " << in.sigma << " is below 1/sqrt(2 pi)";
    throw HypothesisViolated(msg.str());
  }
  switch (reading) {
    case PhiReading::kLiteral: return BoundWithArgs(in, 1.0);
    case PhiReading::kNoiseScaled: return BoundWithArgs(in, in.sigma);
    case PhiReading::kConservative:
      return std::max(BoundWithArgs(in, 1.0), BoundWithArgs(in, in.sigma));
  }
  throw InvalidArgument("unknown reading");
}

MseBoundInputs BoundInputsFor(const ProtocolParams& params) {
  MseBoundInputs in;
  in.d = static_cast<double>(params.d_pad);
  in.n = static_cast<double>(params.participants);
  in.k = static_cast<double>(params.spec.k());
  in.q = static_cast<double>(params.spec.q());
  in.sigma = params.sigma_units;
  in.gamma = params.inputs.gamma;
  in.g_max = params.g_max;
  return in;
}

MseEstimate EmpiricalMse(int64_t trials, const ProtocolParams& params,
                         const std::vector<Eigen::VectorXd>& updates, uint64_t seed,
                         int threads) {
  if (trials < 1) throw InvalidArgument("trials must be >= 1");
  std::vector<int64_t> ids(updates.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int64_t>(i);
  std::vector<double> errors(static_cast<std::size_t>(trials));
  internal::ParallelFor(errors.size(), threads, [&](std::size_t t) {
    const uint64_t round_seed = DeriveSeed(seed, "mse-trial", {static_cast<uint64_t>(t)});
    const PipelineResult r = RunPipeline(updates, ids, params, round_seed);
    errors[t] = (r.aggregate - r.clipped_mean).squaredNorm();
  });
  MseEstimate est;
  est.trials = trials;
  for (double e : errors) est.mean += e;
  est.mean /= static_cast<double>(trials);
  if (trials > 1) {
    double ss = 0;
    for (double e : errors) ss += (e - est.mean) * (e - est.mean);
    est.std_error = std::sqrt(ss / static_cast<double>(trials - 1) / static_cast<double>(trials));
  }
  return est;
}

CommCost ComputeCommCost(int64_t n, int64_t d, int64_t q_wire) {
  if (n < 1 || d < 1 || q_wire < 1) throw InvalidArgument("comm cost inputs must be >= 1");
  // ceil(log2(x + 1)) is the bit width of x.
  const auto bits = static_cast<int64_t>(std::bit_width(static_cast<uint64_t>(n * q_wire)));
  CommCost c;
  c.payload_bits_per_client = d * bits;
  c.total_bits = n * (c.payload_bits_per_client + c.header_bits_per_client);
  return c;
}

}  // namespace d2pfed
