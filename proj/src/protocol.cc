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

#include "d2pfed/protocol.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "d2pfed/compressor.h"
#include "d2pfed/discrete_gaussian.h"
#include "d2pfed/errors.h"
#include "d2pfed/random.h"
#include "d2pfed/secure_agg.h"
#include "parallel.h"

namespace d2pfed {

double ProtocolParams::effective_gamma() const {
  return static_cast<double>(participants) / static_cast<double>(inputs.n);
}

int64_t ParticipantCount(int64_t n, double gamma) {
  if (n < 1 || !(gamma > 0) || gamma > 1) {
    throw InvalidArgument("need n >= 1 and 0 < gamma <= 1");
  }
  const auto m = static_cast<int64_t>(std::floor(gamma * static_cast<double>(n) + 1e-9));
  if (m < 1) throw InvalidArgument("gamma * n must be at least 1");
  return m;
}

ProtocolParams MakeProtocolParams(const ProtocolInputs& in) {
  auto fail = [](const std::string& what) { throw ConfigError(what); };
  if (in.d < 1) fail("d must be positive");
  if (!(in.clip > 0)) fail("clip bound must be positive");
  if (in.k < 3 || in.k % 2 == 0) fail("k must be an odd integer >= 3");
  if (!(in.sigma >= 0) || !std::isfinite(in.sigma)) fail("sigma must be finite and >= 0");
  if (!(in.delta > 0 && in.delta < 1)) fail("delta must lie in (0, 1)");
  if (in.g_max < 0) fail("g_max must be >= 0");
  if (in.q != 0 && (in.q < in.k || in.q % 2 == 0)) fail("q must be odd and >= k");

  ProtocolParams p;
  p.inputs = in;
  try {
    p.participants = ParticipantCount(in.n, in.gamma);
  } catch (const InvalidArgument& e) {
    fail(e.what());
  }
  const int64_t m = p.participants;
  p.d_pad = PaddedDimension(in.d);
  p.g_max = in.g_max > 0 ? in.g_max : DefaultGMax(in.clip, in.n, p.d_pad, in.delta);
  const double step = 2 * p.g_max / static_cast<double>(in.k - 1);
  p.sigma_units = in.sigma / step;
  p.tail_units = in.sigma > 0 ? static_cast<int64_t>(std::ceil(kTailMultiplier * p.sigma_units)) : 0;

  // Two-sided noise room plus one unit of headroom, kept odd.
  int64_t q = in.q;
  if (q == 0) {
    q = in.k + 2 * p.tail_units + 1;
    if (q % 2 == 0) ++q;
  }
  try {
    p.spec = LatticeSpec(p.g_max, in.k, q, m);
  } catch (const InvalidArgument& e) {
    fail(e.what());
  }
  p.wire_modulus = WireModulus(p.spec);
  p.bits_per_coordinate = BitsPerCoordinate(p.spec);
  const int64_t h = p.spec.half_levels();
  p.plaintext_bound = std::min(m * (m * h + p.tail_units), (p.wire_modulus - 1) / 2);

  // The aggregate fails (wrap or diagnostic) once |nu| exceeds this many
  // coarse units in some coordinate.
  const int64_t noise_room = p.plaintext_bound / m - m * h;
  if (noise_room < 0) fail("q is too small to hold the sum of quantized updates");
  if (in.sigma > 0) {
    const DiscreteGaussian noise(in.sigma, step);
    p.overflow_probability = std::min(
        1.0, 2.0 * static_cast<double>(p.d_pad) * noise.TailBound(noise_room + 1).upper);
  }
  if (p.overflow_probability > kMaxOverflowProbability && !in.override_overflow_check) {
    std::ostringstream msg;
    msg << "per-round overflow probability " << p.overflow_probability << " exceeds "
        << kMaxOverflowProbability << "; raise q or pass --override-overflow-check";
    fail(msg.str());
  }
  p.sensitivity = Sensitivity(in.clip, p.d_pad, in.k);
  return p;
}

PipelineResult RunPipeline(const std::vector<Eigen::VectorXd>& updates,
                           const std::vector<int64_t>& ids, const ProtocolParams& params,
                           uint64_t round_seed, bool masked, int threads) {
  const int64_t m = params.participants;
  if (static_cast<int64_t>(updates.size()) != m || ids.size() != updates.size()) {
    throw InvalidArgument("need exactly one update and id per participant");
  }
  const Eigen::Index d = params.inputs.d;
  const RotationSeed rotation{DeriveSeed(round_seed, "rotation"), params.d_pad};
  const int64_t Q = params.wire_modulus;

  PipelineResult out;
  if (params.inputs.sigma > 0) {
    RandomStream noise_rng(DeriveSeed(round_seed, "noise"));
    out.noise = DiscreteGaussian(params.inputs.sigma, params.spec.step())
                    .SampleVector(params.d_pad, noise_rng);
  } else {
    out.noise = LatticeVector::Zero(params.d_pad);
  }
  const std::vector<PairwiseMask> masks =
      masked ? DeriveMasks(DeriveSeed(round_seed, "masks"), ids, params.d_pad, Q)
             : std::vector<PairwiseMask>{};

  std::vector<Eigen::VectorXd> clipped(updates.size());
  std::vector<LatticeVector> points(updates.size());
  std::vector<Eigen::Index> clamped(updates.size(), 0);
  out.payloads.resize(updates.size());
  out.byte_len.resize(updates.size());

  internal::ParallelFor(updates.size(), threads, [&](std::size_t r) {
    if (updates[r].size() != d) throw InvalidArgument("update has the wrong dimension");
    const auto id = static_cast<uint64_t>(ids[r]);
    clipped[r] = Clip(updates[r], params.inputs.clip);
    RandomStream qrng(DeriveSeed(round_seed, "quantize", {id}));
    QuantizedUpdate qu = Quantize(Rotate(clipped[r], rotation), params.spec, qrng);
    clamped[r] = qu.clamped;
    const NoiseShare share = SplitNoise(out.noise, m, static_cast<int64_t>(r));
    const LatticeVector noised = qu.points * m + share.share;
    points[r] = std::move(qu.points);
    MaskedUpdate mu = masked ? [&] {
      const ClientMasks cm = MasksFor(ids[r], masks);
      return MaskAndWrap(noised, cm.added, cm.subtracted, Q, params.bits_per_coordinate);
    }()
                             : MaskAndWrap(noised, {}, {}, Q, params.bits_per_coordinate);
    out.payloads[r] = std::move(mu.payload);
    out.byte_len[r] = mu.byte_len;
  });

  // Reductions in fixed rank order.
  out.clipped_mean = Eigen::VectorXd::Zero(d);
  out.quantized_sum = LatticeVector::Zero(params.d_pad);
  for (std::size_t r = 0; r < updates.size(); ++r) {
    out.clipped_mean += clipped[r];
    out.quantized_sum += points[r];
    out.clamped += clamped[r];
  }
  out.clipped_mean /= static_cast<double>(m);

  AggregateResult agg =
      ServerAggregate(out.payloads, params.spec, Q, params.plaintext_bound);
  out.fine_sum = std::move(agg.fine_sum);
  out.rotated_mean = std::move(agg.mean);
  out.aggregate = Unrotate(out.rotated_mean, rotation, d);
  return out;
}

}  // namespace d2pfed
