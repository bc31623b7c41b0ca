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

#include "d2pfed/secure_agg.h"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>

#include "d2pfed/errors.h"
#include "d2pfed/random.h"

namespace d2pfed {

int64_t WireModulus(const LatticeSpec& spec) {
  const int64_t m = spec.split_denominator();
  const int64_t q = m * m * spec.q();
  return q % 2 == 0 ? q + 1 : q;
}

int BitsPerCoordinate(const LatticeSpec& spec) {
  const int64_t m = spec.split_denominator();
  const auto levels = static_cast<uint64_t>(m * (m * spec.q()) + 1);
  return std::bit_width(levels - 1);
}

std::vector<PairwiseMask> DeriveMasks(uint64_t round_seed,
                                      const std::vector<int64_t>& participants,
                                      Eigen::Index d_pad, int64_t Q) {
  if (Q < 1 || Q % 2 == 0) throw InvalidArgument("wire modulus Q must be odd");
  if (std::set<int64_t>(participants.begin(), participants.end()).size() !=
      participants.size()) {
    throw InvalidArgument("participant ids must be distinct");
  }
  const int64_t half = (Q - 1) / 2;
  std::vector<PairwiseMask> masks;
  for (int64_t from : participants) {
    for (int64_t to : participants) {
      if (from == to) continue;
      RandomStream rng(DeriveSeed(round_seed, "pairwise-mask",
                                  {static_cast<uint64_t>(from),
                                   static_cast<uint64_t>(to)}));
      PairwiseMask mask{from, to, LatticeVector(d_pad)};
      for (Eigen::Index c = 0; c < d_pad; ++c) {
        mask.values[c] =
            static_cast<int64_t>(rng.UniformBelow(static_cast<uint64_t>(Q))) - half;
      }
      masks.push_back(std::move(mask));
    }
  }
  return masks;
}

ClientMasks MasksFor(int64_t id, const std::vector<PairwiseMask>& masks) {
  ClientMasks out;
  for (const auto& mask : masks) {
    if (mask.from == id) out.added.push_back(mask.values);
    if (mask.to == id) out.subtracted.push_back(mask.values);
  }
  return out;
}

int64_t SplitShare(int64_t v, int64_t m, int64_t rank) {
  if (m < 1) throw InvalidArgument("split denominator must be >= 1");
  if (rank < 0 || rank >= m) throw InvalidArgument("noise share rank out of range");
  return FloorDiv(v, m) + (rank < FloorMod(v, m) ? 1 : 0);
}

NoiseShare SplitNoise(const LatticeVector& full_noise, int64_t m, int64_t rank) {
  NoiseShare out{rank, LatticeVector(full_noise.size())};
  for (Eigen::Index c = 0; c < full_noise.size(); ++c) {
    out.share[c] = SplitShare(full_noise[c] * m, m, rank);
  }
  return out;
}

MaskedUpdate MaskAndWrap(const LatticeVector& noised,
                         const std::vector<LatticeVector>& added,
                         const std::vector<LatticeVector>& subtracted, int64_t Q,
                         int bits_per_coordinate) {
  LatticeVector acc = WrapCentered(noised, Q);
  for (const auto& u : added) acc = WrapCentered(acc + u, Q);
  for (const auto& u : subtracted) acc = WrapCentered(acc - u, Q);
  MaskedUpdate out;
  out.payload = std::move(acc);
  out.byte_len = static_cast<int64_t>(
      (out.payload.size() * bits_per_coordinate + 7) / 8);
  return out;
}

std::vector<uint8_t> PackPayload(const LatticeVector& payload, int64_t Q, int bits) {
  const int64_t half = (Q - 1) / 2;
  std::vector<uint8_t> bytes(
      static_cast<std::size_t>((payload.size() * bits + 7) / 8), 0);
  std::size_t bit = 0;
  for (Eigen::Index c = 0; c < payload.size(); ++c) {
    const auto residue = static_cast<uint64_t>(payload[c] + half);
    for (int b = 0; b < bits; ++b, ++bit) {
      if ((residue >> b) & 1) bytes[bit / 8] |= static_cast<uint8_t>(1u << (bit % 8));
    }
  }
  return bytes;
}

LatticeVector UnpackPayload(const std::vector<uint8_t>& bytes, Eigen::Index length,
                            int64_t Q, int bits) {
  if (static_cast<std::size_t>((length * bits + 7) / 8) != bytes.size()) {
    throw InvalidArgument("packed payload has the wrong size");
  }
  const int64_t half = (Q - 1) / 2;
  LatticeVector out(length);
  std::size_t bit = 0;
  for (Eigen::Index c = 0; c < length; ++c) {
    uint64_t residue = 0;
    for (int b = 0; b < bits; ++b, ++bit) {
      residue |= static_cast<uint64_t>((bytes[bit / 8] >> (bit % 8)) & 1) << b;
    }
    if (residue >= static_cast<uint64_t>(Q)) {
      throw InvalidArgument("packed residue outside the wire group");
    }
    out[c] = static_cast<int64_t>(residue) - half;
  }
  return out;
}

AggregateResult ServerAggregate(const std::vector<LatticeVector>& payloads,
                                const LatticeSpec& spec, int64_t Q,
                                int64_t plaintext_bound) {
  if (payloads.empty()) throw InvalidArgument("no payloads to aggregate");
  if (static_cast<int64_t>(payloads.size()) != spec.split_denominator()) {
    throw InvalidArgument("payload count must equal the split denominator m");
  }
  const Eigen::Index len = payloads.front().size();
  LatticeVector sum = LatticeVector::Zero(len);
  for (const auto& p : payloads) {
    if (p.size() != len) throw InvalidArgument("payload lengths differ");
    sum = WrapCentered(sum + p, Q);
  }
  for (Eigen::Index c = 0; c < len; ++c) {
    if (sum[c] > plaintext_bound || sum[c] < -plaintext_bound) {
      std::ostringstream msg;
      msg << "aggregate coordinate " << c << " = " << sum[c]
          << " exceeds the plaintext bound " << plaintext_bound;
      throw OverflowSuspected(msg.str());
    }
  }
  AggregateResult out;
  out.mean = sum.cast<double>() *
             (spec.fine_step() / static_cast<double>(spec.split_denominator()));
  out.fine_sum = std::move(sum);
  return out;
}

}  // namespace d2pfed
