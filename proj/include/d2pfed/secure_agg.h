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

#ifndef D2PFED_SECURE_AGG_H_
#define D2PFED_SECURE_AGG_H_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "d2pfed/lattice.h"

namespace d2pfed {

// Everything here works in fine-lattice units (step / m) over the centered
// group of odd size Q, the wire modulus.

// Smallest odd integer >= m * (m * q): the per-client coarse group of size q
// expanded m-fold for the sum, in fine units.
int64_t WireModulus(const LatticeSpec& spec);

// Bits per transmitted coordinate, ceil(log2(m * q_fine + 1)) with
// q_fine = m * q. Always enough to hold a residue mod WireModulus(spec).
int BitsPerCoordinate(const LatticeSpec& spec);

// Mask u_ij that client `from` adds and client `to` subtracts.
struct PairwiseMask {
  int64_t from = 0;
  int64_t to = 0;
  LatticeVector values;
};

// One mask per ordered pair of distinct participants, each coordinate
// uniform over the centered residues mod Q and derived from
// (round_seed, from, to) so both endpoints reproduce it without key
// exchange. A single participant gets no masks. Throws InvalidArgument if Q
// is even or participants repeat.
std::vector<PairwiseMask> DeriveMasks(uint64_t round_seed,
                                      const std::vector<int64_t>& participants,
                                      Eigen::Index d_pad, int64_t Q);

// The masks client `id` adds (u_{id,j}) and subtracts (u_{j,id}).
struct ClientMasks {
  std::vector<LatticeVector> added;
  std::vector<LatticeVector> subtracted;
};
ClientMasks MasksFor(int64_t id, const std::vector<PairwiseMask>& masks);

struct NoiseShare {
  int64_t owner_rank = 0;
  LatticeVector share;
};

// Splits fine value v among m ranks: (v div m) + [rank < v mod m] with
// Euclidean div/mod, so the m shares sum to v exactly.
int64_t SplitShare(int64_t v, int64_t m, int64_t rank);

// Share of the coarse noise draw for `rank`: each coordinate z is embedded
// as z * m fine units and split with SplitShare.
NoiseShare SplitNoise(const LatticeVector& full_noise, int64_t m, int64_t rank);

struct MaskedUpdate {
  LatticeVector payload;
  // Size of the packed wire encoding.
  int64_t byte_len = 0;
};

// payload = wrap_Q(wrap_Q(noised) + sum(added) - sum(subtracted)).
MaskedUpdate MaskAndWrap(const LatticeVector& noised,
                         const std::vector<LatticeVector>& added,
                         const std::vector<LatticeVector>& subtracted, int64_t Q,
                         int bits_per_coordinate);

// Fixed-width little-endian bit packing of centered residues mod Q.
std::vector<uint8_t> PackPayload(const LatticeVector& payload, int64_t Q, int bits);
LatticeVector UnpackPayload(const std::vector<uint8_t>& bytes, Eigen::Index length,
                            int64_t Q, int bits);

struct AggregateResult {
  // Recentered sum of payloads mod Q, fine units.
  LatticeVector fine_sum;
  // fine_sum converted to real values and divided by m.
  Eigen::VectorXd mean;
};

// Sums payloads mod Q and recenters. Throws OverflowSuspected if a
// recentered coordinate exceeds plaintext_bound in magnitude.
AggregateResult ServerAggregate(const std::vector<LatticeVector>& payloads,
                                const LatticeSpec& spec, int64_t Q,
                                int64_t plaintext_bound);

}  // namespace d2pfed

#endif  // D2PFED_SECURE_AGG_H_
