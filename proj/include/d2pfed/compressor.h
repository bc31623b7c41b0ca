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

#ifndef D2PFED_COMPRESSOR_H_
#define D2PFED_COMPRESSOR_H_

#include <cstdint>

#include <Eigen/Core>

#include "d2pfed/lattice.h"
#include "d2pfed/random.h"

namespace d2pfed {

// Scales g down to l2 norm D when it is longer; returns g unchanged
// otherwise. Throws InvalidArgument if D <= 0.
Eigen::VectorXd Clip(const Eigen::VectorXd& g, double D);

// Smallest power of two >= d (and >= 1).
Eigen::Index PaddedDimension(Eigen::Index d);

inline bool IsPowerOfTwo(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place unnormalized fast Walsh-Hadamard transform. The length must be a
// power of two.
template <typename Derived>
void FastWalshHadamard(Eigen::MatrixBase<Derived>& v) {
  const Eigen::Index n = v.size();
  for (Eigen::Index h = 1; h < n; h *= 2) {
    for (Eigen::Index i = 0; i < n; i += 2 * h) {
      for (Eigen::Index j = i; j < i + h; ++j) {
        const typename Derived::Scalar a = v[j];
        const typename Derived::Scalar b = v[j + h];
        v[j] = a + b;
        v[j + h] = a - b;
      }
    }
  }
}

// Seed of the shared randomized Hadamard rotation R = H diag(xi) / sqrt(d_pad).
struct RotationSeed {
  uint64_t seed = 0;
  Eigen::Index d_pad = 1;
};

// The +-1 diagonal xi derived from the seed.
Eigen::VectorXd RotationSigns(const RotationSeed& rs);

// Zero-pads g to rs.d_pad and applies R. Throws InvalidArgument if d_pad is
// not a power of two or is shorter than g.
Eigen::VectorXd Rotate(const Eigen::VectorXd& g, const RotationSeed& rs);

// Applies R^T and keeps the first d coordinates.
Eigen::VectorXd Unrotate(const Eigen::VectorXd& v, const RotationSeed& rs,
                         Eigen::Index d);

// Coordinate bound 2 sqrt(log(2 n d_pad / delta)) D / sqrt(d_pad), capped at
// D (no rotated coordinate of a vector with norm <= D can exceed D).
double DefaultGMax(double D, int64_t n, Eigen::Index d_pad, double delta);

struct QuantizedUpdate {
  // Coarse lattice units in [-(k-1)/2, (k-1)/2].
  LatticeVector points;
  // Coordinates that the l-infinity clamp to [-g_max, g_max] changed.
  Eigen::Index clamped = 0;
};

// Stochastic k-level quantization onto b[r] = -g_max + r * step. A value in
// [b[r], b[r+1]] rounds up with probability (v - b[r]) / step, so the output
// is unbiased for inputs inside [-g_max, g_max]; values outside are clamped
// first.
QuantizedUpdate Quantize(const Eigen::VectorXd& v, const LatticeSpec& spec,
                         RandomStream& rng);

// l2 sensitivity of the quantized, clipped difference:
// 2 (D + sqrt(d) D / (k - 1)), which is 4D at k = sqrt(d) + 1.
double Sensitivity(double D, int64_t d, int64_t k);

}  // namespace d2pfed

#endif  // D2PFED_COMPRESSOR_H_
