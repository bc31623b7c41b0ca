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

#include "d2pfed/compressor.h"

#include <algorithm>
#include <cmath>

#include "d2pfed/errors.h"

namespace d2pfed {

Eigen::VectorXd Clip(const Eigen::VectorXd& g, double D) {
  if (!(D > 0)) throw InvalidArgument("clip bound D must be positive");
  const double norm = g.norm();
  if (norm <= D) return g;
  return g / (norm / D);
}

Eigen::Index PaddedDimension(Eigen::Index d) {
  Eigen::Index p = 1;
  while (p < d) p *= 2;
  return p;
}

Eigen::VectorXd RotationSigns(const RotationSeed& rs) {
  RandomStream rng(rs.seed);
  Eigen::VectorXd signs(rs.d_pad);
  uint64_t bits = 0;
  for (Eigen::Index i = 0; i < rs.d_pad; ++i) {
    if (i % 64 == 0) bits = rng.Next();
    signs[i] = (bits & 1) ? -1.0 : 1.0;
    bits >>= 1;
  }
  return signs;
}

namespace {

void CheckRotation(const RotationSeed& rs, Eigen::Index d) {
  if (!IsPowerOfTwo(rs.d_pad)) {
    throw InvalidArgument("rotation dimension must be a power of two");
  }
  if (rs.d_pad < d) throw InvalidArgument("rotation dimension shorter than input");
}

}  // namespace

Eigen::VectorXd Rotate(const Eigen::VectorXd& g, const RotationSeed& rs) {
  CheckRotation(rs, g.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(rs.d_pad);
  v.head(g.size()) = g;
  v.array() *= RotationSigns(rs).array();
  FastWalshHadamard(v);
  v /= std::sqrt(static_cast<double>(rs.d_pad));
  return v;
}

Eigen::VectorXd Unrotate(const Eigen::VectorXd& v, const RotationSeed& rs,
                         Eigen::Index d) {
  CheckRotation(rs, d);
  if (v.size() != rs.d_pad) throw InvalidArgument("rotated vector has wrong length");
  Eigen::VectorXd u = v;
  FastWalshHadamard(u);
  u /= std::sqrt(static_cast<double>(rs.d_pad));
  u.array() *= RotationSigns(rs).array();
  return u.head(d);
}

double DefaultGMax(double D, int64_t n, Eigen::Index d_pad, double delta) {
  if (!(D > 0) || n < 1 || d_pad < 1 || !(delta > 0 && delta < 1)) {
    throw InvalidArgument("DefaultGMax: invalid arguments");
  }
  const double d = static_cast<double>(d_pad);
  const double g =
      2.0 * std::sqrt(std::log(2.0 * static_cast<double>(n) * d / delta)) * D /
      std::sqrt(d);
  return std::min(D, g);
}

QuantizedUpdate Quantize(const Eigen::VectorXd& v, const LatticeSpec& spec,
                         RandomStream& rng) {
  const double g_max = spec.g_max();
  const double step = spec.step();
  const int64_t top = spec.k() - 1;
  QuantizedUpdate out;
  out.points.resize(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    double x = v[j];
    if (x > g_max || x < -g_max) {
      x = std::clamp(x, -g_max, g_max);
      ++out.clamped;
    }
    double pos = (x + g_max) / step;
    const double nearest = std::nearbyint(pos);
    if (std::abs(pos - nearest) < 1e-12 * std::max(1.0, nearest)) pos = nearest;
    auto level = std::min(static_cast<int64_t>(std::floor(pos)), top - 1);
    const double up = pos - static_cast<double>(level);
    if (rng.UniformDouble() < up) ++level;
    out.points[j] = level - spec.half_levels();
  }
  return out;
}

double Sensitivity(double D, int64_t d, int64_t k) {
  if (!(D > 0) || d < 1 || k < 2) throw InvalidArgument("Sensitivity: invalid arguments");
  return 2.0 * (D + std::sqrt(static_cast<double>(d)) * D / static_cast<double>(k - 1));
}

}  // namespace d2pfed
