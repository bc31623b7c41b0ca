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

#include "d2pfed/lattice.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "d2pfed/errors.h"

namespace d2pfed {

namespace {

// Headroom for sums of up to m wire payloads plus masks.
constexpr int64_t kMaxWireMagnitude = int64_t{1} << 60;

}  // namespace

LatticeSpec::LatticeSpec(double g_max, int64_t k, int64_t q,
                         int64_t split_denominator)
    : g_max_(g_max), k_(k), q_(q), m_(split_denominator) {
  if (!(g_max > 0) || !std::isfinite(g_max)) {
    throw InvalidArgument("g_max must be positive and finite");
  }
  if (k < 2 || k % 2 == 0) {
    throw InvalidArgument("k must be an odd integer >= 3 so that every "
                          "quantization level lies on the lattice");
  }
  if (q < 1 || q % 2 == 0) throw InvalidArgument("q must be a positive odd integer");
  if (m_ < 1) throw InvalidArgument("split denominator must be >= 1");
  const __int128 wire = static_cast<__int128>(q) * m_ * m_;
  if (wire >= kMaxWireMagnitude) {
    std::ostringstream msg;
    msg << "q * m^2 = " << static_cast<double>(wire)
        << " exceeds the 64-bit integer headroom";
    throw InvalidArgument(msg.str());
  }
  step_ = 2.0 * g_max / static_cast<double>(k - 1);
}

LatticePoint PhiQ(LatticePoint x, const LatticeSpec& spec) {
  return {WrapCentered(x.z, spec.q())};
}

std::vector<LatticePoint> PhiQ(const std::vector<LatticePoint>& v,
                               const LatticeSpec& spec) {
  std::vector<LatticePoint> out;
  out.reserve(v.size());
  for (LatticePoint p : v) out.push_back(PhiQ(p, spec));
  return out;
}

LatticeVector WrapCentered(const LatticeVector& v, int64_t modulus) {
  return v.unaryExpr([modulus](int64_t z) { return WrapCentered(z, modulus); });
}

LatticePoint Encode(double x, const LatticeSpec& spec) {
  const double units = x / spec.step();
  const double nearest = std::nearbyint(units);
  if (!std::isfinite(units) ||
      std::abs(units - nearest) > kEncodeTolerance * std::max(1.0, std::abs(nearest))) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "value " << x << " is not a multiple of the lattice step "
        << spec.step();
    throw OffLattice(msg.str());
  }
  return {static_cast<int64_t>(nearest)};
}

double Decode(LatticePoint p, const LatticeSpec& spec) {
  return static_cast<double>(p.z) * spec.step();
}

}  // namespace d2pfed
