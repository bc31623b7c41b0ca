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

#ifndef D2PFED_LATTICE_H_
#define D2PFED_LATTICE_H_

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace d2pfed {

// Column vector of lattice coordinates in integer units.
using LatticeVector = Eigen::Matrix<int64_t, Eigen::Dynamic, 1>;

// A point of the lattice step * Z, stored as its integer coordinate.
struct LatticePoint {
  int64_t z = 0;

  friend bool operator==(LatticePoint, LatticePoint) = default;
  friend LatticePoint operator+(LatticePoint a, LatticePoint b) {
    return {a.z + b.z};
  }
  friend LatticePoint operator-(LatticePoint a, LatticePoint b) {
    return {a.z - b.z};
  }
};

// Relative tolerance used by Encode to absorb decimal round-off.
inline constexpr double kEncodeTolerance = 1e-9;

// The support lattice L = step * Z with step = 2 g_max / (k - 1), the
// cyclic group size q and the shared-noise split factor m.
//
// All protocol arithmetic runs on the "fine" lattice with spacing step / m:
// a coarse point z embeds as z * m fine units, which makes the per-client
// noise shares exactly representable.
class LatticeSpec {
 public:
  // Throws InvalidArgument unless g_max > 0, k >= 2 odd, q >= 1 odd,
  // split_denominator >= 1 and q * m * m fits comfortably in int64.
  LatticeSpec(double g_max, int64_t k, int64_t q, int64_t split_denominator = 1);

  double g_max() const { return g_max_; }
  int64_t k() const { return k_; }
  int64_t q() const { return q_; }
  int64_t split_denominator() const { return m_; }
  double step() const { return step_; }
  double fine_step() const { return step_ / static_cast<double>(m_); }

  // Lattice units of the lowest quantization level b[0] = -g_max.
  int64_t half_levels() const { return (k_ - 1) / 2; }

  int64_t ToFine(LatticePoint p) const { return p.z * m_; }

 private:
  double g_max_;
  int64_t k_;
  int64_t q_;
  int64_t m_;
  double step_;
};

// Mathematical modulo: result in [0, modulus).
constexpr int64_t FloorMod(int64_t a, int64_t modulus) {
  const int64_t r = a % modulus;
  return r < 0 ? r + modulus : r;
}

// Euclidean quotient matching FloorMod: a = FloorDiv(a, m) * m + FloorMod(a, m).
constexpr int64_t FloorDiv(int64_t a, int64_t modulus) {
  return (a - FloorMod(a, modulus)) / modulus;
}

// Centered wrap into [-(modulus - 1) / 2, (modulus - 1) / 2] for odd modulus.
constexpr int64_t WrapCentered(int64_t z, int64_t modulus) {
  const int64_t half = (modulus - 1) / 2;
  return FloorMod(z + half, modulus) - half;
}

LatticePoint PhiQ(LatticePoint x, const LatticeSpec& spec);
std::vector<LatticePoint> PhiQ(const std::vector<LatticePoint>& v,
                               const LatticeSpec& spec);

// Coordinatewise centered wrap of an integer vector.
LatticeVector WrapCentered(const LatticeVector& v, int64_t modulus);

// Throws OffLattice if x is not an integer multiple of spec.step().
LatticePoint Encode(double x, const LatticeSpec& spec);
double Decode(LatticePoint p, const LatticeSpec& spec);

}  // namespace d2pfed

#endif  // D2PFED_LATTICE_H_
