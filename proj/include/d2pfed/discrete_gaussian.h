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

#ifndef D2PFED_DISCRETE_GAUSSIAN_H_
#define D2PFED_DISCRETE_GAUSSIAN_H_

#include <cstdint>

#include "d2pfed/lattice.h"
#include "d2pfed/random.h"

namespace d2pfed {

// Rejection iterations allowed per sample before SamplerStall is raised.
inline constexpr int64_t kSamplerIterationCap = 1'000'000;

struct TailBounds {
  double upper = 0;
  double lower = 0;
};

// The discrete Gaussian N_L(sigma) on L = step * Z: mass at x proportional
// to exp(-x^2 / (2 sigma^2)). sigma is in the same real units as the lattice
// step; all integer arguments and results are in lattice units.
class DiscreteGaussian {
 public:
  // Throws InvalidArgument unless sigma > 0 and step > 0.
  DiscreteGaussian(double sigma, double step = 1.0);
  DiscreteGaussian(double sigma, const LatticeSpec& spec)
      : DiscreteGaussian(sigma, spec.step()) {}

  double sigma() const { return sigma_; }
  double step() const { return step_; }
  // sigma / step.
  double sigma_units() const { return s_; }

  // Exact sample: discrete-Laplace proposal with Bernoulli(exp(.))
  // rejection, run on the integer lattice with scale sigma / step.
  LatticePoint Sample(RandomStream& rng) const;
  LatticeVector SampleVector(Eigen::Index n, RandomStream& rng) const;

  double Pmf(int64_t z) const;
  double LogPmf(int64_t z) const;
  double LogNormalizer() const { return log_normalizer_; }

  // Upper bound on the variance in real units:
  //   sigma^2 (1 - 4 pi^2 s^2 / (exp(4 pi^2 s^2) - 1)),
  // tightened to 3 exp(-1 / (2 s^2)) step^2 when s^2 <= 1/3.
  double VarianceUpperBound() const;

  // Bounds on P[X >= m] in lattice units. upper is the continuous tail at
  // m - 1; lower is the continuous tail at m shrunk by 1 / (1 + 3
  // exp(-2 pi^2 s^2)), and is 0 when s < 1 / sqrt(2 pi).
  TailBounds TailBound(int64_t m) const;

  // D_alpha(N_L(0) || N_L(mu)) by truncated summation, mu in lattice units.
  double RenyiDivergence(int64_t mu, double alpha) const;

 private:
  double sigma_;
  double step_;
  double s_;
  double log_normalizer_;
};

// Upper tail of the standard normal, P[N(0,1) >= x].
double NormalUpperTail(double x);

}  // namespace d2pfed

#endif  // D2PFED_DISCRETE_GAUSSIAN_H_
