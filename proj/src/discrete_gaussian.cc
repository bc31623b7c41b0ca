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

#include "d2pfed/discrete_gaussian.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "d2pfed/errors.h"

namespace d2pfed {

namespace {

constexpr double kLogSeriesCutoff = -46.051701859880914;  // log(1e-20)

double LogAddExp(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// log sum_{z in Z} exp(log_term(z)), expanding symmetrically from `center`.
// Each side runs at least ceil(20 s) terms and stops once the next term is
// below 1e-20 of the running sum.
template <typename LogTerm>
double LogSumSeries(LogTerm log_term, int64_t center, double s) {
  const auto min_radius = static_cast<int64_t>(std::ceil(20.0 * s));
  double total = log_term(center);
  for (int direction : {+1, -1}) {
    for (int64_t r = 1;; ++r) {
      const double term = log_term(center + direction * r);
      if (r > min_radius && term < total + kLogSeriesCutoff) break;
      total = LogAddExp(total, term);
    }
  }
  return total;
}

// Bernoulli(exp(-gamma)) for gamma >= 0.
bool BernoulliExpMinus(double gamma, RandomStream& rng) {
  return rng.UniformDouble() < std::exp(-gamma);
}

}  // namespace

double NormalUpperTail(double x) {
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

DiscreteGaussian::DiscreteGaussian(double sigma, double step)
    : sigma_(sigma), step_(step) {
  if (!(sigma > 0) || !std::isfinite(sigma)) {
    throw InvalidArgument("discrete Gaussian sigma must be positive");
  }
  if (!(step > 0)) throw InvalidArgument("lattice step must be positive");
  s_ = sigma / step;
  const double two_s2 = 2.0 * s_ * s_;
  log_normalizer_ = LogSumSeries(
      [two_s2](int64_t z) {
        const auto x = static_cast<double>(z);
        return -x * x / two_s2;
      },
      0, s_);
}

double DiscreteGaussian::LogPmf(int64_t z) const {
  const auto x = static_cast<double>(z);
  return -x * x / (2.0 * s_ * s_) - log_normalizer_;
}

double DiscreteGaussian::Pmf(int64_t z) const { return std::exp(LogPmf(z)); }

LatticePoint DiscreteGaussian::Sample(RandomStream& rng) const {
  const double t = std::floor(s_) + 1.0;
  const auto t_int = static_cast<uint64_t>(t);
  const double s2 = s_ * s_;
  int64_t iterations = 0;
  auto tick = [&iterations, this] {
    if (++iterations > kSamplerIterationCap) {
      std::ostringstream msg;
      msg << "discrete Gaussian sampler exceeded " << kSamplerIterationCap
          << " iterations at sigma/step = " << s_;
      throw SamplerStall(msg.str());
    }
  };
  while (true) {
    tick();
    // Discrete Laplace with scale t: U + t * V, random sign, -0 rejected.
    const uint64_t u = rng.UniformBelow(t_int);
    if (!BernoulliExpMinus(static_cast<double>(u) / t, rng)) continue;
    uint64_t v = 0;
    while (BernoulliExpMinus(1.0, rng)) {
      tick();
      ++v;
    }
    const auto magnitude = static_cast<int64_t>(u + t_int * v);
    const bool negative = (rng.Next() >> 63) != 0;
    if (negative && magnitude == 0) continue;
    const double excess = static_cast<double>(magnitude) - s2 / t;
    if (BernoulliExpMinus(excess * excess / (2.0 * s2), rng)) {
      return {negative ? -magnitude : magnitude};
    }
  }
}

LatticeVector DiscreteGaussian::SampleVector(Eigen::Index n,
                                             RandomStream& rng) const {
  LatticeVector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = Sample(rng).z;
  return out;
}

double DiscreteGaussian::VarianceUpperBound() const {
  using std::numbers::pi;
  const double s2 = s_ * s_;
  const double x = 4.0 * pi * pi * s2;
  double bound = s2 * (1.0 - x / std::expm1(x));
  if (s2 <= 1.0 / 3.0) bound = std::min(bound, 3.0 * std::exp(-1.0 / (2.0 * s2)));
  return bound * step_ * step_;
}

TailBounds DiscreteGaussian::TailBound(int64_t m) const {
  using std::numbers::pi;
  if (m < 1) throw InvalidArgument("tail bound requires m >= 1");
  TailBounds out;
  out.upper = NormalUpperTail(static_cast<double>(m - 1) / s_);
  if (s_ >= 1.0 / std::sqrt(2.0 * pi)) {
    out.lower = NormalUpperTail(static_cast<double>(m) / s_) /
                (1.0 + 3.0 * std::exp(-2.0 * pi * pi * s_ * s_));
  }
  return out;
}

double DiscreteGaussian::RenyiDivergence(int64_t mu, double alpha) const {
  if (!(alpha > 1)) throw InvalidArgument("Renyi order alpha must exceed 1");
  if (mu == 0) return 0.0;
  const double two_s2 = 2.0 * s_ * s_;
  const auto mu_d = static_cast<double>(mu);
  // Summand alpha * log p(x) + (1 - alpha) * log q(x); the normalizers of p
  // and q coincide because mu lies on the lattice. Completing the square
  // around c = (1 - alpha) mu keeps the exponent free of cancellation.
  const double c = (1.0 - alpha) * mu_d;
  const double offset = alpha * (alpha - 1.0) * mu_d * mu_d / two_s2;
  auto log_term = [&](int64_t z) {
    const double dx = static_cast<double>(z) - c;
    return -dx * dx / two_s2 + offset - log_normalizer_;
  };
  const auto peak = static_cast<int64_t>(std::llround(c));
  return LogSumSeries(log_term, peak, s_) / (alpha - 1.0);
}

}  // namespace d2pfed
