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

#include <cmath>
#include <map>

#include "d2pfed/errors.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace d2pfed {
namespace {

std::map<int64_t, long> Histogram(const DiscreteGaussian& dist, long n,
                                  uint64_t seed) {
  RandomStream rng(seed);
  std::map<int64_t, long> counts;
  for (long i = 0; i < n; ++i) ++counts[dist.Sample(rng).z];
  return counts;
}

TEST(DiscreteGaussianTest, RejectsNonPositiveSigma) {
  EXPECT_THROW(DiscreteGaussian(0.0), InvalidArgument);
  EXPECT_THROW(DiscreteGaussian(-1.0), InvalidArgument);
}

TEST(DiscreteGaussianTest, NearZeroSigmaCollapsesToZero) {
  // pmf(1)/pmf(0) = exp(-1 / (2 * 1e-4)), so essentially every draw is 0.
  DiscreteGaussian dist(0.01);
  const auto counts = Histogram(dist, 100000, 1);
  EXPECT_GE(counts.at(0), 99990);
}

TEST(DiscreteGaussianTest, UnitSigmaMassAtZero) {
  // 1 / sum_z exp(-z^2 / 2), mpmath at 40 digits.
  constexpr double kPmfZero = 0.3989422782668617055816805363892074;
  DiscreteGaussian dist(1.0);
  EXPECT_NEAR(dist.Pmf(0), kPmfZero, 1e-15);
  const long n = 1000000;
  const auto counts = Histogram(dist, n, 2);
  EXPECT_NEAR(static_cast<double>(counts.at(0)) / n, kPmfZero, 0.005);
}

TEST(DiscreteGaussianTest, EmpiricalMeanNearZero) {
  DiscreteGaussian dist(2.0, 0.5);  // s = 4
  RandomStream rng(3);
  const long n = 1000000;
  double sum = 0;
  for (long i = 0; i < n; ++i) sum += static_cast<double>(dist.Sample(rng).z);
  EXPECT_LT(std::abs(sum / n), 4 * dist.sigma_units() / std::sqrt(double(n)));
}

TEST(DiscreteGaussianTest, DeterministicStream) {
  DiscreteGaussian dist(1.7);
  RandomStream a(99), b(99);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(dist.Sample(a), dist.Sample(b));
}

TEST(DiscreteGaussianTest, PmfShape) {
  DiscreteGaussian dist(1.0);
  for (int64_t z = -10; z <= 10; ++z) {
    EXPECT_GE(dist.Pmf(0), dist.Pmf(z));
    EXPECT_DOUBLE_EQ(dist.Pmf(z), dist.Pmf(-z));
  }
  EXPECT_NEAR(dist.Pmf(1) / dist.Pmf(0), std::exp(-0.5), 1e-15);
}

TEST(DiscreteGaussianTest, PmfSumsToOne) {
  DiscreteGaussian dist(3.0);
  double total = 0;
  for (int64_t z = -60; z <= 60; ++z) total += dist.Pmf(z);
  EXPECT_NEAR(total, 1.0, 1e-12);
  for (double s : {0.3, 1.0, 5.0, 40.0}) {
    oracle::DiscreteGaussianTable table(s);
    DiscreteGaussian d(s);
    for (int64_t z : {0, 1, 3, 7}) {
      EXPECT_NEAR(d.Pmf(z), static_cast<double>(table.Pmf(z)), 1e-13) << s;
    }
  }
}

TEST(DiscreteGaussianTest, PmfUsesRealUnits) {
  DiscreteGaussian real(0.3, 0.1);  // s = 3
  DiscreteGaussian unit(3.0);
  EXPECT_NEAR(real.Pmf(2), unit.Pmf(2), 1e-15);
}

TEST(DiscreteGaussianTest, ChiSquareGoodnessOfFit) {
  for (double s : {0.5, 1.0, 3.0}) {
    DiscreteGaussian dist(s);
    std::map<int64_t, double> probs;
    for (int64_t z = -200; z <= 200; ++z) {
      if (dist.Pmf(z) > 1e-6) probs[z] = dist.Pmf(z);
    }
    const long n = 1000000;
    const auto result = oracle::ChiSquareGof(Histogram(dist, n, 10 + int(s * 10)), probs, n);
    EXPECT_GT(result.p_value, 0.01) << "s=" << s << " chi2=" << result.statistic;
  }
}

TEST(DiscreteGaussianTest, VarianceBound) {
  for (double s : {0.3, 0.5, 1.0, 2.0, 4.0, 5.0}) {
    DiscreteGaussian dist(s);
    oracle::DiscreteGaussianTable table(s);
    EXPECT_LE(static_cast<double>(table.Variance()), dist.VarianceUpperBound()) << s;
    // The gap below s^2 is 4 pi^2 s^4 / (e^{4 pi^2 s^2} - 1), which is
    // below double resolution once s >= 2.
    if (s <= 1.0) {
      EXPECT_LT(dist.VarianceUpperBound(), s * s);
    } else {
      EXPECT_LE(dist.VarianceUpperBound(), s * s);
    }
  }
  // s^2 = 0.25 <= 1/3 branch.
  EXPECT_LE(DiscreteGaussian(0.5).VarianceUpperBound(), 3 * std::exp(-2.0));
  // Real units scale by step^2.
  EXPECT_NEAR(DiscreteGaussian(0.2, 0.1).VarianceUpperBound(),
              DiscreteGaussian(2.0).VarianceUpperBound() * 0.01, 1e-15);
}

TEST(DiscreteGaussianTest, EmpiricalVarianceWithinBound) {
  for (double s : {0.5, 1.0, 3.0}) {
    DiscreteGaussian dist(s);
    RandomStream rng(40);
    const long n = 1000000;
    double sum2 = 0, sum4 = 0;
    for (long i = 0; i < n; ++i) {
      const double z = static_cast<double>(dist.Sample(rng).z);
      sum2 += z * z;
      sum4 += z * z * z * z;
    }
    const double var = sum2 / n;
    const double se = std::sqrt((sum4 / n - var * var) / n);
    EXPECT_LE(var, dist.VarianceUpperBound() + 5 * se) << s;
  }
}

TEST(DiscreteGaussianTest, TailBounds) {
  EXPECT_THROW(DiscreteGaussian(1.0).TailBound(0), InvalidArgument);
  EXPECT_DOUBLE_EQ(DiscreteGaussian(1.0).TailBound(1).upper, 0.5);
  EXPECT_EQ(DiscreteGaussian(0.3).TailBound(2).lower, 0.0);
  for (double s : {0.5, 1.0, 2.0, 4.0}) {
    DiscreteGaussian dist(s);
    oracle::DiscreteGaussianTable table(s);
    for (int64_t m : {1, 2, 3, 5, 10}) {
      const auto tail = static_cast<double>(table.TailAtLeast(m));
      const TailBounds b = dist.TailBound(m);
      EXPECT_LE(b.lower, tail) << s << " " << m;
      EXPECT_LE(tail, b.upper) << s << " " << m;
    }
  }
}

TEST(DiscreteGaussianTest, RenyiDivergence) {
  DiscreteGaussian dist(1.0);
  EXPECT_EQ(dist.RenyiDivergence(0, 2.0), 0.0);
  EXPECT_THROW(dist.RenyiDivergence(1, 1.0), InvalidArgument);
  EXPECT_LE(dist.RenyiDivergence(1, 2.0), 1.0 + 1e-9);

  DiscreteGaussian wide(2.0);
  for (double alpha : {1.5, 2.0, 4.0, 8.0, 16.0}) {
    EXPECT_LE(wide.RenyiDivergence(1, alpha), alpha / 8 + 1e-9) << alpha;
  }
}

TEST(DiscreteGaussianTest, RenyiMatchesDirectSummation) {
  for (double s : {0.5, 1.0, 2.5}) {
    DiscreteGaussian dist(s);
    oracle::DiscreteGaussianTable table(s);
    for (int64_t mu : {1, 3}) {
      for (double alpha : {1.5, 2.0, 7.0}) {
        const double want = static_cast<double>(table.Renyi(mu, alpha));
        EXPECT_NEAR(dist.RenyiDivergence(mu, alpha), want, 1e-9 * std::max(1.0, want))
            << s << " " << mu << " " << alpha;
      }
    }
  }
}

}  // namespace
}  // namespace d2pfed
