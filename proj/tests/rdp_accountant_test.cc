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

#include "d2pfed/rdp_accountant.h"

#include <cmath>

#include "d2pfed/discrete_gaussian.h"
#include "d2pfed/errors.h"
#include "gtest/gtest.h"
#include "oracles.h"

namespace d2pfed {
namespace {

TEST(RdpCurveTest, DefaultGridCoversRequiredOrders) {
  const auto& grid = DefaultAlphaGrid();
  const RdpCurve curve{grid, std::vector<double>(grid.size())};
  for (double a : {1.001, 1.5, 2.0, 3.0, 64.0, 128.0, 256.0}) {
    EXPECT_NO_THROW(curve.At(a)) << a;
  }
  EXPECT_THROW(curve.At(2.5), InvalidArgument);
  for (std::size_t i = 1; i < grid.size(); ++i) EXPECT_LT(grid[i - 1], grid[i]);
}

TEST(BaseCurveTest, Examples) {
  EXPECT_DOUBLE_EQ(BaseCurve(1.0, 1.0).At(2), 1.0);
  // D = 1 gives sensitivity 4D; 8 alpha D^2 / sigma^2 at alpha 3, sigma 2.
  EXPECT_DOUBLE_EQ(BaseCurve(2.0, 4.0).At(3), 6.0);
  const RdpCurve quiet = BaseCurve(1e12, 1.0);
  for (double e : quiet.epsilon) EXPECT_LT(e, 1e-20);
  EXPECT_THROW(BaseCurve(0.0, 1.0), InvalidArgument);
  EXPECT_THROW(BaseCurve(1.0, -1.0), InvalidArgument);
}

TEST(AmplifyTest, FullSamplingIsIdentity) {
  const RdpCurve base = BaseCurve(1.3, 1.0);
  const RdpCurve out = AmplifyBySubsampling(base, 1.0);
  EXPECT_EQ(out.epsilon, base.epsilon);
  EXPECT_THROW(AmplifyBySubsampling(base, 0.0), InvalidArgument);
  EXPECT_THROW(AmplifyBySubsampling(base, 1.5), InvalidArgument);
}

TEST(AmplifyTest, FrozenValuesAtLowOrders) {
  // sigma = 4 * sensitivity, gamma = 0.01; mpmath at 40 digits.
  const RdpCurve out = AmplifyBySubsampling(BaseCurve(4.0, 1.0), 0.01);
  EXPECT_NEAR(out.At(2), 2.579745081004820128e-05, 1e-17);
  EXPECT_NEAR(out.At(3), 3.990131344296967121e-05, 1e-17);
}

TEST(AmplifyTest, MatchesDirectFormulaEvaluation) {
  for (double sigma : {2.0, 4.0, 8.0}) {
    const RdpCurve base = BaseCurve(sigma, 1.0);
    const RdpCurve out = AmplifyBySubsampling(base, 0.05);
    auto eps = [&](int j) { return base.At(j); };
    for (int a = 2; a <= 30; ++a) {
      const double direct = oracle::SubsampledRdpDirect(a, 0.05, eps);
      EXPECT_LE(out.At(a), direct * (1 + 1e-10)) << sigma << " " << a;
      EXPECT_NEAR(out.At(a), direct, 1e-9 * direct) << sigma << " " << a;
    }
  }
}

TEST(AmplifyTest, QuadraticInGammaAtOrderTwo) {
  const RdpCurve base = BaseCurve(3.0, 1.0);
  for (double gamma : {1e-2, 5e-3, 1e-3}) {
    const double full = AmplifyBySubsampling(base, gamma).At(2);
    const double half = AmplifyBySubsampling(base, gamma / 2).At(2);
    EXPECT_LE(half, full / 3.9) << gamma;
  }
}

TEST(AmplifyTest, NonIntegerOrdersUseNextIntegerAndCurveIsMonotone) {
  const RdpCurve out = AmplifyBySubsampling(BaseCurve(0.7, 1.0), 0.1);
  EXPECT_EQ(out.At(1.001), out.At(2));
  EXPECT_EQ(out.At(1.5), out.At(2));
  for (std::size_t i = 1; i < out.size(); ++i) {
    EXPECT_LE(out.epsilon[i - 1], out.epsilon[i]);
  }
  // Never worse than the unamplified curve at integer orders.
  const RdpCurve base = BaseCurve(0.7, 1.0);
  for (int a = 2; a <= 256; ++a) EXPECT_LE(out.At(a), base.At(a) * (1 + 1e-12)) << a;
}

TEST(AmplifyTest, LargeOrdersStayFinite) {
  const RdpCurve out = AmplifyBySubsampling(BaseCurve(0.2, 1.0), 0.5);
  for (double e : out.epsilon) EXPECT_TRUE(std::isfinite(e));
}

TEST(ComposeTest, Linear) {
  RdpCurve ones{{2, 3, 4}, {1, 1, 1}};
  for (double e : Compose(ones, 0).epsilon) EXPECT_EQ(e, 0);
  for (double e : Compose(ones, 2).epsilon) EXPECT_EQ(e, 2);
  EXPECT_THROW(Compose(ones, -1), InvalidArgument);
}

TEST(ToDpTest, Examples) {
  RdpCurve ones{DefaultAlphaGrid(), std::vector<double>(DefaultAlphaGrid().size(), 1.0)};
  EXPECT_LE(ToDp(ones, std::exp(-1.0)).epsilon, 2.0);
  EXPECT_NEAR(ToDp(ones, 1 - 1e-12).epsilon, 1.0, 1e-9);
  EXPECT_THROW(ToDp(ones, 0.0), InvalidArgument);
  EXPECT_THROW(ToDp(ones, 1.0), InvalidArgument);
  RdpCurve zero{DefaultAlphaGrid(), std::vector<double>(DefaultAlphaGrid().size(), 0.0)};
  EXPECT_EQ(ToDp(zero, 1e-5).epsilon, 0.0);
}

TEST(ToDpTest, AgreesWithDenseGridMinimization) {
  RdpCurve gaussian{DefaultAlphaGrid(), {}};
  for (double a : gaussian.alpha) gaussian.epsilon.push_back(a / 2);
  const double delta = 1e-5;
  double dense = INFINITY;
  for (double a = 1.001; a <= 256; a += 0.1) {
    dense = std::min(dense, a / 2 + std::log(1 / delta) / (a - 1));
  }
  const DpGuarantee got = ToDp(gaussian, delta);
  EXPECT_LE(std::abs(got.epsilon - dense) / dense, 0.02);
  EXPECT_GE(got.epsilon, dense - 1e-12);
}

TEST(AccountantTest, ClosedFormDominatesNumericDivergence) {
  // gamma = 1: the closed-form curve must upper-bound the curve built from
  // truncated-sum Renyi divergences, before and after conversion.
  for (double s : {0.5, 1.0, 2.0}) {
    const double step = 0.25;
    const int64_t mu = 2;
    DiscreteGaussian dist(s * step, step);
    RdpCurve numeric{DefaultAlphaGrid(), {}};
    for (double a : numeric.alpha) numeric.epsilon.push_back(dist.RenyiDivergence(mu, a));
    const RdpCurve closed = BaseCurve(s * step, mu * step);
    for (std::size_t i = 0; i < numeric.size(); ++i) {
      EXPECT_LE(numeric.epsilon[i], closed.epsilon[i] + 1e-9);
    }
    for (int64_t rounds : {1, 10}) {
      for (double delta : {1e-3, 1e-5, 1e-9}) {
        EXPECT_LE(ToDp(Compose(numeric, rounds), delta).epsilon,
                  ToDp(Compose(closed, rounds), delta).epsilon + 1e-9);
      }
    }
  }
}

TEST(AccountantTest, StateLedger) {
  AccountantState state(2.0, 1.0, 0.1);
  EXPECT_EQ(state.Guarantee(1e-5).epsilon, 0.0);
  state.RecordRounds(5);
  state.RecordRounds();
  EXPECT_EQ(state.rounds_recorded(), 6);
  const RdpCurve cum = state.Cumulative();
  for (std::size_t i = 0; i < cum.size(); ++i) {
    EXPECT_DOUBLE_EQ(cum.epsilon[i], 6 * state.per_round().epsilon[i]);
  }
}

TEST(AccountantTest, Monotonicity) {
  const double delta = 1e-5;
  double prev = INFINITY;
  for (double sigma : {0.5, 1.0, 2.0, 4.0}) {
    const double e = EpsilonFor(sigma, 1.0, 0.1, 50, delta).epsilon;
    EXPECT_LT(e, prev);
    prev = e;
  }
  prev = 0;
  for (int64_t t : {1, 10, 100, 1000}) {
    const double e = EpsilonFor(1.0, 1.0, 0.1, t, delta).epsilon;
    EXPECT_GE(e, prev);
    prev = e;
  }
  prev = 0;
  for (double gamma : {0.01, 0.05, 0.1, 0.5, 1.0}) {
    const double e = EpsilonFor(1.0, 1.0, gamma, 50, delta).epsilon;
    EXPECT_GE(e, prev);
    prev = e;
  }
  prev = INFINITY;
  for (double d : {1e-9, 1e-7, 1e-5, 1e-3}) {
    const double e = EpsilonFor(1.0, 1.0, 0.1, 50, d).epsilon;
    EXPECT_LE(e, prev);
    prev = e;
  }
}

TEST(AccountantTest, SquareRootGrowthInRounds) {
  for (int64_t t : {100, 400}) {
    const double e1 = EpsilonFor(4.0, 1.0, 0.1, t, 1e-5).epsilon;
    const double e4 = EpsilonFor(4.0, 1.0, 0.1, 4 * t, 1e-5).epsilon;
    EXPECT_LE(e4 / e1, 2.2) << t;
  }
}

TEST(AccountantTest, CalibrateSigma) {
  const double sigma = CalibrateSigma(8.0, 1e-5, 2.5, 0.1, 50);
  EXPECT_LE(EpsilonFor(sigma, 2.5, 0.1, 50, 1e-5).epsilon, 8.0);
  EXPECT_GT(EpsilonFor(sigma * (1 - 1e-4), 2.5, 0.1, 50, 1e-5).epsilon, 8.0);
}

}  // namespace
}  // namespace d2pfed
