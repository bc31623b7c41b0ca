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

#include <cmath>

#include <Eigen/Dense>

#include "d2pfed/errors.h"
#include "gtest/gtest.h"

namespace d2pfed {
namespace {

Eigen::VectorXd RandomVector(Eigen::Index d, RandomStream& rng) {
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) v[i] = 2 * rng.UniformDouble() - 1;
  return v;
}

// Gaussian-direction unit vector via Box-Muller.
Eigen::VectorXd RandomUnitVector(Eigen::Index d, RandomStream& rng) {
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const double u1 = 1 - rng.UniformDouble();
    const double u2 = rng.UniformDouble();
    v[i] = std::sqrt(-2 * std::log(u1)) * std::cos(2 * M_PI * u2);
  }
  return v.normalized();
}

TEST(ClipTest, Examples) {
  Eigen::VectorXd g(2);
  g << 3, 4;
  const Eigen::VectorXd c = Clip(g, 1.0);
  EXPECT_DOUBLE_EQ(c[0], 0.6);
  EXPECT_DOUBLE_EQ(c[1], 0.8);

  const Eigen::VectorXd small = g / 10;  // norm D/2 at D = 1
  EXPECT_EQ(Clip(small, 1.0), small);
  EXPECT_EQ(Clip(Eigen::VectorXd::Zero(4), 1.0), Eigen::VectorXd::Zero(4));
  EXPECT_THROW(Clip(g, 0.0), InvalidArgument);
}

TEST(ClipTest, IsAProjection) {
  RandomStream rng(5);
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd g = 5 * RandomVector(13, rng);
    const Eigen::VectorXd once = Clip(g, 1.5);
    EXPECT_LE(once.norm(), 1.5 * (1 + 1e-15));
    EXPECT_TRUE(Clip(once, 1.5).isApprox(once, 1e-15));
  }
}

TEST(RotationTest, PaddedDimension) {
  EXPECT_EQ(PaddedDimension(1), 1);
  EXPECT_EQ(PaddedDimension(7), 8);
  EXPECT_EQ(PaddedDimension(64), 64);
  EXPECT_EQ(PaddedDimension(65), 128);
}

TEST(RotationTest, RoundTripAndIsometry) {
  RandomStream rng(6);
  for (Eigen::Index d : {1, 7, 64, 100}) {
    const RotationSeed rs{1234 + static_cast<uint64_t>(d), PaddedDimension(d)};
    for (int i = 0; i < 20; ++i) {
      const Eigen::VectorXd g = RandomVector(d, rng);
      const Eigen::VectorXd r = Rotate(g, rs);
      EXPECT_EQ(r.size(), rs.d_pad);
      EXPECT_NEAR(r.norm(), g.norm(), 1e-6 * g.norm());
      EXPECT_TRUE(Unrotate(r, rs, d).isApprox(g, 1e-6)) << d;
    }
  }
}

TEST(RotationTest, MatchesDenseHadamardTimesSigns) {
  // Sylvester construction: H_{ij} = (-1)^{popcount(i & j)}.
  const Eigen::Index n = 16;
  Eigen::MatrixXd h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      h(i, j) = (__builtin_popcountll(static_cast<unsigned long long>(i & j)) % 2) ? -1 : 1;
    }
  }
  const RotationSeed rs{77, n};
  const Eigen::MatrixXd r = h * RotationSigns(rs).asDiagonal() / std::sqrt(double(n));
  EXPECT_TRUE((r * r.transpose()).isApprox(Eigen::MatrixXd::Identity(n, n), 1e-12));
  RandomStream rng(8);
  const Eigen::VectorXd g = RandomVector(n, rng);
  EXPECT_TRUE(Rotate(g, rs).isApprox(r * g, 1e-12));
}

TEST(RotationTest, SeedDeterminesSigns) {
  EXPECT_EQ(RotationSigns({5, 128}), RotationSigns({5, 128}));
  EXPECT_NE(RotationSigns({5, 128}), RotationSigns({6, 128}));
}

TEST(RotationTest, RejectsBadDimension) {
  Eigen::VectorXd g = Eigen::VectorXd::Ones(5);
  EXPECT_THROW(Rotate(g, {1, 6}), InvalidArgument);
  EXPECT_THROW(Rotate(g, {1, 4}), InvalidArgument);
  EXPECT_THROW(Unrotate(Eigen::VectorXd::Ones(8), {1, 8}, 9), InvalidArgument);
}

TEST(RotationTest, CoordinatesConcentrate) {
  // With d_pad = 4096, D = 1, n = 100, delta = 1e-3 the max rotated
  // coordinate stays below 2 sqrt(log(2 n d / delta)) / sqrt(d).
  const Eigen::Index d = 4096;
  const double bound = 2 * std::sqrt(std::log(2.0 * 100 * d / 1e-3)) / std::sqrt(double(d));
  EXPECT_DOUBLE_EQ(DefaultGMax(1.0, 100, d, 1e-3), bound);
  RandomStream rng(9);
  int within = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Eigen::VectorXd g = RandomUnitVector(d, rng);
    const RotationSeed rs{rng.Next(), d};
    if (Rotate(g, rs).cwiseAbs().maxCoeff() <= bound) ++within;
  }
  EXPECT_GE(within, 999);
}

TEST(GMaxTest, CappedAtClipBound) {
  EXPECT_DOUBLE_EQ(DefaultGMax(1.0, 100, 32, 1e-3), 1.0);
  EXPECT_LT(DefaultGMax(1.0, 100, 1 << 16, 1e-3), 1.0);
  EXPECT_THROW(DefaultGMax(1.0, 100, 32, 0.0), InvalidArgument);
}

TEST(QuantizeTest, GridPointsAreFixed) {
  LatticeSpec spec(1.0, 9, 101);
  RandomStream rng(10);
  for (int64_t r = 0; r < 9; ++r) {
    Eigen::VectorXd v = Eigen::VectorXd::Constant(1000, -1.0 + r * spec.step());
    const QuantizedUpdate q = Quantize(v, spec, rng);
    EXPECT_TRUE((q.points.array() == r - 4).all()) << r;
    EXPECT_EQ(q.clamped, 0);
  }
}

TEST(QuantizeTest, MidpointIsAFairCoin) {
  LatticeSpec spec(1.0, 5, 101);  // step 0.5, b = -1, -0.5, 0, 0.5, 1
  RandomStream rng(11);
  Eigen::VectorXd v = Eigen::VectorXd::Constant(100000, 0.25);
  const QuantizedUpdate q = Quantize(v, spec, rng);
  const double up = (q.points.array() == 1).cast<double>().mean();
  EXPECT_TRUE(((q.points.array() == 0) || (q.points.array() == 1)).all());
  EXPECT_NEAR(up, 0.5, 0.01);
}

TEST(QuantizeTest, Unbiased) {
  LatticeSpec spec(0.8, 9, 101);
  RandomStream rng(12);
  const double x = 0.3 * spec.g_max();
  Eigen::VectorXd v = Eigen::VectorXd::Constant(100000, x);
  const Eigen::VectorXd values = Quantize(v, spec, rng).points.cast<double>() * spec.step();
  const double mean = values.mean();
  const double sd = std::sqrt((values.array() - mean).square().sum() / (values.size() - 1));
  EXPECT_LE(std::abs(mean - x), 4 * sd / std::sqrt(double(values.size())));
}

TEST(QuantizeTest, OutputStaysOnLevelsAndClampsOutliers) {
  LatticeSpec spec(0.5, 7, 101);
  RandomStream rng(13);
  Eigen::VectorXd v = 2 * RandomVector(500, rng);
  const QuantizedUpdate q = Quantize(v, spec, rng);
  EXPECT_EQ(q.clamped, (v.array().abs() > 0.5).count());
  EXPECT_TRUE((q.points.array().abs() <= 3).all());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double clamped = std::clamp(v[j], -0.5, 0.5);
    EXPECT_LE(std::abs(q.points[j] * spec.step() - clamped), spec.step() + 1e-12);
  }
}

TEST(SensitivityTest, Examples) {
  EXPECT_EQ(Sensitivity(1.0, 4, 3), 4.0);
  EXPECT_EQ(Sensitivity(2.0, 16, 5), 8.0);
  EXPECT_NEAR(Sensitivity(1.0, 64, 1'000'000'000), 2.0, 1e-6);
  EXPECT_THROW(Sensitivity(0.0, 4, 3), InvalidArgument);
  EXPECT_THROW(Sensitivity(1.0, 0, 3), InvalidArgument);
  EXPECT_THROW(Sensitivity(1.0, 4, 1), InvalidArgument);
}

}  // namespace
}  // namespace d2pfed
