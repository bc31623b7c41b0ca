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

#include "d2pfed/tasks.h"

#include <Eigen/QR>

#include "d2pfed/errors.h"
#include "gtest/gtest.h"

namespace d2pfed {
namespace {

// Central differences of Task::Loss.
Eigen::VectorXd NumericGradient(const Task& task, const Eigen::VectorXd& w, const Dataset& data) {
  Eigen::VectorXd g(w.size());
  constexpr double h = 1e-6;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    Eigen::VectorXd up = w, down = w;
    up[i] += h;
    down[i] -= h;
    g[i] = (task.Loss(up, data) - task.Loss(down, data)) / (2 * h);
  }
  return g;
}

class GradientCheck : public ::testing::TestWithParam<TaskKind> {};

TEST_P(GradientCheck, AnalyticMatchesFiniteDifferences) {
  DataSpec spec;
  spec.task = GetParam();
  spec.dim = 6;
  spec.samples_per_client = 15;
  spec.test_samples = 10;
  const auto task = MakeTask(spec);
  const FederatedData data = MakeFederatedData(spec, 2, 4);
  RandomStream rng(8);
  Eigen::VectorXd w = task->InitialModel(3);
  for (auto& x : w) x += 0.3 * rng.Gaussian();
  const Eigen::VectorXd analytic = task->Gradient(w, data.clients[0]);
  const Eigen::VectorXd numeric = NumericGradient(*task, w, data.clients[0]);
  EXPECT_LT((analytic - numeric).norm(), 1e-6 * std::max(1.0, numeric.norm()));
}

INSTANTIATE_TEST_SUITE_P(AllTasks, GradientCheck,
                         ::testing::Values(TaskKind::kLinearRegression,
                                           TaskKind::kLogisticRegression, TaskKind::kTinyMlp));

TEST(Tasks, NamesRoundTrip) {
  for (TaskKind k :
       {TaskKind::kLinearRegression, TaskKind::kLogisticRegression, TaskKind::kTinyMlp}) {
    EXPECT_EQ(ParseTaskKind(TaskKindName(k)), k);
  }
  EXPECT_THROW(ParseTaskKind("resnet"), InvalidArgument);
}

TEST(Tasks, MlpHasTwoHiddenLayersOfSixteen) {
  EXPECT_EQ(TinyMlpTask().dimension(), 16 * 2 + 16 + 16 * 16 + 16 + 16 + 1);
}

TEST(FederatedData, DeterministicShapesAndPooling) {
  DataSpec spec;
  spec.dim = 7;
  spec.samples_per_client = 12;
  spec.test_samples = 30;
  const FederatedData a = MakeFederatedData(spec, 5, 1);
  const FederatedData b = MakeFederatedData(spec, 5, 1);
  const FederatedData c = MakeFederatedData(spec, 5, 2);
  ASSERT_EQ(a.clients.size(), 5u);
  EXPECT_EQ(a.clients[3].features, b.clients[3].features);
  EXPECT_NE(a.clients[3].features, c.clients[3].features);
  EXPECT_EQ(a.test.size(), 30);
  EXPECT_EQ(a.pooled.size(), 60);
  EXPECT_EQ(a.pooled.features.cols(), 7);
  EXPECT_TRUE((a.pooled.features.col(6).array() == 1.0).all());
  EXPECT_EQ(Dataset::Concatenate(a.clients).labels.sum(), a.pooled.labels.sum());
}

TEST(FederatedData, LinearRegressionRecoversGroundTruth) {
  DataSpec spec;
  spec.task = TaskKind::kLinearRegression;
  spec.dim = 5;
  spec.samples_per_client = 400;
  spec.noise = 0.01;
  const FederatedData data = MakeFederatedData(spec, 3, 6);
  const Eigen::VectorXd w = data.pooled.features.colPivHouseholderQr().solve(data.pooled.labels);
  EXPECT_LT((w - data.ground_truth).norm(), 0.01);
}

TEST(FederatedData, LabelPartitionSortsByLabel) {
  DataSpec spec;
  spec.partition = Partition::kByLabel;
  spec.samples_per_client = 10;
  const FederatedData data = MakeFederatedData(spec, 10, 3);
  Eigen::VectorXd fractions(10);
  for (int i = 0; i < 10; ++i) fractions[i] = data.clients[i].labels.mean();
  for (int i = 1; i < 10; ++i) EXPECT_LE(fractions[i - 1], fractions[i]);
  EXPECT_EQ(fractions[0], 0.0);
  EXPECT_EQ(fractions[9], 1.0);
}

TEST(FederatedData, RejectsDegenerateSpecs) {
  DataSpec spec;
  EXPECT_THROW(MakeFederatedData(spec, 0, 1), InvalidArgument);
  spec.dim = 1;
  EXPECT_THROW(MakeFederatedData(spec, 2, 1), InvalidArgument);
}

TEST(LocalTrain, FullBatchStepIsGradientStep) {
  DataSpec spec;
  const auto task = MakeTask(spec);
  const FederatedData data = MakeFederatedData(spec, 1, 2);
  RandomStream rng(1);
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(spec.dim, 0.1);
  LocalTrainerSpec local;
  local.learning_rate = 0.5;
  const Eigen::VectorXd out = LocalTrain(*task, w, data.clients[0], local, rng);
  EXPECT_TRUE(out.isApprox(w - 0.5 * task->Gradient(w, data.clients[0])));
}

TEST(LocalTrain, MinibatchesAreSeeded) {
  DataSpec spec;
  const auto task = MakeTask(spec);
  const FederatedData data = MakeFederatedData(spec, 1, 2);
  LocalTrainerSpec local{5, 0.2, 8};
  const Eigen::VectorXd w = Eigen::VectorXd::Zero(spec.dim);
  RandomStream a(3), b(3), c(4);
  const Eigen::VectorXd wa = LocalTrain(*task, w, data.clients[0], local, a);
  EXPECT_EQ(wa, LocalTrain(*task, w, data.clients[0], local, b));
  EXPECT_NE(wa, LocalTrain(*task, w, data.clients[0], local, c));
  EXPECT_LT(task->Loss(wa, data.clients[0]), task->Loss(w, data.clients[0]));
}

TEST(Tasks, MlpLearnsSpirals) {
  DataSpec spec;
  spec.task = TaskKind::kTinyMlp;
  spec.noise = 0.02;
  spec.samples_per_client = 400;
  spec.test_samples = 400;
  const auto task = MakeTask(spec);
  const FederatedData data = MakeFederatedData(spec, 1, 5);
  Eigen::VectorXd w = task->InitialModel(1);
  for (int s = 0; s < 3000; ++s) w -= 0.5 * task->Gradient(w, data.pooled);
  EXPECT_GT(*task->Accuracy(w, data.test), 0.8);
}

}  // namespace
}  // namespace d2pfed
