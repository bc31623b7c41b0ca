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

#ifndef D2PFED_TASKS_H_
#define D2PFED_TASKS_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "d2pfed/random.h"

namespace d2pfed {

// Row-major samples: features.row(i) with target labels[i].
struct Dataset {
  Eigen::MatrixXd features;
  Eigen::VectorXd labels;

  Eigen::Index size() const { return features.rows(); }
  Dataset Rows(std::span<const Eigen::Index> rows) const;
  static Dataset Concatenate(const std::vector<Dataset>& parts);
};

enum class TaskKind { kLinearRegression, kLogisticRegression, kTinyMlp };

TaskKind ParseTaskKind(const std::string& name);
std::string TaskKindName(TaskKind kind);

// A differentiable objective F(w) = mean loss over a dataset.
class Task {
 public:
  virtual ~Task() = default;

  virtual Eigen::Index dimension() const = 0;
  virtual Eigen::VectorXd InitialModel(uint64_t seed) const = 0;
  virtual double Loss(const Eigen::VectorXd& w, const Dataset& data) const = 0;
  // Exact mean gradient over `data`.
  virtual Eigen::VectorXd Gradient(const Eigen::VectorXd& w,
                                   const Dataset& data) const = 0;
  // Fraction classified correctly; empty for regression.
  virtual std::optional<double> Accuracy(const Eigen::VectorXd& w,
                                         const Dataset& data) const = 0;
  virtual bool has_gradient_oracle() const { return true; }
};

// Squared loss 0.5 * mean (x.w - y)^2.
class LinearRegressionTask : public Task {
 public:
  explicit LinearRegressionTask(Eigen::Index dim) : dim_(dim) {}
  Eigen::Index dimension() const override { return dim_; }
  Eigen::VectorXd InitialModel(uint64_t) const override;
  double Loss(const Eigen::VectorXd& w, const Dataset& data) const override;
  Eigen::VectorXd Gradient(const Eigen::VectorXd& w, const Dataset& data) const override;
  std::optional<double> Accuracy(const Eigen::VectorXd&, const Dataset&) const override {
    return std::nullopt;
  }

 private:
  Eigen::Index dim_;
};

// Binary cross-entropy on labels in {0, 1}; the bias lives in a constant
// feature column.
class LogisticRegressionTask : public Task {
 public:
  explicit LogisticRegressionTask(Eigen::Index dim) : dim_(dim) {}
  Eigen::Index dimension() const override { return dim_; }
  Eigen::VectorXd InitialModel(uint64_t) const override;
  double Loss(const Eigen::VectorXd& w, const Dataset& data) const override;
  Eigen::VectorXd Gradient(const Eigen::VectorXd& w, const Dataset& data) const override;
  std::optional<double> Accuracy(const Eigen::VectorXd& w, const Dataset& data) const override;

 private:
  Eigen::Index dim_;
};

// 2 -> 16 -> 16 -> 1 tanh network with a logistic output.
class TinyMlpTask : public Task {
 public:
  static constexpr Eigen::Index kInputs = 2;
  static constexpr Eigen::Index kHidden = 16;

  Eigen::Index dimension() const override;
  Eigen::VectorXd InitialModel(uint64_t seed) const override;
  double Loss(const Eigen::VectorXd& w, const Dataset& data) const override;
  Eigen::VectorXd Gradient(const Eigen::VectorXd& w, const Dataset& data) const override;
  std::optional<double> Accuracy(const Eigen::VectorXd& w, const Dataset& data) const override;

 private:
  Eigen::VectorXd Logits(const Eigen::VectorXd& w, const Eigen::MatrixXd& x) const;
};

enum class Partition { kIid, kByLabel };

struct DataSpec {
  TaskKind task = TaskKind::kLogisticRegression;
  // Model dimension for the linear tasks (including the bias column for
  // logistic regression). Ignored by the MLP.
  Eigen::Index dim = 20;
  int64_t samples_per_client = 50;
  int64_t test_samples = 2000;
  Partition partition = Partition::kIid;
  // Blob mean separation / regression noise / spiral noise.
  double separation = 1.0;
  double noise = 0.1;
};

struct FederatedData {
  std::vector<Dataset> clients;
  Dataset test;
  // Union of all client datasets.
  Dataset pooled;
  // Linear regression only: the generating weights.
  Eigen::VectorXd ground_truth;
};

std::unique_ptr<Task> MakeTask(const DataSpec& spec);

// Deterministic in (spec, n_clients, seed).
FederatedData MakeFederatedData(const DataSpec& spec, int64_t n_clients, uint64_t seed);

struct LocalTrainerSpec {
  int64_t steps = 1;
  double learning_rate = 0.1;
  // 0 means full local batch.
  int64_t batch_size = 0;
};

// Plain minibatch SGD from w; batches are drawn with replacement from rng.
Eigen::VectorXd LocalTrain(const Task& task, const Eigen::VectorXd& w,
                           const Dataset& data, const LocalTrainerSpec& spec,
                           RandomStream& rng);

}  // namespace d2pfed

#endif  // D2PFED_TASKS_H_
