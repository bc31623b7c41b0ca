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

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "d2pfed/errors.h"

namespace d2pfed {

namespace {

Eigen::ArrayXd Sigmoid(const Eigen::ArrayXd& z) { return 1.0 / (1.0 + (-z).exp()); }

// Mean of log(1 + exp(-s z)) with s = 2y - 1, computed stably.
double LogisticLoss(const Eigen::VectorXd& logits, const Eigen::VectorXd& labels) {
  const Eigen::ArrayXd margin = logits.array() * (2.0 * labels.array() - 1.0);
  const Eigen::ArrayXd loss =
      (-margin).max(0.0) + (-(margin.abs())).exp().log1p();
  return loss.mean();
}

double ClassificationAccuracy(const Eigen::VectorXd& logits, const Eigen::VectorXd& labels) {
  const Eigen::ArrayXd predicted = (logits.array() > 0).cast<double>();
  return (predicted == labels.array()).cast<double>().mean();
}

void CheckDims(const Eigen::VectorXd& w, const Dataset& data, Eigen::Index dim) {
  if (w.size() != dim || data.features.cols() != dim) {
    throw InvalidArgument("model and feature dimensions disagree");
  }
}

}  // namespace

Dataset Dataset::Rows(std::span<const Eigen::Index> rows) const {
  const std::vector<Eigen::Index> idx(rows.begin(), rows.end());
  return {features(idx, Eigen::all), labels(idx)};
}

Dataset Dataset::Concatenate(const std::vector<Dataset>& parts) {
  Eigen::Index rows = 0, cols = 0;
  for (const auto& p : parts) {
    rows += p.size();
    cols = p.features.cols();
  }
  Dataset out{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.features.middleRows(at, p.size()) = p.features;
    out.labels.segment(at, p.size()) = p.labels;
    at += p.size();
  }
  return out;
}

TaskKind ParseTaskKind(const std::string& name) {
  if (name == "linear-regression") return TaskKind::kLinearRegression;
  if (name == "logistic-regression") return TaskKind::kLogisticRegression;
  if (name == "tiny-mlp") return TaskKind::kTinyMlp;
  throw InvalidArgument("unknown task '" + name + "'");
}

std::string TaskKindName(TaskKind kind) {
  switch (kind) {
    case TaskKind::kLinearRegression: return "linear-regression";
    case TaskKind::kLogisticRegression: return "logistic-regression";
    case TaskKind::kTinyMlp: return "tiny-mlp";
  }
  return "unknown";
}

Eigen::VectorXd LinearRegressionTask::InitialModel(uint64_t) const {
  return Eigen::VectorXd::Zero(dim_);
}

double LinearRegressionTask::Loss(const Eigen::VectorXd& w, const Dataset& data) const {
  CheckDims(w, data, dim_);
  return 0.5 * (data.features * w - data.labels).squaredNorm() /
         static_cast<double>(data.size());
}

Eigen::VectorXd LinearRegressionTask::Gradient(const Eigen::VectorXd& w,
                                               const Dataset& data) const {
  CheckDims(w, data, dim_);
  return data.features.transpose() * (data.features * w - data.labels) /
         static_cast<double>(data.size());
}

Eigen::VectorXd LogisticRegressionTask::InitialModel(uint64_t) const {
  return Eigen::VectorXd::Zero(dim_);
}

double LogisticRegressionTask::Loss(const Eigen::VectorXd& w, const Dataset& data) const {
  CheckDims(w, data, dim_);
  return LogisticLoss(data.features * w, data.labels);
}

Eigen::VectorXd LogisticRegressionTask::Gradient(const Eigen::VectorXd& w,
                                                 const Dataset& data) const {
  CheckDims(w, data, dim_);
  const Eigen::VectorXd residual =
      (Sigmoid((data.features * w).array()) - data.labels.array()).matrix();
  return data.features.transpose() * residual / static_cast<double>(data.size());
}

std::optional<double> LogisticRegressionTask::Accuracy(const Eigen::VectorXd& w,
                                                       const Dataset& data) const {
  CheckDims(w, data, dim_);
  return ClassificationAccuracy(data.features * w, data.labels);
}

// Parameter layout: W1 (H x 2), b1 (H), W2 (H x H), b2 (H), w3 (H), b3.
Eigen::Index TinyMlpTask::dimension() const {
  return kHidden * kInputs + kHidden + kHidden * kHidden + kHidden + kHidden + 1;
}

namespace {

struct MlpView {
  explicit MlpView(const double* p)
      : w1(p, TinyMlpTask::kHidden, TinyMlpTask::kInputs),
        b1(p + TinyMlpTask::kHidden * TinyMlpTask::kInputs, TinyMlpTask::kHidden),
        w2(b1.data() + TinyMlpTask::kHidden, TinyMlpTask::kHidden, TinyMlpTask::kHidden),
        b2(w2.data() + TinyMlpTask::kHidden * TinyMlpTask::kHidden, TinyMlpTask::kHidden),
        w3(b2.data() + TinyMlpTask::kHidden, TinyMlpTask::kHidden),
        b3(w3.data()[TinyMlpTask::kHidden]) {}

  Eigen::Map<const Eigen::MatrixXd> w1;
  Eigen::Map<const Eigen::VectorXd> b1;
  Eigen::Map<const Eigen::MatrixXd> w2;
  Eigen::Map<const Eigen::VectorXd> b2;
  Eigen::Map<const Eigen::VectorXd> w3;
  double b3;
};

}  // namespace

Eigen::VectorXd TinyMlpTask::InitialModel(uint64_t seed) const {
  RandomStream rng(DeriveSeed(seed, "mlp-init"));
  Eigen::VectorXd w = Eigen::VectorXd::Zero(dimension());
  auto fill = [&](Eigen::Index offset, Eigen::Index count, double fan_in) {
    for (Eigen::Index i = 0; i < count; ++i) w[offset + i] = rng.Gaussian() / std::sqrt(fan_in);
  };
  fill(0, kHidden * kInputs, kInputs);
  const Eigen::Index w2_at = kHidden * kInputs + kHidden;
  fill(w2_at, kHidden * kHidden, kHidden);
  fill(w2_at + kHidden * kHidden + kHidden, kHidden, kHidden);
  return w;
}

Eigen::VectorXd TinyMlpTask::Logits(const Eigen::VectorXd& w, const Eigen::MatrixXd& x) const {
  const MlpView p(w.data());
  const Eigen::MatrixXd h1 = ((x * p.w1.transpose()).rowwise() + p.b1.transpose()).array().tanh();
  const Eigen::MatrixXd h2 = ((h1 * p.w2.transpose()).rowwise() + p.b2.transpose()).array().tanh();
  return (h2 * p.w3).array() + p.b3;
}

double TinyMlpTask::Loss(const Eigen::VectorXd& w, const Dataset& data) const {
  if (w.size() != dimension()) throw InvalidArgument("MLP parameter size mismatch");
  return LogisticLoss(Logits(w, data.features), data.labels);
}

Eigen::VectorXd TinyMlpTask::Gradient(const Eigen::VectorXd& w, const Dataset& data) const {
  if (w.size() != dimension()) throw InvalidArgument("MLP parameter size mismatch");
  const MlpView p(w.data());
  const Eigen::MatrixXd& x = data.features;
  const Eigen::MatrixXd h1 = ((x * p.w1.transpose()).rowwise() + p.b1.transpose()).array().tanh();
  const Eigen::MatrixXd h2 = ((h1 * p.w2.transpose()).rowwise() + p.b2.transpose()).array().tanh();
  const Eigen::VectorXd logits = (h2 * p.w3).array() + p.b3;

  const Eigen::VectorXd dlogit =
      (Sigmoid(logits.array()) - data.labels.array()).matrix() / static_cast<double>(data.size());
  const Eigen::MatrixXd dz2 = ((dlogit * p.w3.transpose()).array() * (1.0 - h2.array().square())).matrix();
  const Eigen::MatrixXd dz1 = ((dz2 * p.w2).array() * (1.0 - h1.array().square())).matrix();

  Eigen::VectorXd grad(dimension());
  Eigen::Index at = 0;
  auto put = [&](const Eigen::MatrixXd& block) {
    grad.segment(at, block.size()) = block.reshaped();
    at += block.size();
  };
  put(dz1.transpose() * x);
  put(dz1.colwise().sum().transpose());
  put(dz2.transpose() * h1);
  put(dz2.colwise().sum().transpose());
  put(h2.transpose() * dlogit);
  grad[at] = dlogit.sum();
  return grad;
}

std::optional<double> TinyMlpTask::Accuracy(const Eigen::VectorXd& w, const Dataset& data) const {
  return ClassificationAccuracy(Logits(w, data.features), data.labels);
}

std::unique_ptr<Task> MakeTask(const DataSpec& spec) {
  switch (spec.task) {
    case TaskKind::kLinearRegression: return std::make_unique<LinearRegressionTask>(spec.dim);
    case TaskKind::kLogisticRegression: return std::make_unique<LogisticRegressionTask>(spec.dim);
    case TaskKind::kTinyMlp: return std::make_unique<TinyMlpTask>();
  }
  throw InvalidArgument("unknown task");
}

namespace {

// Draws `count` samples of the task's generating distribution.
Dataset Generate(const DataSpec& spec, Eigen::Index count, const Eigen::VectorXd& truth,
                 RandomStream& rng) {
  switch (spec.task) {
    case TaskKind::kLinearRegression: {
      Dataset out{Eigen::MatrixXd(count, spec.dim), Eigen::VectorXd(count)};
      for (Eigen::Index i = 0; i < count; ++i) {
        for (Eigen::Index j = 0; j < spec.dim; ++j) out.features(i, j) = rng.Gaussian();
        out.labels[i] = out.features.row(i).dot(truth) + spec.noise * rng.Gaussian();
      }
      return out;
    }
    case TaskKind::kLogisticRegression: {
      // Two unit-covariance blobs whose means sit separation / 2 from the
      // origin along the all-ones direction; last column is the bias.
      const Eigen::Index f = spec.dim - 1;
      const double shift = spec.separation / 2 / std::sqrt(static_cast<double>(f));
      Dataset out{Eigen::MatrixXd(count, spec.dim), Eigen::VectorXd(count)};
      for (Eigen::Index i = 0; i < count; ++i) {
        const double y = (rng.Next() >> 63) ? 1.0 : 0.0;
        for (Eigen::Index j = 0; j < f; ++j) {
          out.features(i, j) = (2 * y - 1) * shift + rng.Gaussian();
        }
        out.features(i, f) = 1.0;
        out.labels[i] = y;
      }
      return out;
    }
    case TaskKind::kTinyMlp: {
      // Two interleaved spirals.
      Dataset out{Eigen::MatrixXd(count, 2), Eigen::VectorXd(count)};
      for (Eigen::Index i = 0; i < count; ++i) {
        const double y = (rng.Next() >> 63) ? 1.0 : 0.0;
        const double t = 0.25 + 2.75 * std::numbers::pi * rng.UniformDouble();
        const double r = t / (3 * std::numbers::pi);
        const double angle = t + y * std::numbers::pi;
        out.features(i, 0) = r * std::cos(angle) + spec.noise * rng.Gaussian();
        out.features(i, 1) = r * std::sin(angle) + spec.noise * rng.Gaussian();
        out.labels[i] = y;
      }
      return out;
    }
  }
  throw InvalidArgument("unknown task");
}

}  // namespace

FederatedData MakeFederatedData(const DataSpec& spec, int64_t n_clients, uint64_t seed) {
  if (n_clients < 1 || spec.samples_per_client < 1 || spec.test_samples < 1) {
    throw InvalidArgument("data spec needs positive client and sample counts");
  }
  if (spec.task != TaskKind::kTinyMlp && spec.dim < 2) {
    throw InvalidArgument("linear tasks need dim >= 2");
  }
  RandomStream rng(DeriveSeed(seed, "data"));
  FederatedData out;
  if (spec.task == TaskKind::kLinearRegression) {
    out.ground_truth.resize(spec.dim);
    for (Eigen::Index j = 0; j < spec.dim; ++j) {
      out.ground_truth[j] = rng.Gaussian() / std::sqrt(static_cast<double>(spec.dim));
    }
  }
  const Eigen::Index train_count = n_clients * spec.samples_per_client;
  const Dataset train = Generate(spec, train_count, out.ground_truth, rng);
  out.test = Generate(spec, spec.test_samples, out.ground_truth, rng);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(train_count));
  std::iota(order.begin(), order.end(), 0);
  if (spec.partition == Partition::kByLabel) {
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
      return train.labels[a] < train.labels[b];
    });
  }
  for (int64_t c = 0; c < n_clients; ++c) {
    const std::span<const Eigen::Index> rows(
        order.data() + c * spec.samples_per_client,
        static_cast<std::size_t>(spec.samples_per_client));
    out.clients.push_back(train.Rows(rows));
  }
  out.pooled = train;
  return out;
}

Eigen::VectorXd LocalTrain(const Task& task, const Eigen::VectorXd& w, const Dataset& data,
                           const LocalTrainerSpec& spec, RandomStream& rng) {
  if (spec.steps < 0 || spec.batch_size < 0) throw InvalidArgument("bad local trainer spec");
  Eigen::VectorXd local = w;
  const bool full = spec.batch_size == 0 || spec.batch_size >= data.size();
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(full ? 0 : spec.batch_size));
  for (int64_t step = 0; step < spec.steps; ++step) {
    if (full) {
      local -= spec.learning_rate * task.Gradient(local, data);
    } else {
      for (auto& r : rows) {
        r = static_cast<Eigen::Index>(rng.UniformBelow(static_cast<uint64_t>(data.size())));
      }
      local -= spec.learning_rate * task.Gradient(local, data.Rows(rows));
    }
  }
  return local;
}

}  // namespace d2pfed
