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

#include "d2pfed/fed_sim.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "d2pfed/errors.h"
#include "d2pfed/random.h"

namespace d2pfed {

ProtocolInputs ToProtocolInputs(const RoundConfig& cfg, Eigen::Index d) {
  ProtocolInputs in;
  in.d = d;
  in.n = cfg.n;
  in.gamma = cfg.gamma;
  in.clip = cfg.clip;
  in.k = cfg.k;
  in.q = cfg.q;
  in.sigma = cfg.sigma;
  in.delta = cfg.delta;
  in.g_max = cfg.g_max;
  in.override_overflow_check = cfg.override_overflow_check;
  return in;
}

double RoundTranscript::SquaredError() const {
  return (aggregate - clipped_mean_update).squaredNorm();
}

std::vector<int64_t> SubsampleClients(int64_t n, double gamma, uint64_t seed) {
  const int64_t m = ParticipantCount(n, gamma);
  std::vector<int64_t> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 0);
  RandomStream rng(seed);
  // Partial Fisher-Yates: the first m slots end up a uniform m-subset.
  for (int64_t i = 0; i < m; ++i) {
    const auto j = i + static_cast<int64_t>(rng.UniformBelow(static_cast<uint64_t>(n - i)));
    std::swap(ids[i], ids[j]);
  }
  ids.resize(static_cast<std::size_t>(m));
  std::sort(ids.begin(), ids.end());
  return ids;
}

Simulator::Simulator(const RoundConfig& cfg, int threads) : cfg_(cfg), threads_(threads) {
  if (cfg.rounds < 0) throw ConfigError("rounds must be >= 0");
  if (cfg.local.steps < 1 || cfg.local.batch_size < 0 || !(cfg.local.learning_rate > 0)) {
    throw ConfigError("local trainer needs steps >= 1, batch_size >= 0 and a positive rate");
  }
  try {
    task_ = MakeTask(cfg.data);
    params_ = MakeProtocolParams(ToProtocolInputs(cfg, task_->dimension()));
    data_ = MakeFederatedData(cfg.data, cfg.n, cfg.seed);
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

GlobalModel Simulator::InitialModel() const {
  return {task_->InitialModel(DeriveSeed(cfg_.seed, "init")), 0};
}

AccountantState Simulator::NewAccountant() const {
  return AccountantState(cfg_.sigma, params_.sensitivity, params_.effective_gamma());
}

std::pair<GlobalModel, RoundTranscript> Simulator::RunRound(const GlobalModel& model,
                                                            bool masked) const {
  const auto start = std::chrono::steady_clock::now();
  RoundTranscript tr;
  tr.round = model.t + 1;
  const uint64_t round_seed = DeriveSeed(cfg_.seed, "round", {static_cast<uint64_t>(tr.round)});
  tr.selected = SubsampleClients(cfg_.n, cfg_.gamma, DeriveSeed(round_seed, "subsample"));

  std::vector<Eigen::VectorXd> updates;
  updates.reserve(tr.selected.size());
  tr.raw_mean_update = Eigen::VectorXd::Zero(model.w.size());
  for (int64_t id : tr.selected) {
    RandomStream rng(DeriveSeed(round_seed, "local", {static_cast<uint64_t>(id)}));
    const Eigen::VectorXd local =
        LocalTrain(*task_, model.w, data_.clients[static_cast<std::size_t>(id)], cfg_.local, rng);
    updates.push_back(local - model.w);
    tr.raw_mean_update += updates.back();
  }
  tr.raw_mean_update /= static_cast<double>(updates.size());

  PipelineResult result = RunPipeline(updates, tr.selected, params_, round_seed, masked, threads_);
  GlobalModel next{model.w + result.aggregate, tr.round};
  if (!next.w.allFinite()) throw Error("model became non-finite in round " + std::to_string(tr.round));

  tr.model_before = model.w;
  tr.clipped_mean_update = std::move(result.clipped_mean);
  tr.aggregate = std::move(result.aggregate);
  tr.noise = std::move(result.noise);
  tr.fine_sum = std::move(result.fine_sum);
  tr.payloads = std::move(result.payloads);
  tr.byte_counts = std::move(result.byte_len);
  tr.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(next), std::move(tr)};
}

TrainingResult Simulator::RunTraining() const {
  TrainingResult out{InitialModel(), {}, NewAccountant()};
  for (int64_t t = 0; t < cfg_.rounds; ++t) {
    auto [next, tr] = RunRound(out.model);
    out.model = std::move(next);
    out.transcripts.push_back(std::move(tr));
    out.accountant.RecordRounds(1);
  }
  return out;
}

Eigen::VectorXd TrainCentralized(const Task& task, const Dataset& pooled,
                                 const Eigen::VectorXd& w0, int64_t steps,
                                 double learning_rate) {
  Eigen::VectorXd w = w0;
  for (int64_t s = 0; s < steps; ++s) w -= learning_rate * task.Gradient(w, pooled);
  return w;
}

double ConvergenceRhs(double lambda_sq, double bias, int64_t rounds,
                      const SmoothnessConstants& c) {
  if (rounds < 1) throw InvalidArgument("rounds must be >= 1");
  const double T = static_cast<double>(rounds);
  return 2 * c.rho_F * c.L / T +
         2 * std::sqrt(2.0) * std::sqrt(lambda_sq) * std::sqrt(c.L * c.rho_F) / std::sqrt(T) +
         c.rho * bias;
}

ConvergenceReport MakeConvergenceReport(const std::vector<RoundTranscript>& transcripts,
                                        const Task& task, const Dataset& pooled,
                                        const LocalTrainerSpec& local,
                                        const SmoothnessConstants& c) {
  if (!task.has_gradient_oracle()) throw InvalidArgument("task has no gradient oracle");
  if (local.steps != 1 || local.batch_size != 0) {
    throw InvalidArgument("convergence report needs one full-batch local step per round");
  }
  if (transcripts.empty()) throw InvalidArgument("no rounds recorded");
  double max_sampling = 0, max_protocol = 0, bias = 0, grad_sum = 0;
  for (const auto& tr : transcripts) {
    const Eigen::VectorXd full = task.Gradient(tr.model_before, pooled);
    const Eigen::VectorXd g = tr.raw_mean_update / -local.learning_rate;
    const Eigen::VectorXd g_tilde = tr.aggregate / -local.learning_rate;
    max_sampling = std::max(max_sampling, (g - full).squaredNorm());
    max_protocol = std::max(max_protocol, (g - g_tilde).squaredNorm());
    bias = std::max(bias, (g - g_tilde).norm());
    grad_sum += full.squaredNorm();
  }
  const double T = static_cast<double>(transcripts.size());
  ConvergenceReport r;
  r.lambda_sq = 2 * max_sampling + 2 * max_protocol;
  r.bias = bias;
  r.rhs = ConvergenceRhs(r.lambda_sq, bias, static_cast<int64_t>(transcripts.size()), c);
  r.mean_grad_norm_sq = grad_sum / T;
  return r;
}

void WriteTranscriptCsv(const std::vector<RoundTranscript>& transcripts, std::ostream& out) {
  out << "round,client,coordinate,payload_int\n";
  for (const auto& tr : transcripts) {
    for (std::size_t r = 0; r < tr.payloads.size(); ++r) {
      for (Eigen::Index c = 0; c < tr.payloads[r].size(); ++c) {
        out << tr.round << ',' << tr.selected[r] << ',' << c << ',' << tr.payloads[r][c] << '\n';
      }
    }
  }
}

}  // namespace d2pfed
