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

#ifndef D2PFED_FED_SIM_H_
#define D2PFED_FED_SIM_H_

#include <cstdint>
#include <memory>
#include <ostream>
#include <vector>

#include <Eigen/Core>

#include "d2pfed/protocol.h"
#include "d2pfed/rdp_accountant.h"
#include "d2pfed/tasks.h"

namespace d2pfed {

struct RoundConfig {
  int64_t n = 100;
  double gamma = 0.1;
  int64_t rounds = 50;  // T
  double clip = 1.0;    // D
  int64_t k = 33;
  int64_t q = 0;        // 0 = automatic
  double sigma = 0.0;   // real units
  double delta = 1e-5;
  double g_max = 0.0;   // 0 = automatic
  uint64_t seed = 0;
  bool override_overflow_check = false;
  LocalTrainerSpec local;
  DataSpec data;
};

// Protocol inputs for a model of dimension d under cfg.
ProtocolInputs ToProtocolInputs(const RoundConfig& cfg, Eigen::Index d);

struct GlobalModel {
  Eigen::VectorXd w;
  int64_t t = 0;
};

struct RoundTranscript {
  int64_t round = 0;
  std::vector<int64_t> selected;
  std::vector<int64_t> byte_counts;
  Eigen::VectorXd model_before;
  Eigen::VectorXd raw_mean_update;      // mean of unclipped local deltas
  Eigen::VectorXd clipped_mean_update;  // what the protocol estimates
  Eigen::VectorXd aggregate;            // g~_t applied to the model
  LatticeVector noise;                  // realized coarse nu
  LatticeVector fine_sum;
  std::vector<LatticeVector> payloads;
  double wall_seconds = 0;

  // ||aggregate - clipped_mean_update||^2.
  double SquaredError() const;
};

// Uniform sample of floor(gamma n) distinct ids, sorted; deterministic in
// the seed.
std::vector<int64_t> SubsampleClients(int64_t n, double gamma, uint64_t seed);

struct TrainingResult {
  GlobalModel model;
  std::vector<RoundTranscript> transcripts;
  AccountantState accountant;
};

class Simulator {
 public:
  // Generates the federated data and validates the protocol parameters.
  // Throws ConfigError on invalid settings.
  explicit Simulator(const RoundConfig& cfg, int threads = 1);

  const RoundConfig& config() const { return cfg_; }
  const ProtocolParams& params() const { return params_; }
  const Task& task() const { return *task_; }
  const FederatedData& data() const { return data_; }

  GlobalModel InitialModel() const;
  // Round `model.t + 1`: subsample, train locally, run the private
  // aggregation, apply w += g~. Throws if the new model is not finite.
  std::pair<GlobalModel, RoundTranscript> RunRound(const GlobalModel& model,
                                                   bool masked = true) const;
  // cfg.rounds rounds from the initial model, advancing the accountant once
  // per round. A zero-noise run reports infinite epsilon once any round ran.
  TrainingResult RunTraining() const;
  AccountantState NewAccountant() const;

 private:
  RoundConfig cfg_;
  int threads_;
  std::unique_ptr<Task> task_;
  FederatedData data_;
  ProtocolParams params_;
};

// Non-private baseline: `steps` full-batch gradient steps on the pooled data.
Eigen::VectorXd TrainCentralized(const Task& task, const Dataset& pooled,
                                 const Eigen::VectorXd& w0, int64_t steps,
                                 double learning_rate);

struct SmoothnessConstants {
  double L = 1;      // smoothness
  double rho = 1;    // gradient norm bound
  double rho_F = 1;  // initial suboptimality bound
};

struct ConvergenceReport {
  double lambda_sq = 0;
  double bias = 0;  // B
  double rhs = 0;
  // Mean of ||grad F(w_t)||^2 over the recorded rounds.
  double mean_grad_norm_sq = 0;
};

// 2 rho_F L / T + 2 sqrt(2) lambda sqrt(L rho_F) / sqrt(T) + rho B.
double ConvergenceRhs(double lambda_sq, double bias, int64_t rounds,
                      const SmoothnessConstants& constants);

// Compares the stochastic gradient g(w_t) (mean of the selected clients'
// gradients), the protocol's estimate g~(w_t) and the exact gradient on the
// pooled data. Requires one full-batch local step per round; throws
// InvalidArgument otherwise or when the task lacks a gradient oracle.
ConvergenceReport MakeConvergenceReport(const std::vector<RoundTranscript>& transcripts,
                                        const Task& task, const Dataset& pooled,
                                        const LocalTrainerSpec& local,
                                        const SmoothnessConstants& constants);

// Long-form transcript dump: round,client,coordinate,payload_int.
void WriteTranscriptCsv(const std::vector<RoundTranscript>& transcripts, std::ostream& out);

}  // namespace d2pfed

#endif  // D2PFED_FED_SIM_H_
