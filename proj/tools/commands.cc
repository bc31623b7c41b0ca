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

#include "commands.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "d2pfed/compressor.h"
#include "d2pfed/discrete_gaussian.h"
#include "d2pfed/errors.h"
#include "d2pfed/fed_sim.h"
#include "d2pfed/metrics.h"
#include "d2pfed/random.h"
#include "d2pfed/rdp_accountant.h"

namespace d2pfed::cli {

std::string FormatReal(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

namespace {

// Replaces sigma by the calibrated value when a target epsilon is set.
RoundConfig ResolveSigma(const ExperimentConfig& cfg) {
  RoundConfig round = cfg.round;
  if (cfg.target_epsilon > 0) {
    if (round.rounds < 1) throw ConfigError("target_epsilon needs rounds >= 1");
    RoundConfig probe = round;
    probe.sigma = 0;
    const Simulator sim(probe);
    round.sigma = CalibrateSigma(cfg.target_epsilon, round.delta, sim.params().sensitivity,
                                 sim.params().effective_gamma(), round.rounds);
  }
  return round;
}

}  // namespace

void CmdTrain(const ExperimentConfig& cfg, std::ostream& out) {
  const Simulator sim(ResolveSigma(cfg), cfg.threads);
  const TrainingResult result = sim.RunTraining();
  const double delta = sim.config().delta;
  const RdpCurve& per_round = result.accountant.per_round();

  out << "round,epsilon,delta,loss,accuracy,bytes_per_client,mse_round\n";
  GlobalModel model = sim.InitialModel();
  for (const RoundTranscript& tr : result.transcripts) {
    // Replay the recorded aggregates to evaluate each intermediate model.
    model.w = tr.model_before + tr.aggregate;
    model.t = tr.round;
    const double eps = ToDp(Compose(per_round, tr.round), delta).epsilon;
    const std::optional<double> acc = sim.task().Accuracy(model.w, sim.data().test);
    out << tr.round << ',' << FormatReal(eps) << ',' << FormatReal(delta) << ','
        << FormatReal(sim.task().Loss(model.w, sim.data().test)) << ','
        << (acc ? FormatReal(*acc) : "") << ',' << tr.byte_counts.front() << ','
        << FormatReal(tr.SquaredError()) << '\n';
  }
  if (!cfg.transcript_path.empty()) {
    std::ofstream dump(cfg.transcript_path);
    if (!dump) throw Error("cannot write transcript '" + cfg.transcript_path + "'");
    WriteTranscriptCsv(result.transcripts, dump);
  }
}

std::vector<MseBenchRow> RunMseBench(const MseGridSpec& grid, uint64_t seed, int threads) {
  if (grid.trials < 1) throw ConfigError("mse trials must be >= 1");
  std::vector<MseBenchRow> rows;
  uint64_t cell = 0;
  for (int64_t d : grid.dims) {
    const Eigen::Index d_pad = PaddedDimension(d);
    std::vector<int64_t> levels = grid.levels;
    if (levels.empty()) {
      auto k = static_cast<int64_t>(std::ceil(std::sqrt(static_cast<double>(d_pad)))) + 1;
      if (k % 2 == 0) ++k;
      levels.push_back(k);
    }
    for (int64_t clients : grid.populations) {
      for (int64_t k : levels) {
        for (double su : grid.sigma_units) {
          ProtocolInputs in;
          in.d = d;
          in.n = clients;
          in.gamma = grid.gamma;
          in.clip = grid.clip;
          in.k = k;
          const double step = 2 * MakeProtocolParams(in).g_max / static_cast<double>(k - 1);
          in.sigma = su * step;
          const ProtocolParams params = MakeProtocolParams(in);

          RandomStream rng(DeriveSeed(seed, "mse-updates", {cell}));
          std::vector<Eigen::VectorXd> updates;
          for (int64_t i = 0; i < params.participants; ++i) {
            Eigen::VectorXd g(d);
            for (auto& x : g) x = rng.Gaussian();
            updates.push_back(g * (grid.clip / g.norm()));
          }
          const MseEstimate est =
              EmpiricalMse(grid.trials, params, updates, DeriveSeed(seed, "mse-cell", {cell}),
                           threads);

          MseBenchRow row{d,
                          d_pad,
                          clients,
                          params.participants,
                          k,
                          params.spec.q(),
                          grid.gamma,
                          params.g_max,
                          params.sigma_units,
                          grid.trials,
                          est.mean,
                          est.std_error,
                          std::numeric_limits<double>::quiet_NaN(),
                          ""};
          try {
            row.bound = MseBound(BoundInputsFor(params), grid.reading);
            if (row.empirical > row.bound + 3 * row.std_error) row.flag = "exceeds";
          } catch (const HypothesisViolated&) {
            row.flag = "hypothesis";
          }
          rows.push_back(row);
          ++cell;
        }
      }
    }
  }
  return rows;
}

void WriteMseBenchCsv(const std::vector<MseBenchRow>& rows, std::ostream& out) {
  out << "d,d_pad,clients,participants,k,q,gamma,g_max,sigma_units,trials,empirical,"
         "std_error,bound,flag\n";
  for (const auto& r : rows) {
    out << r.d << ',' << r.d_pad << ',' << r.clients << ',' << r.participants << ',' << r.k
        << ',' << r.q << ',' << FormatReal(r.gamma) << ',' << FormatReal(r.g_max) << ','
        << FormatReal(r.sigma_units) << ',' << r.trials << ',' << FormatReal(r.empirical) << ','
        << FormatReal(r.std_error) << ',' << FormatReal(r.bound) << ',' << r.flag << '\n';
  }
}

void CmdAccountant(const ExperimentConfig& cfg, std::ostream& out) {
  const RoundConfig& r = cfg.round;
  if (r.data.dim < 1 || r.k < 2 || !(r.clip > 0)) throw ConfigError("need dim >= 1, k >= 2, clip > 0");
  if (!(r.gamma > 0 && r.gamma <= 1)) throw ConfigError("gamma must lie in (0, 1]");
  if (!(r.delta > 0 && r.delta < 1)) throw ConfigError("delta must lie in (0, 1)");
  if (r.rounds < 0 || !(r.sigma >= 0)) throw ConfigError("need rounds >= 0 and sigma >= 0");
  const double sensitivity = Sensitivity(r.clip, PaddedDimension(r.data.dim), r.k);
  AccountantState state(r.sigma, sensitivity, r.gamma);
  state.RecordRounds(r.rounds);
  const DpGuarantee g = state.Guarantee(r.delta);
  const RdpCurve curve = state.Cumulative();

  out << "epsilon,alpha_star,delta,rounds,sigma,sensitivity,gamma\n"
      << FormatReal(g.epsilon) << ',' << FormatReal(g.alpha_star) << ',' << FormatReal(r.delta)
      << ',' << r.rounds << ',' << FormatReal(r.sigma) << ',' << FormatReal(sensitivity) << ','
      << FormatReal(r.gamma) << "\n\nalpha,rdp_epsilon\n";
  for (std::size_t i = 0; i < curve.size(); ++i) {
    out << FormatReal(curve.alpha[i]) << ',' << FormatReal(curve.epsilon[i]) << '\n';
  }
}

void CmdSample(const ExperimentConfig& cfg, std::ostream& out) {
  if (cfg.sample_count < 0) throw ConfigError("sample count must be >= 0");
  if (!(cfg.sample_sigma > 0)) throw ConfigError("sample sigma must be positive");
  const DiscreteGaussian dg(cfg.sample_sigma);
  RandomStream rng(DeriveSeed(cfg.round.seed, "sample"));
  for (int64_t i = 0; i < cfg.sample_count; ++i) out << dg.Sample(rng).z << '\n';
}

int RunCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Discrete-Gaussian private federated learning simulator"};
  app.fallthrough();
  app.require_subcommand(1);
  std::string config_path, out_path;
  std::optional<uint64_t> seed;
  bool override_overflow = false;
  app.add_option("--config", config_path, "Experiment config file");
  app.add_option("--seed", seed, "Master seed (overrides the config)");
  app.add_option("--out", out_path, "Output file (default: standard output)");
  app.add_flag("--override-overflow-check", override_overflow,
               "Run even if the wrap-around probability exceeds 1e-9 per round");
  CLI::App* train = app.add_subcommand("train", "Run federated training, per-round CSV");
  CLI::App* mse = app.add_subcommand("mse-bench", "Empirical MSE against the bound");
  CLI::App* accountant = app.add_subcommand("accountant", "Privacy of a round schedule");
  CLI::App* sample = app.add_subcommand("sample", "Draw discrete Gaussian integers");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    ExperimentConfig cfg = config_path.empty() ? ExperimentConfig{} : LoadConfig(config_path);
    if (seed) cfg.round.seed = *seed;
    if (override_overflow) cfg.round.override_overflow_check = true;

    std::ostringstream buffer;
    if (*train) {
      CmdTrain(cfg, buffer);
    } else if (*mse) {
      WriteMseBenchCsv(RunMseBench(cfg.mse, cfg.round.seed, cfg.threads), buffer);
    } else if (*accountant) {
      CmdAccountant(cfg, buffer);
    } else if (*sample) {
      CmdSample(cfg, buffer);
    }
    if (out_path.empty()) {
      out << buffer.str();
    } else {
      std::ofstream file(out_path, std::ios::binary);
      if (!file || !(file << buffer.str())) {
        err << "error: cannot write '" << out_path << "'\n";
        return kExitRuntime;
      }
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace d2pfed::cli
