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

#ifndef D2PFED_RDP_ACCOUNTANT_H_
#define D2PFED_RDP_ACCOUNTANT_H_

#include <cstdint>
#include <vector>

namespace d2pfed {

// Renyi-DP curve: eps(alpha) sampled on an increasing grid of orders > 1.
struct RdpCurve {
  std::vector<double> alpha;
  std::vector<double> epsilon;

  std::size_t size() const { return alpha.size(); }
  // Value at a grid order; throws InvalidArgument if alpha is not on the grid.
  double At(double order) const;
};

// {1.001, 1.1, 1.25, 1.5, 1.75} followed by every integer 2..256.
const std::vector<double>& DefaultAlphaGrid();

struct DpGuarantee {
  double epsilon = 0;
  double alpha_star = 0;
};

// eps(alpha) = alpha * sensitivity^2 / (2 sigma^2).
RdpCurve BaseCurve(double sigma, double sensitivity,
                   const std::vector<double>& grid = DefaultAlphaGrid());

// Subsampling (without replacement) at rate gamma. For integer alpha >= 2:
//
//   eps'(alpha) <= 1/(alpha-1) * log(1 + gamma^2 C(alpha,2)
//                   min{4(e^eps(2) - 1), 2 e^eps(2)}
//                   + sum_{j=3..alpha} 2 gamma^j C(alpha,j) e^{(j-1) eps(j)})
//
// evaluated in log space. Each value is then replaced by the minimum over
// all larger integer orders (valid since true RDP is non-decreasing in
// alpha), and a non-integer order takes the value of the next integer above
// it. gamma == 1 returns the input unchanged. The input grid must contain
// every integer from 2 to its largest order.
RdpCurve AmplifyBySubsampling(const RdpCurve& curve, double gamma);

// Pointwise rounds * eps(alpha); zero rounds give the zero curve.
RdpCurve Compose(const RdpCurve& per_round, int64_t rounds);

// min over the grid of eps(alpha) + log(1/delta) / (alpha - 1). An all-zero
// curve (no mechanism has run) converts to epsilon = 0.
DpGuarantee ToDp(const RdpCurve& curve, double delta);

// Ledger for homogeneous rounds of the subsampled discrete Gaussian. sigma = 0
// (no noise) gives an infinite per-round curve.
class AccountantState {
 public:
  AccountantState(double sigma, double sensitivity, double gamma,
                  const std::vector<double>& grid = DefaultAlphaGrid());

  void RecordRounds(int64_t rounds = 1);

  int64_t rounds_recorded() const { return rounds_; }
  double gamma() const { return gamma_; }
  double sigma() const { return sigma_; }
  double sensitivity() const { return sensitivity_; }
  const RdpCurve& per_round() const { return per_round_; }
  RdpCurve Cumulative() const { return Compose(per_round_, rounds_); }
  DpGuarantee Guarantee(double delta) const { return ToDp(Cumulative(), delta); }

 private:
  double sigma_;
  double sensitivity_;
  double gamma_;
  RdpCurve per_round_;
  int64_t rounds_ = 0;
};

// Convenience: epsilon after `rounds` subsampled rounds.
DpGuarantee EpsilonFor(double sigma, double sensitivity, double gamma,
                       int64_t rounds, double delta);

// Smallest sigma (to relative precision 1e-6) whose epsilon after `rounds`
// rounds is at most target_epsilon.
double CalibrateSigma(double target_epsilon, double delta, double sensitivity,
                      double gamma, int64_t rounds);

}  // namespace d2pfed

#endif  // D2PFED_RDP_ACCOUNTANT_H_
