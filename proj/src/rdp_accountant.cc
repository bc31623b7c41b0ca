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

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "d2pfed/errors.h"

namespace d2pfed {

namespace {

double LogAddExp(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

double LogBinomial(int64_t n, int64_t k) {
  return std::lgamma(static_cast<double>(n) + 1) -
         std::lgamma(static_cast<double>(k) + 1) -
         std::lgamma(static_cast<double>(n - k) + 1);
}

// log(e^x - 1) for x > 0.
double LogExpm1(double x) {
  return x > 30 ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x));
}


// Subsampled bound at integer order `order`. eps_at(j) returns eps(j).
template <typename EpsAt>
double SubsampledAtInteger(int64_t order, double log_gamma, EpsAt eps_at) {
  const double eps2 = eps_at(2);
  if (eps2 == 0) return 0.0;
  const double log_min_term =
      std::min(std::log(4.0) + LogExpm1(eps2), std::log(2.0) + eps2);
  double log_sum = LogAddExp(
      0.0, 2 * log_gamma + LogBinomial(order, 2) + log_min_term);
  for (int64_t j = 3; j <= order; ++j) {
    log_sum = LogAddExp(log_sum, std::log(2.0) + j * log_gamma +
                                     LogBinomial(order, j) +
                                     static_cast<double>(j - 1) * eps_at(j));
  }
  return log_sum / static_cast<double>(order - 1);
}

}  // namespace

double RdpCurve::At(double order) const {
  auto it = std::lower_bound(alpha.begin(), alpha.end(), order);
  if (it == alpha.end() || *it != order) {
    std::ostringstream msg;
    msg << "order " << order << " is not on the RDP grid";
    throw InvalidArgument(msg.str());
  }
  return epsilon[static_cast<std::size_t>(it - alpha.begin())];
}

const std::vector<double>& DefaultAlphaGrid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g = {1.001, 1.1, 1.25, 1.5, 1.75};
    for (int a = 2; a <= 256; ++a) g.push_back(a);
    return g;
  }();
  return grid;
}

RdpCurve BaseCurve(double sigma, double sensitivity,
                   const std::vector<double>& grid) {
  if (!(sigma > 0)) throw InvalidArgument("sigma must be positive");
  if (!(sensitivity > 0)) throw InvalidArgument("sensitivity must be positive");
  RdpCurve curve{grid, {}};
  curve.epsilon.reserve(grid.size());
  const double scale = sensitivity * sensitivity / (2.0 * sigma * sigma);
  for (double a : grid) {
    if (!(a > 1)) throw InvalidArgument("RDP orders must exceed 1");
    curve.epsilon.push_back(a * scale);
  }
  return curve;
}

RdpCurve AmplifyBySubsampling(const RdpCurve& curve, double gamma) {
  if (!(gamma > 0 && gamma <= 1)) {
    throw InvalidArgument("subsampling rate gamma must lie in (0, 1]");
  }
  if (gamma == 1) return curve;
  if (curve.size() == 0) return curve;

  const auto max_order = static_cast<int64_t>(std::floor(curve.alpha.back()));
  if (max_order < 2) throw InvalidArgument("RDP grid must reach alpha = 2");
  std::vector<double> base(static_cast<std::size_t>(max_order + 1));
  for (int64_t j = 2; j <= max_order; ++j) {
    base[static_cast<std::size_t>(j)] = curve.At(static_cast<double>(j));
  }

  const double log_gamma = std::log(gamma);
  std::vector<double> amplified(base.size(), 0.0);
  for (int64_t order = 2; order <= max_order; ++order) {
    amplified[static_cast<std::size_t>(order)] = SubsampledAtInteger(
        order, log_gamma,
        [&base](int64_t j) { return base[static_cast<std::size_t>(j)]; });
  }
  for (int64_t order = max_order - 1; order >= 2; --order) {
    auto& v = amplified[static_cast<std::size_t>(order)];
    v = std::min(v, amplified[static_cast<std::size_t>(order + 1)]);
  }

  RdpCurve out{curve.alpha, {}};
  out.epsilon.reserve(curve.size());
  for (double a : curve.alpha) {
    const auto order = std::max<int64_t>(2, static_cast<int64_t>(std::ceil(a)));
    if (order > max_order) {
      throw InvalidArgument("non-integer order above the largest integer order");
    }
    out.epsilon.push_back(amplified[static_cast<std::size_t>(order)]);
  }
  return out;
}

RdpCurve Compose(const RdpCurve& per_round, int64_t rounds) {
  if (rounds < 0) throw InvalidArgument("rounds must be non-negative");
  RdpCurve out = per_round;
  for (double& e : out.epsilon) e = rounds == 0 ? 0.0 : e * static_cast<double>(rounds);
  return out;
}

DpGuarantee ToDp(const RdpCurve& curve, double delta) {
  if (!(delta > 0 && delta < 1)) throw InvalidArgument("delta must lie in (0, 1)");
  if (curve.size() == 0) throw InvalidArgument("empty RDP curve");
  if (std::all_of(curve.epsilon.begin(), curve.epsilon.end(),
                  [](double e) { return e == 0; })) {
    return {0.0, curve.alpha.back()};
  }
  const double log_inv_delta = -std::log(delta);
  DpGuarantee best{std::numeric_limits<double>::infinity(), 0};
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double eps = curve.epsilon[i] + log_inv_delta / (curve.alpha[i] - 1.0);
    if (eps < best.epsilon) best = {eps, curve.alpha[i]};
  }
  return best;
}

AccountantState::AccountantState(double sigma, double sensitivity, double gamma,
                                 const std::vector<double>& grid)
    : sigma_(sigma),
      sensitivity_(sensitivity),
      gamma_(gamma),
      per_round_(sigma == 0 ? RdpCurve{grid, std::vector<double>(
                                           grid.size(), std::numeric_limits<double>::infinity())}
                            : AmplifyBySubsampling(BaseCurve(sigma, sensitivity, grid), gamma)) {}

void AccountantState::RecordRounds(int64_t rounds) {
  if (rounds < 0) throw InvalidArgument("rounds must be non-negative");
  rounds_ += rounds;
}

DpGuarantee EpsilonFor(double sigma, double sensitivity, double gamma,
                       int64_t rounds, double delta) {
  AccountantState state(sigma, sensitivity, gamma);
  state.RecordRounds(rounds);
  return state.Guarantee(delta);
}

double CalibrateSigma(double target_epsilon, double delta, double sensitivity,
                      double gamma, int64_t rounds) {
  if (!(target_epsilon > 0)) throw InvalidArgument("target epsilon must be positive");
  if (rounds <= 0) throw InvalidArgument("calibration needs at least one round");
  auto eps_at = [&](double sigma) {
    return EpsilonFor(sigma, sensitivity, gamma, rounds, delta).epsilon;
  };
  double lo = sensitivity * 1e-3;
  double hi = sensitivity;
  while (eps_at(hi) > target_epsilon) {
    lo = hi;
    hi *= 2;
    if (hi > sensitivity * 1e9) throw InvalidArgument("target epsilon unreachable");
  }
  while (hi / lo > 1 + 1e-6) {
    const double mid = std::sqrt(lo * hi);
    (eps_at(mid) > target_epsilon ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace d2pfed
