// Copyright 2026 The apamoeba Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "apamoeba/kronecker.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace apamoeba {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

void check_inputs(const Eigen::VectorXd& mu, const Eigen::VectorXd& a, double eps, double t_max) {
  if (mu.size() == 0 || mu.size() != a.size()) throw std::invalid_argument("kronecker: mu and a need one nonzero size");
  if (!mu.allFinite() || !a.allFinite()) throw std::invalid_argument("kronecker: non-finite input");
  if (!(eps > 0) || !(t_max > 0) || !std::isfinite(t_max)) throw std::invalid_argument("kronecker: need eps > 0 and finite t_max > 0");
}

// Next t > t0 at which some coordinate of (mu t - a) / 2 pi crosses a half
// integer, or +inf when mu = 0.
double next_breakpoint(const Eigen::VectorXd& mu, const Eigen::VectorXd& a, double t0) {
  double next = std::numeric_limits<double>::infinity();
  const double guard = 1e-12 * (1 + std::abs(t0));
  for (Eigen::Index j = 0; j < mu.size(); ++j) {
    if (mu(j) == 0) continue;
    const double u = (mu(j) * t0 - a(j)) / kTwoPi;
    double h = mu(j) > 0 ? std::floor(u - 0.5) + 1.5 : std::ceil(u + 0.5) - 1.5;
    double t = (a(j) + kTwoPi * h) / mu(j);
    if (t <= t0 + guard) t = (a(j) + kTwoPi * (h + (mu(j) > 0 ? 1 : -1))) / mu(j);
    next = std::min(next, t);
  }
  return next;
}

// Visits every interior local minimum of the error in (0, t_max] in order
// of t; stops early when visit returns false.
template <typename Visit>
std::size_t sweep(const Eigen::VectorXd& mu, const Eigen::VectorXd& a, double t_max, Visit&& visit) {
  const double mu2 = mu.squaredNorm();
  std::size_t pieces = 0;
  double lo = 0;
  while (lo < t_max) {
    const double hi = std::min(next_breakpoint(mu, a, lo), t_max);
    ++pieces;
    const double mid = 0.5 * (lo + hi);
    const Eigen::VectorXd m = ((mu * mid - a) / kTwoPi).array().round().matrix();
    const double t_star = mu.dot(a + kTwoPi * m) / mu2;
    if (t_star > lo && t_star < hi) {
      if (!visit(kronecker_error(mu, a, t_star))) break;
    }
    lo = hi;
  }
  return pieces;
}

}  // namespace

std::string_view to_string(KroneckerStatus s) { return s == KroneckerStatus::kSuccess ? "success" : "exhausted"; }

KroneckerSolution kronecker_error(const Eigen::VectorXd& mu, const Eigen::VectorXd& a, double t) {
  KroneckerSolution s;
  s.t = t;
  const Eigen::VectorXd u = (mu * t - a) / kTwoPi;
  s.m = u.array().round().cast<std::int64_t>().matrix();
  s.error = (mu * t - a - kTwoPi * s.m.cast<double>()).norm();
  return s;
}

KroneckerResult kronecker_approximate(const Eigen::VectorXd& mu, const Eigen::VectorXd& a, double eps, double t_max) {
  check_inputs(mu, a, eps, t_max);
  KroneckerResult res;
  res.t_max = t_max;
  if (mu.isZero(0)) {
    // Constant error; any t works or none does.
    KroneckerSolution s = kronecker_error(mu, a, t_max);
    res.status = s.error < eps ? KroneckerStatus::kSuccess : KroneckerStatus::kExhausted;
    res.solution = s;
    res.pieces = 1;
    return res;
  }
  res.pieces = sweep(mu, a, t_max, [&](const KroneckerSolution& s) {
    if (!res.solution || s.error < res.solution->error) res.solution = s;
    if (s.error < eps) {
      res.solution = s;
      res.status = KroneckerStatus::kSuccess;
      return false;
    }
    return true;
  });
  return res;
}

GapScan return_gap_scan(const Eigen::VectorXd& mu, const Eigen::VectorXd& a, double eps, double horizon) {
  check_inputs(mu, a, eps, horizon);
  GapScan scan;
  scan.horizon = horizon;
  if (mu.isZero(0)) return scan;
  sweep(mu, a, horizon, [&](const KroneckerSolution& s) {
    if (s.error < eps) {
      if (!scan.solutions.empty()) scan.max_gap = std::max(scan.max_gap, s.t - scan.solutions.back().t);
      scan.solutions.push_back(s);
    }
    return true;
  });
  return scan;
}

}  // namespace apamoeba
