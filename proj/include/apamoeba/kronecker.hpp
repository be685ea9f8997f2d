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

#ifndef APAMOEBA_KRONECKER_HPP
#define APAMOEBA_KRONECKER_HPP

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "apamoeba/rational.hpp"

namespace apamoeba {

/// t > 0 and m with ||mu t - a - 2 pi m|| = error (Euclidean).
struct KroneckerSolution {
  double t = 0;
  IntegerVector m;
  double error = 0;
};

enum class KroneckerStatus { kSuccess, kExhausted };
std::string_view to_string(KroneckerStatus s);

struct KroneckerResult {
  KroneckerStatus status = KroneckerStatus::kExhausted;
  /// The solution on success, otherwise the best local minimum seen.
  std::optional<KroneckerSolution> solution;
  double t_max = 0;
  std::size_t pieces = 0;  // intervals of constant nearest m that were swept
};

/// Error with m the nearest integer vector to (mu t - a) / 2 pi.
KroneckerSolution kronecker_error(const Eigen::VectorXd& mu, const Eigen::VectorXd& a, double t);

/// Sweeps (0, t_max] over the intervals on which the nearest m is constant
/// and minimizes the quadratic error exactly on each. Returns the first
/// local minimum, in increasing t, whose re-evaluated error is below eps.
/// Smaller eps never yields a smaller t. The caller asserts that the
/// entries of mu are linearly independent over Q; nothing here checks it.
KroneckerResult kronecker_approximate(const Eigen::VectorXd& mu, const Eigen::VectorXd& a, double eps, double t_max);

struct GapScan {
  std::vector<KroneckerSolution> solutions;  // local minima below eps, increasing t
  double max_gap = 0;                        // largest gap between consecutive solutions
  double horizon = 0;
};

GapScan return_gap_scan(const Eigen::VectorXd& mu, const Eigen::VectorXd& a, double eps, double horizon);

}  // namespace apamoeba

#endif  // APAMOEBA_KRONECKER_HPP
