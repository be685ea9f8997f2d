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

#ifndef APAMOEBA_JESSEN_HPP
#define APAMOEBA_JESSEN_HPP

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "apamoeba/exp_sum.hpp"

namespace apamoeba {

/// Where the mean of log|f(x + i y)| is taken. kBox averages over the
/// x-boxes of the schedule. kTorus averages the lifted function over T^k
/// (k = group rank), which is the exact limit of the box means. kAuto picks
/// the torus for non-Laurent sums of rank <= max_torus_rank.
enum class JessenDomain { kAuto, kBox, kTorus };
std::string_view to_string(JessenDomain d);

/// Truncation policy for the box means
///   J(y) = lim_{s -> inf} (2s)^{-p} int_{[-s, s]^p} log|f(x + i y)| dx.
struct QuadratureConfig {
  /// Strictly increasing box half-widths; the default doubles from 8 pi,
  /// so integer-frequency sums always see whole periods.
  std::vector<double> box_schedule = default_schedule();
  /// Jittered-grid points per batch, split as n^p with n = round(N^(1/p)).
  int samples_per_batch = 4096;
  /// Independent batches per stage; the standard error is their spread.
  int batches = 8;
  /// log|f| is clipped below at log(fiber scale) - clip_floor.
  double clip_floor = 40.0;
  /// Estimates with a larger clipped fraction are flagged unreliable.
  double clip_limit = 1e-3;
  double stabilization_tol = 2e-3;
  JessenDomain domain = JessenDomain::kAuto;
  int max_torus_rank = 4;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  static std::vector<double> default_schedule();
  void validate() const;
};

enum class JessenStatus { kStabilized, kNonStabilized };
std::string_view to_string(JessenStatus s);

struct JessenStage {
  double box_half_width = 0;
  double value = 0;
  double std_error = 0;
  double clipped_fraction = 0;
};

struct JessenEstimate {
  double value = 0;
  double std_error = 0;
  double box_half_width = 0;  // 0 on the torus
  std::int64_t sample_count = 0;
  double clipped_fraction = 0;
  JessenDomain domain = JessenDomain::kBox;
  JessenStatus status = JessenStatus::kNonStabilized;
  bool reliable = false;  // clipped_fraction below the configured limit
  std::size_t stage_index = 0;
  std::vector<JessenStage> stages;

  bool stabilized() const { return status == JessenStatus::kStabilized; }
};

/// kBox or kTorus; never kAuto.
JessenDomain resolve_domain(const ExponentialSum& sum, const QuadratureConfig& cfg);

/// Stratified box mean of log|f(x + i y)|, advanced through the schedule
/// until two consecutive stages agree within
/// tol + 2 (sigma_k + sigma_{k+1}). On the torus the stages are independent
/// repeats of the same mean. Deterministic given the seed.
JessenEstimate estimate_jessen(const ExponentialSum& sum, const Eigen::VectorXd& y, const QuadratureConfig& cfg);

/// Per-batch means at one fixed schedule stage. Batch b of stage k always
/// uses the same sample points whatever y is, so differences across y
/// share their randomness.
std::vector<double> jessen_batch_means(const ExponentialSum& sum, const Eigen::VectorXd& y, std::size_t stage,
                                       const QuadratureConfig& cfg, std::int64_t* clipped = nullptr);

struct MeanMotionEstimate {
  Eigen::VectorXd value;
  Eigen::VectorXd std_error;
  JessenStatus status = JessenStatus::kNonStabilized;
  double box_half_width = 0;
  double step = 0;
};

/// c = -grad J(y) by central differences with step h, at the stage where
/// J(y) stabilized. Errors are per-batch spreads of the differences.
MeanMotionEstimate mean_motion_gradient(const ExponentialSum& sum, const Eigen::VectorXd& y, double h,
                                        const QuadratureConfig& cfg);

struct ArgumentConfig {
  double half_length = 64 * 3.14159265358979323846;  // T
  int lines = 8;
  /// Relative modulus |f| / fiber scale below which a path counts as hitting a zero.
  double zero_threshold = 1e-8;
  double spread_tolerance = 0.05;
  int max_halvings = 40;
  std::uint64_t seed = 0;
  unsigned threads = 0;

  void validate() const;
};

enum class ArgumentStatus { kOk, kZeroOnPath, kNonConverged };
std::string_view to_string(ArgumentStatus s);

struct ArgumentEstimate {
  double value = 0;
  double std_error = 0;
  double spread = 0;  // max - min over lines
  double min_relative_modulus = 0;
  ArgumentStatus status = ArgumentStatus::kOk;
  std::vector<double> per_line;
};

/// (1 / 2T) * increment of Arg f along x_axis in [-T, T], averaged over
/// lines whose other coordinates are drawn at random.
ArgumentEstimate mean_motion_argument(const ExponentialSum& sum, const Eigen::VectorXd& y, Eigen::Index axis,
                                      const ArgumentConfig& cfg);

/// Continuous argument increment of f(x0 + t e_axis + i y) for t in [a, b],
/// with step halving until every step turns the phase by less than pi/2.
/// Returns false (ZeroOnPath) if the relative modulus drops below the
/// threshold.
struct ArgumentTrack {
  double increment = 0;
  double min_relative_modulus = 0;
  bool ok = true;
};
ArgumentTrack track_argument(const FiberView& fiber, const Eigen::VectorXd& x0, Eigen::Index axis, double a,
                             double b, double initial_step, double zero_threshold, int max_halvings);

struct LinearityReport {
  Eigen::VectorXd slope;  // fitted gradient of J
  double intercept = 0;
  Eigen::VectorXd mean_motion;  // -slope
  Eigen::VectorXd residuals;
  double max_residual = 0;
  double max_std_error = 0;
  std::vector<JessenEstimate> estimates;
};

/// Least-squares affine fit of J over >= p + 2 points.
LinearityReport check_linearity(const ExponentialSum& sum, std::span<const Eigen::VectorXd> points,
                                const QuadratureConfig& cfg);

}  // namespace apamoeba

#endif  // APAMOEBA_JESSEN_HPP
