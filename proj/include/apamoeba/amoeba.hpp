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

#ifndef APAMOEBA_AMOEBA_HPP
#define APAMOEBA_AMOEBA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "apamoeba/exp_sum.hpp"
#include "apamoeba/group.hpp"
#include "apamoeba/jessen.hpp"

namespace apamoeba {

// ---------------------------------------------------------------------------
// Fiber minima

enum class FiberMethod { kAuto, kBox, kTorus };
std::string_view to_string(FiberMethod m);

struct FiberSearchConfig {
  /// kAuto searches the lifted torus when the group rank is small and the
  /// x-box otherwise; with rank > p the box is searched as well.
  FiberMethod method = FiberMethod::kAuto;
  /// x-box half width; 0 selects 20 pi / (smallest nonzero |lambda_j|).
  double box_half_width = 0;
  int torus_points_per_axis = 16;
  int box_points_per_period = 8;
  /// Level l adds a grid with 2^l times the base density (nested grids).
  int refinement_level = 0;
  int descent_starts = 4;
  int descent_iterations = 40;
  int max_grid_points = 1 << 16;
  int max_torus_rank = 4;
  std::uint64_t seed = 0;

  void validate() const;
};

struct FiberEstimate {
  Eigen::VectorXd y;
  double min_modulus = 0;       // inf over the fiber, absolute
  double relative_min = 0;      // min_modulus / fiber scale
  double log_scale = 0;         // log sum_t |c_t| exp(-<y, lambda_t>)
  Eigen::VectorXd argmin_x;     // best sampled x (empty if only the torus was searched and rank != p)
  Eigen::VectorXd argmin_phase; // best torus point in group-basis phases (empty for box-only searches)
  double box_half_width = 0;
  std::int64_t sample_count = 0;
  FiberMethod method = FiberMethod::kBox;
};

/// Reusable fiber minimizer for one sum. Holds the group basis and the
/// integer exponent matrix used to lift f(x + i y) to a Laurent-type
/// function on the torus T^k (k = rank of the group). Because the group
/// generators are Z-independent, x -> (<x, g_i>) has dense image in T^k and
/// the torus minimum equals the fiber infimum over all x in R^p.
class FiberSearch {
 public:
  FiberSearch(const ExponentialSum& sum, FiberSearchConfig cfg);

  FiberEstimate operator()(const Eigen::VectorXd& y) const;

  const GroupBasis& basis() const { return basis_; }
  /// k x n integer coordinates of the term frequencies in the basis.
  const Eigen::MatrixXd& lifted_exponents() const { return exponents_; }
  FiberMethod method() const { return method_; }
  double box_half_width() const { return box_half_width_; }

 private:
  ExponentialSum sum_;
  FiberSearchConfig cfg_;
  GroupBasis basis_;
  Eigen::MatrixXd exponents_;
  Eigen::MatrixXd realized_basis_;
  FiberMethod method_;
  double box_half_width_ = 0;
};

FiberEstimate fiber_min_modulus(const ExponentialSum& sum, const Eigen::VectorXd& y, const FiberSearchConfig& cfg);

// ---------------------------------------------------------------------------
// Classification and rasters

enum class CellClass : std::uint8_t { kIn = 0, kUncertain = 1, kOut = 2 };
std::string_view to_string(CellClass c);

/// Relative thresholds on min |f| / fiber scale.
struct Thresholds {
  double tau_in = 1e-4;
  double tau_out = 5e-3;
  void validate() const;
};

CellClass classify(const FiberEstimate& fiber, const Thresholds& th);
CellClass classify_point(const ExponentialSum& sum, const Eigen::VectorXd& y, const Thresholds& th,
                         const FiberSearchConfig& cfg = {});

struct BaseBox {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
  std::vector<int> resolution;

  Eigen::Index dimension() const { return lower.size(); }
  std::size_t cell_count() const;
  Eigen::VectorXd cell_width() const;
  std::vector<int> multi_index(std::size_t flat) const;
  std::size_t flat_index(const std::vector<int>& idx) const;  // axis 0 varies fastest
  Eigen::VectorXd center(std::size_t flat) const;
  void validate() const;
};

struct RasterConfig {
  Thresholds thresholds;
  FiberSearchConfig fiber;
  unsigned threads = 0;
};

struct AmoebaRaster {
  BaseBox box;
  Thresholds thresholds;
  std::vector<CellClass> cells;
  std::vector<double> relative_min;
  std::size_t numeric_failures = 0;  // cells forced to Uncertain by range errors

  std::size_t count(CellClass c) const;
};

AmoebaRaster rasterize_amoeba(const ExponentialSum& sum, const BaseBox& box, const RasterConfig& cfg);

// ---------------------------------------------------------------------------
// Laurent winding oracle

struct WindingConfig {
  int draws = 4;
  double zero_threshold = 1e-8;
  double integer_tolerance = 0.01;
  int max_halvings = 40;
  std::uint64_t seed = 0;
};

enum class WindingStatus { kOk, kZeroOnPath, kNonInteger };
std::string_view to_string(WindingStatus s);

struct WindingResult {
  WindingStatus status = WindingStatus::kOk;
  std::int64_t value = 0;
  std::vector<double> raw;  // per draw, in turns
};

/// Winding number of x_axis -> f(x + i y) over [-pi, pi]; the other
/// coordinates are drawn at random and every draw must round to the same
/// integer. Requires integer axis frequencies (std::invalid_argument otherwise).
WindingResult laurent_winding_order(const ExponentialSum& sum, const Eigen::VectorXd& y, Eigen::Index axis,
                                    const WindingConfig& cfg = {});

// ---------------------------------------------------------------------------
// Complement components

struct ComponentConfig {
  QuadratureConfig quadrature;
  ArgumentConfig argument;
  WindingConfig winding;
  double step_fraction = 0.01;  // finite-difference step as a fraction of the inradius
  double min_step = 1e-3;
  int constancy_points = 3;
  int convexity_pairs = 2000;
  double agreement_tolerance = 3e-2;
  double min_order_error = 1e-3;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

struct ComponentDiagnostics {
  std::size_t convexity_checked = 0;
  std::size_t convexity_violations = 0;
  double constancy_spread = 0;  // max coordinate spread of orders over sampled interior points
  bool estimators_agree = false;
  double max_estimator_gap = 0;
  std::string gradient_status;
  std::string argument_status;
  std::vector<std::string> notes;
};

struct ComponentRecord {
  int id = 0;
  std::vector<std::size_t> cells;
  std::vector<int> bbox_lower;  // cell multi-index bounds, inclusive
  std::vector<int> bbox_upper;
  Eigen::VectorXd representative;
  double inradius = 0;
  Eigen::VectorXd order_numeric;
  double order_error = 0;
  Eigen::VectorXd order_gradient;
  Eigen::VectorXd gradient_error;
  Eigen::VectorXd order_argument;
  Eigen::VectorXd argument_spread;
  std::optional<std::vector<std::int64_t>> winding;  // Laurent axes only
  std::optional<RationalVector> order_group;          // filled by the relations stage
  ComponentDiagnostics diagnostics;
};

/// Face-adjacent flood fill over Out cells; Uncertain and In cells are
/// barriers. Returns a label per cell (-1 outside every component) and the
/// component count. Labels follow scan order.
std::vector<int> label_components(const AmoebaRaster& raster, int* count = nullptr);

/// Flood fill plus per-component representative, mean-motion estimates and
/// diagnostics.
std::vector<ComponentRecord> components(const ExponentialSum& sum, const AmoebaRaster& raster,
                                        const ComponentConfig& cfg);

}  // namespace apamoeba

#endif  // APAMOEBA_AMOEBA_HPP
