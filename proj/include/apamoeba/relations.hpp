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

#ifndef APAMOEBA_RELATIONS_HPP
#define APAMOEBA_RELATIONS_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "apamoeba/amoeba.hpp"
#include "apamoeba/exp_sum.hpp"
#include "apamoeba/group.hpp"
#include "apamoeba/rational.hpp"

namespace apamoeba {

struct SnapConfig {
  std::int64_t max_denominator = 16;  // N_max
  std::int64_t numerator_bound = 64;  // R, on numerators over the common denominator
  double residual_factor = 5.0;       // accept residual <= factor * error
  /// Enumeration is refused beyond this many free coordinates.
  int max_free_coordinates = 3;

  void validate() const;
};

/// r with sum_j r_j g_j ~ c for the realized generators g_j.
struct GroupExpression {
  RationalVector coefficients;
  double residual = 0;
  std::int64_t denominator = 1;  // lcm of the coefficient denominators
  std::int64_t height = 0;       // max |r_j| * denominator

  bool integral() const { return denominator == 1; }
  Eigen::VectorXd as_double() const;
};

enum class SnapStatus { kMatch, kNoMatch, kAmbiguous };
std::string_view to_string(SnapStatus s);

struct SnapResult {
  SnapStatus status = SnapStatus::kNoMatch;
  /// Best candidate by (denominator, height, residual); set for every status
  /// unless no candidate could be formed at all.
  std::optional<GroupExpression> expression;
  /// Competing candidates at the same complexity (kAmbiguous only).
  std::vector<GroupExpression> rivals;
  double tolerance = 0;
};

/// Rational coordinates of c over the basis with denominators <= N_max.
/// Full column rank: least squares, then per-coordinate continued-fraction
/// candidates. Otherwise: common denominators 1..N_max with bounded
/// numerators on the free coordinates and rounded pivot coordinates.
/// Among candidates within factor * error the simplest one wins.
SnapResult snap_to_group(const Eigen::VectorXd& c, double error, const GroupBasis& basis,
                         const BaseIrrationals& base, const SnapConfig& cfg = {});

/// Best rational approximations of x with denominator <= max_den
/// (convergents and semiconvergents), sorted by denominator.
std::vector<Rational> continued_fraction_candidates(double x, std::int64_t max_den);

struct PairRelation {
  int from = 0;  // D_0
  int to = 0;    // D_1
  Eigen::VectorXd difference;  // c(D_1) - c(D_0)
  double error = 0;
  SnapResult snap;
  double ratio = 0;  // ||r|| / ||c(D_1) - c(D_0)||, 0 when the difference vanishes
  /// r agrees with the difference of the individually snapped orders.
  bool consistent = false;
};

struct RelationReport {
  std::vector<PairRelation> pairs;
  double empirical_k = 0;
  bool all_matched = true;
  bool integral = true;  // every matched pair has denominator 1
};

/// Snaps each component order (filling order_group) and every pairwise
/// difference.
RelationReport component_relations(std::vector<ComponentRecord>& records, const GroupBasis& basis,
                                   const BaseIrrationals& base, const SnapConfig& cfg = {});

enum class Verdict { kVerified, kFailed };
std::string_view to_string(Verdict v);

struct ComponentVerdict {
  int id = 0;
  Eigen::VectorXd order;
  double error = 0;
  SnapResult snap;
  Verdict verdict = Verdict::kFailed;
};

struct VerifyConfig {
  RasterConfig raster;
  ComponentConfig components;
  SnapConfig snap;
};

struct TheoremVerdict {
  GroupBasis basis;
  AmoebaRaster raster;
  std::vector<ComponentRecord> records;
  // i: every order lies in the group.
  std::vector<ComponentVerdict> orders;
  Verdict assertion_i = Verdict::kFailed;
  // ii: pairwise differences are rational combinations of the basis.
  RelationReport relations;
  Verdict assertion_ii = Verdict::kFailed;
  // iii: finitely many components, integral differences.
  std::size_t component_count = 0;
  bool integrality = false;
  Verdict assertion_iii = Verdict::kFailed;
  std::vector<std::string> stage_errors;

  bool failed() const;
};

/// Raster, components, mean motions and relations in one pass. Stage
/// failures are recorded in stage_errors and fail the affected assertions.
TheoremVerdict verify_theorem(const ExponentialSum& sum, const BaseBox& box, const VerifyConfig& cfg);

}  // namespace apamoeba

#endif  // APAMOEBA_RELATIONS_HPP
