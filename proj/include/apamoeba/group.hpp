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

#ifndef APAMOEBA_GROUP_HPP
#define APAMOEBA_GROUP_HPP

#include <optional>
#include <span>
#include <vector>

#include "apamoeba/exp_sum.hpp"
#include "apamoeba/rational.hpp"

namespace apamoeba {

/// Row-style Hermite normal form of the lattice spanned by the rows of a.
///
/// Returns only the nonzero rows: pivots strictly move right, pivots are
/// positive and entries above a pivot lie in [0, pivot).
IntegerMatrix hermite_normal_form(IntegerMatrix a);

/// Rank over Q via fraction-free elimination.
Eigen::Index rational_rank(const RationalMatrix& rows);

/// Z-basis of a finitely generated subgroup of R^p whose elements are exact
/// rational combinations of the base irrationals.
class GroupBasis {
 public:
  GroupBasis() = default;

  /// Basis of the group generated by `elements` (HNF after clearing denominators).
  static GroupBasis generated_by(std::span<const FrequencyVector> elements);

  /// Uses `generators` verbatim; throws if they are Q-dependent. Any set
  /// related to an HNF basis by a unimodular change is accepted.
  static GroupBasis from_generators(std::vector<FrequencyVector> generators, Eigen::Index p, Eigen::Index b);

  std::size_t rank() const { return generators_.size(); }
  bool empty() const { return generators_.empty(); }
  Eigen::Index dimension() const { return p_; }
  Eigen::Index base_size() const { return b_; }
  const std::vector<FrequencyVector>& generators() const { return generators_; }

  /// Generator j realized numerically, stacked as a p x k matrix.
  Eigen::MatrixXd realized(const BaseIrrationals& base) const;

  /// Exact integer combination of a rational coordinate vector.
  FrequencyVector combine(const IntegerVector& coefficients) const;
  FrequencyVector combine(const RationalVector& coefficients) const;

 private:
  std::vector<FrequencyVector> generators_;
  Eigen::Index p_ = 0;
  Eigen::Index b_ = 0;
};

GroupBasis group_basis(std::span<const FrequencyVector> spectrum);

/// Exact rational coordinates of v in the Q-span of the basis, or nullopt if
/// v is outside that span.
std::optional<RationalVector> coordinates_in_span(const FrequencyVector& v, const GroupBasis& basis);

/// Integer coordinates of v, or nullopt (NotInGroup).
std::optional<IntegerVector> express_in_basis(const FrequencyVector& v, const GroupBasis& basis);

/// k x n matrix of integer term exponents in the basis: column t holds the
/// coordinates of term t's frequency. Throws std::logic_error if a frequency
/// is outside the group.
Eigen::MatrixXd lift_exponents(const ExponentialSum& sum, const GroupBasis& basis);

}  // namespace apamoeba

#endif  // APAMOEBA_GROUP_HPP
