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

#ifndef APAMOEBA_EXP_SUM_HPP
#define APAMOEBA_EXP_SUM_HPP

#include <complex>
#include <compare>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "apamoeba/rational.hpp"

namespace apamoeba {

using Complex = std::complex<double>;
using VectorXc = Eigen::VectorXcd;

/// Real scalars beta_1 = 1, beta_2, ... over which frequencies are written.
///
/// The user asserts Q-linear independence of the values; it is recorded but
/// never checked.
class BaseIrrationals {
 public:
  BaseIrrationals();  // just beta_1 = 1
  BaseIrrationals(std::vector<double> values, std::vector<std::string> labels);

  std::size_t size() const { return values_.size(); }
  const Eigen::VectorXd& values() const { return values_; }
  const std::vector<std::string>& labels() const { return labels_; }

  friend bool operator==(const BaseIrrationals& a, const BaseIrrationals& b) {
    return a.labels_ == b.labels_ && a.values_ == b.values_;
  }

 private:
  Eigen::VectorXd values_;
  std::vector<std::string> labels_;
};

/// lambda in R^p written exactly as lambda_j = sum_m coords(j, m) * beta_m.
class FrequencyVector {
 public:
  FrequencyVector() = default;
  explicit FrequencyVector(RationalMatrix coords);

  static FrequencyVector zero(Eigen::Index p, Eigen::Index b);
  /// Integer frequency over beta = (1), e.g. a Laurent exponent.
  static FrequencyVector from_integers(const std::vector<std::int64_t>& m);

  Eigen::Index dimension() const { return coords_.rows(); }
  Eigen::Index base_size() const { return coords_.cols(); }
  const RationalMatrix& coords() const { return coords_; }
  const Rational& operator()(Eigen::Index j, Eigen::Index m) const { return coords_(j, m); }

  bool is_zero() const;
  /// Row-major flattening (j outer, m inner) used by the lattice code.
  RationalVector flattened() const;
  static FrequencyVector unflatten(const RationalVector& flat, Eigen::Index p, Eigen::Index b);

  FrequencyVector operator-() const { return FrequencyVector(RationalMatrix(-coords_)); }
  friend FrequencyVector operator+(const FrequencyVector& a, const FrequencyVector& b);
  friend FrequencyVector operator-(const FrequencyVector& a, const FrequencyVector& b);
  friend FrequencyVector operator*(const Rational& k, const FrequencyVector& v);

  friend bool operator==(const FrequencyVector& a, const FrequencyVector& b);
  /// Lexicographic over the row-major flattening.
  friend std::strong_ordering operator<=>(const FrequencyVector& a, const FrequencyVector& b);

  std::string str() const;

 private:
  RationalMatrix coords_;
};

/// Numeric realization lambda_j = sum_m Q(j, m) beta_m.
Eigen::VectorXd realize(const FrequencyVector& freq, const BaseIrrationals& basis_values);

struct Term {
  Complex coefficient;
  FrequencyVector frequency;
  std::string label;  // optional; empty when unlabeled
};

/// Finite sum f(z) = sum_t c_t exp(i <z, lambda_t>) over C^p.
///
/// Construction canonicalizes: terms sharing a frequency are merged,
/// zero coefficients dropped, and the result is ordered lexicographically by
/// frequency. Immutable afterwards.
class ExponentialSum {
 public:
  ExponentialSum(Eigen::Index dimension, BaseIrrationals basis, std::vector<Term> terms);

  /// Sum over beta = (1) with integer frequency vectors.
  static ExponentialSum laurent(const std::vector<std::pair<Complex, std::vector<std::int64_t>>>& terms);

  Eigen::Index dimension() const { return dimension_; }
  const BaseIrrationals& basis() const { return basis_; }
  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  /// p x n matrix of realized frequencies, one column per term.
  const Eigen::MatrixXd& realized() const { return realized_; }
  const Eigen::VectorXcd& coefficients() const { return coefficients_; }

  /// max_t |lambda_t(axis)|, 0 when every frequency has vanishing axis component.
  double max_abs_frequency(Eigen::Index axis) const;

  /// True when every frequency has an integer axis component and nothing
  /// outside beta_1 on that axis.
  bool integer_on_axis(Eigen::Index axis) const;
  bool is_laurent() const;

  /// Same sum with every coefficient multiplied by k.
  ExponentialSum scaled(Complex k) const;
  /// f(z + t) for a real shift t.
  ExponentialSum translated(const Eigen::VectorXd& t) const;

  friend bool operator==(const ExponentialSum& a, const ExponentialSum& b);

 private:
  Eigen::Index dimension_;
  BaseIrrationals basis_;
  std::vector<Term> terms_;
  Eigen::MatrixXd realized_;
  Eigen::VectorXcd coefficients_;
};

/// Raised when some term's modulus exp(log|c| - <y, lambda>) leaves the
/// double range.
class DomainTooDeep : public std::overflow_error {
 public:
  DomainTooDeep(std::size_t term_index, double log_modulus);
  std::size_t term_index() const { return term_index_; }
  double log_modulus() const { return log_modulus_; }

 private:
  std::size_t term_index_;
  double log_modulus_;
};

/// f(z) = sum c_t exp(i <z, lambda_t>), accumulated in Scalar precision.
template <typename Scalar>
std::complex<Scalar> evaluate(const ExponentialSum& sum,
                              const Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>& z);

inline Complex evaluate(const ExponentialSum& sum, const VectorXc& z) {
  return evaluate<double>(sum, z);
}

/// Exact set of term frequencies, in canonical order.
std::vector<FrequencyVector> spectrum(const ExponentialSum& sum);

/// f restricted to the fiber {x + i y}, rescaled so the largest term has
/// modulus 1: f(x + i y) = exp(log_shift) * sum_t a_t exp(i <x, lambda_t>).
///
/// All fiber-level numerics (Jessen means, fiber minima, argument tracking)
/// go through this view so deep base points never overflow.
class FiberView {
 public:
  FiberView(const ExponentialSum& sum, const Eigen::VectorXd& y);

  /// Rescaled value sum_t a_t exp(i <x, lambda_t>).
  Complex scaled_value(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  /// Rescaled value and its x-gradient (one complex entry per axis).
  Complex scaled_value(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::VectorXcd& gradient) const;

  double log_shift() const { return log_shift_; }
  /// sum_t |a_t|; the fiber scale is exp(log_shift) * scaled_magnitude.
  double scaled_magnitude() const { return scaled_magnitude_; }
  double log_scale() const;
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  const Eigen::MatrixXd& frequencies() const { return frequencies_; }

  /// Same amplitudes over a different exponent matrix (one column per term),
  /// e.g. integer coordinates in a group basis for the lifted torus function.
  FiberView with_frequencies(Eigen::MatrixXd exponents) const;

 private:
  FiberView() = default;

  Eigen::VectorXcd amplitudes_;
  Eigen::MatrixXd frequencies_;  // p x n
  double log_shift_ = 0;
  double scaled_magnitude_ = 0;
};

}  // namespace apamoeba

#endif  // APAMOEBA_EXP_SUM_HPP
