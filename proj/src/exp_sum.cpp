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

#include "apamoeba/exp_sum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace apamoeba {

BaseIrrationals::BaseIrrationals() : values_(Eigen::VectorXd::Ones(1)), labels_{"1"} {}

BaseIrrationals::BaseIrrationals(std::vector<double> values, std::vector<std::string> labels)
    : values_(Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()))),
      labels_(std::move(labels)) {
  if (values_.size() == 0) throw std::invalid_argument("base irrationals: at least one value required");
  if (labels_.size() != static_cast<std::size_t>(values_.size())) {
    throw std::invalid_argument("base irrationals: label count does not match value count");
  }
  if (values_(0) != 1.0) throw std::invalid_argument("base irrationals: first value must be exactly 1");
  for (Eigen::Index m = 0; m < values_.size(); ++m) {
    if (!std::isfinite(values_(m)) || values_(m) == 0.0) {
      throw std::invalid_argument("base irrationals: value '" + labels_[m] + "' must be finite and nonzero");
    }
  }
}

// ---------------------------------------------------------------------------

FrequencyVector::FrequencyVector(RationalMatrix coords) : coords_(std::move(coords)) {
  if (coords_.rows() < 1 || coords_.cols() < 1) {
    throw std::invalid_argument("frequency vector must be at least 1 x 1");
  }
}

FrequencyVector FrequencyVector::zero(Eigen::Index p, Eigen::Index b) {
  return FrequencyVector(RationalMatrix::Constant(p, b, Rational(0)));
}

FrequencyVector FrequencyVector::from_integers(const std::vector<std::int64_t>& m) {
  RationalMatrix q(static_cast<Eigen::Index>(m.size()), 1);
  for (std::size_t j = 0; j < m.size(); ++j) q(static_cast<Eigen::Index>(j), 0) = Rational(m[j]);
  return FrequencyVector(std::move(q));
}

bool FrequencyVector::is_zero() const {
  for (Eigen::Index j = 0; j < coords_.rows(); ++j)
    for (Eigen::Index m = 0; m < coords_.cols(); ++m)
      if (!coords_(j, m).is_zero()) return false;
  return true;
}

RationalVector FrequencyVector::flattened() const {
  RationalVector flat(coords_.size());
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < coords_.rows(); ++j)
    for (Eigen::Index m = 0; m < coords_.cols(); ++m) flat(k++) = coords_(j, m);
  return flat;
}

FrequencyVector FrequencyVector::unflatten(const RationalVector& flat, Eigen::Index p, Eigen::Index b) {
  if (flat.size() != p * b) throw std::invalid_argument("unflatten: size mismatch");
  RationalMatrix q(p, b);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index m = 0; m < b; ++m) q(j, m) = flat(k++);
  return FrequencyVector(std::move(q));
}

FrequencyVector operator+(const FrequencyVector& a, const FrequencyVector& b) {
  return FrequencyVector(RationalMatrix(a.coords_ + b.coords_));
}

FrequencyVector operator-(const FrequencyVector& a, const FrequencyVector& b) {
  return FrequencyVector(RationalMatrix(a.coords_ - b.coords_));
}

FrequencyVector operator*(const Rational& k, const FrequencyVector& v) {
  return FrequencyVector(RationalMatrix(v.coords_ * k));
}

bool operator==(const FrequencyVector& a, const FrequencyVector& b) {
  return a.coords_.rows() == b.coords_.rows() && a.coords_.cols() == b.coords_.cols() &&
         a.coords_ == b.coords_;
}

std::strong_ordering operator<=>(const FrequencyVector& a, const FrequencyVector& b) {
  if (auto c = a.coords_.rows() <=> b.coords_.rows(); c != 0) return c;
  if (auto c = a.coords_.cols() <=> b.coords_.cols(); c != 0) return c;
  for (Eigen::Index j = 0; j < a.coords_.rows(); ++j)
    for (Eigen::Index m = 0; m < a.coords_.cols(); ++m)
      if (auto c = a.coords_(j, m) <=> b.coords_(j, m); c != 0) return c;
  return std::strong_ordering::equal;
}

std::string FrequencyVector::str() const {
  std::ostringstream os;
  os << '[';
  for (Eigen::Index j = 0; j < coords_.rows(); ++j) {
    if (j) os << "; ";
    for (Eigen::Index m = 0; m < coords_.cols(); ++m) os << (m ? " " : "") << coords_(j, m);
  }
  os << ']';
  return os.str();
}

Eigen::VectorXd realize(const FrequencyVector& freq, const BaseIrrationals& basis_values) {
  if (freq.base_size() != static_cast<Eigen::Index>(basis_values.size())) {
    throw std::invalid_argument("realize: frequency has " + std::to_string(freq.base_size()) +
                                " base columns, basis has " + std::to_string(basis_values.size()));
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(freq.dimension());
  for (Eigen::Index j = 0; j < freq.dimension(); ++j)
    for (Eigen::Index m = 0; m < freq.base_size(); ++m)
      out(j) += freq(j, m).to_double() * basis_values.values()(m);
  return out;
}

// ---------------------------------------------------------------------------

ExponentialSum::ExponentialSum(Eigen::Index dimension, BaseIrrationals basis, std::vector<Term> terms)
    : dimension_(dimension), basis_(std::move(basis)) {
  if (dimension_ < 1) throw std::invalid_argument("exponential sum: dimension must be >= 1");
  const auto b = static_cast<Eigen::Index>(basis_.size());
  for (std::size_t t = 0; t < terms.size(); ++t) {
    const auto& term = terms[t];
    if (term.frequency.dimension() != dimension_ || term.frequency.base_size() != b) {
      throw std::invalid_argument("exponential sum: term " + std::to_string(t) + " frequency has shape " +
                                  std::to_string(term.frequency.dimension()) + "x" +
                                  std::to_string(term.frequency.base_size()) + ", expected " +
                                  std::to_string(dimension_) + "x" + std::to_string(b));
    }
    if (!std::isfinite(term.coefficient.real()) || !std::isfinite(term.coefficient.imag())) {
      throw std::invalid_argument("exponential sum: term " + std::to_string(t) + " has a non-finite coefficient");
    }
  }

  std::stable_sort(terms.begin(), terms.end(),
                   [](const Term& l, const Term& r) { return l.frequency < r.frequency; });
  for (auto& term : terms) {
    if (!terms_.empty() && terms_.back().frequency == term.frequency) {
      auto& last = terms_.back();
      if (!last.label.empty() && !term.label.empty() && last.label != term.label) {
        throw std::invalid_argument("exponential sum: frequency " + term.frequency.str() +
                                    " appears with conflicting labels '" + last.label + "' and '" +
                                    term.label + "'");
      }
      last.coefficient += term.coefficient;
      if (last.label.empty()) last.label = term.label;
    } else {
      terms_.push_back(std::move(term));
    }
  }
  std::erase_if(terms_, [](const Term& t) { return t.coefficient == Complex(0.0, 0.0); });
  if (terms_.empty()) throw std::invalid_argument("exponential sum: no nonzero terms");

  realized_.resize(dimension_, static_cast<Eigen::Index>(terms_.size()));
  coefficients_.resize(static_cast<Eigen::Index>(terms_.size()));
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    realized_.col(static_cast<Eigen::Index>(t)) = realize(terms_[t].frequency, basis_);
    coefficients_(static_cast<Eigen::Index>(t)) = terms_[t].coefficient;
  }
}

ExponentialSum ExponentialSum::laurent(
    const std::vector<std::pair<Complex, std::vector<std::int64_t>>>& terms) {
  if (terms.empty()) throw std::invalid_argument("laurent: no terms");
  std::vector<Term> out;
  for (const auto& [c, m] : terms) out.push_back({c, FrequencyVector::from_integers(m), {}});
  return ExponentialSum(static_cast<Eigen::Index>(terms.front().second.size()), BaseIrrationals(),
                        std::move(out));
}

double ExponentialSum::max_abs_frequency(Eigen::Index axis) const {
  return realized_.row(axis).cwiseAbs().maxCoeff();
}

bool ExponentialSum::integer_on_axis(Eigen::Index axis) const {
  for (const auto& t : terms_) {
    if (!t.frequency(axis, 0).is_integer()) return false;
    for (Eigen::Index m = 1; m < t.frequency.base_size(); ++m)
      if (!t.frequency(axis, m).is_zero()) return false;
  }
  return true;
}

bool ExponentialSum::is_laurent() const {
  for (Eigen::Index j = 0; j < dimension_; ++j)
    if (!integer_on_axis(j)) return false;
  return true;
}

ExponentialSum ExponentialSum::scaled(Complex k) const {
  auto terms = terms_;
  for (auto& t : terms) t.coefficient *= k;
  return ExponentialSum(dimension_, basis_, std::move(terms));
}

ExponentialSum ExponentialSum::translated(const Eigen::VectorXd& t) const {
  if (t.size() != dimension_) throw std::invalid_argument("translated: shift has wrong dimension");
  auto terms = terms_;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    double phase = t.dot(realized_.col(static_cast<Eigen::Index>(i)));
    terms[i].coefficient *= std::polar(1.0, phase);
  }
  return ExponentialSum(dimension_, basis_, std::move(terms));
}

bool operator==(const ExponentialSum& a, const ExponentialSum& b) {
  if (a.dimension_ != b.dimension_ || !(a.basis_ == b.basis_) || a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t t = 0; t < a.terms_.size(); ++t) {
    if (a.terms_[t].coefficient != b.terms_[t].coefficient) return false;
    if (!(a.terms_[t].frequency == b.terms_[t].frequency)) return false;
  }
  return true;
}

DomainTooDeep::DomainTooDeep(std::size_t term_index, double log_modulus)
    : std::overflow_error("term " + std::to_string(term_index) + " has log-modulus " +
                          std::to_string(log_modulus) + ", outside the floating range"),
      term_index_(term_index),
      log_modulus_(log_modulus) {}

template <typename Scalar>
std::complex<Scalar> evaluate(const ExponentialSum& sum,
                              const Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>& z) {
  if (z.size() != sum.dimension()) throw std::invalid_argument("evaluate: z has wrong dimension");
  const Scalar log_max = std::log(std::numeric_limits<Scalar>::max());
  std::complex<Scalar> acc(0, 0);
  for (std::size_t t = 0; t < sum.size(); ++t) {
    const auto lambda = sum.realized().col(static_cast<Eigen::Index>(t)).template cast<Scalar>();
    const Scalar re = z.real().dot(lambda);
    const Scalar im = z.imag().dot(lambda);
    const auto c = std::complex<Scalar>(sum.coefficients()(static_cast<Eigen::Index>(t)));
    const Scalar log_mod = std::log(std::abs(c)) - im;
    if (!std::isfinite(re) || !std::isfinite(im)) throw std::invalid_argument("evaluate: z must be finite");
    if (log_mod > log_max) throw DomainTooDeep(t, static_cast<double>(log_mod));
    acc += c * std::exp(std::complex<Scalar>(-im, re));
  }
  return acc;
}

template std::complex<double> evaluate<double>(const ExponentialSum&, const Eigen::VectorXcd&);
template std::complex<long double> evaluate<long double>(
    const ExponentialSum&, const Eigen::Matrix<std::complex<long double>, Eigen::Dynamic, 1>&);

std::vector<FrequencyVector> spectrum(const ExponentialSum& sum) {
  std::vector<FrequencyVector> out;
  out.reserve(sum.size());
  for (const auto& t : sum.terms()) out.push_back(t.frequency);
  return out;
}

// ---------------------------------------------------------------------------

FiberView::FiberView(const ExponentialSum& sum, const Eigen::VectorXd& y) : frequencies_(sum.realized()) {
  if (y.size() != sum.dimension()) throw std::invalid_argument("fiber: y has wrong dimension");
  if (!y.allFinite()) throw std::invalid_argument("fiber: y must be finite");
  const auto n = static_cast<Eigen::Index>(sum.size());
  Eigen::VectorXd log_mod(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    log_mod(t) = std::log(std::abs(sum.coefficients()(t))) - y.dot(frequencies_.col(t));
  }
  log_shift_ = log_mod.maxCoeff();
  amplitudes_.resize(n);
  scaled_magnitude_ = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    double mag = std::exp(log_mod(t) - log_shift_);
    amplitudes_(t) = mag * (sum.coefficients()(t) / std::abs(sum.coefficients()(t)));
    scaled_magnitude_ += mag;
  }
}

Complex FiberView::scaled_value(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  Complex acc(0, 0);
  for (Eigen::Index t = 0; t < amplitudes_.size(); ++t) {
    acc += amplitudes_(t) * std::polar(1.0, x.dot(frequencies_.col(t)));
  }
  return acc;
}

Complex FiberView::scaled_value(const Eigen::Ref<const Eigen::VectorXd>& x, Eigen::VectorXcd& gradient) const {
  gradient = Eigen::VectorXcd::Zero(frequencies_.rows());
  Complex acc(0, 0);
  for (Eigen::Index t = 0; t < amplitudes_.size(); ++t) {
    Complex term = amplitudes_(t) * std::polar(1.0, x.dot(frequencies_.col(t)));
    acc += term;
    gradient += (Complex(0, 1) * term) * frequencies_.col(t).cast<Complex>();
  }
  return acc;
}

FiberView FiberView::with_frequencies(Eigen::MatrixXd exponents) const {
  if (exponents.cols() != amplitudes_.size()) throw std::invalid_argument("fiber: exponent matrix has wrong width");
  FiberView out;
  out.amplitudes_ = amplitudes_;
  out.frequencies_ = std::move(exponents);
  out.log_shift_ = log_shift_;
  out.scaled_magnitude_ = scaled_magnitude_;
  return out;
}

double FiberView::log_scale() const { return log_shift_ + std::log(scaled_magnitude_); }

}  // namespace apamoeba
