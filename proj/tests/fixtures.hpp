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

#ifndef APAMOEBA_TESTS_FIXTURES_HPP
#define APAMOEBA_TESTS_FIXTURES_HPP

#include <cmath>
#include <vector>

#include "apamoeba/exp_sum.hpp"

namespace fixtures {

using apamoeba::Complex;
using apamoeba::ExponentialSum;

// e^{iz} - 2
inline ExponentialSum shifted_exponential() { return ExponentialSum::laurent({{Complex(1, 0), {1}}, {Complex(-2, 0), {0}}}); }

// e^{iz_1} + e^{iz_2} + 1
inline ExponentialSum line() {
  return ExponentialSum::laurent({{Complex(1, 0), {1, 0}}, {Complex(1, 0), {0, 1}}, {Complex(1, 0), {0, 0}}});
}

inline apamoeba::BaseIrrationals sqrt2_base() { return apamoeba::BaseIrrationals({1.0, std::sqrt(2.0)}, {"1", "sqrt2"}); }

// a e^{iz} + b e^{i sqrt2 z} + c over beta = (1, sqrt2).
inline ExponentialSum sqrt2_sum(Complex a = 1, Complex b = 1, Complex c = 6) {
  using apamoeba::FrequencyVector;
  using apamoeba::Rational;
  apamoeba::RationalMatrix one(1, 2), root(1, 2);
  one << Rational(1), Rational(0);
  root << Rational(0), Rational(1);
  std::vector<apamoeba::Term> terms{{a, FrequencyVector(one), ""},
                                    {b, FrequencyVector(root), ""},
                                    {c, FrequencyVector::zero(1, 2), ""}};
  return ExponentialSum(1, sqrt2_base(), std::move(terms));
}

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double d : v) out(i++) = d;
  return out;
}

}  // namespace fixtures

#endif  // APAMOEBA_TESTS_FIXTURES_HPP
