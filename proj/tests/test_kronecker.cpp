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

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "apamoeba/kronecker.hpp"
#include "apamoeba/random.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace apamoeba {
namespace {

using fixtures::vec;
constexpr double kPi = std::numbers::pi;

TEST(Kronecker, OneDimensionIsExact) {
  const KroneckerResult r = kronecker_approximate(vec({1}), vec({kPi}), 1e-3, 100);
  ASSERT_EQ(r.status, KroneckerStatus::kSuccess);
  EXPECT_NEAR(r.solution->t, kPi, 1e-12);
  EXPECT_NEAR(r.solution->error, 0, 1e-12);
  EXPECT_EQ(r.solution->m(0), 0);
}

TEST(Kronecker, ConvergentErrorsOfSqrt2) {
  const Eigen::VectorXd mu = vec({1, std::sqrt(2.0)});
  const Eigen::VectorXd a = vec({0, 0});
  const auto conv = oracle::sqrt2_convergents(6);
  for (const auto& [p, q] : conv) {
    const double expected = 2 * kPi * std::abs(q * std::sqrt(2.0) - p);
    EXPECT_NEAR(kronecker_error(mu, a, 2 * kPi * q).error, expected, 1e-9) << p << "/" << q;
  }
  EXPECT_NEAR(kronecker_error(mu, a, 10 * kPi).error, oracle::kKroneckerQ5, 1e-9);
  EXPECT_NEAR(kronecker_error(mu, a, 58 * kPi).error, oracle::kKroneckerQ29, 1e-9);
}

TEST(Kronecker, Sqrt2TargetIsVerified) {
  const Eigen::VectorXd mu = vec({1, std::sqrt(2.0)});
  const Eigen::VectorXd a = vec({kPi, 0});
  const KroneckerResult r = kronecker_approximate(mu, a, 0.05, 1e4);
  ASSERT_EQ(r.status, KroneckerStatus::kSuccess);
  const KroneckerSolution again = kronecker_error(mu, a, r.solution->t);
  EXPECT_LT(again.error, 0.05);
  EXPECT_EQ(again.m, r.solution->m);
  EXPECT_GT(r.solution->t, 0);
}

TEST(Kronecker, SmallerEpsilonNeverFindsEarlierTime) {
  const Eigen::VectorXd mu = vec({1, std::sqrt(3.0), std::numbers::e});
  const Eigen::VectorXd a = vec({0.5, 1.0, 2.0});
  double last = 0;
  for (double eps : {1.0, 0.5, 0.2, 0.1, 0.05}) {
    const KroneckerResult r = kronecker_approximate(mu, a, eps, 1e5);
    ASSERT_EQ(r.status, KroneckerStatus::kSuccess) << eps;
    EXPECT_GE(r.solution->t, last);
    last = r.solution->t;
  }
}

TEST(Kronecker, RationalRatioIsExhausted) {
  // mu = (1, 2) keeps (t, 2t) on a closed subgroup that misses (0, pi).
  const KroneckerResult r = kronecker_approximate(vec({1, 2}), vec({0, kPi}), 1e-2, 1e3);
  EXPECT_EQ(r.status, KroneckerStatus::kExhausted);
  ASSERT_TRUE(r.solution.has_value());
  EXPECT_GT(r.solution->error, 1.0);
}

TEST(Kronecker, RejectsBadInput) {
  EXPECT_THROW(kronecker_approximate(vec({1}), vec({1, 2}), 0.1, 10), std::invalid_argument);
  EXPECT_THROW(kronecker_approximate(vec({1}), vec({1}), 0, 10), std::invalid_argument);
}

TEST(GapScan, OneDimensionHasGapTwoPi) {
  const GapScan s = return_gap_scan(vec({1}), vec({kPi}), 1e-3, 100);
  ASSERT_EQ(s.solutions.size(), 16u);
  EXPECT_NEAR(s.max_gap, 2 * kPi, 1e-9);
}

TEST(GapScan, Sqrt2GapsAreBounded) {
  const GapScan s = return_gap_scan(vec({1, std::sqrt(2.0)}), vec({kPi, 0}), 0.2, 2000);
  ASSERT_GT(s.solutions.size(), 5u);
  for (const auto& sol : s.solutions) EXPECT_LT(sol.error, 0.2);
  for (std::size_t i = 1; i < s.solutions.size(); ++i) EXPECT_GT(s.solutions[i].t, s.solutions[i - 1].t);
  EXPECT_GT(s.max_gap, 0);
}

TEST(Kronecker, RandomInstancesSelfVerify) {
  Stream rng = make_stream(11, StreamTag::kTest, 6);
  for (int i = 0; i < 40; ++i) {
    const int p = 1 + static_cast<int>(rng.next_u64() % 3);
    Eigen::VectorXd mu(p), a(p);
    for (int j = 0; j < p; ++j) {
      mu(j) = rng.uniform(0.3, 3.0);
      a(j) = rng.uniform(-kPi, kPi);
    }
    const double eps = rng.uniform(0.05, 0.5);
    const KroneckerResult r = kronecker_approximate(mu, a, eps, 2e4);
    if (r.status == KroneckerStatus::kSuccess) {
      EXPECT_LT(kronecker_error(mu, a, r.solution->t).error, eps);
    } else {
      ASSERT_TRUE(r.solution.has_value());
      EXPECT_GE(r.solution->error, eps);
    }
  }
}

}  // namespace
}  // namespace apamoeba
