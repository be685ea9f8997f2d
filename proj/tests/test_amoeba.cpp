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
#include <vector>

#include <gtest/gtest.h>

#include "apamoeba/amoeba.hpp"
#include "apamoeba/random.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace apamoeba {
namespace {

using fixtures::vec;

TEST(Fiber, ClosedFormMinimumOneVariable) {
  // min_x |e^{-y} e^{ix} - 2| = |e^{-y} - 2|.
  const auto f = fixtures::shifted_exponential();
  for (double y : {-2.0, -0.5, 0.0, 1.0}) {
    const FiberEstimate e = fiber_min_modulus(f, vec({y}), {});
    EXPECT_NEAR(e.min_modulus, std::abs(std::exp(-y) - 2), 1e-9) << "y = " << y;
    EXPECT_NEAR(e.relative_min, std::abs(std::exp(-y) - 2) / (std::exp(-y) + 2), 1e-9);
  }
}

TEST(Fiber, TorusLiftMatchesTriangleBound) {
  // For three terms the fiber infimum is max(0, 2 max|a_t| - sum|a_t|).
  const auto f = fixtures::sqrt2_sum();
  const FiberSearch search(f, {});
  EXPECT_EQ(search.method(), FiberMethod::kTorus);
  EXPECT_EQ(search.basis().rank(), 2u);
  for (double y : {-3.0, -1.9, -1.2, -0.5, 0.0, 2.0}) {
    const std::vector<double> m{std::exp(-y), std::exp(-std::sqrt(2.0) * y), 6.0};
    const double expected = std::max(0.0, 2 * std::max({m[0], m[1], m[2]}) - (m[0] + m[1] + m[2]));
    EXPECT_NEAR(search(vec({y})).min_modulus, expected, 1e-7 * (m[0] + m[1] + m[2])) << "y = " << y;
  }
}

TEST(Fiber, BoxSearchAgreesOnLaurentSum) {
  const auto f = fixtures::line();
  FiberSearchConfig box;
  box.method = FiberMethod::kBox;
  const Eigen::VectorXd y = vec({0.5, -1.5});
  const double torus = fiber_min_modulus(f, y, {}).min_modulus;
  const FiberEstimate b = fiber_min_modulus(f, y, box);
  EXPECT_EQ(b.method, FiberMethod::kBox);
  EXPECT_NEAR(b.min_modulus, torus, 1e-6);
  EXPECT_EQ(b.argmin_x.size(), 2);
}

TEST(Fiber, RefinementIsMonotone) {
  const auto f = ExponentialSum::laurent({{Complex(1, 0), {3}}, {Complex(0.7, 0.2), {1}}, {Complex(-1, 0), {0}}});
  FiberSearchConfig c0, c1;
  c0.descent_iterations = c1.descent_iterations = 0;
  c1.refinement_level = 2;
  for (double y : {-0.3, 0.0, 0.4}) {
    EXPECT_LE(fiber_min_modulus(f, vec({y}), c1).min_modulus, fiber_min_modulus(f, vec({y}), c0).min_modulus);
  }
}

TEST(Classify, ShiftedExponentialExamples) {
  const auto f = fixtures::shifted_exponential();
  const Thresholds th;
  EXPECT_EQ(classify_point(f, vec({0.0}), th), CellClass::kOut);
  EXPECT_EQ(classify_point(f, vec({-std::log(2.0)}), th), CellClass::kIn);
  EXPECT_EQ(classify_point(f, vec({-std::log(2.0) + 1e-3}), th), CellClass::kUncertain);
  EXPECT_EQ(classify_point(f, vec({-std::log(2.0) + 1e-6}), th), CellClass::kIn);
}

TEST(Classify, ThresholdValidation) {
  Thresholds th;
  th.tau_in = 1e-2;
  th.tau_out = 1e-3;
  EXPECT_THROW(th.validate(), std::invalid_argument);
}

TEST(BaseBox, IndexRoundTrip) {
  const BaseBox box{vec({-1, 0, 2}), vec({1, 3, 4}), {4, 3, 5}};
  box.validate();
  EXPECT_EQ(box.cell_count(), 60u);
  for (std::size_t i = 0; i < box.cell_count(); ++i) EXPECT_EQ(box.flat_index(box.multi_index(i)), i);
  EXPECT_EQ(box.multi_index(1), (std::vector<int>{1, 0, 0}));
  EXPECT_TRUE(box.center(0).isApprox(vec({-0.75, 0.5, 2.2})));
  const BaseBox bad{vec({0}), vec({0}), {3}};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Raster, LineAmoebaAgainstTriangleOracle) {
  const auto f = fixtures::line();
  const BaseBox box{vec({-3, -3}), vec({3, 3}), {41, 41}};
  const AmoebaRaster r = rasterize_amoeba(f, box, RasterConfig{});
  std::size_t checked = 0, agree = 0;
  for (std::size_t c = 0; c < r.cells.size(); ++c) {
    if (r.cells[c] == CellClass::kUncertain) continue;
    const Eigen::VectorXd y = box.center(c);
    const bool in = oracle::triangle_in_amoeba({std::exp(-y(0)), std::exp(-y(1)), 1.0});
    ++checked;
    agree += in == (r.cells[c] == CellClass::kIn);
  }
  EXPECT_EQ(agree, checked);
  EXPECT_EQ(r.numeric_failures, 0u);
  int count = 0;
  label_components(r, &count);
  EXPECT_EQ(count, 3);
}

TEST(Raster, IndependentOfThreadCount) {
  const auto f = fixtures::line();
  const BaseBox box{vec({-3, -3}), vec({3, 3}), {25, 25}};
  RasterConfig a, b;
  a.threads = 1;
  b.threads = 3;
  const AmoebaRaster ra = rasterize_amoeba(f, box, a), rb = rasterize_amoeba(f, box, b);
  EXPECT_EQ(ra.cells, rb.cells);
  EXPECT_EQ(ra.relative_min, rb.relative_min);
}

TEST(Raster, DeepCellsStayFinite) {
  // |exp(-800 y)| leaves the double range for y < -0.9; the rescaled fiber
  // still classifies those cells.
  const auto f = ExponentialSum::laurent({{Complex(1, 0), {800}}, {Complex(1, 0), {0}}});
  const BaseBox box{vec({-2}), vec({2}), {8}};
  const AmoebaRaster r = rasterize_amoeba(f, box, RasterConfig{});
  EXPECT_EQ(r.numeric_failures, 0u);
  EXPECT_EQ(r.count(CellClass::kOut), 8u);
}

TEST(Components, FloodFillTreatsUncertainAsBarrier) {
  AmoebaRaster r;
  r.box = BaseBox{vec({0, 0}), vec({4, 3}), {4, 3}};
  const auto O = CellClass::kOut, U = CellClass::kUncertain, I = CellClass::kIn;
  // Row-major by y: row 0 then row 1 then row 2.
  r.cells = {O, U, O, O,
             O, I, U, O,
             U, O, O, U};
  r.relative_min.assign(12, 0.5);
  int count = 0;
  const auto labels = label_components(r, &count);
  EXPECT_EQ(count, 3);
  EXPECT_EQ(labels[0], labels[4]);
  EXPECT_EQ(labels[2], labels[3]);
  EXPECT_EQ(labels[3], labels[7]);
  EXPECT_EQ(labels[9], labels[10]);
  EXPECT_NE(labels[9], labels[0]);
  EXPECT_EQ(labels[1], -1);
  EXPECT_EQ(labels[5], -1);
}

TEST(Winding, MatchesRootCountOracle) {
  Stream rng = make_stream(5, StreamTag::kTest, 1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::pair<oracle::cplx, int>> terms;
    std::vector<std::pair<Complex, std::vector<std::int64_t>>> spec;
    for (int k = -1; k <= 2; ++k) {
      const Complex c(rng.uniform(-2, 2), rng.uniform(-2, 2));
      terms.emplace_back(c, k);
      spec.push_back({c, {k}});
    }
    const auto f = ExponentialSum::laurent(spec);
    const double y = rng.uniform(-1.5, 1.5);
    const WindingResult w = laurent_winding_order(f, vec({y}), 0);
    if (w.status != WindingStatus::kOk) continue;
    EXPECT_EQ(w.value, oracle::laurent_order_1d(terms, std::exp(-y)));
  }
}

TEST(Winding, RequiresIntegerFrequencies) {
  EXPECT_THROW(laurent_winding_order(fixtures::sqrt2_sum(), vec({1.0}), 0), std::invalid_argument);
}

TEST(Components, ShiftedExponentialOrders) {
  const auto f = fixtures::shifted_exponential();
  const BaseBox box{vec({-3}), vec({3}), {601}};
  const AmoebaRaster r = rasterize_amoeba(f, box, RasterConfig{});
  const auto recs = components(f, r, ComponentConfig{});
  ASSERT_EQ(recs.size(), 2u);
  // Scan order: the component below -log 2 comes first.
  EXPECT_NEAR(recs[0].order_numeric(0), 1.0, 2e-2);
  EXPECT_NEAR(recs[1].order_numeric(0), 0.0, 2e-2);
  for (const auto& rec : recs) {
    ASSERT_TRUE(rec.winding.has_value());
    EXPECT_EQ((*rec.winding)[0], std::lround(rec.order_numeric(0)));
    EXPECT_TRUE(rec.diagnostics.estimators_agree);
    EXPECT_EQ(rec.diagnostics.convexity_violations, 0u);
    EXPECT_LT(rec.diagnostics.constancy_spread, 2e-2);
    EXPECT_GE(rec.order_error, 1e-3);
    EXPECT_GT(rec.inradius, 1.0);
  }
}

}  // namespace
}  // namespace apamoeba
