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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "apamoeba/cli.hpp"
#include "apamoeba/kronecker.hpp"
#include "apamoeba/random.hpp"
#include "apamoeba/relations.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

namespace {

using namespace apamoeba;
using fixtures::vec;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects failed checks; the first few are quoted in the report line.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (ok) return;
    if (failures_.size() < 4) failures_.push_back(what);
    ++failed_;
  }
  Outcome outcome(std::string summary) const {
    Outcome o{failed_ == 0, std::move(summary)};
    if (failed_ > 0) {
      o.detail += "; " + std::to_string(failed_) + "/" + std::to_string(total_) + " checks failed:";
      for (const auto& f : failures_) o.detail += " [" + f + "]";
    }
    return o;
  }

 private:
  int total_ = 0;
  int failed_ = 0;
  std::vector<std::string> failures_;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream ss;
  ss.precision(digits);
  ss << v;
  return ss.str();
}

VerifyConfig default_verify() { return VerifyConfig{}; }

std::optional<std::size_t> find_snap_match(const ComponentRecord& r) {
  return r.order_group ? std::optional<std::size_t>(0) : std::nullopt;
}

// 1. e^{iz} - 2 on [-3, 3].
Outcome criterion_1(double budget) {
  Checks ck;
  const auto f = fixtures::shifted_exponential();
  const BaseBox box{vec({-3}), vec({3}), {601}};
  const TheoremVerdict v = verify_theorem(f, box, default_verify());
  const int zero_cell = static_cast<int>(std::floor((-std::log(2.0) + 3) / 0.01));
  for (std::size_t c = 0; c < v.raster.cells.size(); ++c) {
    if (v.raster.cells[c] == CellClass::kOut) continue;
    ck.expect(std::abs(static_cast<int>(c) - zero_cell) <= 1, "non-Out cell " + std::to_string(c));
  }
  ck.expect(v.component_count == 2, "component count " + std::to_string(v.component_count));

  QuadratureConfig q;
  double worst_j = 0;
  for (int i = 0; i < 20; ++i) {
    const double y = -2.85 + 0.3 * i;
    const double closed = std::max(-y, std::log(2.0));
    const double trap = oracle::torus_mean_log({{1, {1}}, {-2, {0}}}, {y}, 4096);
    const JessenEstimate e = estimate_jessen(f, vec({y}), q);
    worst_j = std::max(worst_j, std::abs(e.value - closed));
    ck.expect(std::abs(closed - trap) < 1e-6, "oracle disagreement at y=" + fmt(y));
    ck.expect(std::abs(e.value - closed) < 1e-2, "J at y=" + fmt(y) + " = " + fmt(e.value, 6));
  }
  if (v.records.size() == 2) {
    // Scan order puts the y < -log 2 component first.
    const double expected[2] = {1.0, 0.0};
    for (int k = 0; k < 2; ++k) {
      const auto& r = v.records[static_cast<std::size_t>(k)];
      ck.expect(std::abs(r.order_numeric(0) - expected[k]) < 2e-2, "order " + fmt(r.order_numeric(0)));
      ck.expect(std::abs(r.order_gradient(0) - expected[k]) < 2e-2, "gradient order " + fmt(r.order_gradient(0)));
      const bool snapped = r.order_group && (*r.order_group)(0) == Rational(static_cast<std::int64_t>(expected[k]));
      ck.expect(snapped && (*r.order_group)(0).den() == 1, "snap of component " + std::to_string(k));
    }
  }
  ck.expect(v.assertion_i == Verdict::kVerified && v.assertion_ii == Verdict::kVerified &&
                v.assertion_iii == Verdict::kVerified,
            "verdict");
  (void)budget;
  return ck.outcome(std::to_string(v.component_count) + " components, In/Uncertain " +
                    std::to_string(v.raster.count(CellClass::kIn) + v.raster.count(CellClass::kUncertain)) +
                    " cells, max |J - closed form| " + fmt(worst_j, 2));
}

// 2. e^{iz_1} + e^{iz_2} + 1 on [-3, 3]^2.
Outcome criterion_2(double) {
  Checks ck;
  const auto f = fixtures::line();
  const BaseBox box{vec({-3, -3}), vec({3, 3}), {121, 121}};
  const TheoremVerdict v = verify_theorem(f, box, default_verify());
  ck.expect(v.component_count == 3, "component count " + std::to_string(v.component_count));
  ck.expect(v.basis.realized(f.basis()).isApprox(Eigen::MatrixXd::Identity(2, 2)), "basis is not the standard one");

  int cell_count = 0;
  const auto labels = label_components(v.raster, &cell_count);
  std::vector<Eigen::Vector2i> rounded;
  for (const auto& r : v.records) {
    const Eigen::Vector2i o(static_cast<int>(std::lround(r.order_numeric(0))), static_cast<int>(std::lround(r.order_numeric(1))));
    rounded.push_back(o);
    ck.expect((r.order_numeric - o.cast<double>()).cwiseAbs().maxCoeff() < 2e-2, "order not near an integer");
    ck.expect(r.winding && (*r.winding)[0] == o(0) && (*r.winding)[1] == o(1), "winding mismatch");
  }
  for (const Eigen::Vector2i& want : {Eigen::Vector2i(0, 0), Eigen::Vector2i(1, 0), Eigen::Vector2i(0, 1)}) {
    ck.expect(std::count(rounded.begin(), rounded.end(), want) == 1, "order set");
  }
  ck.expect(v.relations.pairs.size() == 3 && v.relations.all_matched && v.relations.integral, "relation table");

  // Membership: In/Out against the triangle inequalities, component against
  // the dominant term.
  const std::vector<Eigen::Vector2i> term_order{{1, 0}, {0, 1}, {0, 0}};
  std::size_t checked = 0, agree = 0;
  for (std::size_t c = 0; c < v.raster.cells.size(); ++c) {
    if (v.raster.cells[c] == CellClass::kUncertain) continue;
    ++checked;
    const Eigen::VectorXd y = box.center(c);
    const int dom = oracle::dominant_term({std::exp(-y(0)), std::exp(-y(1)), 1.0});
    if (v.raster.cells[c] == CellClass::kIn) {
      agree += dom < 0;
    } else if (dom >= 0 && labels[c] >= 0) {
      agree += rounded[static_cast<std::size_t>(labels[c])] == term_order[static_cast<std::size_t>(dom)];
    }
  }
  const double rate = checked ? static_cast<double>(agree) / static_cast<double>(checked) : 0;
  ck.expect(rate >= 0.99, "membership agreement " + fmt(rate));
  ck.expect(!v.failed(), "verdict");
  return ck.outcome(std::to_string(v.component_count) + " components, membership agreement " + fmt(100 * rate, 5) +
                    "% of " + std::to_string(checked) + " cells");
}

// 3. e^{iz} + e^{i sqrt2 z} + 6.
Outcome criterion_3(double) {
  Checks ck;
  const double r2 = std::sqrt(2.0);
  const double y_u = oracle::bisect([&](double y) { return std::exp(-y) + std::exp(-r2 * y) - 6; }, -3, 0);
  const double y_l = oracle::bisect([&](double y) { return std::exp(-r2 * y) - std::exp(-y) - 6; }, -3, 0);
  ck.expect(std::abs(y_u - oracle::kBandUpper) < 1e-12 && std::abs(y_l - oracle::kBandLower) < 1e-12, "frozen band");

  const auto f = fixtures::sqrt2_sum();
  const BaseBox box{vec({-4}), vec({3}), {701}};
  const TheoremVerdict v = verify_theorem(f, box, default_verify());
  const double w = 0.01;
  for (std::size_t c = 0; c < v.raster.cells.size(); ++c) {
    const double y = box.center(c)(0);
    const bool inside = y > y_l - w && y < y_u + w;
    const bool deep_inside = y > y_l + w && y < y_u - w;
    if (v.raster.cells[c] != CellClass::kOut) ck.expect(inside, "non-Out cell at y=" + fmt(y));
    if (deep_inside) ck.expect(v.raster.cells[c] == CellClass::kIn, "band cell at y=" + fmt(y) + " not In");
  }
  ck.expect(v.component_count == 2, "component count " + std::to_string(v.component_count));

  const Eigen::MatrixXd g = v.basis.realized(f.basis());
  ck.expect(v.basis.rank() == 2, "group rank");
  // Coordinates over {1, sqrt2} whichever order the basis lists them in.
  auto over_one_sqrt2 = [&](const RationalVector& r) {
    const Eigen::Index one = std::abs(g(0, 0) - 1) < 1e-12 ? 0 : 1;
    return std::make_pair(r(one), r(1 - one));
  };
  if (v.records.size() == 2 && v.basis.rank() == 2) {
    // Scan order: the y < y_l component (order sqrt2) first.
    const double expected[2] = {r2, 0.0};
    const std::pair<Rational, Rational> coords[2] = {{Rational(0), Rational(1)}, {Rational(0), Rational(0)}};
    for (int k = 0; k < 2; ++k) {
      const auto& r = v.records[static_cast<std::size_t>(k)];
      ck.expect(std::abs(r.order_numeric(0) - expected[k]) < 2e-2, "order " + fmt(r.order_numeric(0)));
      ck.expect(r.order_group && over_one_sqrt2(*r.order_group) == coords[k], "snap of component " + std::to_string(k));
    }
  }
  ck.expect(v.integrality, "integrality");
  ck.expect(!v.failed(), "verdict");
  std::string orders;
  for (const auto& r : v.records) orders += (orders.empty() ? "" : ", ") + fmt(r.order_numeric(0), 5);
  return ck.outcome(std::to_string(v.component_count) + " components, band [" + fmt(y_l, 6) + ", " + fmt(y_u, 6) +
                    "], orders " + orders);
}

ExponentialSum random_laurent(Stream& rng, int p, int terms) {
  std::vector<std::pair<Complex, std::vector<std::int64_t>>> spec;
  std::vector<std::vector<std::int64_t>> used;
  while (static_cast<int>(spec.size()) < terms) {
    std::vector<std::int64_t> n(static_cast<std::size_t>(p));
    for (auto& v : n) v = static_cast<std::int64_t>(rng.next_u64() % 5) - 2;
    if (std::find(used.begin(), used.end(), n) != used.end()) continue;
    used.push_back(n);
    spec.push_back({std::polar(rng.uniform(0.5, 2.0), rng.uniform(0, 2 * std::numbers::pi)), n});
  }
  return ExponentialSum::laurent(spec);
}

// 4. Gradient, argument and winding estimates agree at representatives.
Outcome criterion_4(double) {
  Checks ck;
  Stream rng = make_stream(2024, StreamTag::kTest, 4);
  std::size_t reps = 0;
  double worst = 0;
  for (int s = 0; s < 25; ++s) {
    const int p = 1 + s % 2;
    const int terms = 2 + (s / 2) % 2;
    const auto f = random_laurent(rng, p, terms);
    const BaseBox box = p == 1 ? BaseBox{vec({-3}), vec({3}), {201}} : BaseBox{vec({-3, -3}), vec({3, 3}), {41, 41}};
    const AmoebaRaster raster = rasterize_amoeba(f, box, RasterConfig{});
    const auto recs = components(f, raster, ComponentConfig{});
    for (const auto& r : recs) {
      ++reps;
      const std::string tag = "sum " + std::to_string(s) + " comp " + std::to_string(r.id);
      ck.expect(r.winding.has_value(), tag + ": winding failed");
      for (Eigen::Index j = 0; j < p; ++j) {
        const double gap = std::abs(r.order_gradient(j) - r.order_argument(j));
        worst = std::max(worst, gap);
        ck.expect(gap < 3e-2, tag + ": gap " + fmt(gap));
        if (!r.winding) continue;
        const auto w = (*r.winding)[static_cast<std::size_t>(j)];
        ck.expect(std::lround(r.order_gradient(j)) == w && std::lround(r.order_argument(j)) == w,
                  tag + ": rounding differs from winding");
      }
    }
  }
  return ck.outcome("25 sums, " + std::to_string(reps) + " representatives, max estimator gap " + fmt(worst, 3));
}

// 5. Midpoint convexity of the Jessen function.
Outcome criterion_5(double) {
  Checks ck;
  Stream rng = make_stream(2024, StreamTag::kTest, 5);
  int flagged = 0, tested = 0;
  double worst_excess = -1e300;
  const QuadratureConfig q;
  for (int i = 0; i < 200; ++i) {
    ExponentialSum f = fixtures::shifted_exponential();
    int p = 1;
    if (i % 4 == 3) {
      f = fixtures::sqrt2_sum(std::polar(rng.uniform(0.5, 2.0), rng.uniform(0, 6.28)),
                              std::polar(rng.uniform(0.5, 2.0), rng.uniform(0, 6.28)),
                              std::polar(rng.uniform(0.5, 6.0), rng.uniform(0, 6.28)));
    } else {
      p = 1 + i % 2;
      f = random_laurent(rng, p, 2 + static_cast<int>(rng.next_u64() % 2));
    }
    Eigen::VectorXd y0(p), y1(p);
    for (int j = 0; j < p; ++j) {
      y0(j) = rng.uniform(-2, 2);
      y1(j) = rng.uniform(-2, 2);
    }
    const double t = rng.uniform(0.05, 0.95);
    const JessenEstimate a = estimate_jessen(f, y0, q);
    const JessenEstimate b = estimate_jessen(f, y1, q);
    const JessenEstimate m = estimate_jessen(f, t * y0 + (1 - t) * y1, q);
    if (!a.stabilized() || !b.stabilized() || !m.stabilized()) {
      ++flagged;
      continue;
    }
    ++tested;
    const double se = std::sqrt(m.std_error * m.std_error + t * t * a.std_error * a.std_error +
                                (1 - t) * (1 - t) * b.std_error * b.std_error);
    const double excess = m.value - (t * a.value + (1 - t) * b.value);
    worst_excess = std::max(worst_excess, excess - 3 * se);
    ck.expect(excess <= 3 * se, "triple " + std::to_string(i) + ": excess " + fmt(excess) + " vs 3se " + fmt(3 * se));
  }
  ck.expect(flagged < 4, std::to_string(flagged) + " NonStabilized");
  return ck.outcome(std::to_string(tested) + " triples tested, " + std::to_string(flagged) +
                    " NonStabilized excluded, max (excess - 3se) " + fmt(worst_excess, 3));
}

// 6. Kronecker solutions re-verify by substitution.
Outcome criterion_6(double) {
  Checks ck;
  Stream rng = make_stream(2024, StreamTag::kTest, 6);
  int success = 0, exhausted = 0;
  for (int i = 0; i < 100; ++i) {
    const int p = 1 + i % 3;
    Eigen::VectorXd mu(p), a(p);
    for (int j = 0; j < p; ++j) {
      mu(j) = rng.uniform(0.2, 3.0);
      a(j) = rng.uniform(-std::numbers::pi, std::numbers::pi);
    }
    const double eps = std::exp(rng.uniform(std::log(1e-2), std::log(0.5)));
    const KroneckerResult r = kronecker_approximate(mu, a, eps, 1e4);
    if (r.status == KroneckerStatus::kSuccess) {
      ++success;
      const Eigen::VectorXd resid = mu * r.solution->t - a - 2 * std::numbers::pi * r.solution->m.cast<double>();
      ck.expect(r.solution->t > 0 && resid.norm() < eps, "instance " + std::to_string(i) + " does not re-verify");
    } else {
      ++exhausted;
      ck.expect(r.solution.has_value() && r.solution->error >= eps, "instance " + std::to_string(i) + " best error");
    }
  }
  return ck.outcome(std::to_string(success) + " verified solutions, " + std::to_string(exhausted) +
                    " exhausted, 0 false successes allowed");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 7. CLI pipelines are byte-identical at 1 and N threads.
Outcome criterion_7(double) {
  Checks ck;
  const fs::path root = fs::temp_directory_path() / "apamoeba_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);
  const unsigned many = std::max(4u, std::thread::hardware_concurrency());
  struct Case {
    std::string name;
    ExponentialSum sum;
    BaseBox box;
  };
  const std::vector<Case> cases{{"closed_form", fixtures::shifted_exponential(), {vec({-3}), vec({3}), {601}}},
                                {"line", fixtures::line(), {vec({-3, -3}), vec({3, 3}), {121, 121}}}};
  std::size_t compared = 0;
  for (const auto& c : cases) {
    const fs::path input = root / (c.name + ".json");
    std::ofstream(input) << serialize_sum(c.sum);
    std::vector<fs::path> dirs;
    for (unsigned threads : {1u, many}) {
      RunConfig cfg;
      cfg.subcommand = Subcommand::kVerify;
      cfg.input = input;
      cfg.output_dir = root / (c.name + "_" + std::to_string(threads));
      cfg.threads = threads;
      cfg.box_lower = c.box.lower;
      cfg.box_upper = c.box.upper;
      cfg.resolution = c.box.resolution;
      std::ostringstream log;
      ck.expect(run(cfg, log) == kExitOk, c.name + " run failed");
      dirs.push_back(cfg.output_dir);
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      const auto name = entry.path().filename();
      ck.expect(fs::exists(dirs[1] / name) && slurp(dirs[0] / name) == slurp(dirs[1] / name),
                c.name + "/" + name.string() + " differs");
      ++compared;
    }
  }
  return ck.outcome(std::to_string(compared) + " files byte-identical at 1 and " + std::to_string(many) + " threads");
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome(double)> run;
    double budget_seconds;
  };
  const std::vector<Criterion> criteria{
      {"1 one-variable closed form", criterion_1, 60},
      {"2 classical line amoeba", criterion_2, 300},
      {"3 almost periodic band", criterion_3, 120},
      {"4 estimator cross-agreement", criterion_4, 0},
      {"5 Jessen convexity", criterion_5, 0},
      {"6 Kronecker self-verification", criterion_6, 60},
      {"7 determinism across threads", criterion_7, 0},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run(c.budget_seconds);
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0 && secs > c.budget_seconds) {
      o.pass = false;
      o.detail += "; runtime over the " + fmt(c.budget_seconds) + " s budget";
    }
    failed += !o.pass;
    std::printf("%s  criterion %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", c.name, secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
