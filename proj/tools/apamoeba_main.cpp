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

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "apamoeba/cli.hpp"

namespace {

Eigen::VectorXd parse_vector(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double d = std::stod(item, &used);
    if (used != item.size()) throw CLI::ValidationError("bad number in \"" + text + "\"");
    v.push_back(d);
  }
  return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stoi(item));
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  using apamoeba::Subcommand;
  apamoeba::RunConfig cfg;
  CLI::App app{"Amoebas, Jessen functions and mean motions of exponential sums"};
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  std::string lower, upper, resolution, mu, target, method = "auto", domain = "auto";
  std::vector<std::string> xs, ys;
  std::string input, output = ".";

  auto common = [&](CLI::App* sub, bool needs_input) {
    if (needs_input) sub->add_option("input", input, "Sum specification (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output", output, "Output directory");
    sub->add_option("--seed", cfg.seed, "Random seed");
    sub->add_option("--threads", cfg.threads, "Worker threads (0: APAMOEBA_THREADS or all cores)");
    sub->add_flag("-v,--verbose", cfg.verbosity, "More progress output");
  };
  auto points = [&](CLI::App* sub) {
    sub->add_option("-y,--y", ys, "Point y as comma-separated coordinates (repeatable)")->required();
    return sub;
  };
  auto quadrature = [&](CLI::App* sub) {
    sub->add_option("--schedule", cfg.quadrature.box_schedule, "Box half-widths, strictly increasing");
    sub->add_option("--samples", cfg.quadrature.samples_per_batch, "Samples per batch");
    sub->add_option("--batches", cfg.quadrature.batches, "Batches per stage");
    sub->add_option("--clip-floor", cfg.quadrature.clip_floor, "log|f| clipped at log(scale) - L");
    sub->add_option("--stabilization-tol", cfg.quadrature.stabilization_tol, "Stage agreement tolerance");
    sub->add_option("--jessen-domain", domain, "auto, box or torus")->check(CLI::IsMember({"auto", "box", "torus"}));
  };
  auto argument = [&](CLI::App* sub) {
    sub->add_option("--half-length", cfg.argument.half_length, "Argument-path half length T");
    sub->add_option("--lines", cfg.argument.lines, "Argument paths per axis");
  };
  auto box = [&](CLI::App* sub) {
    sub->add_option("--lower", lower, "Box lower corner, comma-separated")->required();
    sub->add_option("--upper", upper, "Box upper corner, comma-separated")->required();
    sub->add_option("--resolution", resolution, "Cells per axis, comma-separated")->required();
    sub->add_option("--tau-in", cfg.thresholds.tau_in, "Relative fiber minimum below which a cell is In");
    sub->add_option("--tau-out", cfg.thresholds.tau_out, "Relative fiber minimum above which a cell is Out");
    sub->add_option("--fiber-method", method, "auto, box or torus")->check(CLI::IsMember({"auto", "box", "torus"}));
    sub->add_option("--refine", cfg.fiber.refinement_level, "Fiber grid refinement level");
    sub->add_option("--max-denominator", cfg.snap.max_denominator, "Denominator cap for rational snapping");
    sub->add_option("--numerator-bound", cfg.snap.numerator_bound, "Numerator bound for rational snapping");
  };

  struct Entry {
    Subcommand cmd;
    CLI::App* app;
  };
  std::vector<Entry> subs;
  {
    auto* s = app.add_subcommand("eval", "Evaluate f at points z = x + i y");
    common(s, true);
    points(s);
    s->add_option("-x,--x", xs, "Point x (repeatable, defaults to 0)");
    subs.push_back({Subcommand::kEval, s});
  }
  {
    auto* s = app.add_subcommand("jessen", "Jessen function estimates; writes jessen.csv");
    common(s, true);
    points(s);
    quadrature(s);
    subs.push_back({Subcommand::kJessen, s});
  }
  {
    auto* s = app.add_subcommand("amoeba", "Rasterize the amoeba; writes cells.csv, amoeba.pgm (p = 2), components.json");
    common(s, true);
    box(s);
    quadrature(s);
    argument(s);
    subs.push_back({Subcommand::kAmoeba, s});
  }
  {
    auto* s = app.add_subcommand("components", "Complement components with snapped orders and relations");
    common(s, true);
    box(s);
    quadrature(s);
    argument(s);
    subs.push_back({Subcommand::kComponents, s});
  }
  {
    auto* s = app.add_subcommand("mean-motion", "Mean motion by gradient, argument and (Laurent) winding");
    common(s, true);
    points(s);
    quadrature(s);
    argument(s);
    s->add_option("--step", cfg.fd_step, "Finite-difference step (0: 1e-3)");
    subs.push_back({Subcommand::kMeanMotion, s});
  }
  {
    auto* s = app.add_subcommand("verify", "Full pipeline with a verdict; exit code 1 if an assertion fails");
    common(s, true);
    box(s);
    quadrature(s);
    argument(s);
    subs.push_back({Subcommand::kVerify, s});
  }
  {
    auto* s = app.add_subcommand("kronecker", "Find t > 0 with |mu t - a - 2 pi m| < eps");
    common(s, false);
    s->add_option("--mu", mu, "Frequencies, comma-separated")->required();
    s->add_option("--a", target, "Targets, comma-separated")->required();
    s->add_option("--eps", cfg.epsilon, "Tolerance")->check(CLI::PositiveNumber);
    s->add_option("--t-max", cfg.t_max, "Search bound")->check(CLI::PositiveNumber);
    s->add_option("--horizon", cfg.horizon, "Also scan return gaps up to this horizon");
    subs.push_back({Subcommand::kKronecker, s});
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& e : subs)
      if (e.app->parsed()) cfg.subcommand = e.cmd;
    cfg.input = input;
    cfg.output_dir = output;
    for (const auto& x : xs) cfg.points_x.push_back(parse_vector(x));
    for (const auto& y : ys) cfg.points_y.push_back(parse_vector(y));
    if (!lower.empty()) cfg.box_lower = parse_vector(lower);
    if (!upper.empty()) cfg.box_upper = parse_vector(upper);
    if (!resolution.empty()) cfg.resolution = parse_ints(resolution);
    if (!mu.empty()) cfg.mu = parse_vector(mu);
    if (!target.empty()) cfg.target = parse_vector(target);
    cfg.fiber.method = method == "box"     ? apamoeba::FiberMethod::kBox
                       : method == "torus" ? apamoeba::FiberMethod::kTorus
                                           : apamoeba::FiberMethod::kAuto;
    cfg.quadrature.domain = domain == "box"     ? apamoeba::JessenDomain::kBox
                            : domain == "torus" ? apamoeba::JessenDomain::kTorus
                                                : apamoeba::JessenDomain::kAuto;
    return apamoeba::run(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return apamoeba::kExitStageFailure;
  }
}
