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

#include "apamoeba/jessen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/QR>

#include "apamoeba/group.hpp"
#include "apamoeba/parallel.hpp"
#include "apamoeba/random.hpp"

namespace apamoeba {

namespace {

struct Spread {
  double mean = 0;
  double std_error = 0;
};

Spread mean_and_error(const std::vector<double>& v) {
  Spread s;
  for (double x : v) s.mean += x;
  s.mean /= static_cast<double>(v.size());
  if (v.size() < 2) return s;
  double ss = 0;
  for (double x : v) ss += (x - s.mean) * (x - s.mean);
  s.std_error = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  return s;
}

int points_per_axis(int samples, Eigen::Index p) {
  int n = static_cast<int>(std::lround(std::pow(static_cast<double>(samples), 1.0 / static_cast<double>(p))));
  return std::max(n, 1);
}

}  // namespace

std::vector<double> QuadratureConfig::default_schedule() {
  std::vector<double> s;
  for (int k = 0; k < 6; ++k) s.push_back(8 * std::numbers::pi * std::ldexp(1.0, k));
  return s;
}

void QuadratureConfig::validate() const {
  if (box_schedule.empty()) throw std::invalid_argument("quadrature: empty box schedule");
  for (std::size_t k = 0; k < box_schedule.size(); ++k) {
    if (!(box_schedule[k] > 0)) throw std::invalid_argument("quadrature: box half-widths must be positive");
    if (k > 0 && !(box_schedule[k] > box_schedule[k - 1])) {
      throw std::invalid_argument("quadrature: box schedule must be strictly increasing");
    }
  }
  if (samples_per_batch < 1) throw std::invalid_argument("quadrature: samples_per_batch must be positive");
  if (batches < 2) throw std::invalid_argument("quadrature: at least two batches are needed for an error bar");
  if (!(clip_floor > 0)) throw std::invalid_argument("quadrature: clip floor must be positive");
  if (!(clip_limit > 0 && clip_limit <= 1)) throw std::invalid_argument("quadrature: clip limit must lie in (0, 1]");
  if (!(stabilization_tol > 0)) throw std::invalid_argument("quadrature: stabilization tolerance must be positive");
  if (max_torus_rank < 0) throw std::invalid_argument("quadrature: max_torus_rank must be >= 0");
}

std::string_view to_string(JessenDomain d) {
  switch (d) {
    case JessenDomain::kAuto: return "auto";
    case JessenDomain::kBox: return "box";
    case JessenDomain::kTorus: return "torus";
  }
  return "unknown";
}

JessenDomain resolve_domain(const ExponentialSum& sum, const QuadratureConfig& cfg) {
  if (cfg.domain != JessenDomain::kAuto) return cfg.domain;
  if (sum.is_laurent()) return JessenDomain::kBox;
  const auto k = static_cast<int>(group_basis(spectrum(sum)).rank());
  return k >= 1 && k <= cfg.max_torus_rank ? JessenDomain::kTorus : JessenDomain::kBox;
}

std::string_view to_string(JessenStatus s) {
  return s == JessenStatus::kStabilized ? "stabilized" : "non_stabilized";
}

std::string_view to_string(ArgumentStatus s) {
  switch (s) {
    case ArgumentStatus::kOk: return "ok";
    case ArgumentStatus::kZeroOnPath: return "zero_on_path";
    case ArgumentStatus::kNonConverged: return "non_converged";
  }
  return "unknown";
}

std::vector<double> jessen_batch_means(const ExponentialSum& sum, const Eigen::VectorXd& y, std::size_t stage,
                                       const QuadratureConfig& cfg, std::int64_t* clipped) {
  cfg.validate();
  if (stage >= cfg.box_schedule.size()) throw std::out_of_range("jessen: stage outside schedule");
  const bool torus = resolve_domain(sum, cfg) == JessenDomain::kTorus;
  const GroupBasis basis = torus ? group_basis(spectrum(sum)) : GroupBasis();
  const FiberView fiber = torus ? FiberView(sum, y).with_frequencies(lift_exponents(sum, basis)) : FiberView(sum, y);
  // On the torus the sample points are phases in [0, 2 pi)^k.
  const Eigen::Index p = torus ? static_cast<Eigen::Index>(basis.rank()) : sum.dimension();
  const double lo = torus ? 0.0 : -cfg.box_schedule[stage];
  const double span = torus ? 2 * std::numbers::pi : 2 * cfg.box_schedule[stage];
  const int n = points_per_axis(cfg.samples_per_batch, p);
  std::int64_t total = 1;
  for (Eigen::Index j = 0; j < p; ++j) total *= n;
  const double width = span / n;
  const double log_floor = std::log(fiber.scaled_magnitude()) - cfg.clip_floor;

  std::vector<double> means(static_cast<std::size_t>(cfg.batches));
  std::vector<std::int64_t> clip_counts(static_cast<std::size_t>(cfg.batches), 0);
  parallel_for(means.size(), cfg.threads, [&](std::size_t b) {
    Stream rng = make_stream(cfg.seed, StreamTag::kJessen, stage, b);
    Eigen::VectorXd x(p);
    std::vector<int> idx(static_cast<std::size_t>(p), 0);
    double acc = 0;
    for (std::int64_t i = 0; i < total; ++i) {
      for (Eigen::Index j = 0; j < p; ++j) x(j) = lo + (idx[static_cast<std::size_t>(j)] + rng.uniform()) * width;
      double v = std::log(std::abs(fiber.scaled_value(x)));
      if (!(v >= log_floor)) {
        v = log_floor;
        ++clip_counts[b];
      }
      acc += v;
      for (std::size_t j = 0; j < idx.size(); ++j) {
        if (++idx[j] < n) break;
        idx[j] = 0;
      }
    }
    means[b] = fiber.log_shift() + acc / static_cast<double>(total);
  });
  if (clipped) {
    *clipped = 0;
    for (auto c : clip_counts) *clipped += c;
  }
  return means;
}

JessenEstimate estimate_jessen(const ExponentialSum& sum, const Eigen::VectorXd& y, const QuadratureConfig& cfg) {
  cfg.validate();
  JessenEstimate est;
  est.domain = resolve_domain(sum, cfg);
  const bool torus = est.domain == JessenDomain::kTorus;
  QuadratureConfig fixed = cfg;
  fixed.domain = est.domain;
  const Eigen::Index dim = torus ? static_cast<Eigen::Index>(group_basis(spectrum(sum)).rank()) : sum.dimension();
  for (std::size_t k = 0; k < cfg.box_schedule.size(); ++k) {
    std::int64_t clipped = 0;
    const auto means = jessen_batch_means(sum, y, k, fixed, &clipped);
    const Spread sp = mean_and_error(means);
    const int n = points_per_axis(cfg.samples_per_batch, dim);
    std::int64_t per_batch = 1;
    for (Eigen::Index j = 0; j < dim; ++j) per_batch *= n;
    const std::int64_t count = per_batch * cfg.batches;

    JessenStage stage{torus ? 0.0 : cfg.box_schedule[k], sp.mean, sp.std_error,
                      static_cast<double>(clipped) / static_cast<double>(count)};
    est.stages.push_back(stage);
    est.value = stage.value;
    est.std_error = stage.std_error;
    est.box_half_width = stage.box_half_width;
    est.clipped_fraction = stage.clipped_fraction;
    est.sample_count = count;
    est.stage_index = k;
    if (k > 0) {
      const auto& prev = est.stages[k - 1];
      if (std::abs(stage.value - prev.value) < cfg.stabilization_tol + 2 * (stage.std_error + prev.std_error)) {
        est.status = JessenStatus::kStabilized;
        break;
      }
    }
  }
  est.reliable = est.clipped_fraction < cfg.clip_limit;
  return est;
}

MeanMotionEstimate mean_motion_gradient(const ExponentialSum& sum, const Eigen::VectorXd& y, double h,
                                        const QuadratureConfig& cfg) {
  if (!(h > 0)) throw std::invalid_argument("mean_motion_gradient: step must be positive");
  const JessenEstimate center = estimate_jessen(sum, y, cfg);
  const Eigen::Index p = sum.dimension();
  MeanMotionEstimate out;
  out.value.resize(p);
  out.std_error.resize(p);
  out.status = center.status;
  out.box_half_width = center.box_half_width;
  out.step = h;
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::VectorXd up = y, down = y;
    up(j) += h;
    down(j) -= h;
    const auto plus = jessen_batch_means(sum, up, center.stage_index, cfg);
    const auto minus = jessen_batch_means(sum, down, center.stage_index, cfg);
    std::vector<double> diffs(plus.size());
    for (std::size_t b = 0; b < plus.size(); ++b) diffs[b] = -(plus[b] - minus[b]) / (2 * h);
    const Spread sp = mean_and_error(diffs);
    out.value(j) = sp.mean;
    out.std_error(j) = sp.std_error;
  }
  return out;
}

// ---------------------------------------------------------------------------

void ArgumentConfig::validate() const {
  if (!(half_length > 0)) throw std::invalid_argument("argument: half length must be positive");
  if (lines < 1) throw std::invalid_argument("argument: at least one line");
  if (!(zero_threshold > 0)) throw std::invalid_argument("argument: zero threshold must be positive");
  if (!(spread_tolerance > 0)) throw std::invalid_argument("argument: spread tolerance must be positive");
  if (max_halvings < 1) throw std::invalid_argument("argument: max_halvings must be positive");
}

ArgumentTrack track_argument(const FiberView& fiber, const Eigen::VectorXd& x0, Eigen::Index axis, double a,
                             double b, double initial_step, double zero_threshold, int max_halvings) {
  ArgumentTrack track;
  const double scale = fiber.scaled_magnitude();
  Eigen::VectorXd x = x0;
  x(axis) = a;
  Complex prev = fiber.scaled_value(x);
  track.min_relative_modulus = std::abs(prev) / scale;
  if (track.min_relative_modulus < zero_threshold) {
    track.ok = false;
    return track;
  }
  const double min_step = initial_step * std::ldexp(1.0, -max_halvings);
  double t = a;
  double step = initial_step;
  while (t < b) {
    const double dt = std::min(step, b - t);
    x(axis) = t + dt;
    const Complex next = fiber.scaled_value(x);
    const double rel = std::abs(next) / scale;
    if (rel < zero_threshold) {
      track.min_relative_modulus = std::min(track.min_relative_modulus, rel);
      track.ok = false;
      return track;
    }
    const double turn = std::arg(next / prev);
    if (std::abs(turn) >= std::numbers::pi / 2) {
      step = dt / 2;
      if (step < min_step) {
        track.ok = false;
        return track;
      }
      continue;
    }
    track.increment += turn;
    track.min_relative_modulus = std::min(track.min_relative_modulus, rel);
    prev = next;
    t += dt;
    step = std::min(2 * step, initial_step);
  }
  return track;
}

ArgumentEstimate mean_motion_argument(const ExponentialSum& sum, const Eigen::VectorXd& y, Eigen::Index axis,
                                      const ArgumentConfig& cfg) {
  cfg.validate();
  if (axis < 0 || axis >= sum.dimension()) throw std::out_of_range("mean_motion_argument: axis out of range");
  const FiberView fiber(sum, y);
  const double T = cfg.half_length;
  const double lam = sum.max_abs_frequency(axis);
  const double step0 = lam > 0 ? 2 * std::numbers::pi / (10 * lam) : 2 * T;

  std::vector<ArgumentTrack> tracks(static_cast<std::size_t>(cfg.lines));
  parallel_for(tracks.size(), cfg.threads, [&](std::size_t line) {
    Stream rng = make_stream(cfg.seed, StreamTag::kArgument, static_cast<std::uint64_t>(axis), line);
    Eigen::VectorXd x0(sum.dimension());
    for (Eigen::Index j = 0; j < sum.dimension(); ++j) x0(j) = rng.uniform(-T, T);
    tracks[line] = track_argument(fiber, x0, axis, -T, T, step0, cfg.zero_threshold, cfg.max_halvings);
  });

  ArgumentEstimate est;
  est.min_relative_modulus = tracks.front().min_relative_modulus;
  bool ok = true;
  for (const auto& tr : tracks) {
    ok = ok && tr.ok;
    est.min_relative_modulus = std::min(est.min_relative_modulus, tr.min_relative_modulus);
    est.per_line.push_back(tr.increment / (2 * T));
  }
  const Spread sp = mean_and_error(est.per_line);
  est.value = sp.mean;
  est.std_error = sp.std_error;
  auto [lo, hi] = std::minmax_element(est.per_line.begin(), est.per_line.end());
  est.spread = *hi - *lo;
  if (!ok) {
    est.status = ArgumentStatus::kZeroOnPath;
  } else if (est.spread > cfg.spread_tolerance) {
    est.status = ArgumentStatus::kNonConverged;
  }
  return est;
}

// ---------------------------------------------------------------------------

LinearityReport check_linearity(const ExponentialSum& sum, std::span<const Eigen::VectorXd> points,
                                const QuadratureConfig& cfg) {
  const Eigen::Index p = sum.dimension();
  if (static_cast<Eigen::Index>(points.size()) < p + 2) {
    throw std::invalid_argument("check_linearity: need at least p + 2 points");
  }
  const auto n = static_cast<Eigen::Index>(points.size());
  LinearityReport rep;
  Eigen::MatrixXd design(n, p + 1);
  Eigen::VectorXd values(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& y = points[static_cast<std::size_t>(i)];
    if (y.size() != p) throw std::invalid_argument("check_linearity: point has wrong dimension");
    rep.estimates.push_back(estimate_jessen(sum, y, cfg));
    design.row(i).head(p) = y.transpose();
    design(i, p) = 1.0;
    values(i) = rep.estimates.back().value;
    rep.max_std_error = std::max(rep.max_std_error, rep.estimates.back().std_error);
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(values);
  rep.slope = coef.head(p);
  rep.intercept = coef(p);
  rep.mean_motion = -rep.slope;
  rep.residuals = values - design * coef;
  rep.max_residual = rep.residuals.cwiseAbs().maxCoeff();
  return rep;
}

}  // namespace apamoeba
