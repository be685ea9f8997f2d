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

#include "apamoeba/amoeba.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include "apamoeba/parallel.hpp"
#include "apamoeba/random.hpp"

namespace apamoeba {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

struct Candidate {
  double modulus;
  Eigen::VectorXd point;
};

// Damped Newton on phi(u) = |F(u)|^2 with the exact Hessian, so both zeros
// and nonzero minima converge quadratically. F is the rescaled fiber
// function: moduli are relative to the largest term.
double phi_derivatives(const FiberView& fiber, const Eigen::VectorXd& u, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
  const Eigen::VectorXcd& amp = fiber.amplitudes();
  const Eigen::MatrixXd& freq = fiber.frequencies();
  const Eigen::Index d = u.size();
  Complex f = 0;
  Eigen::VectorXcd df = Eigen::VectorXcd::Zero(d);
  Eigen::MatrixXcd d2f = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index t = 0; t < amp.size(); ++t) {
    const Eigen::VectorXd n = freq.col(t);
    const Complex e = amp(t) * std::polar(1.0, n.dot(u));
    f += e;
    df += Complex(0, 1) * e * n.cast<Complex>();
    d2f -= e * (n * n.transpose()).cast<Complex>();
  }
  grad = 2 * (std::conj(f) * df).real();
  hess = 2 * (df.conjugate() * df.transpose() + std::conj(f) * d2f).real();
  return std::norm(f);
}

Candidate descend(const FiberView& fiber, Eigen::VectorXd u, int iterations, std::int64_t& evals) {
  const Eigen::Index d = u.size();
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
  double value = phi_derivatives(fiber, u, grad, hess);
  ++evals;
  double mu = 1e-6 * (hess.cwiseAbs().maxCoeff() + 1e-300);
  const double floor = std::pow(1e-16 * fiber.scaled_magnitude(), 2);
  for (int it = 0; it < iterations && value > floor; ++it) {
    // Shift so the damped matrix is positive definite away from minima.
    const double lowest = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hess, Eigen::EigenvaluesOnly).eigenvalues()(0);
    const double shift = std::max(0.0, -lowest) * 1.5;
    const Eigen::MatrixXd damped = hess + (mu + shift) * Eigen::MatrixXd::Identity(d, d);
    const Eigen::VectorXd step = -damped.ldlt().solve(grad);
    if (!step.allFinite() || step.norm() < 1e-15 * (1 + u.norm())) break;
    Eigen::VectorXd trial_grad;
    Eigen::MatrixXd trial_hess;
    const Eigen::VectorXd trial = u + step;
    const double trial_value = phi_derivatives(fiber, trial, trial_grad, trial_hess);
    ++evals;
    if (trial_value < value) {
      u = trial;
      value = trial_value;
      grad = std::move(trial_grad);
      hess = std::move(trial_hess);
      mu *= 0.2;
    } else {
      mu = std::max(mu, 1e-12) * 8;
      if (mu > 1e12 * (hess.cwiseAbs().maxCoeff() + 1)) break;
    }
  }
  return {std::sqrt(value), std::move(u)};
}

// Nested regular grids shifted by a seed-fixed offset; minimum over the grid
// points followed by descent from the best few.
Candidate grid_search(const FiberView& fiber, const Eigen::VectorXd& lower, const Eigen::VectorXd& extent,
                      std::vector<int> base_points, const FiberSearchConfig& cfg, std::uint64_t tag,
                      std::int64_t& evals) {
  const Eigen::Index d = lower.size();
  Stream rng = make_stream(cfg.seed, StreamTag::kFiber, tag);
  Eigen::VectorXd offset(d);
  for (Eigen::Index j = 0; j < d; ++j) offset(j) = rng.uniform();

  Candidate best{std::numeric_limits<double>::infinity(), lower};
  for (int level = 0; level <= cfg.refinement_level; ++level) {
    std::vector<int> n(base_points);
    std::int64_t total = 1;
    for (auto& v : n) {
      v <<= level;
      total *= v;
    }
    const auto keep = static_cast<std::size_t>(cfg.descent_starts);
    std::vector<Candidate> starts;
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    Eigen::VectorXd u(d);
    for (std::int64_t i = 0; i < total; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        u(j) = lower(j) + extent(j) * (idx[static_cast<std::size_t>(j)] + offset(j)) / n[static_cast<std::size_t>(j)];
      }
      const double m = std::abs(fiber.scaled_value(u));
      ++evals;
      if (starts.size() < keep || m < starts.back().modulus) {
        auto pos = std::upper_bound(starts.begin(), starts.end(), m,
                                    [](double v, const Candidate& c) { return v < c.modulus; });
        starts.insert(pos, Candidate{m, u});
        if (starts.size() > keep) starts.pop_back();
      }
      for (std::size_t j = 0; j < idx.size(); ++j) {
        if (++idx[j] < n[j]) break;
        idx[j] = 0;
      }
    }
    for (auto& s : starts) {
      if (s.modulus < best.modulus) best = s;
      Candidate c = descend(fiber, s.point, cfg.descent_iterations, evals);
      if (c.modulus < best.modulus) best = std::move(c);
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(FiberMethod m) {
  switch (m) {
    case FiberMethod::kAuto: return "auto";
    case FiberMethod::kBox: return "box";
    case FiberMethod::kTorus: return "torus";
  }
  return "unknown";
}

std::string_view to_string(CellClass c) {
  switch (c) {
    case CellClass::kIn: return "in";
    case CellClass::kUncertain: return "uncertain";
    case CellClass::kOut: return "out";
  }
  return "unknown";
}

std::string_view to_string(WindingStatus s) {
  switch (s) {
    case WindingStatus::kOk: return "ok";
    case WindingStatus::kZeroOnPath: return "zero_on_path";
    case WindingStatus::kNonInteger: return "non_integer";
  }
  return "unknown";
}

void FiberSearchConfig::validate() const {
  if (box_half_width < 0 || !std::isfinite(box_half_width)) throw std::invalid_argument("fiber: bad box half width");
  if (torus_points_per_axis < 2 || box_points_per_period < 2) throw std::invalid_argument("fiber: grids need >= 2 points");
  if (refinement_level < 0 || refinement_level > 6) throw std::invalid_argument("fiber: refinement level in [0, 6]");
  if (descent_starts < 1 || descent_iterations < 0) throw std::invalid_argument("fiber: bad descent settings");
  if (max_grid_points < 16) throw std::invalid_argument("fiber: max_grid_points too small");
  if (max_torus_rank < 0) throw std::invalid_argument("fiber: max_torus_rank must be >= 0");
}

FiberSearch::FiberSearch(const ExponentialSum& sum, FiberSearchConfig cfg)
    : sum_(sum), cfg_(cfg), basis_(group_basis(spectrum(sum))) {
  cfg_.validate();
  const auto k = static_cast<Eigen::Index>(basis_.rank());
  exponents_ = lift_exponents(sum, basis_);
  realized_basis_ = basis_.realized(sum.basis());

  method_ = cfg_.method;
  if (method_ == FiberMethod::kAuto) method_ = k <= cfg_.max_torus_rank ? FiberMethod::kTorus : FiberMethod::kBox;

  box_half_width_ = cfg_.box_half_width;
  if (box_half_width_ == 0) {
    double smallest = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < sum.realized().size(); ++i) {
      const double v = std::abs(sum.realized().data()[i]);
      if (v > 0) smallest = std::min(smallest, v);
    }
    box_half_width_ = std::isfinite(smallest) ? 20 * std::numbers::pi / smallest : std::numbers::pi;
  }
}

FiberEstimate FiberSearch::operator()(const Eigen::VectorXd& y) const {
  const FiberView fiber(sum_, y);
  const Eigen::Index p = sum_.dimension();
  const auto k = static_cast<Eigen::Index>(basis_.rank());
  FiberEstimate est;
  est.y = y;
  est.log_scale = fiber.log_scale();
  est.box_half_width = box_half_width_;
  est.method = method_;

  if (k == 0) {
    // Constant sum: |f| is the same everywhere.
    est.argmin_x = Eigen::VectorXd::Zero(p);
    est.relative_min = 1.0;
    est.min_modulus = std::exp(est.log_scale);
    est.sample_count = 1;
    return est;
  }

  double best_scaled = std::numeric_limits<double>::infinity();
  std::int64_t evals = 0;
  const bool torus = method_ == FiberMethod::kTorus;
  const bool box = method_ == FiberMethod::kBox || (torus && k != p);

  if (torus) {
    const FiberView lifted = fiber.with_frequencies(exponents_);
    int n = cfg_.torus_points_per_axis;
    while (n > 2 && std::pow(static_cast<double>(n), static_cast<double>(k)) > cfg_.max_grid_points) n /= 2;
    Candidate c = grid_search(lifted, Eigen::VectorXd::Zero(k), Eigen::VectorXd::Constant(k, kTwoPi),
                              std::vector<int>(static_cast<std::size_t>(k), n), cfg_, 1, evals);
    best_scaled = c.modulus;
    est.argmin_phase = c.point.unaryExpr([](double v) { return v - kTwoPi * std::floor(v / kTwoPi); });
    if (k == p) {
      // theta = G^T x with G square and invertible.
      est.argmin_x = realized_basis_.transpose().fullPivLu().solve(c.point);
    }
  }
  if (box) {
    std::vector<int> n(static_cast<std::size_t>(p));
    double total = 1;
    for (Eigen::Index j = 0; j < p; ++j) {
      const double periods = 2 * box_half_width_ * sum_.max_abs_frequency(j) / kTwoPi;
      n[static_cast<std::size_t>(j)] = std::max(4, static_cast<int>(std::ceil(periods * cfg_.box_points_per_period)));
      total *= n[static_cast<std::size_t>(j)];
    }
    if (total > cfg_.max_grid_points) {
      const double shrink = std::pow(cfg_.max_grid_points / total, 1.0 / static_cast<double>(p));
      for (auto& v : n) v = std::max(2, static_cast<int>(v * shrink));
    }
    Candidate c = grid_search(fiber, Eigen::VectorXd::Constant(p, -box_half_width_),
                              Eigen::VectorXd::Constant(p, 2 * box_half_width_), n, cfg_, 2, evals);
    if (c.modulus < best_scaled || est.argmin_x.size() == 0) est.argmin_x = c.point;
    best_scaled = std::min(best_scaled, c.modulus);
  }

  est.sample_count = evals;
  est.relative_min = best_scaled / fiber.scaled_magnitude();
  est.min_modulus = std::exp(fiber.log_shift()) * best_scaled;
  return est;
}

FiberEstimate fiber_min_modulus(const ExponentialSum& sum, const Eigen::VectorXd& y, const FiberSearchConfig& cfg) {
  return FiberSearch(sum, cfg)(y);
}

// ---------------------------------------------------------------------------

void Thresholds::validate() const {
  if (!(tau_in > 0 && tau_in < tau_out && tau_out < 1)) {
    throw std::invalid_argument("thresholds: need 0 < tau_in < tau_out < 1");
  }
}

CellClass classify(const FiberEstimate& fiber, const Thresholds& th) {
  if (fiber.relative_min < th.tau_in) return CellClass::kIn;
  if (fiber.relative_min > th.tau_out) return CellClass::kOut;
  return CellClass::kUncertain;
}

CellClass classify_point(const ExponentialSum& sum, const Eigen::VectorXd& y, const Thresholds& th,
                         const FiberSearchConfig& cfg) {
  th.validate();
  return classify(fiber_min_modulus(sum, y, cfg), th);
}

std::size_t BaseBox::cell_count() const {
  std::size_t n = 1;
  for (int r : resolution) n *= static_cast<std::size_t>(r);
  return n;
}

Eigen::VectorXd BaseBox::cell_width() const {
  Eigen::VectorXd w(dimension());
  for (Eigen::Index j = 0; j < dimension(); ++j) w(j) = (upper(j) - lower(j)) / resolution[static_cast<std::size_t>(j)];
  return w;
}

std::vector<int> BaseBox::multi_index(std::size_t flat) const {
  std::vector<int> idx(resolution.size());
  for (std::size_t j = 0; j < resolution.size(); ++j) {
    idx[j] = static_cast<int>(flat % static_cast<std::size_t>(resolution[j]));
    flat /= static_cast<std::size_t>(resolution[j]);
  }
  return idx;
}

std::size_t BaseBox::flat_index(const std::vector<int>& idx) const {
  std::size_t flat = 0;
  for (std::size_t j = resolution.size(); j-- > 0;) flat = flat * static_cast<std::size_t>(resolution[j]) + static_cast<std::size_t>(idx[j]);
  return flat;
}

Eigen::VectorXd BaseBox::center(std::size_t flat) const {
  const auto idx = multi_index(flat);
  const Eigen::VectorXd w = cell_width();
  Eigen::VectorXd c(dimension());
  for (Eigen::Index j = 0; j < dimension(); ++j) c(j) = lower(j) + (idx[static_cast<std::size_t>(j)] + 0.5) * w(j);
  return c;
}

void BaseBox::validate() const {
  if (lower.size() < 1 || lower.size() != upper.size() ||
      static_cast<std::size_t>(lower.size()) != resolution.size()) {
    throw std::invalid_argument("box: lower, upper and resolution must share one dimension");
  }
  for (Eigen::Index j = 0; j < lower.size(); ++j) {
    if (!(std::isfinite(lower(j)) && std::isfinite(upper(j)) && lower(j) < upper(j))) {
      throw std::invalid_argument("box: need finite lower < upper on every axis");
    }
    if (resolution[static_cast<std::size_t>(j)] < 2) throw std::invalid_argument("box: resolution must be >= 2 per axis");
  }
}

std::size_t AmoebaRaster::count(CellClass c) const { return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), c)); }

AmoebaRaster rasterize_amoeba(const ExponentialSum& sum, const BaseBox& box, const RasterConfig& cfg) {
  box.validate();
  cfg.thresholds.validate();
  if (box.dimension() != sum.dimension()) throw std::invalid_argument("rasterize: box dimension differs from sum");
  const FiberSearch search(sum, cfg.fiber);
  AmoebaRaster raster;
  raster.box = box;
  raster.thresholds = cfg.thresholds;
  const std::size_t n = box.cell_count();
  raster.cells.assign(n, CellClass::kUncertain);
  raster.relative_min.assign(n, 0.0);
  std::vector<std::uint8_t> failed(n, 0);
  parallel_for(n, cfg.threads, [&](std::size_t i) {
    try {
      const FiberEstimate est = search(box.center(i));
      raster.relative_min[i] = est.relative_min;
      raster.cells[i] = classify(est, cfg.thresholds);
    } catch (const std::range_error&) {
      failed[i] = 1;
    } catch (const std::overflow_error&) {
      failed[i] = 1;
    }
  });
  for (auto f : failed) raster.numeric_failures += f;
  return raster;
}

// ---------------------------------------------------------------------------

WindingResult laurent_winding_order(const ExponentialSum& sum, const Eigen::VectorXd& y, Eigen::Index axis,
                                    const WindingConfig& cfg) {
  if (axis < 0 || axis >= sum.dimension()) throw std::out_of_range("winding: axis out of range");
  if (!sum.integer_on_axis(axis)) {
    throw std::invalid_argument("winding: frequencies are not integers along axis " + std::to_string(axis));
  }
  if (cfg.draws < 1) throw std::invalid_argument("winding: at least one draw");
  const FiberView fiber(sum, y);
  const double lam = sum.max_abs_frequency(axis);
  const double step0 = lam > 0 ? kTwoPi / (10 * lam) : kTwoPi;
  WindingResult res;
  std::optional<std::int64_t> agreed;
  for (int d = 0; d < cfg.draws; ++d) {
    Stream rng = make_stream(cfg.seed, StreamTag::kWinding, static_cast<std::uint64_t>(axis), static_cast<std::uint64_t>(d));
    Eigen::VectorXd x0(sum.dimension());
    for (Eigen::Index j = 0; j < x0.size(); ++j) x0(j) = rng.uniform(-std::numbers::pi, std::numbers::pi);
    const ArgumentTrack tr = track_argument(fiber, x0, axis, -std::numbers::pi, std::numbers::pi, step0,
                                            cfg.zero_threshold, cfg.max_halvings);
    if (!tr.ok) {
      res.status = WindingStatus::kZeroOnPath;
      return res;
    }
    const double turns = tr.increment / kTwoPi;
    res.raw.push_back(turns);
    const auto rounded = static_cast<std::int64_t>(std::llround(turns));
    if (std::abs(turns - static_cast<double>(rounded)) > cfg.integer_tolerance || (agreed && *agreed != rounded)) {
      res.status = WindingStatus::kNonInteger;
      return res;
    }
    agreed = rounded;
  }
  res.value = *agreed;
  return res;
}

// ---------------------------------------------------------------------------

std::vector<int> label_components(const AmoebaRaster& raster, int* count) {
  const auto& box = raster.box;
  const std::size_t n = raster.cells.size();
  std::vector<int> labels(n, -1);
  int next = 0;
  std::deque<std::size_t> queue;
  for (std::size_t start = 0; start < n; ++start) {
    if (raster.cells[start] != CellClass::kOut || labels[start] >= 0) continue;
    labels[start] = next;
    queue.push_back(start);
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      auto idx = box.multi_index(cur);
      for (std::size_t j = 0; j < idx.size(); ++j) {
        for (int delta : {-1, 1}) {
          const int v = idx[j] + delta;
          if (v < 0 || v >= box.resolution[j]) continue;
          auto nb = idx;
          nb[j] = v;
          const std::size_t f = box.flat_index(nb);
          if (raster.cells[f] == CellClass::kOut && labels[f] < 0) {
            labels[f] = next;
            queue.push_back(f);
          }
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return labels;
}

namespace {

// Distance from each member cell center to the nearest non-member cell
// center (less half a cell) or the box boundary.
std::vector<double> member_depths(const AmoebaRaster& raster, const std::vector<int>& labels, int id,
                                  const std::vector<std::size_t>& members) {
  const auto& box = raster.box;
  const Eigen::VectorXd w = box.cell_width();
  const double half = 0.5 * w.minCoeff();
  std::vector<Eigen::VectorXd> frontier;
  for (std::size_t m : members) {
    auto idx = box.multi_index(m);
    for (std::size_t j = 0; j < idx.size(); ++j) {
      for (int delta : {-1, 1}) {
        const int v = idx[j] + delta;
        if (v < 0 || v >= box.resolution[j]) continue;
        auto nb = idx;
        nb[j] = v;
        const std::size_t f = box.flat_index(nb);
        if (labels[f] != id) frontier.push_back(box.center(f));
      }
    }
  }
  std::vector<double> depth(members.size());
  for (std::size_t i = 0; i < members.size(); ++i) {
    const Eigen::VectorXd c = box.center(members[i]);
    double d = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < c.size(); ++j) d = std::min({d, c(j) - box.lower(j), box.upper(j) - c(j)});
    for (const auto& f : frontier) d = std::min(d, (c - f).norm() - half);
    depth[i] = std::max(d, 0.0);
  }
  return depth;
}

}  // namespace

std::vector<ComponentRecord> components(const ExponentialSum& sum, const AmoebaRaster& raster,
                                        const ComponentConfig& cfg) {
  int count = 0;
  const std::vector<int> labels = label_components(raster, &count);
  const auto& box = raster.box;
  const Eigen::Index p = sum.dimension();
  std::vector<ComponentRecord> records(static_cast<std::size_t>(count));
  for (int id = 0; id < count; ++id) records[static_cast<std::size_t>(id)].id = id;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] >= 0) records[static_cast<std::size_t>(labels[i])].cells.push_back(i);

  const bool laurent = sum.is_laurent();
  // Components run one after another; each estimator parallelizes inside.
  for (auto& rec : records) {
    auto& diag = rec.diagnostics;
    rec.bbox_lower.assign(static_cast<std::size_t>(p), std::numeric_limits<int>::max());
    rec.bbox_upper.assign(static_cast<std::size_t>(p), -1);
    for (std::size_t c : rec.cells) {
      auto idx = box.multi_index(c);
      for (std::size_t j = 0; j < idx.size(); ++j) {
        rec.bbox_lower[j] = std::min(rec.bbox_lower[j], idx[j]);
        rec.bbox_upper[j] = std::max(rec.bbox_upper[j], idx[j]);
      }
    }

    const std::vector<double> depth = member_depths(raster, labels, rec.id, rec.cells);
    std::size_t best = 0;
    for (std::size_t i = 1; i < rec.cells.size(); ++i) {
      const bool deeper = depth[i] > depth[best] + 1e-12;
      const bool tie = std::abs(depth[i] - depth[best]) <= 1e-12 &&
                       raster.relative_min[rec.cells[i]] > raster.relative_min[rec.cells[best]];
      if (deeper || tie) best = i;
    }
    rec.representative = box.center(rec.cells[best]);
    rec.inradius = depth[best];
    const double h = std::max(cfg.step_fraction * rec.inradius, cfg.min_step);

    QuadratureConfig qcfg = cfg.quadrature;
    qcfg.threads = cfg.threads;
    ArgumentConfig acfg = cfg.argument;
    acfg.threads = cfg.threads;

    const MeanMotionEstimate grad = mean_motion_gradient(sum, rec.representative, h, qcfg);
    rec.order_gradient = grad.value;
    rec.gradient_error = grad.std_error;
    diag.gradient_status = std::string(to_string(grad.status));

    rec.order_argument.resize(p);
    rec.argument_spread.resize(p);
    ArgumentStatus worst = ArgumentStatus::kOk;
    double arg_error = 0;
    for (Eigen::Index j = 0; j < p; ++j) {
      const ArgumentEstimate a = mean_motion_argument(sum, rec.representative, j, acfg);
      rec.order_argument(j) = a.value;
      rec.argument_spread(j) = a.spread;
      arg_error = std::max(arg_error, a.std_error);
      if (a.status != ArgumentStatus::kOk && worst == ArgumentStatus::kOk) worst = a.status;
    }
    diag.argument_status = std::string(to_string(worst));

    const bool arg_ok = worst == ArgumentStatus::kOk;
    rec.order_numeric = arg_ok ? rec.order_argument : rec.order_gradient;
    diag.max_estimator_gap = (rec.order_gradient - rec.order_argument).cwiseAbs().maxCoeff();
    diag.estimators_agree = arg_ok && diag.max_estimator_gap < cfg.agreement_tolerance;
    rec.order_error = std::max({cfg.min_order_error, 3 * rec.gradient_error.maxCoeff(), 3 * arg_error,
                                arg_ok ? diag.max_estimator_gap : 0.0});
    if (!arg_ok) diag.notes.push_back("argument estimator failed; gradient estimate used");
    if (grad.status != JessenStatus::kStabilized) diag.notes.push_back("Jessen estimate did not stabilize");

    if (laurent) {
      std::vector<std::int64_t> w;
      for (Eigen::Index j = 0; j < p; ++j) {
        const WindingResult wr = laurent_winding_order(sum, rec.representative, j, cfg.winding);
        if (wr.status != WindingStatus::kOk) {
          diag.notes.push_back("winding along axis " + std::to_string(j) + ": " + std::string(to_string(wr.status)));
          w.clear();
          break;
        }
        w.push_back(wr.value);
      }
      if (static_cast<Eigen::Index>(w.size()) == p) rec.winding = std::move(w);
    }

    // Order constancy over a few deep interior cells.
    Stream rng = make_stream(cfg.seed, StreamTag::kComponent, static_cast<std::uint64_t>(rec.id), 0);
    const double max_depth = depth[best];
    std::vector<std::size_t> interior;
    for (std::size_t i = 0; i < rec.cells.size(); ++i)
      if (depth[i] >= 0.5 * max_depth) interior.push_back(i);
    Eigen::VectorXd lo = rec.order_numeric, hi = rec.order_numeric;
    for (int s = 0; s < cfg.constancy_points && !interior.empty(); ++s) {
      const std::size_t pick = interior[static_cast<std::size_t>(rng.next_u64() % interior.size())];
      const Eigen::VectorXd yy = box.center(rec.cells[pick]);
      for (Eigen::Index j = 0; j < p; ++j) {
        const ArgumentEstimate a = mean_motion_argument(sum, yy, j, acfg);
        if (a.status != ArgumentStatus::kOk) continue;
        lo(j) = std::min(lo(j), a.value);
        hi(j) = std::max(hi(j), a.value);
      }
    }
    diag.constancy_spread = (hi - lo).maxCoeff();

    // Discrete convexity: the cell holding the midpoint of two members is a
    // member or Uncertain.
    if (rec.cells.size() > 1) {
      for (int s = 0; s < cfg.convexity_pairs; ++s) {
        const auto a = box.multi_index(rec.cells[static_cast<std::size_t>(rng.next_u64() % rec.cells.size())]);
        const auto b = box.multi_index(rec.cells[static_cast<std::size_t>(rng.next_u64() % rec.cells.size())]);
        std::vector<int> lo_idx(a.size()), hi_idx(a.size());
        for (std::size_t j = 0; j < a.size(); ++j) {
          lo_idx[j] = (a[j] + b[j]) / 2;
          hi_idx[j] = (a[j] + b[j] + 1) / 2;
        }
        auto acceptable = [&](const std::vector<int>& idx) {
          const std::size_t f = box.flat_index(idx);
          return labels[f] == rec.id || raster.cells[f] == CellClass::kUncertain;
        };
        ++diag.convexity_checked;
        if (!acceptable(lo_idx) && !acceptable(hi_idx)) ++diag.convexity_violations;
      }
    }
  }
  return records;
}

}  // namespace apamoeba
