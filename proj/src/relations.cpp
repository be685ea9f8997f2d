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

#include "apamoeba/relations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include <Eigen/QR>

namespace apamoeba {

namespace {

// Rounds x to the nearest integer, refusing values outside int64.
std::optional<std::int64_t> round_to_int(double x) {
  if (!std::isfinite(x) || std::abs(x) > 9.0e18) return std::nullopt;
  return static_cast<std::int64_t>(std::llround(x));
}

GroupExpression make_expression(RationalVector r, const Eigen::MatrixXd& realized, const Eigen::VectorXd& c) {
  GroupExpression e;
  e.coefficients = std::move(r);
  std::int64_t den = 1;
  for (Eigen::Index j = 0; j < e.coefficients.size(); ++j) den = lcm64(den, e.coefficients(j).den());
  e.denominator = den;
  std::int64_t h = 0;
  for (Eigen::Index j = 0; j < e.coefficients.size(); ++j) {
    const Rational& q = e.coefficients(j);
    h = std::max(h, std::abs(q.num()) * (den / q.den()));
  }
  e.height = h;
  e.residual = (realized * e.as_double() - c).norm();
  return e;
}

auto complexity(const GroupExpression& e) { return std::make_tuple(e.denominator, e.height); }

SnapResult choose(std::vector<GroupExpression> candidates, double tol) {
  SnapResult res;
  res.tolerance = tol;
  if (candidates.empty()) return res;
  std::stable_sort(candidates.begin(), candidates.end(), [](const GroupExpression& a, const GroupExpression& b) {
    return std::make_tuple(a.denominator, a.height, a.residual) < std::make_tuple(b.denominator, b.height, b.residual);
  });
  // The enumeration reaches one reduced vector from several denominators.
  candidates.erase(std::unique(candidates.begin(), candidates.end(),
                               [](const GroupExpression& a, const GroupExpression& b) {
                                 return a.coefficients == b.coefficients;
                               }),
                   candidates.end());
  auto accepted = std::find_if(candidates.begin(), candidates.end(),
                               [tol](const GroupExpression& e) { return e.residual <= tol; });
  if (accepted == candidates.end()) {
    res.status = SnapStatus::kNoMatch;
    res.expression = *std::min_element(candidates.begin(), candidates.end(),
                                       [](const auto& a, const auto& b) { return a.residual < b.residual; });
    return res;
  }
  res.status = SnapStatus::kMatch;
  res.expression = *accepted;
  for (auto it = std::next(accepted); it != candidates.end() && complexity(*it) == complexity(*accepted); ++it) {
    if (it->residual <= tol && it->coefficients != accepted->coefficients) res.rivals.push_back(*it);
  }
  if (!res.rivals.empty()) res.status = SnapStatus::kAmbiguous;
  return res;
}

}  // namespace

void SnapConfig::validate() const {
  if (max_denominator < 1 || numerator_bound < 0 || !(residual_factor > 0) || max_free_coordinates < 0) {
    throw std::invalid_argument("snap: invalid configuration");
  }
}

Eigen::VectorXd GroupExpression::as_double() const {
  Eigen::VectorXd v(coefficients.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = coefficients(j).to_double();
  return v;
}

std::string_view to_string(SnapStatus s) {
  switch (s) {
    case SnapStatus::kMatch: return "match";
    case SnapStatus::kNoMatch: return "no_match";
    case SnapStatus::kAmbiguous: return "ambiguous";
  }
  return "unknown";
}

std::string_view to_string(Verdict v) { return v == Verdict::kVerified ? "verified" : "failed"; }

std::vector<Rational> continued_fraction_candidates(double x, std::int64_t max_den) {
  std::vector<Rational> out;
  if (!std::isfinite(x) || max_den < 1) return out;
  // h/k are the last two convergents.
  std::int64_t h2 = 0, h1 = 1, k2 = 1, k1 = 0;
  double rem = x;
  for (int n = 0; n < 64; ++n) {
    const double a = std::floor(rem);
    if (std::abs(a) > 1e15) break;
    const auto an = static_cast<std::int64_t>(a);
    bool stop = false;
    // Semiconvergents (h2 + j h1) / (k2 + j k1), j = 1..a_n; at n = 0 only j = a_0.
    for (std::int64_t j = n == 0 ? an : 1; j <= an || n == 0; ++j) {
      const std::int64_t k = k2 + j * k1;
      if (k > max_den) {
        stop = true;
        break;
      }
      out.emplace_back(h2 + j * h1, k);
      if (n == 0) break;
    }
    if (stop) break;
    const std::int64_t h = h2 + an * h1, k = k2 + an * k1;
    h2 = h1;
    h1 = h;
    k2 = k1;
    k1 = k;
    const double frac = rem - a;
    if (frac < 1e-12) break;
    rem = 1.0 / frac;
  }
  // The ceiling of x is a candidate with denominator 1 as well.
  out.emplace_back(static_cast<std::int64_t>(std::ceil(x)));
  std::sort(out.begin(), out.end(), [](const Rational& a, const Rational& b) {
    return std::make_pair(a.den(), a.num()) < std::make_pair(b.den(), b.num());
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SnapResult snap_to_group(const Eigen::VectorXd& c, double error, const GroupBasis& basis,
                         const BaseIrrationals& base, const SnapConfig& cfg) {
  cfg.validate();
  if (!(error >= 0) || !c.allFinite()) throw std::invalid_argument("snap: need finite c and error >= 0");
  if (c.size() != basis.dimension() && !basis.empty()) throw std::invalid_argument("snap: dimension mismatch");
  const double tol = cfg.residual_factor * error + 1e-12;
  const auto k = static_cast<Eigen::Index>(basis.rank());
  if (k == 0) {
    GroupExpression e;
    e.residual = c.norm();
    return choose({e}, tol);
  }
  const Eigen::MatrixXd realized = basis.realized(base);
  const Eigen::Index p = realized.rows();

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(realized);
  qr.setThreshold(1e-9);
  const Eigen::Index rank = qr.rank();
  std::vector<GroupExpression> candidates;
  auto within_bound = [&](const RationalVector& r) {
    std::int64_t den = 1;
    for (Eigen::Index j = 0; j < r.size(); ++j) den = lcm64(den, r(j).den());
    if (den > cfg.max_denominator) return false;
    for (Eigen::Index j = 0; j < r.size(); ++j)
      if (std::abs(r(j).num()) * (den / r(j).den()) > cfg.numerator_bound) return false;
    return true;
  };

  if (rank == k) {
    const Eigen::VectorXd ls = qr.solve(c);
    std::vector<std::vector<Rational>> lists(static_cast<std::size_t>(k));
    std::size_t combos = 1;
    for (Eigen::Index j = 0; j < k; ++j) {
      lists[static_cast<std::size_t>(j)] = continued_fraction_candidates(ls(j), cfg.max_denominator);
      combos *= std::max<std::size_t>(1, lists[static_cast<std::size_t>(j)].size());
    }
    if (combos > (1u << 22)) throw std::length_error("snap: candidate product too large");
    std::vector<std::size_t> idx(static_cast<std::size_t>(k), 0);
    RationalVector r(k);
    for (std::size_t n = 0; n < combos; ++n) {
      for (Eigen::Index j = 0; j < k; ++j) r(j) = lists[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
      if (within_bound(r)) candidates.push_back(make_expression(r, realized, c));
      for (std::size_t j = 0; j < idx.size(); ++j) {
        if (++idx[j] < lists[j].size()) break;
        idx[j] = 0;
      }
    }
    return choose(std::move(candidates), tol);
  }

  const Eigen::Index free_count = k - rank;
  if (free_count > cfg.max_free_coordinates) {
    SnapResult res;
    res.tolerance = tol;
    return res;
  }
  const auto perm = qr.colsPermutation().indices();
  std::vector<Eigen::Index> pivots(perm.data(), perm.data() + rank);
  std::vector<Eigen::Index> frees(perm.data() + rank, perm.data() + k);
  Eigen::MatrixXd b_piv(p, rank), b_free(p, free_count);
  for (Eigen::Index j = 0; j < rank; ++j) b_piv.col(j) = realized.col(pivots[static_cast<std::size_t>(j)]);
  for (Eigen::Index j = 0; j < free_count; ++j) b_free.col(j) = realized.col(frees[static_cast<std::size_t>(j)]);
  const Eigen::MatrixXd pinv = rank > 0 ? Eigen::MatrixXd(b_piv.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(p, p)))
                                        : Eigen::MatrixXd(0, p);

  const std::int64_t bound = cfg.numerator_bound;
  for (std::int64_t den = 1; den <= cfg.max_denominator; ++den) {
    std::vector<std::int64_t> num(static_cast<std::size_t>(free_count), -bound);
    for (;;) {
      RationalVector r(k);
      Eigen::VectorXd free_val(free_count);
      for (Eigen::Index j = 0; j < free_count; ++j) {
        const Rational q(num[static_cast<std::size_t>(j)], den);
        r(frees[static_cast<std::size_t>(j)]) = q;
        free_val(j) = q.to_double();
      }
      const Eigen::VectorXd piv = pinv * (c - b_free * free_val);
      bool ok = true;
      for (Eigen::Index j = 0; j < rank && ok; ++j) {
        const auto n = round_to_int(piv(j) * static_cast<double>(den));
        if (!n || std::abs(*n) > bound) ok = false;
        else r(pivots[static_cast<std::size_t>(j)]) = Rational(*n, den);
      }
      if (ok && within_bound(r)) candidates.push_back(make_expression(r, realized, c));
      std::size_t j = 0;
      for (; j < num.size(); ++j) {
        if (++num[j] <= bound) break;
        num[j] = -bound;
      }
      if (j == num.size()) break;
    }
  }
  return choose(std::move(candidates), tol);
}

RelationReport component_relations(std::vector<ComponentRecord>& records, const GroupBasis& basis,
                                   const BaseIrrationals& base, const SnapConfig& cfg) {
  std::vector<SnapResult> single;
  single.reserve(records.size());
  for (auto& rec : records) {
    single.push_back(snap_to_group(rec.order_numeric, rec.order_error, basis, base, cfg));
    rec.order_group.reset();
    if (single.back().status == SnapStatus::kMatch) rec.order_group = single.back().expression->coefficients;
  }
  RelationReport report;
  for (std::size_t i = 0; i < records.size(); ++i) {
    for (std::size_t j = i + 1; j < records.size(); ++j) {
      PairRelation pr;
      pr.from = records[i].id;
      pr.to = records[j].id;
      pr.difference = records[j].order_numeric - records[i].order_numeric;
      pr.error = records[i].order_error + records[j].order_error;
      pr.snap = snap_to_group(pr.difference, pr.error, basis, base, cfg);
      if (pr.snap.status == SnapStatus::kMatch) {
        const GroupExpression& e = *pr.snap.expression;
        const double dn = pr.difference.norm();
        if (dn > 1e-12) pr.ratio = e.as_double().norm() / dn;
        report.empirical_k = std::max(report.empirical_k, pr.ratio);
        report.integral = report.integral && e.integral();
        if (records[i].order_group && records[j].order_group) {
          pr.consistent = RationalVector(*records[j].order_group - *records[i].order_group) == e.coefficients;
        }
      } else {
        report.all_matched = false;
        report.integral = false;
      }
      report.pairs.push_back(std::move(pr));
    }
  }
  return report;
}

bool TheoremVerdict::failed() const {
  return assertion_i == Verdict::kFailed || assertion_ii == Verdict::kFailed || assertion_iii == Verdict::kFailed;
}

TheoremVerdict verify_theorem(const ExponentialSum& sum, const BaseBox& box, const VerifyConfig& cfg) {
  TheoremVerdict v;
  v.basis = group_basis(spectrum(sum));
  try {
    v.raster = rasterize_amoeba(sum, box, cfg.raster);
  } catch (const std::exception& e) {
    v.stage_errors.push_back(std::string("raster: ") + e.what());
    return v;
  }
  try {
    v.records = components(sum, v.raster, cfg.components);
  } catch (const std::exception& e) {
    v.stage_errors.push_back(std::string("components: ") + e.what());
    return v;
  }
  v.component_count = v.records.size();
  try {
    v.relations = component_relations(v.records, v.basis, sum.basis(), cfg.snap);
  } catch (const std::exception& e) {
    v.stage_errors.push_back(std::string("relations: ") + e.what());
    return v;
  }

  bool all_i = !v.records.empty();
  bool orders_integral = true;
  for (const auto& rec : v.records) {
    ComponentVerdict cv;
    cv.id = rec.id;
    cv.order = rec.order_numeric;
    cv.error = rec.order_error;
    cv.snap = snap_to_group(rec.order_numeric, rec.order_error, v.basis, sum.basis(), cfg.snap);
    const bool in_group = cv.snap.status == SnapStatus::kMatch && cv.snap.expression->integral();
    cv.verdict = in_group ? Verdict::kVerified : Verdict::kFailed;
    all_i = all_i && in_group;
    orders_integral = orders_integral && in_group;
    v.orders.push_back(std::move(cv));
  }
  v.assertion_i = all_i ? Verdict::kVerified : Verdict::kFailed;
  v.assertion_ii = !v.records.empty() && v.relations.all_matched ? Verdict::kVerified : Verdict::kFailed;
  v.integrality = orders_integral && v.relations.integral;
  v.assertion_iii = !v.records.empty() && v.integrality ? Verdict::kVerified : Verdict::kFailed;
  return v;
}

}  // namespace apamoeba
