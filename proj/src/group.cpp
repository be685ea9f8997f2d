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

#include "apamoeba/group.hpp"

#include <stdexcept>
#include <utility>

namespace apamoeba {

namespace {

struct ExtendedGcd {
  std::int64_t g, s, t;  // s*a + t*b = g >= 0
};

ExtendedGcd extended_gcd(std::int64_t a, std::int64_t b) {
  std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    std::int64_t q = old_r / r;
    std::tie(old_r, r) = std::pair{r, checked_add(old_r, -checked_mul(q, r))};
    std::tie(old_s, s) = std::pair{s, checked_add(old_s, -checked_mul(q, s))};
    std::tie(old_t, t) = std::pair{t, checked_add(old_t, -checked_mul(q, t))};
  }
  if (old_r < 0) return {-old_r, -old_s, -old_t};
  return {old_r, old_s, old_t};
}

// Floor division for the above-pivot reduction.
std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void axpy_row(IntegerMatrix& a, Eigen::Index dst, std::int64_t k, Eigen::Index src) {
  for (Eigen::Index c = 0; c < a.cols(); ++c) a(dst, c) = checked_add(a(dst, c), checked_mul(k, a(src, c)));
}

}  // namespace

IntegerMatrix hermite_normal_form(IntegerMatrix a) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  Eigen::Index r = 0;
  for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
    // Fold every lower row into row r with unimodular 2x2 gcd steps.
    for (Eigen::Index i = r + 1; i < rows; ++i) {
      if (a(i, c) == 0) continue;
      if (a(r, c) == 0) {
        a.row(r).swap(a.row(i));
        continue;
      }
      const std::int64_t x = a(r, c), y = a(i, c);
      const auto [g, s, t] = extended_gcd(x, y);
      const std::int64_t u = x / g, v = y / g;
      for (Eigen::Index k = 0; k < cols; ++k) {
        const std::int64_t top = checked_add(checked_mul(s, a(r, k)), checked_mul(t, a(i, k)));
        const std::int64_t bottom = checked_add(checked_mul(-v, a(r, k)), checked_mul(u, a(i, k)));
        a(r, k) = top;
        a(i, k) = bottom;
      }
    }
    if (a(r, c) == 0) continue;
    if (a(r, c) < 0) a.row(r) = -a.row(r);
    for (Eigen::Index i = 0; i < r; ++i) {
      const std::int64_t q = floor_div(a(i, c), a(r, c));
      if (q != 0) axpy_row(a, i, -q, r);
    }
    ++r;
  }
  return a.topRows(r);
}

Eigen::Index rational_rank(const RationalMatrix& rows) {
  RationalMatrix m = rows;
  Eigen::Index rank = 0;
  for (Eigen::Index c = 0; c < m.cols() && rank < m.rows(); ++c) {
    Eigen::Index piv = -1;
    for (Eigen::Index i = rank; i < m.rows(); ++i)
      if (!m(i, c).is_zero()) { piv = i; break; }
    if (piv < 0) continue;
    m.row(rank).swap(m.row(piv));
    for (Eigen::Index i = rank + 1; i < m.rows(); ++i) {
      if (m(i, c).is_zero()) continue;
      Rational f = m(i, c) / m(rank, c);
      for (Eigen::Index k = c; k < m.cols(); ++k) m(i, k) -= f * m(rank, k);
    }
    ++rank;
  }
  return rank;
}

// ---------------------------------------------------------------------------

GroupBasis GroupBasis::generated_by(std::span<const FrequencyVector> elements) {
  if (elements.empty()) throw std::invalid_argument("group_basis: empty spectrum");
  const Eigen::Index p = elements.front().dimension();
  const Eigen::Index b = elements.front().base_size();
  const Eigen::Index n = p * b;

  std::int64_t denom = 1;
  for (const auto& e : elements) {
    if (e.dimension() != p || e.base_size() != b) throw std::invalid_argument("group_basis: mixed shapes");
    for (Eigen::Index j = 0; j < p; ++j)
      for (Eigen::Index m = 0; m < b; ++m) denom = lcm64(denom, e(j, m).den());
  }

  IntegerMatrix stacked(static_cast<Eigen::Index>(elements.size()), n);
  for (std::size_t i = 0; i < elements.size(); ++i) {
    RationalVector flat = elements[i].flattened();
    for (Eigen::Index k = 0; k < n; ++k) {
      Rational scaled = flat(k) * Rational(denom);
      stacked(static_cast<Eigen::Index>(i), k) = scaled.num();
    }
  }

  IntegerMatrix hnf = hermite_normal_form(std::move(stacked));
  GroupBasis out;
  out.p_ = p;
  out.b_ = b;
  for (Eigen::Index i = 0; i < hnf.rows(); ++i) {
    RationalVector row(n);
    for (Eigen::Index k = 0; k < n; ++k) row(k) = Rational(hnf(i, k), denom);
    out.generators_.push_back(FrequencyVector::unflatten(row, p, b));
  }
  return out;
}

GroupBasis GroupBasis::from_generators(std::vector<FrequencyVector> generators, Eigen::Index p, Eigen::Index b) {
  RationalMatrix rows(static_cast<Eigen::Index>(generators.size()), p * b);
  for (std::size_t i = 0; i < generators.size(); ++i) {
    if (generators[i].dimension() != p || generators[i].base_size() != b) {
      throw std::invalid_argument("group basis: generator has wrong shape");
    }
    rows.row(static_cast<Eigen::Index>(i)) = generators[i].flattened().transpose();
  }
  if (rational_rank(rows) != rows.rows()) throw std::invalid_argument("group basis: generators are Q-dependent");
  GroupBasis out;
  out.generators_ = std::move(generators);
  out.p_ = p;
  out.b_ = b;
  return out;
}

Eigen::MatrixXd GroupBasis::realized(const BaseIrrationals& base) const {
  Eigen::MatrixXd g(p_, static_cast<Eigen::Index>(generators_.size()));
  for (std::size_t i = 0; i < generators_.size(); ++i) g.col(static_cast<Eigen::Index>(i)) = realize(generators_[i], base);
  return g;
}

FrequencyVector GroupBasis::combine(const IntegerVector& coefficients) const {
  return combine(RationalVector(coefficients.unaryExpr([](std::int64_t v) { return Rational(v); })));
}

FrequencyVector GroupBasis::combine(const RationalVector& coefficients) const {
  if (coefficients.size() != static_cast<Eigen::Index>(generators_.size())) {
    throw std::invalid_argument("combine: coefficient count does not match rank");
  }
  FrequencyVector acc = FrequencyVector::zero(p_, b_);
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    acc = acc + coefficients(static_cast<Eigen::Index>(i)) * generators_[i];
  }
  return acc;
}

GroupBasis group_basis(std::span<const FrequencyVector> spectrum) { return GroupBasis::generated_by(spectrum); }

std::optional<RationalVector> coordinates_in_span(const FrequencyVector& v, const GroupBasis& basis) {
  if (v.dimension() != basis.dimension() || v.base_size() != basis.base_size()) {
    throw std::invalid_argument("express_in_basis: vector shape does not match basis");
  }
  const auto k = static_cast<Eigen::Index>(basis.rank());
  const Eigen::Index n = v.dimension() * v.base_size();
  // Augmented system G^T x = v, n equations in k unknowns.
  RationalMatrix aug(n, k + 1);
  for (Eigen::Index i = 0; i < k; ++i) aug.col(i) = basis.generators()[static_cast<std::size_t>(i)].flattened();
  aug.col(k) = v.flattened();

  std::vector<Eigen::Index> pivots;
  Eigen::Index row = 0;
  for (Eigen::Index c = 0; c < k && row < n; ++c) {
    Eigen::Index piv = -1;
    for (Eigen::Index i = row; i < n; ++i)
      if (!aug(i, c).is_zero()) { piv = i; break; }
    if (piv < 0) continue;
    aug.row(row).swap(aug.row(piv));
    Rational inv = Rational(1) / aug(row, c);
    for (Eigen::Index cc = c; cc <= k; ++cc) aug(row, cc) *= inv;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (i == row || aug(i, c).is_zero()) continue;
      Rational f = aug(i, c);
      for (Eigen::Index cc = c; cc <= k; ++cc) aug(i, cc) -= f * aug(row, cc);
    }
    pivots.push_back(c);
    ++row;
  }
  for (Eigen::Index i = row; i < n; ++i)
    if (!aug(i, k).is_zero()) return std::nullopt;
  if (static_cast<Eigen::Index>(pivots.size()) != k) throw std::logic_error("express_in_basis: dependent basis");

  RationalVector x(k);
  for (std::size_t i = 0; i < pivots.size(); ++i) x(pivots[i]) = aug(static_cast<Eigen::Index>(i), k);
  return x;
}

std::optional<IntegerVector> express_in_basis(const FrequencyVector& v, const GroupBasis& basis) {
  auto x = coordinates_in_span(v, basis);
  if (!x) return std::nullopt;
  IntegerVector out(x->size());
  for (Eigen::Index i = 0; i < x->size(); ++i) {
    if (!(*x)(i).is_integer()) return std::nullopt;
    out(i) = (*x)(i).num();
  }
  return out;
}

Eigen::MatrixXd lift_exponents(const ExponentialSum& sum, const GroupBasis& basis) {
  Eigen::MatrixXd e(static_cast<Eigen::Index>(basis.rank()), static_cast<Eigen::Index>(sum.size()));
  for (std::size_t t = 0; t < sum.size(); ++t) {
    auto coords = express_in_basis(sum.terms()[t].frequency, basis);
    if (!coords) throw std::logic_error("lift: term frequency outside the group");
    e.col(static_cast<Eigen::Index>(t)) = coords->cast<double>();
  }
  return e;
}

}  // namespace apamoeba
