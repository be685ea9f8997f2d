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

// Independent reference computations for the tests. Nothing here calls the
// library's numerics; the shared vocabulary is plain std::complex and
// std::vector.

#ifndef APAMOEBA_TESTS_ORACLES_HPP
#define APAMOEBA_TESTS_ORACLES_HPP

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

namespace oracle {

using cplx = std::complex<double>;

struct Monomial {
  cplx c;
  std::vector<int> n;  // integer exponent per axis
};

// Trapezoid mean of log|sum c w^n| over the torus at |w_j| = exp(-y_j). For
// integer frequencies this equals the Jessen function, and the periodic
// trapezoid rule converges geometrically away from zeros.
inline double torus_mean_log(const std::vector<Monomial>& f, const std::vector<double>& y, int n) {
  const std::size_t p = y.size();
  std::size_t total = 1;
  for (std::size_t j = 0; j < p; ++j) total *= static_cast<std::size_t>(n);
  double acc = 0;
  std::vector<int> idx(p, 0);
  for (std::size_t k = 0; k < total; ++k) {
    cplx s = 0;
    for (const auto& m : f) {
      double phase = 0, mod = 0;
      for (std::size_t j = 0; j < p; ++j) {
        const double theta = 2 * std::numbers::pi * (idx[j] + 0.5) / n;
        phase += m.n[j] * theta;
        mod -= m.n[j] * y[j];
      }
      s += m.c * std::exp(mod) * cplx(std::cos(phase), std::sin(phase));
    }
    acc += std::log(std::abs(s));
    for (std::size_t j = 0; j < p; ++j) {
      if (++idx[j] < n) break;
      idx[j] = 0;
    }
  }
  return acc / static_cast<double>(total);
}

// y lies in the amoeba of a sum of terms with the given moduli iff no
// modulus exceeds the sum of the others.
inline bool triangle_in_amoeba(const std::vector<double>& moduli) {
  double total = 0, biggest = 0;
  for (double m : moduli) {
    total += m;
    biggest = std::max(biggest, m);
  }
  return biggest <= total - biggest;
}

// Index of the strictly dominant modulus, or -1 inside the amoeba.
inline int dominant_term(const std::vector<double>& moduli) {
  if (triangle_in_amoeba(moduli)) return -1;
  int best = 0;
  for (std::size_t i = 1; i < moduli.size(); ++i)
    if (moduli[i] > moduli[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  return best;
}

inline double bisect(const std::function<double(double)>& g, double lo, double hi) {
  double glo = g(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm < 0) == (glo < 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Mean motion of a one-variable Laurent polynomial sum_k a_k w^k at
// |w| = r: lowest exponent plus the number of roots of the shifted
// polynomial inside |w| < r. Roots from companion-matrix eigenvalues.
inline int laurent_order_1d(const std::vector<std::pair<cplx, int>>& terms, double r) {
  int lo = terms.front().second, hi = lo;
  for (const auto& t : terms) {
    lo = std::min(lo, t.second);
    hi = std::max(hi, t.second);
  }
  const int deg = hi - lo;
  if (deg == 0) return lo;
  std::vector<cplx> coef(static_cast<std::size_t>(deg + 1), 0.0);
  for (const auto& t : terms) coef[static_cast<std::size_t>(t.second - lo)] += t.first;
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1;
  for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -coef[static_cast<std::size_t>(i)] / coef[static_cast<std::size_t>(deg)];
  const Eigen::VectorXcd roots = comp.eigenvalues();
  int inside = 0;
  for (Eigen::Index i = 0; i < roots.size(); ++i) inside += std::abs(roots(i)) < r;
  return lo + inside;
}

// Continued-fraction convergents of sqrt(2) from the Pell recurrence.
inline std::vector<std::pair<long, long>> sqrt2_convergents(int count) {
  std::vector<std::pair<long, long>> out{{1, 1}, {3, 2}};
  while (static_cast<int>(out.size()) < count) {
    const auto [p1, q1] = out[out.size() - 1];
    const auto [p0, q0] = out[out.size() - 2];
    out.emplace_back(2 * p1 + p0, 2 * q1 + q0);
  }
  return out;
}

// Frozen reference values (computed with the functions above and checked
// against 30-digit arithmetic).
inline constexpr double kBandUpper = -0.895939643295917333;  // exp(-y) + exp(-sqrt2 y) = 6
inline constexpr double kBandLower = -1.738522820442262626;  // exp(-sqrt2 y) - exp(-y) = 6
inline constexpr double kKroneckerQ5 = 0.446532231326557132;
inline constexpr double kKroneckerQ29 = 0.076612818822196773;

}  // namespace oracle

#endif  // APAMOEBA_TESTS_ORACLES_HPP
