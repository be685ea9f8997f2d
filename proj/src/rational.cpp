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

#include "apamoeba/rational.hpp"

#include <charconv>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace apamoeba {

namespace {

using Wide = __int128;

std::int64_t narrow(Wide v) {
  if (v > std::numeric_limits<std::int64_t>::max() ||
      v < -std::numeric_limits<std::int64_t>::max()) {
    throw std::overflow_error("rational arithmetic overflow");
  }
  return static_cast<std::int64_t>(v);
}

Wide wide_gcd(Wide a, Wide b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    Wide t = a % b;
    a = b;
    b = t;
  }
  return a;
}

// Reduces num/den held in 128 bits, then narrows.
void reduce(Wide num, Wide den, std::int64_t& out_num, std::int64_t& out_den) {
  if (den == 0) throw std::domain_error("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  Wide g = wide_gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  out_num = narrow(num);
  out_den = narrow(den);
}

std::int64_t parse_int(std::string_view s) {
  std::int64_t value = 0;
  auto first = s.data();
  auto last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw std::invalid_argument("malformed integer '" + std::string(s) + "'");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational::Rational(std::int64_t numerator) : num_(numerator), den_(1) {}

Rational::Rational(std::int64_t numerator, std::int64_t denominator) {
  reduce(numerator, denominator, num_, den_);
}

Rational Rational::parse(std::string_view text) {
  text = trim(text);
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text));
  return Rational(parse_int(trim(text.substr(0, slash))),
                  parse_int(trim(text.substr(slash + 1))));
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Rational Rational::operator-() const {
  Rational r;
  r.num_ = narrow(-static_cast<Wide>(num_));
  r.den_ = den_;
  return r;
}

Rational& Rational::operator+=(const Rational& rhs) {
  Wide n = static_cast<Wide>(num_) * rhs.den_ + static_cast<Wide>(rhs.num_) * den_;
  Wide d = static_cast<Wide>(den_) * rhs.den_;
  reduce(n, d, num_, den_);
  return *this;
}

Rational& Rational::operator-=(const Rational& rhs) { return *this += -rhs; }

Rational& Rational::operator*=(const Rational& rhs) {
  // Cross-cancel first so intermediate products stay small.
  std::int64_t g1 = std::gcd(num_, rhs.den_);
  std::int64_t g2 = std::gcd(rhs.num_, den_);
  if (g1 == 0) g1 = 1;
  if (g2 == 0) g2 = 1;
  Wide n = static_cast<Wide>(num_ / g1) * (rhs.num_ / g2);
  Wide d = static_cast<Wide>(den_ / g2) * (rhs.den_ / g1);
  reduce(n, d, num_, den_);
  return *this;
}

Rational& Rational::operator/=(const Rational& rhs) {
  if (rhs.num_ == 0) throw std::domain_error("rational division by zero");
  return *this *= Rational(rhs.den_, rhs.num_);
}

std::strong_ordering operator<=>(const Rational& lhs, const Rational& rhs) {
  Wide l = static_cast<Wide>(lhs.num_) * rhs.den_;
  Wide r = static_cast<Wide>(rhs.num_) * lhs.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

Rational abs(const Rational& r) { return r.num() < 0 ? -r : r; }

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  return narrow(static_cast<Wide>(a) + b);
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  return narrow(static_cast<Wide>(a) * b);
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  return narrow(wide_gcd(a, b));
}

std::int64_t lcm64(std::int64_t a, std::int64_t b) {
  if (a == 0 || b == 0) return 0;
  std::int64_t g = gcd64(a, b);
  Wide l = static_cast<Wide>(a / g) * b;
  return narrow(l < 0 ? -l : l);
}

}  // namespace apamoeba
