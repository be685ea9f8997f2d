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
#include <fstream>
#include <sstream>
#include <string>

#include "apamoeba/cli.hpp"
#include "json.hpp"

namespace apamoeba {

using nlohmann::json;

namespace {

std::string line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& ptr) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw SumSpecError(ptr + "/" + key, "unknown field \"" + key + "\"");
    }
  }
}

const json& require(const json& obj, const char* key, const std::string& ptr) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SumSpecError(ptr, std::string("missing field \"") + key + "\"");
  return *it;
}

double finite_number(const json& v, const std::string& ptr) {
  if (!v.is_number()) throw SumSpecError(ptr, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SumSpecError(ptr, "non-finite number");
  return d;
}

Rational rational_entry(const json& v, const std::string& ptr) {
  try {
    if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
    if (v.is_string()) return Rational::parse(v.get<std::string>());
  } catch (const std::exception& e) {
    throw SumSpecError(ptr, std::string("bad rational: ") + e.what());
  }
  throw SumSpecError(ptr, "expected an integer or an \"a/b\" string");
}

Complex coefficient(const json& v, const std::string& ptr) {
  if (v.is_number()) return {finite_number(v, ptr), 0.0};
  if (v.is_array() && v.size() == 2) return {finite_number(v[0], ptr + "/0"), finite_number(v[1], ptr + "/1")};
  throw SumSpecError(ptr, "expected a real number or [re, im]");
}

FrequencyVector frequency(const json& v, Eigen::Index p, Eigen::Index b, const std::string& ptr) {
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != p) {
    throw SumSpecError(ptr, "expected " + std::to_string(p) + " rows");
  }
  RationalMatrix m(p, b);
  for (Eigen::Index j = 0; j < p; ++j) {
    const json& row = v[static_cast<std::size_t>(j)];
    const std::string rptr = ptr + "/" + std::to_string(j);
    if (!row.is_array()) {
      if (b != 1) throw SumSpecError(rptr, "expected a row of " + std::to_string(b) + " entries");
      m(j, 0) = rational_entry(row, rptr);
      continue;
    }
    if (static_cast<Eigen::Index>(row.size()) != b) {
      throw SumSpecError(rptr, "expected a row of " + std::to_string(b) + " entries");
    }
    for (Eigen::Index c = 0; c < b; ++c) {
      m(j, c) = rational_entry(row[static_cast<std::size_t>(c)], rptr + "/" + std::to_string(c));
    }
  }
  return FrequencyVector(std::move(m));
}

}  // namespace

SumSpecError::SumSpecError(std::string where, const std::string& what)
    : std::runtime_error(where + ": " + what), where_(std::move(where)) {}

ExponentialSum parse_sum_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SumSpecError(line_column(text, e.byte), e.what());
  } catch (const json::out_of_range& e) {
    // Number overflow; the message quotes the token, which locates it.
    const std::string msg = e.what();
    const auto open = msg.find('\''), close = msg.rfind('\'');
    std::size_t at = std::string_view::npos;
    if (open != std::string::npos && close > open) at = text.find(msg.substr(open + 1, close - open - 1));
    throw SumSpecError(at == std::string_view::npos ? "" : line_column(text, at + 1), "non-finite number");
  }
  if (!doc.is_object()) throw SumSpecError("", "expected a JSON object");
  reject_unknown(doc, {"dimension", "base_irrationals", "terms"}, "");

  const json& dim = require(doc, "dimension", "");
  if (!dim.is_number_integer() || dim.get<std::int64_t>() < 1) throw SumSpecError("/dimension", "expected an integer >= 1");
  const auto p = static_cast<Eigen::Index>(dim.get<std::int64_t>());

  BaseIrrationals base;
  if (auto it = doc.find("base_irrationals"); it != doc.end()) {
    if (!it->is_array() || it->empty()) throw SumSpecError("/base_irrationals", "expected a nonempty array");
    std::vector<double> values;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < it->size(); ++i) {
      const json& e = (*it)[i];
      const std::string ptr = "/base_irrationals/" + std::to_string(i);
      if (!e.is_object()) throw SumSpecError(ptr, "expected an object");
      reject_unknown(e, {"label", "value"}, ptr);
      values.push_back(finite_number(require(e, "value", ptr), ptr + "/value"));
      const json& label = require(e, "label", ptr);
      if (!label.is_string()) throw SumSpecError(ptr + "/label", "expected a string");
      labels.push_back(label.get<std::string>());
    }
    try {
      base = BaseIrrationals(std::move(values), std::move(labels));
    } catch (const std::invalid_argument& e) {
      throw SumSpecError("/base_irrationals", e.what());
    }
  }
  const auto b = static_cast<Eigen::Index>(base.size());

  const json& terms_json = require(doc, "terms", "");
  if (!terms_json.is_array()) throw SumSpecError("/terms", "expected an array");
  std::vector<Term> terms;
  for (std::size_t i = 0; i < terms_json.size(); ++i) {
    const json& t = terms_json[i];
    const std::string ptr = "/terms/" + std::to_string(i);
    if (!t.is_object()) throw SumSpecError(ptr, "expected an object");
    reject_unknown(t, {"coefficient", "frequency", "label"}, ptr);
    Term term;
    term.coefficient = coefficient(require(t, "coefficient", ptr), ptr + "/coefficient");
    term.frequency = frequency(require(t, "frequency", ptr), p, b, ptr + "/frequency");
    if (auto l = t.find("label"); l != t.end()) {
      if (!l->is_string()) throw SumSpecError(ptr + "/label", "expected a string");
      term.label = l->get<std::string>();
    }
    terms.push_back(std::move(term));
  }
  try {
    return ExponentialSum(p, std::move(base), std::move(terms));
  } catch (const std::invalid_argument& e) {
    throw SumSpecError("/terms", e.what());
  }
}

ExponentialSum load_sum_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_sum_spec(ss.str());
}

std::string serialize_sum(const ExponentialSum& sum) {
  json doc;
  doc["dimension"] = sum.dimension();
  json base = json::array();
  for (std::size_t i = 0; i < sum.basis().size(); ++i) {
    base.push_back({{"label", sum.basis().labels()[i]}, {"value", sum.basis().values()(static_cast<Eigen::Index>(i))}});
  }
  doc["base_irrationals"] = std::move(base);
  json terms = json::array();
  for (const Term& t : sum.terms()) {
    json freq = json::array();
    for (Eigen::Index j = 0; j < t.frequency.dimension(); ++j) {
      json row = json::array();
      for (Eigen::Index c = 0; c < t.frequency.base_size(); ++c) row.push_back(t.frequency(j, c).str());
      freq.push_back(std::move(row));
    }
    json term = {{"coefficient", {t.coefficient.real(), t.coefficient.imag()}}, {"frequency", std::move(freq)}};
    if (!t.label.empty()) term["label"] = t.label;
    terms.push_back(std::move(term));
  }
  doc["terms"] = std::move(terms);
  return doc.dump(2) + "\n";
}

}  // namespace apamoeba
