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

#ifndef APAMOEBA_CLI_HPP
#define APAMOEBA_CLI_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "apamoeba/amoeba.hpp"
#include "apamoeba/exp_sum.hpp"
#include "apamoeba/jessen.hpp"
#include "apamoeba/relations.hpp"

namespace apamoeba {

/// Parse failure in a sum specification. `where` is "line L, column C" for
/// syntax errors and a JSON pointer such as "/terms/2/frequency" otherwise.
class SumSpecError : public std::runtime_error {
 public:
  SumSpecError(std::string where, const std::string& what);
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

/// Sum specification (JSON):
///
///   {
///     "dimension": 1,
///     "base_irrationals": [{"label": "1", "value": 1}, {"label": "sqrt2", "value": 1.4142135623730951}],
///     "terms": [
///       {"coefficient": [1, 0], "frequency": [["0", "1"]], "label": "a"},
///       {"coefficient": 6, "frequency": [["0", "0"]]}
///     ]
///   }
///
/// base_irrationals defaults to [1]. A frequency is p rows of B exact
/// rationals ("a/b" strings or integers); with B = 1 a flat list of p
/// entries is accepted too. A coefficient is a real number or [re, im].
/// Unknown fields are rejected.
ExponentialSum parse_sum_spec(std::string_view text);
ExponentialSum load_sum_spec(const std::filesystem::path& path);
std::string serialize_sum(const ExponentialSum& sum);

enum class Subcommand { kEval, kJessen, kAmoeba, kComponents, kMeanMotion, kVerify, kKronecker };
std::string_view to_string(Subcommand s);

struct RunConfig {
  Subcommand subcommand = Subcommand::kVerify;
  std::filesystem::path input;
  std::filesystem::path output_dir = ".";
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: APAMOEBA_THREADS or hardware concurrency
  int verbosity = 0;

  // eval, jessen, mean-motion
  std::vector<Eigen::VectorXd> points_x;
  std::vector<Eigen::VectorXd> points_y;

  // amoeba, components, verify
  Eigen::VectorXd box_lower;
  Eigen::VectorXd box_upper;
  std::vector<int> resolution;

  Thresholds thresholds;
  FiberSearchConfig fiber;
  QuadratureConfig quadrature;
  ArgumentConfig argument;
  SnapConfig snap;
  double fd_step = 0;  // mean-motion finite-difference step; 0 = 1e-3

  // kronecker
  Eigen::VectorXd mu;
  Eigen::VectorXd target;
  double epsilon = 1e-2;
  double t_max = 1e4;
  double horizon = 0;  // > 0 adds a return-gap scan up to this horizon

  /// Copies seed and threads into the module configs.
  void propagate();
  void validate() const;
};

/// Exit codes returned by run().
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerdictFailed = 1;
inline constexpr int kExitStageFailure = 2;

/// Runs one subcommand and writes its artifacts plus manifest.json into
/// output_dir. Files are written via temp file + rename; after a failure
/// whatever was produced is kept with a ".partial" suffix. Progress and
/// plain-text results go to `log`.
int run(RunConfig cfg, std::ostream& log);

}  // namespace apamoeba

#endif  // APAMOEBA_CLI_HPP
