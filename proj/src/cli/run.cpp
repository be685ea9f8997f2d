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

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "apamoeba/cli.hpp"
#include "apamoeba/kronecker.hpp"
#include "json.hpp"

#ifndef APAMOEBA_VERSION
#define APAMOEBA_VERSION "0.0.0"
#endif

namespace apamoeba {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4];
    out += kHex[md[i] & 15];
  }
  return out;
}

void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

// Artifacts are buffered and land on disk together at the end of a run.
class Outputs {
 public:
  void add(const std::string& name, std::string content) { files_[name] = std::move(content); }
  const std::map<std::string, std::string>& files() const { return files_; }

  void commit(const fs::path& dir, const std::string& suffix) const {
    fs::create_directories(dir);
    for (const auto& [name, content] : files_) write_atomic(dir / (name + suffix), content);
  }

 private:
  std::map<std::string, std::string> files_;
};

json vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json rationals(const RationalVector& r) {
  json a = json::array();
  for (Eigen::Index i = 0; i < r.size(); ++i) a.push_back(r(i).str());
  return a;
}

json snap_json(const SnapResult& s) {
  json j = {{"status", to_string(s.status)}, {"tolerance", s.tolerance}};
  if (s.expression) {
    j["r"] = rationals(s.expression->coefficients);
    j["residual"] = s.expression->residual;
    j["denominator"] = s.expression->denominator;
  } else {
    j["r"] = nullptr;
  }
  json rivals = json::array();
  for (const auto& e : s.rivals) rivals.push_back(rationals(e.coefficients));
  j["rivals"] = std::move(rivals);
  return j;
}

json component_json(const ComponentRecord& r, const BaseBox& box) {
  const Eigen::VectorXd w = box.cell_width();
  json lo = json::array(), hi = json::array();
  for (std::size_t j = 0; j < r.bbox_lower.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    lo.push_back(box.lower(jj) + r.bbox_lower[j] * w(jj));
    hi.push_back(box.lower(jj) + (r.bbox_upper[j] + 1) * w(jj));
  }
  const auto& d = r.diagnostics;
  json j = {
      {"id", r.id},
      {"cell_count", r.cells.size()},
      {"bbox_cells", {{"lower", r.bbox_lower}, {"upper", r.bbox_upper}}},
      {"bbox", {{"lower", lo}, {"upper", hi}}},
      {"representative", vec(r.representative)},
      {"inradius", r.inradius},
      {"order_numeric", vec(r.order_numeric)},
      {"order_error", r.order_error},
      {"order_gradient", vec(r.order_gradient)},
      {"gradient_error", vec(r.gradient_error)},
      {"order_argument", vec(r.order_argument)},
      {"argument_spread", vec(r.argument_spread)},
      {"winding", r.winding ? json(*r.winding) : json(nullptr)},
      {"order_group", r.order_group ? rationals(*r.order_group) : json(nullptr)},
      {"diagnostics",
       {{"convexity_checked", d.convexity_checked},
        {"convexity_violations", d.convexity_violations},
        {"constancy_spread", d.constancy_spread},
        {"estimators_agree", d.estimators_agree},
        {"max_estimator_gap", d.max_estimator_gap},
        {"gradient_status", d.gradient_status},
        {"argument_status", d.argument_status},
        {"notes", d.notes}}},
  };
  return j;
}

json components_json(const std::vector<ComponentRecord>& records, const AmoebaRaster& raster) {
  json comps = json::array();
  for (const auto& r : records) comps.push_back(component_json(r, raster.box));
  return {{"component_count", records.size()},
          {"raster",
           {{"cells", raster.cells.size()},
            {"in", raster.count(CellClass::kIn)},
            {"uncertain", raster.count(CellClass::kUncertain)},
            {"out", raster.count(CellClass::kOut)},
            {"numeric_failures", raster.numeric_failures}}},
          {"components", std::move(comps)}};
}

json relations_json(const RelationReport& rep) {
  json pairs = json::array();
  for (const auto& p : rep.pairs) {
    pairs.push_back({{"from", p.from},
                     {"to", p.to},
                     {"difference", vec(p.difference)},
                     {"error", p.error},
                     {"snap", snap_json(p.snap)},
                     {"ratio", p.ratio},
                     {"consistent", p.consistent}});
  }
  return {{"pairs", std::move(pairs)},
          {"empirical_k", rep.empirical_k},
          {"all_matched", rep.all_matched},
          {"integral", rep.integral}};
}

json basis_json(const GroupBasis& basis) {
  json a = json::array();
  for (const auto& g : basis.generators()) a.push_back(g.str());
  return a;
}

std::string cells_csv(const AmoebaRaster& raster) {
  const auto& box = raster.box;
  const Eigen::Index p = box.dimension();
  std::string out = "cell";
  for (Eigen::Index j = 0; j < p; ++j) out += ",i_" + std::to_string(j + 1);
  for (Eigen::Index j = 0; j < p; ++j) out += ",y_" + std::to_string(j + 1);
  out += ",class,relative_min\n";
  for (std::size_t c = 0; c < raster.cells.size(); ++c) {
    out += std::to_string(c);
    for (int i : box.multi_index(c)) out += "," + std::to_string(i);
    const Eigen::VectorXd y = box.center(c);
    for (Eigen::Index j = 0; j < p; ++j) out += "," + num(y(j));
    out += ",";
    out += to_string(raster.cells[c]);
    out += "," + num(raster.relative_min[c]) + "\n";
  }
  return out;
}

// Binary PGM, first axis left to right, second axis bottom to top.
std::string amoeba_pgm(const AmoebaRaster& raster) {
  const int w = raster.box.resolution[0], h = raster.box.resolution[1];
  std::string out = "P5\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
  for (int row = h - 1; row >= 0; --row) {
    for (int col = 0; col < w; ++col) {
      const CellClass c = raster.cells[raster.box.flat_index({col, row})];
      out += static_cast<char>(c == CellClass::kIn ? 0 : c == CellClass::kUncertain ? 128 : 255);
    }
  }
  return out;
}

json config_json(const RunConfig& cfg) {
  json j;
  j["thresholds"] = {{"tau_in", cfg.thresholds.tau_in}, {"tau_out", cfg.thresholds.tau_out}};
  j["fiber"] = {{"method", to_string(cfg.fiber.method)},
                {"box_half_width", cfg.fiber.box_half_width},
                {"torus_points_per_axis", cfg.fiber.torus_points_per_axis},
                {"box_points_per_period", cfg.fiber.box_points_per_period},
                {"refinement_level", cfg.fiber.refinement_level},
                {"descent_starts", cfg.fiber.descent_starts},
                {"descent_iterations", cfg.fiber.descent_iterations},
                {"max_grid_points", cfg.fiber.max_grid_points},
                {"max_torus_rank", cfg.fiber.max_torus_rank}};
  j["quadrature"] = {{"box_schedule", cfg.quadrature.box_schedule},
                     {"samples_per_batch", cfg.quadrature.samples_per_batch},
                     {"batches", cfg.quadrature.batches},
                     {"clip_floor", cfg.quadrature.clip_floor},
                     {"clip_limit", cfg.quadrature.clip_limit},
                     {"stabilization_tol", cfg.quadrature.stabilization_tol},
                     {"domain", to_string(cfg.quadrature.domain)},
                     {"max_torus_rank", cfg.quadrature.max_torus_rank}};
  j["argument"] = {{"half_length", cfg.argument.half_length},
                   {"lines", cfg.argument.lines},
                   {"zero_threshold", cfg.argument.zero_threshold},
                   {"spread_tolerance", cfg.argument.spread_tolerance}};
  j["snap"] = {{"max_denominator", cfg.snap.max_denominator},
               {"numerator_bound", cfg.snap.numerator_bound},
               {"residual_factor", cfg.snap.residual_factor}};
  j["fd_step"] = cfg.fd_step;
  if (cfg.box_lower.size() > 0) {
    j["box"] = {{"lower", vec(cfg.box_lower)}, {"upper", vec(cfg.box_upper)}, {"resolution", cfg.resolution}};
  }
  json xs = json::array(), ys = json::array();
  for (const auto& x : cfg.points_x) xs.push_back(vec(x));
  for (const auto& y : cfg.points_y) ys.push_back(vec(y));
  if (!xs.empty()) j["points_x"] = std::move(xs);
  if (!ys.empty()) j["points_y"] = std::move(ys);
  if (cfg.subcommand == Subcommand::kKronecker) {
    j["kronecker"] = {{"mu", vec(cfg.mu)},
                      {"a", vec(cfg.target)},
                      {"epsilon", cfg.epsilon},
                      {"t_max", cfg.t_max},
                      {"horizon", cfg.horizon}};
  }
  return j;
}

ComponentConfig component_config(const RunConfig& cfg) {
  ComponentConfig c;
  c.quadrature = cfg.quadrature;
  c.argument = cfg.argument;
  c.winding.seed = cfg.seed;
  c.seed = cfg.seed;
  c.threads = cfg.threads;
  return c;
}

BaseBox base_box(const RunConfig& cfg) { return {cfg.box_lower, cfg.box_upper, cfg.resolution}; }

void check_points(const RunConfig& cfg, Eigen::Index p) {
  if (cfg.points_y.empty()) throw std::invalid_argument("no y points given");
  for (const auto& y : cfg.points_y)
    if (y.size() != p) throw std::invalid_argument("y point dimension differs from the sum dimension");
  if (!cfg.points_x.empty() && cfg.points_x.size() != cfg.points_y.size()) {
    throw std::invalid_argument("x and y point counts differ");
  }
  for (const auto& x : cfg.points_x)
    if (x.size() != p) throw std::invalid_argument("x point dimension differs from the sum dimension");
}

std::string axis_header(const char* prefix, Eigen::Index p) {
  std::string h;
  for (Eigen::Index j = 0; j < p; ++j) h += std::string(h.empty() ? "" : ",") + prefix + std::to_string(j + 1);
  return h;
}

std::string join(const Eigen::VectorXd& v) {
  std::string s;
  for (Eigen::Index j = 0; j < v.size(); ++j) s += (j ? "," : "") + num(v(j));
  return s;
}

int run_eval(const RunConfig& cfg, const ExponentialSum& sum, Outputs& out) {
  const Eigen::Index p = sum.dimension();
  check_points(cfg, p);
  std::string csv = axis_header("x_", p) + "," + axis_header("y_", p) + ",re,im,abs\n";
  for (std::size_t i = 0; i < cfg.points_y.size(); ++i) {
    const Eigen::VectorXd x = cfg.points_x.empty() ? Eigen::VectorXd::Zero(p) : cfg.points_x[i];
    const VectorXc z = x.cast<Complex>() + Complex(0, 1) * cfg.points_y[i].cast<Complex>();
    const Complex v = evaluate(sum, z);
    csv += join(x) + "," + join(cfg.points_y[i]) + "," + num(v.real()) + "," + num(v.imag()) + "," + num(std::abs(v)) + "\n";
  }
  out.add("eval.csv", std::move(csv));
  return kExitOk;
}

int run_jessen(const RunConfig& cfg, const ExponentialSum& sum, Outputs& out) {
  const Eigen::Index p = sum.dimension();
  check_points(cfg, p);
  std::string csv = axis_header("y_", p) + ",J,stderr,domain,s,clipped_fraction,samples,status,reliable\n";
  for (const auto& y : cfg.points_y) {
    const JessenEstimate e = estimate_jessen(sum, y, cfg.quadrature);
    csv += join(y) + "," + num(e.value) + "," + num(e.std_error) + "," + std::string(to_string(e.domain)) + "," +
           num(e.box_half_width) + "," + num(e.clipped_fraction) + "," + std::to_string(e.sample_count) + "," + std::string(to_string(e.status)) + "," +
           (e.reliable ? "true" : "false") + "\n";
  }
  out.add("jessen.csv", std::move(csv));
  return kExitOk;
}

int run_mean_motion(const RunConfig& cfg, const ExponentialSum& sum, Outputs& out) {
  const Eigen::Index p = sum.dimension();
  check_points(cfg, p);
  const double h = cfg.fd_step > 0 ? cfg.fd_step : 1e-3;
  std::string csv = axis_header("y_", p) + ",estimator," + axis_header("c_", p) + "," + axis_header("err_", p) + ",status\n";
  for (const auto& y : cfg.points_y) {
    const MeanMotionEstimate g = mean_motion_gradient(sum, y, h, cfg.quadrature);
    csv += join(y) + ",gradient," + join(g.value) + "," + join(g.std_error) + "," + std::string(to_string(g.status)) + "\n";
    Eigen::VectorXd c(p), err(p);
    std::string status = "ok";
    for (Eigen::Index j = 0; j < p; ++j) {
      const ArgumentEstimate a = mean_motion_argument(sum, y, j, cfg.argument);
      c(j) = a.value;
      err(j) = a.std_error;
      if (a.status != ArgumentStatus::kOk) status = std::string(to_string(a.status));
    }
    csv += join(y) + ",argument," + join(c) + "," + join(err) + "," + status + "\n";
    if (sum.is_laurent()) {
      WindingConfig wc;
      wc.seed = cfg.seed;
      status = "ok";
      for (Eigen::Index j = 0; j < p; ++j) {
        const WindingResult w = laurent_winding_order(sum, y, j, wc);
        c(j) = static_cast<double>(w.value);
        if (w.status != WindingStatus::kOk) status = std::string(to_string(w.status));
      }
      csv += join(y) + ",winding," + join(c) + "," + join(Eigen::VectorXd::Zero(p)) + "," + status + "\n";
    }
  }
  out.add("mean_motion.csv", std::move(csv));
  return kExitOk;
}

AmoebaRaster raster_for(const RunConfig& cfg, const ExponentialSum& sum, std::ostream& log) {
  RasterConfig rc{cfg.thresholds, cfg.fiber, cfg.threads};
  AmoebaRaster raster = rasterize_amoeba(sum, base_box(cfg), rc);
  if (cfg.verbosity > 0) {
    log << "raster: " << raster.count(CellClass::kIn) << " in, " << raster.count(CellClass::kUncertain)
        << " uncertain, " << raster.count(CellClass::kOut) << " out\n";
  }
  return raster;
}

int run_amoeba(const RunConfig& cfg, const ExponentialSum& sum, Outputs& out, std::ostream& log, bool relations) {
  const AmoebaRaster raster = raster_for(cfg, sum, log);
  out.add("cells.csv", cells_csv(raster));
  if (sum.dimension() == 2) out.add("amoeba.pgm", amoeba_pgm(raster));
  std::vector<ComponentRecord> records = components(sum, raster, component_config(cfg));
  if (relations) {
    const GroupBasis basis = group_basis(spectrum(sum));
    const RelationReport rep = component_relations(records, basis, sum.basis(), cfg.snap);
    json rj = relations_json(rep);
    rj["basis"] = basis_json(basis);
    out.add("relations.json", rj.dump(2) + "\n");
  }
  out.add("components.json", components_json(records, raster).dump(2) + "\n");
  log << records.size() << " complement component(s)\n";
  return kExitOk;
}

int run_verify(const RunConfig& cfg, const ExponentialSum& sum, Outputs& out, std::ostream& log) {
  VerifyConfig vc;
  vc.raster = {cfg.thresholds, cfg.fiber, cfg.threads};
  vc.components = component_config(cfg);
  vc.snap = cfg.snap;
  const TheoremVerdict v = verify_theorem(sum, base_box(cfg), vc);
  if (!v.raster.cells.empty()) {
    out.add("cells.csv", cells_csv(v.raster));
    if (sum.dimension() == 2) out.add("amoeba.pgm", amoeba_pgm(v.raster));
    out.add("components.json", components_json(v.records, v.raster).dump(2) + "\n");
  }

  json orders = json::array();
  std::size_t verified = 0;
  for (const auto& o : v.orders) {
    verified += o.verdict == Verdict::kVerified;
    orders.push_back({{"id", o.id}, {"order", vec(o.order)}, {"error", o.error}, {"snap", snap_json(o.snap)},
                      {"status", to_string(o.verdict)}});
  }
  json doc = {
      {"basis", basis_json(v.basis)},
      {"assertion_i", {{"status", to_string(v.assertion_i)}, {"verified", verified}, {"total", v.orders.size()},
                       {"components", std::move(orders)}}},
      {"assertion_ii", {{"status", to_string(v.assertion_ii)}, {"relations", relations_json(v.relations)}}},
      {"assertion_iii", {{"status", to_string(v.assertion_iii)}, {"component_count", v.component_count},
                         {"finite", true}, {"integrality", v.integrality}}},
      {"stage_errors", v.stage_errors},
      {"failed", v.failed()},
  };
  out.add("verdict.json", doc.dump(2) + "\n");
  log << "i " << to_string(v.assertion_i) << " (" << verified << "/" << v.orders.size() << "), ii "
      << to_string(v.assertion_ii) << ", iii " << to_string(v.assertion_iii) << " (" << v.component_count
      << " components, integrality " << (v.integrality ? "true" : "false") << ")\n";
  for (const auto& e : v.stage_errors) log << "stage error: " << e << "\n";
  if (!v.stage_errors.empty()) throw std::runtime_error(v.stage_errors.front());
  return v.failed() ? kExitVerdictFailed : kExitOk;
}

int run_kronecker(const RunConfig& cfg, Outputs& out, std::ostream& log) {
  const KroneckerResult r = kronecker_approximate(cfg.mu, cfg.target, cfg.epsilon, cfg.t_max);
  json doc = {{"mu", vec(cfg.mu)}, {"a", vec(cfg.target)}, {"epsilon", cfg.epsilon}, {"t_max", cfg.t_max},
              {"status", to_string(r.status)}, {"pieces", r.pieces}};
  auto sol_json = [](const KroneckerSolution& s) {
    return json{{"t", s.t}, {"m", std::vector<std::int64_t>(s.m.data(), s.m.data() + s.m.size())}, {"error", s.error}};
  };
  doc["solution"] = r.solution ? sol_json(*r.solution) : json(nullptr);
  log << to_string(r.status);
  if (r.solution) {
    log << " t=" << num(r.solution->t) << " m=(";
    for (Eigen::Index i = 0; i < r.solution->m.size(); ++i) log << (i ? "," : "") << r.solution->m(i);
    log << ") error=" << num(r.solution->error);
  }
  log << "\n";
  if (cfg.horizon > 0) {
    const GapScan scan = return_gap_scan(cfg.mu, cfg.target, cfg.epsilon, cfg.horizon);
    json times = json::array();
    for (const auto& s : scan.solutions) times.push_back(s.t);
    doc["gap_scan"] = {{"horizon", scan.horizon}, {"solutions", times.size()}, {"times", std::move(times)},
                       {"max_gap", scan.max_gap}};
    log << "gap scan: " << scan.solutions.size() << " solutions up to " << num(scan.horizon)
        << ", max gap " << num(scan.max_gap) << "\n";
  }
  out.add("kronecker.json", doc.dump(2) + "\n");
  return kExitOk;
}

}  // namespace

std::string_view to_string(Subcommand s) {
  switch (s) {
    case Subcommand::kEval: return "eval";
    case Subcommand::kJessen: return "jessen";
    case Subcommand::kAmoeba: return "amoeba";
    case Subcommand::kComponents: return "components";
    case Subcommand::kMeanMotion: return "mean-motion";
    case Subcommand::kVerify: return "verify";
    case Subcommand::kKronecker: return "kronecker";
  }
  return "unknown";
}

void RunConfig::propagate() {
  fiber.seed = seed;
  quadrature.seed = seed;
  quadrature.threads = threads;
  argument.seed = seed;
  argument.threads = threads;
}

void RunConfig::validate() const {
  thresholds.validate();
  fiber.validate();
  quadrature.validate();
  argument.validate();
  snap.validate();
  if (fd_step < 0) throw std::invalid_argument("fd step must be >= 0");
  const bool needs_box = subcommand == Subcommand::kAmoeba || subcommand == Subcommand::kComponents ||
                         subcommand == Subcommand::kVerify;
  if (needs_box) base_box(*this).validate();
  if (subcommand == Subcommand::kKronecker) {
    if (mu.size() == 0 || mu.size() != target.size()) throw std::invalid_argument("kronecker: mu and a need one size");
    if (!(epsilon > 0) || !(t_max > 0) || horizon < 0) throw std::invalid_argument("kronecker: bad epsilon, t_max or horizon");
  } else if (input.empty()) {
    throw std::invalid_argument("an input sum specification is required");
  }
}

int run(RunConfig cfg, std::ostream& log) {
  cfg.propagate();
  cfg.validate();
  Outputs out;
  json manifest = {{"tool", "apamoeba"},
                   {"version", APAMOEBA_VERSION},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"subcommand", to_string(cfg.subcommand)},
                   {"seed", cfg.seed},
                   {"config", config_json(cfg)}};
  int status = kExitOk;
  bool stage_failed = false;
  try {
    if (cfg.subcommand == Subcommand::kKronecker) {
      status = run_kronecker(cfg, out, log);
    } else {
      std::ifstream in(cfg.input, std::ios::binary);
      if (!in) throw std::runtime_error("cannot open " + cfg.input.string());
      std::ostringstream ss;
      ss << in.rdbuf();
      const std::string text = ss.str();
      manifest["input"] = {{"path", cfg.input.generic_string()}, {"sha256", sha256_hex(text)}};
      const ExponentialSum sum = parse_sum_spec(text);
      if (cfg.box_lower.size() > 0 && cfg.box_lower.size() != sum.dimension()) {
        throw std::invalid_argument("box dimension differs from the sum dimension");
      }
      switch (cfg.subcommand) {
        case Subcommand::kEval: status = run_eval(cfg, sum, out); break;
        case Subcommand::kJessen: status = run_jessen(cfg, sum, out); break;
        case Subcommand::kMeanMotion: status = run_mean_motion(cfg, sum, out); break;
        case Subcommand::kAmoeba: status = run_amoeba(cfg, sum, out, log, false); break;
        case Subcommand::kComponents: status = run_amoeba(cfg, sum, out, log, true); break;
        case Subcommand::kVerify: status = run_verify(cfg, sum, out, log); break;
        case Subcommand::kKronecker: break;
      }
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    manifest["error"] = e.what();
    stage_failed = true;
    status = kExitStageFailure;
  }
  json hashes = json::object();
  for (const auto& [name, content] : out.files()) hashes[name] = sha256_hex(content);
  manifest["outputs"] = std::move(hashes);
  manifest["exit_status"] = status;
  out.add("manifest.json", manifest.dump(2) + "\n");
  out.commit(cfg.output_dir, stage_failed ? ".partial" : "");
  return status;
}

}  // namespace apamoeba
