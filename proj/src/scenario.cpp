// Copyright 2026 The qrepeat Authors
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


#include "qrepeat/scenario.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "qrepeat/copy_dynamics.hpp"
#include "qrepeat/generators.hpp"
#include "qrepeat/povm.hpp"
#include "qrepeat/theorems.hpp"

namespace qrepeat {

namespace fs = std::filesystem;

const char* comparison_symbol(Comparison c) {
  switch (c) {
    case Comparison::less:
      return "<";
    case Comparison::greater_equal:
      return ">=";
    case Comparison::greater:
      return ">";
  }
  return "?";
}

Verdict Verdict::check(std::string name, double value, Comparison c, double threshold) {
  Verdict v{std::move(name), value, threshold, c, false};
  switch (c) {
    case Comparison::less:
      v.pass = value < threshold;
      break;
    case Comparison::greater_equal:
      v.pass = value >= threshold;
      break;
    case Comparison::greater:
      v.pass = value > threshold;
      break;
  }
  return v;
}

std::string RunReport::name() const { return scenario.value("name", std::string{}); }

bool RunReport::pass() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

Json to_json(const Verdict& v) {
  return Json{{"name", v.name},
              {"value", v.value},
              {"threshold", v.threshold},
              {"comparison", comparison_symbol(v.comparison)},
              {"pass", v.pass}};
}

Json to_json(const RunReport& r) {
  Json verdicts = Json::array();
  for (const auto& v : r.verdicts) verdicts.push_back(to_json(v));
  Json artifacts = Json::array();
  for (const auto& a : r.artifacts) artifacts.push_back(a.filename);
  return Json{{"scenario", r.scenario},
              {"verdicts", verdicts},
              {"artifacts", artifacts},
              {"pass", r.pass()},
              {"wall_time", r.wall_time}};
}

std::string format_number(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string format_csv(const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ',';
    out += header[i];
  }
  out += '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_number(row[i]);
    }
    out += '\n';
  }
  return out;
}

namespace {

// Tracks which keys of a JSON object were consumed so leftovers can be
// rejected as unknown fields.
class Fields {
 public:
  Fields(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_.empty() ? "config" : path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const Json& get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) throw ConfigError(at(key), "missing required field");
    return *it;
  }

  const Json* find(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key) {
    const Json& v = get(key);
    if (!v.is_number()) throw ConfigError(at(key), "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(at(key), "must be finite");
    return x;
  }
  double number(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  std::uint64_t integer(const std::string& key, std::uint64_t lo, std::uint64_t hi) {
    const Json& v = get(key);
    return as_integer(v, at(key), lo, hi);
  }
  std::uint64_t integer(const std::string& key, std::uint64_t fallback, std::uint64_t lo,
                        std::uint64_t hi) {
    return has(key) ? integer(key, lo, hi) : fallback;
  }

  bool flag(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const Json& v = get(key);
    if (!v.is_boolean()) throw ConfigError(at(key), "expected true or false");
    return v.get<bool>();
  }

  std::string text(const std::string& key) {
    const Json& v = get(key);
    if (!v.is_string()) throw ConfigError(at(key), "expected a string");
    return v.get<std::string>();
  }
  std::string text(const std::string& key, const std::string& fallback) {
    return has(key) ? text(key) : fallback;
  }

  const Json& array(const std::string& key) {
    const Json& v = get(key);
    if (!v.is_array()) throw ConfigError(at(key), "expected an array");
    return v;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError(at(it.key()), "unknown field");
    }
  }

  static std::uint64_t as_integer(const Json& v, const std::string& field, std::uint64_t lo,
                                  std::uint64_t hi) {
    std::uint64_t x = 0;
    if (v.is_number_unsigned()) {
      x = v.get<std::uint64_t>();
    } else if (v.is_number_integer()) {
      const auto s = v.get<std::int64_t>();
      if (s < 0) throw ConfigError(field, "must be non-negative");
      x = static_cast<std::uint64_t>(s);
    } else {
      throw ConfigError(field, "expected an integer");
    }
    if (x < lo || x > hi) {
      throw ConfigError(field, "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return x;
  }

 private:
  const Json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string strip_field(const FormatError& e) {
  const std::string w = e.what();
  const std::string prefix = e.field() + ": ";
  return w.rfind(prefix, 0) == 0 ? w.substr(prefix.size()) : w;
}

template <class F>
auto parse_value(F&& f) {
  try {
    return f();
  } catch (const FormatError& e) {
    throw ConfigError(e.field(), strip_field(e));
  }
}

StateVector state_at(Fields& f, const std::string& key) {
  const Json& j = f.get(key);
  return parse_value([&] { return state_from_json(j, f.at(key)); });
}

DensityOperator density_at(Fields& f, const std::string& key) {
  const Json& j = f.get(key);
  return parse_value([&] { return density_from_json(j, f.at(key)); });
}

UnitaryOperator unitary_at(Fields& f, const std::string& key) {
  const Json& j = f.get(key);
  return parse_value([&] { return unitary_from_json(j, f.at(key)); });
}

Matrix matrix_at(Fields& f, const std::string& key) {
  const Json& j = f.get(key);
  return parse_value([&] { return matrix_from_json(j, f.at(key)); });
}

std::vector<std::vector<std::size_t>> groups_at(Fields& f, const std::string& key) {
  const Json& j = f.array(key);
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t g = 0; g < j.size(); ++g) {
    const std::string field = f.at(key) + "[" + std::to_string(g) + "]";
    if (!j[g].is_array() || j[g].empty()) throw ConfigError(field, "expected a non-empty index list");
    std::vector<std::size_t> members;
    for (const auto& idx : j[g]) members.push_back(Fields::as_integer(idx, field, 0, 1 << 16));
    groups.push_back(std::move(members));
  }
  return groups;
}

// {"groups": [[..], ..], "basis": optional matrix of basis columns}
RecordDecomposition records_at(Fields& parent, const std::string& key) {
  Fields f(parent.get(key), parent.at(key));
  const auto groups = groups_at(f, "groups");
  std::size_t dim = 0;
  for (const auto& g : groups) dim += g.size();
  std::optional<Matrix> basis;
  if (f.has("basis")) basis = matrix_at(f, "basis");
  f.finish();
  try {
    if (basis) return RecordDecomposition::from_basis(*basis, groups);
    return RecordDecomposition::computational(dim, groups);
  } catch (const Error& e) {
    throw ConfigError(parent.at(key), e.what());
  }
}

OptimizationConfig optimizer_config(Fields& f, Seed seed) {
  OptimizationConfig c;
  c.seed = seed;
  if (const Json* j = f.find("optimizer")) {
    Fields o(*j, f.at("optimizer"));
    constexpr std::uint64_t kBig = 1u << 24;
    c.restarts = static_cast<int>(o.integer("restarts", c.restarts, 1, kBig));
    c.max_iterations = static_cast<int>(o.integer("max_iterations", c.max_iterations, 1, kBig));
    c.refinements = static_cast<int>(o.integer("refinements", c.refinements, 0, 64));
    c.continuation_stages =
        static_cast<int>(o.integer("continuation_stages", c.continuation_stages, 0, 16));
    c.penalty_weight = o.number("penalty_weight", c.penalty_weight);
    c.convergence_tol = o.number("convergence_tol", c.convergence_tol);
    c.step_init = o.number("step_init", c.step_init);
    o.finish();
  }
  try {
    c.validate();
  } catch (const Error& e) {
    throw ConfigError(f.at("optimizer"), e.what());
  }
  return c;
}

Json complex_pair(Complex z) { return Json::array({z.real(), z.imag()}); }

Json search_summary(const SearchResult& s) {
  Json residuals = Json::object();
  for (const auto& [name, value] : s.constraint_residuals) residuals[name] = value;
  return Json{{"merit", s.best_score},
              {"objective", s.objective},
              {"restart_index", s.restart_index},
              {"restarts_run", s.restarts_run},
              {"converged_restarts", s.converged_restarts},
              {"budget_exhausted", s.budget_exhausted},
              {"iterations_used", s.iterations_used},
              {"residuals", residuals}};
}

Json verdict_summary(const ActionabilityVerdict& v) {
  return Json{{"best_score", v.best_score},
              {"product_residual", v.product_residual},
              {"control_drift", v.control_drift},
              {"status", status_name(v.status)},
              {"actionable", v.actionable},
              {"trials", v.trials},
              {"system_overlap", v.system_overlap},
              {"witness_unitary", to_json(v.witness_unitary)},
              {"search", search_summary(v.search)}};
}

struct Context {
  Seed seed = 0;
  RunReport* report = nullptr;

  void check(std::string name, double value, Comparison c, double threshold) {
    report->verdicts.push_back(Verdict::check(std::move(name), value, c, threshold));
  }
  void csv(std::string filename, const std::vector<std::string>& header,
           const std::vector<std::vector<double>>& rows) {
    report->artifacts.push_back({std::move(filename), format_csv(header, rows)});
  }
  Json& details() { return report->details; }
};

// ---- identity -----------------------------------------------------------------

UnitaryOperator computational_copy(std::size_t d) {
  std::vector<std::vector<std::size_t>> groups;
  TagSpec tags{StateVector::basis(d, 0), {}};
  for (std::size_t i = 0; i < d; ++i) {
    groups.push_back({i});
    tags.tags.push_back(StateVector::basis(d, i));
  }
  return build_controlled_copy(RecordDecomposition::computational(d, groups), tags);
}

void run_identity(Fields& f, Context& ctx) {
  const bool explicit_case = f.has("u") || f.has("v") || f.has("copy");
  const bool random_batch = f.has("random");
  if (!explicit_case && !random_batch) {
    throw ConfigError("u", "identity scenario needs an explicit case (u, v, copy) or \"random\"");
  }
  if (explicit_case) {
    const StateVector u = state_at(f, "u");
    const StateVector v = state_at(f, "v");
    if (u.dim() != v.dim()) throw ConfigError(f.at("v"), "dimension differs from u");
    const std::size_t ds = u.dim();
    const Json& copy_json = f.get("copy");
    UnitaryOperator copy = UnitaryOperator::identity(1);
    if (copy_json.is_string()) {
      if (copy_json.get<std::string>() != "cnot") {
        throw ConfigError(f.at("copy"), "expected \"cnot\" or a unitary");
      }
      copy = computational_copy(ds);
    } else {
      copy = unitary_at(f, "copy");
    }
    if (copy.dim() % ds != 0) throw ConfigError(f.at("copy"), "does not act on S (x) A");
    const std::size_t da = copy.dim() / ds;
    const StateVector ready = f.has("ready") ? state_at(f, "ready") : StateVector::basis(da, 0);
    if (ready.dim() != da) throw ConfigError(f.at("ready"), "dimension does not match the copy");
    std::optional<RecordDecomposition> records;
    if (f.has("records")) records = records_at(f, "records");
    const bool expect_violation = f.flag("expect_violation", false);

    Json d;
    try {
      const ScalarProductReport r = verify_scalar_product_identity(u, v, copy, ready, records);
      d = Json{{"lhs", complex_pair(r.identity.lhs)},
               {"rhs", complex_pair(r.identity.rhs)},
               {"system_overlap", complex_pair(r.system_overlap)},
               {"tag_overlap", complex_pair(r.tag_overlap)},
               {"originals_orthogonal", r.originals_orthogonal},
               {"tags_identical", r.tags_identical},
               {"repeatability_residual", r.repeatability_residual}};
      if (expect_violation) {
        ctx.check("repeatability_violation", r.repeatability_residual, Comparison::greater_equal,
                  kTolAlg);
      } else {
        // the precondition held (otherwise verify_* throws); the dichotomy for
        // a single case is informational
        ctx.check("scalar_product_identity", r.identity.residual, Comparison::less, kTolAlg);
        d["dichotomy"] = r.dichotomy;
      }
    } catch (const RepeatabilityViolation& e) {
      d = Json{{"repeatability_residual", e.residual()}, {"violation", e.what()}};
      const Comparison c = expect_violation ? Comparison::greater_equal : Comparison::less;
      ctx.check(expect_violation ? "repeatability_violation" : "repeatability_precondition",
                e.residual(), c, kTolAlg);
    }
    ctx.details()["explicit"] = d;
  }
  if (random_batch) {
    Fields r(f.get("random"), f.at("random"));
    const auto trials = r.integer("trials", 1, 1u << 24);
    const auto max_dim = r.integer("max_dim", 4, 2, 8);
    r.finish();
    double worst_residual = 0.0;
    double worst_gap = 0.0;
    std::size_t orthogonal = 0;
    std::size_t identical = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
      const RepeatableCase c = random_repeatable_case(derive_seed(ctx.seed, i), max_dim);
      const ScalarProductReport rep =
          verify_scalar_product_identity(c.u, c.v, c.copy, c.tags.ready, c.setup.records);
      worst_residual = std::max(worst_residual, rep.identity.residual);
      const double gap = std::min(std::abs(rep.system_overlap), std::abs(rep.tag_overlap - 1.0));
      worst_gap = std::max(worst_gap, gap);
      orthogonal += rep.originals_orthogonal ? 1 : 0;
      identical += rep.tags_identical ? 1 : 0;
    }
    ctx.check("random_identity_max_residual", worst_residual, Comparison::less, kTolAlg);
    ctx.check("random_dichotomy_max_gap", worst_gap, Comparison::less, kTolAlg);
    ctx.details()["random"] = Json{{"trials", trials},
                                   {"orthogonal_originals", orthogonal},
                                   {"identical_tags", identical}};
  }
}

// ---- record orthogonality -------------------------------------------------------

CopyChain chain_at(Fields& parent, const std::string& key) {
  Fields f(parent.get(key), parent.at(key));
  const auto groups = groups_at(f, "groups");
  std::size_t dim = 0;
  for (const auto& g : groups) dim += g.size();
  std::optional<Matrix> basis;
  if (f.has("basis")) basis = matrix_at(f, "basis");
  const Json& app = f.array("apparatus");
  std::vector<TagSpec> apparatus;
  for (std::size_t i = 0; i < app.size(); ++i) {
    Fields a(app[i], f.at("apparatus") + "[" + std::to_string(i) + "]");
    TagSpec t{state_at(a, "ready"), {}};
    const Json& tags = a.array("tags");
    for (std::size_t k = 0; k < tags.size(); ++k) {
      const std::string field = a.at("tags") + "[" + std::to_string(k) + "]";
      t.tags.push_back(parse_value([&] { return state_from_json(tags[k], field); }));
    }
    a.finish();
    apparatus.push_back(std::move(t));
  }
  std::optional<DensityOperator> environment;
  if (f.has("environment")) environment = density_at(f, "environment");
  f.finish();
  try {
    RecordDecomposition records = basis ? RecordDecomposition::from_basis(*basis, groups)
                                        : RecordDecomposition::computational(dim, groups);
    CopyChain chain{std::move(records), std::move(apparatus), std::move(environment)};
    chain.validate();
    return chain;
  } catch (const Error& e) {
    throw ConfigError(parent.at(key), e.what());
  }
}

double dichotomy_gap(const RecordOrthogonalityReport& r) {
  const bool distinguishable = std::any_of(r.record_overlaps.begin(), r.record_overlaps.end(),
                                           [](double ov) { return ov < 1.0 - kTolAlg; });
  return distinguishable ? r.system_overlap : 0.0;
}

double worst_step(const RecordOrthogonalityReport& r) {
  double w = 0.0;
  for (const auto& s : r.steps) w = std::max(w, s.residual);
  return w;
}

void run_record_orthogonality(Fields& f, Context& ctx) {
  const bool explicit_case = f.has("chain");
  const bool random_batch = f.has("random");
  const bool adversarial = f.has("adversarial");
  if (!explicit_case && !random_batch && !adversarial) {
    throw ConfigError("chain", "needs \"chain\", \"random\" or \"adversarial\"");
  }
  if (explicit_case) {
    const CopyChain chain = chain_at(f, "chain");
    const DensityOperator rho_u = density_at(f, "rho_u");
    const DensityOperator rho_v = density_at(f, "rho_v");
    if (rho_u.dim() != chain.system_dim() || rho_v.dim() != chain.system_dim()) {
      throw ConfigError(f.at("rho_u"), "originals must live on the chain's system");
    }
    const ChainRun ru = run_copy_chain(rho_u, chain);
    const ChainRun rv = run_copy_chain(rho_v, chain);
    const RecordOrthogonalityReport r = verify_record_orthogonality(rho_u, rho_v, ru, rv);
    ctx.check("bookkeeping_residual", worst_step(r), Comparison::less, kTolAlg);
    ctx.check("dichotomy_gap", dichotomy_gap(r), Comparison::less, kTolAlg);
    Json steps = Json::array();
    for (const auto& s : r.steps) steps.push_back(Json{{"lhs", s.lhs.real()}, {"rhs", s.rhs.real()}});
    ctx.details()["explicit"] = Json{{"system_overlap", r.system_overlap},
                                     {"record_overlaps", r.record_overlaps},
                                     {"steps", steps}};
  }
  if (random_batch) {
    Fields r(f.get("random"), f.at("random"));
    const auto trials = r.integer("trials", 1, 1u << 20);
    const auto apparatus = r.integer("apparatus", 2, 1, 4);
    const auto max_system = r.integer("max_system", 4, 2, 6);
    const auto max_apparatus = r.integer("max_apparatus", 3, 2, 4);
    r.finish();
    double worst = 0.0;
    double worst_gap = 0.0;
    std::size_t distinguished = 0;
    for (std::uint64_t i = 0; i < trials; ++i) {
      const ChainCase c =
          random_chain_case(derive_seed(ctx.seed, i), apparatus, max_system, max_apparatus);
      const ChainRun ru = run_copy_chain(c.rho_u, c.chain);
      const ChainRun rv = run_copy_chain(c.rho_v, c.chain);
      const RecordOrthogonalityReport rep = verify_record_orthogonality(c.rho_u, c.rho_v, ru, rv);
      worst = std::max(worst, worst_step(rep));
      const double gap = dichotomy_gap(rep);
      worst_gap = std::max(worst_gap, gap);
      distinguished += rep.system_overlap < kTolAlg ? 1 : 0;
    }
    ctx.check("random_bookkeeping_max_residual", worst, Comparison::less, kTolAlg);
    ctx.check("random_dichotomy_max_gap", worst_gap, Comparison::less, kTolAlg);
    ctx.details()["random"] = Json{{"trials", trials}, {"orthogonal_originals", distinguished}};
  }
  if (adversarial) {
    Fields a(f.get("adversarial"), f.at("adversarial"));
    const auto dim = a.integer("dim", 2, 2, 4);
    const auto apparatus_dim = a.integer("apparatus_dim", 2, 2, 4);
    const auto overlapping = a.integer("overlapping_pairs", 0, 1u << 16);
    const auto orthogonal = a.integer("orthogonal_pairs", 0, 1u << 16);
    double lo = 0.05;
    double hi = 0.5;
    if (a.has("overlap_range")) {
      const Json& range = a.array("overlap_range");
      if (range.size() != 2 || !range[0].is_number() || !range[1].is_number()) {
        throw ConfigError(a.at("overlap_range"), "expected [lo, hi]");
      }
      lo = range[0].get<double>();
      hi = range[1].get<double>();
      if (!(0.0 < lo && lo < hi && hi < 1.0)) {
        throw ConfigError(a.at("overlap_range"), "need 0 < lo < hi < 1");
      }
    }
    const double ceiling = a.number("max_distinguishability", 1e-4);
    const double floor = a.number("min_distinguishability", 0.5);
    OptimizationConfig cfg = optimizer_config(f, ctx.seed);
    a.finish();

    std::vector<std::vector<double>> rows;
    double worst_overlapping = 0.0;
    double weakest_orthogonal = 1.0;
    double worst_witness_residual = 0.0;
    const auto search = [&](std::uint64_t index, const DensityOperator& ru,
                            const DensityOperator& rv, bool orth) {
      cfg.seed = derive_seed(ctx.seed, (1u << 20) + index);
      const DistinguisherSearch s = max_repeatable_distinguishability(ru, rv, apparatus_dim, cfg);
      rows.push_back({static_cast<double>(index), orth ? 1.0 : 0.0, hs_inner(ru, rv),
                      s.distinguishability, s.max_residual()});
      return s;
    };
    for (std::uint64_t i = 0; i < overlapping; ++i) {
      const auto [ru, rv] = random_overlapping_pair(derive_seed(ctx.seed, (2u << 20) + i), dim, lo, hi);
      const DistinguisherSearch s = search(i, ru, rv, false);
      worst_overlapping = std::max(worst_overlapping, s.distinguishability);
    }
    for (std::uint64_t i = 0; i < orthogonal; ++i) {
      const auto [ru, rv] = random_orthogonal_pair(derive_seed(ctx.seed, (3u << 20) + i), dim);
      const DistinguisherSearch s = search(overlapping + i, ru, rv, true);
      weakest_orthogonal = std::min(weakest_orthogonal, s.distinguishability);
      worst_witness_residual = std::max(worst_witness_residual, s.max_residual());
    }
    if (overlapping > 0) {
      ctx.check("overlapping_max_distinguishability", worst_overlapping, Comparison::less, ceiling);
    }
    if (orthogonal > 0) {
      ctx.check("orthogonal_min_distinguishability", weakest_orthogonal,
                Comparison::greater_equal, floor);
      ctx.check("orthogonal_witness_max_residual", worst_witness_residual, Comparison::less,
                kTolProduct);
    }
    ctx.csv("adversarial.csv",
            {"pair", "orthogonal", "hs_overlap", "distinguishability", "max_residual"}, rows);
  }
}

// ---- actionability ------------------------------------------------------------

DensityOperator pure_composite(const Vector& psi, const CompositeDims& dims) {
  return DensityOperator(psi * psi.adjoint(), dims);
}

void add_actionability_checks(Context& ctx, const std::string& prefix,
                              const ActionabilityVerdict& v, const std::string& expect,
                              double min_score) {
  if (expect == "actionable") {
    ctx.check(prefix + "best_score", v.best_score, Comparison::greater, min_score);
    ctx.check(prefix + "product_residual", v.product_residual, Comparison::less, kTolProduct);
    ctx.check(prefix + "control_drift", v.control_drift, Comparison::less, kTolProduct);
  } else {
    ctx.check(prefix + "best_score", v.best_score, Comparison::less, kTolOptimizer);
  }
}

void run_actionability(Fields& f, Context& ctx) {
  ActionabilityCase c{DensityOperator::maximally_mixed(1), DensityOperator::maximally_mixed(1)};
  std::string expect;
  double min_score = kThresholdActionable;
  if (f.has("preset")) {
    const std::string preset = f.text("preset");
    const bool environment = f.flag("environment", false);
    if (preset != "cnot-records" && preset != "identical" && preset != "mixed-ready") {
      throw ConfigError(f.at("preset"), "unknown preset \"" + preset + "\"");
    }
    if (environment && preset != "mixed-ready") {
      throw ConfigError(f.at("environment"), "only the mixed-ready preset has an environment");
    }
    c = actionability_preset(preset, environment);
    expect = preset == "identical" ? "not_actionable" : "actionable";
    if (preset == "cnot-records") min_score = 0.99;
    if (preset == "mixed-ready") min_score = 0.4;
  } else {
    c.composite_u = density_at(f, "composite_u");
    c.composite_v = density_at(f, "composite_v");
    if (c.composite_u.dims() != c.composite_v.dims()) {
      throw ConfigError(f.at("composite_v"), "layout differs from composite_u");
    }
    c.k = f.integer("k", 0, c.composite_u.dims().factors() - 1);
  }
  c.test_dim = f.integer("test_dim", c.test_dim, 2, 8);
  std::optional<DensityOperator> tau0;
  if (f.has("tau0")) tau0 = density_at(f, "tau0");
  expect = f.text("expect", expect);
  if (expect != "actionable" && expect != "not_actionable") {
    throw ConfigError(f.at("expect"), "expected \"actionable\" or \"not_actionable\"");
  }
  min_score = f.number("min_score", min_score);
  const OptimizationConfig cfg = optimizer_config(f, ctx.seed);

  const ActionabilityVerdict v =
      actionability_test(c.composite_u, c.composite_v, c.k, c.test_dim, cfg, tau0);
  add_actionability_checks(ctx, "", v, expect, min_score);
  // Actionable records force orthogonal systems.
  ctx.check("actionable_system_overlap", v.actionable ? v.system_overlap : 0.0, Comparison::less,
            kTolAlg);
  ctx.details()["verdict"] = verdict_summary(v);
}

// ---- mixtures -------------------------------------------------------------------

void run_mixtures(Fields& f, Context& ctx) {
  DensityOperator rho_u = DensityOperator::maximally_mixed(1);
  DensityOperator rho_v = DensityOperator::maximally_mixed(1);
  const Json& rec = f.get("records");
  if (rec.is_string()) {
    const std::string name = rec.get<std::string>();
    if (name == "qubit") {
      rho_u = DensityOperator::pure(StateVector::basis(2, 0));
      rho_v = DensityOperator::pure(StateVector::basis(2, 1));
    } else if (name == "qutrit") {
      // a pure record against a mixed one on the orthogonal complement
      rho_u = DensityOperator::pure(StateVector::basis(3, 0));
      Matrix m = Matrix::Zero(3, 3);
      m(1, 1) = 0.5;
      m(2, 2) = 0.5;
      rho_v = DensityOperator(m);
    } else {
      throw ConfigError(f.at("records"), "expected \"qubit\", \"qutrit\" or {rho_u, rho_v}");
    }
  } else {
    Fields r(rec, f.at("records"));
    rho_u = density_at(r, "rho_u");
    rho_v = density_at(r, "rho_v");
    r.finish();
  }
  const Json& quads = f.array("quadruples");
  if (quads.empty()) throw ConfigError(f.at("quadruples"), "expected at least one [a, b, c, d]");
  std::vector<std::array<double, 4>> coefficients;
  for (std::size_t i = 0; i < quads.size(); ++i) {
    const std::string field = f.at("quadruples") + "[" + std::to_string(i) + "]";
    if (!quads[i].is_array() || quads[i].size() != 4) throw ConfigError(field, "expected [a, b, c, d]");
    std::array<double, 4> q{};
    for (std::size_t j = 0; j < 4; ++j) {
      if (!quads[i][j].is_number()) throw ConfigError(field, "expected numbers");
      q[j] = quads[i][j].get<double>();
    }
    coefficients.push_back(q);
  }
  OptimizationConfig cfg = optimizer_config(f, ctx.seed);

  Json results = Json::array();
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < coefficients.size(); ++i) {
    const auto& q = coefficients[i];
    const std::string field = f.at("quadruples") + "[" + std::to_string(i) + "]";
    cfg.seed = derive_seed(ctx.seed, i);
    ActionabilityVerdict v;
    try {
      v = mixtures_dont_mix_check(rho_u, rho_v, {q[0], q[1]}, {q[2], q[3]}, cfg);
    } catch (const PreconditionError& e) {
      throw ConfigError(field, e.what());
    }
    const bool trivial = is_trivial_mixture({q[0], q[1]}, {q[2], q[3]});
    const std::string prefix = "quadruple_" + std::to_string(i) + "_";
    add_actionability_checks(ctx, prefix, v, trivial ? "actionable" : "not_actionable",
                             kThresholdActionable);
    rows.push_back({q[0], q[1], q[2], q[3], trivial ? 1.0 : 0.0, v.best_score, v.product_residual,
                    v.control_drift});
    Json entry = verdict_summary(v);
    entry["coefficients"] = q;
    entry["trivial"] = trivial;
    results.push_back(entry);
  }
  ctx.csv("mixtures.csv",
          {"a", "b", "c", "d", "trivial", "best_score", "product_residual", "control_drift"}, rows);
  ctx.details()["quadruples"] = results;
}

// ---- purified -------------------------------------------------------------------

void run_purified(Fields& f, Context& ctx) {
  const bool explicit_pairs = f.has("pairs");
  const bool random_batch = f.has("random");
  if (!explicit_pairs && !random_batch) throw ConfigError("pairs", "needs \"pairs\" or \"random\"");
  if (explicit_pairs) {
    const Json& pairs = f.array("pairs");
    Json out = Json::array();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      Fields p(pairs[i], f.at("pairs") + "[" + std::to_string(i) + "]");
      const StateVector gu = state_at(p, "gamma_u");
      const StateVector gv = state_at(p, "gamma_v");
      std::optional<bool> expect;
      if (p.has("expect_orthogonal")) expect = p.flag("expect_orthogonal", false);
      p.finish();
      PurifiedOrthogonalityReport r;
      try {
        r = purified_orthogonality(gu, gv);
      } catch (const Error& e) {
        throw ConfigError(p.at("gamma_v"), e.what());
      }
      const std::string prefix = "pair_" + std::to_string(i) + "_";
      ctx.check(prefix + "schmidt_sum_residual", r.identity.residual, Comparison::less, kTolAlg);
      if (expect) {
        ctx.check(prefix + "overlap", std::abs(r.identity.lhs),
                  *expect ? Comparison::less : Comparison::greater_equal, kTolAlg);
      }
      Json terms = Json::array();
      for (const Complex& t : r.terms) terms.push_back(complex_pair(t));
      out.push_back(Json{{"lhs", complex_pair(r.identity.lhs)},
                         {"rhs", complex_pair(r.identity.rhs)},
                         {"terms", terms}});
    }
    ctx.details()["pairs"] = out;
  }
  if (random_batch) {
    Fields r(f.get("random"), f.at("random"));
    const auto trials = r.integer("trials", 1, 1u << 20);
    const auto max_dim = r.integer("max_dim", 4, 2, 6);
    r.finish();
    double worst = 0.0;
    for (std::uint64_t i = 0; i < trials; ++i) {
      const auto [gu, gv] = random_purification_pair(derive_seed(ctx.seed, i), max_dim);
      worst = std::max(worst, purified_orthogonality(gu, gv).identity.residual);
    }
    ctx.check("random_schmidt_sum_max_residual", worst, Comparison::less, kTolAlg);
    ctx.details()["random"] = Json{{"trials", trials}};
  }
}

// ---- bell -----------------------------------------------------------------------

void run_bell(Fields& f, Context& ctx) {
  const OptimizationConfig cfg = optimizer_config(f, ctx.seed);
  const BellDemoReport r = bell_phase_demo(cfg);
  const double reduced = std::max(std::abs(r.reduced_overlap_before - 0.5),
                                  std::abs(r.reduced_overlap_after - 0.5));
  ctx.check("reduced_state_equality", reduced, Comparison::less, kTolAlg);
  ctx.check("global_orthogonality", r.global_overlap, Comparison::less, 1e-12);
  ctx.check("no_local_actionability", r.local_record.best_score, Comparison::less, kTolOptimizer);
  ctx.details() = Json{{"reduced_overlap_before", r.reduced_overlap_before},
                       {"reduced_overlap_after", r.reduced_overlap_after},
                       {"reduced_state_distance", r.reduced_state_distance},
                       {"global_overlap", r.global_overlap},
                       {"tag_overlap", r.tag_overlap},
                       {"global_record", verdict_summary(r.global_record)},
                       {"local_record", verdict_summary(r.local_record)}};
}

// ---- povm -----------------------------------------------------------------------

Matrix named_basis(const std::string& name, std::size_t d, const std::string& field) {
  if (name == "computational") return Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  if (name == "fourier" || name == "hadamard") {
    if (name == "hadamard" && d != 2) throw ConfigError(field, "hadamard basis needs dim 2");
    const auto n = static_cast<Eigen::Index>(d);
    Matrix m(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < n; ++k) {
        m(j, k) = std::polar(1.0 / std::sqrt(static_cast<double>(d)),
                             2.0 * std::numbers::pi * static_cast<double>(j * k) / static_cast<double>(d));
      }
    }
    return m;
  }
  throw ConfigError(field, "unknown basis \"" + name + "\"");
}

Matrix basis_at(Fields& f, const std::string& key, std::size_t d) {
  const Json& j = f.get(key);
  if (j.is_string()) return named_basis(j.get<std::string>(), d, f.at(key));
  return matrix_at(f, key);
}

// Probabilities by explicit sequential measurement: project onto y_k, evolve,
// then take the z_l population.
double two_step_probability(const SequentialMeasurement& m, const Matrix& rho, std::size_t k,
                            std::size_t l) {
  const Matrix py = m.y_basis[k].projector();
  const Matrix& u = m.evolution.matrix();
  const Matrix after = u * (py * rho * py) * u.adjoint();
  return (m.z_basis[l].projector() * after).trace().real();
}

void run_povm(Fields& f, Context& ctx) {
  SequentialMeasurement m;
  const bool preset = f.has("preset");
  if (preset) {
    Fields p(f.get("preset"), f.at("preset"));
    if (p.text("name") != "oscillator") throw ConfigError(p.at("name"), "unknown preset");
    const auto dim = p.integer("dim", 2, 64);
    const double t = p.number("t");
    p.finish();
    m = oscillator_monitoring_preset(dim, t);
  } else {
    const auto d = f.integer("dim", 2, 64);
    const Matrix y = basis_at(f, "y_basis", d);
    const Matrix z = basis_at(f, "z_basis", d);
    UnitaryOperator u = UnitaryOperator::identity(d);
    if (f.has("evolution")) {
      const Json& e = f.get("evolution");
      if (e.is_string()) {
        const std::string name = e.get<std::string>();
        if (name == "haar") {
          u = random_unitary(d, derive_seed(ctx.seed, 0));
        } else if (name != "identity") {
          throw ConfigError(f.at("evolution"), "expected \"identity\", \"haar\" or a unitary");
        }
      } else {
        u = unitary_at(f, "evolution");
      }
    }
    try {
      m = build_sequential_povm(basis_from_columns(y), basis_from_columns(z), u);
    } catch (const Error& e) {
      throw ConfigError(f.at("y_basis"), e.what());
    }
  }
  const std::size_t d = m.dim();

  std::vector<DensityOperator> states;
  if (f.has("states")) {
    const Json& list = f.array("states");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string field = f.at("states") + "[" + std::to_string(i) + "]";
      DensityOperator rho = parse_value([&] { return density_from_json(list[i], field); });
      if (rho.dim() != d) throw ConfigError(field, "dimension does not match the measurement");
      states.push_back(std::move(rho));
    }
  }
  const auto random_states = f.integer("random_states", 0, 0, 1u << 16);
  for (std::uint64_t i = 0; i < random_states; ++i) {
    states.push_back(random_density(d, d, derive_seed(ctx.seed, 1 + i)));
  }
  if (states.empty()) states.push_back(DensityOperator::pure(StateVector::basis(d, 0)));
  std::optional<bool> expect_projective;
  if (f.has("expect_projective")) expect_projective = f.flag("expect_projective", false);

  const PovmValidity v = check_povm(m);
  double herm = 0.0;
  double negativity = 0.0;
  double projector = 0.0;
  Json elements = Json::array();
  for (const auto& e : v.elements) {
    herm = std::max(herm, e.hermiticity_residual);
    negativity = std::max(negativity, -e.min_eigenvalue);
    projector = std::max(projector, e.projector_residual);
    elements.push_back(Json{{"k", e.outcome.first},
                            {"l", e.outcome.second},
                            {"hermiticity_residual", e.hermiticity_residual},
                            {"min_eigenvalue", e.min_eigenvalue},
                            {"projector_residual", e.projector_residual}});
  }
  ctx.check("hermiticity", herm, Comparison::less, kTolAlg);
  ctx.check("positivity", std::max(negativity, 0.0), Comparison::less, kTolAlg);
  ctx.check("resolution_of_identity", v.identity_residual, Comparison::less, kTolAlg);

  double normalization = 0.0;
  double oracle = 0.0;
  for (std::size_t s = 0; s < states.size(); ++s) {
    const auto probs = outcome_probabilities(m, states[s]);
    double total = 0.0;
    std::vector<std::vector<double>> rows;
    for (const auto& p : probs) {
      total += p.p;
      oracle = std::max(oracle, std::abs(p.p - two_step_probability(m, states[s].matrix(), p.k, p.l)));
      rows.push_back({static_cast<double>(p.k), static_cast<double>(p.l), p.p});
    }
    normalization = std::max(normalization, std::abs(total - 1.0));
    ctx.csv("probabilities_" + std::to_string(s) + ".csv", {"k", "l", "p"}, rows);
  }
  ctx.check("probability_normalization", normalization, Comparison::less, kTolAlg);
  ctx.check("two_step_agreement", oracle, Comparison::less, kTolAlg);
  const double commutator = commutator_residual(m);
  if (expect_projective) {
    ctx.check("projector_residual", projector,
              *expect_projective ? Comparison::less : Comparison::greater_equal, kTolAlg);
  }

  const Json validity{{"hermitian", v.hermitian},
                      {"positive", v.positive},
                      {"resolves_identity", v.resolves_identity},
                      {"projective", v.projective},
                      {"identity_residual", v.identity_residual},
                      {"commutator_residual", commutator},
                      {"elements", elements}};
  ctx.report->artifacts.push_back({"povm_validity.json", validity.dump(2) + "\n"});
  ctx.details()["states"] = states.size();
}

// ---- sweep ----------------------------------------------------------------------

void run_sweep(Fields& f, Context& ctx) {
  std::vector<double> grid;
  const Json& g = f.get("grid");
  if (g.is_array()) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!g[i].is_number()) throw ConfigError(f.at("grid") + "[" + std::to_string(i) + "]", "expected a number");
      grid.push_back(g[i].get<double>());
    }
  } else {
    Fields p(g, f.at("grid"));
    const auto n = p.integer("points", 2, 1u << 16);
    p.finish();
    for (std::uint64_t i = 0; i < n; ++i) grid.push_back(static_cast<double>(i) / static_cast<double>(n - 1));
  }
  if (grid.empty()) throw ConfigError(f.at("grid"), "empty grid");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0 && grid[i] <= 1.0)) {
      throw ConfigError(f.at("grid") + "[" + std::to_string(i) + "]", "must lie in [0, 1]");
    }
  }
  const OptimizationConfig cfg = optimizer_config(f, ctx.seed);
  const std::vector<FrontierPoint> frontier = sweep_overlap_frontier(grid, cfg);

  std::vector<std::vector<double>> rows;
  std::optional<double> at_zero;
  std::optional<double> at_one;
  std::optional<double> interior;
  double zero_residual = 0.0;
  for (const auto& p : frontier) {
    rows.push_back({p.overlap, p.max_distinguishability, p.max_residual});
    if (p.overlap == 0.0) {
      at_zero = std::min(at_zero.value_or(1.0), p.max_distinguishability);
      zero_residual = std::max(zero_residual, p.max_residual);
    } else if (p.overlap == 1.0) {
      at_one = std::max(at_one.value_or(0.0), p.max_distinguishability);
    } else {
      interior = std::max(interior.value_or(0.0), p.max_distinguishability);
    }
  }
  if (at_zero) {
    ctx.check("orthogonal_distinguishability", *at_zero, Comparison::greater_equal, 0.999);
    ctx.check("orthogonal_witness_residual", zero_residual, Comparison::less, kTolProduct);
  }
  if (at_one) ctx.check("identical_distinguishability", *at_one, Comparison::less, kTolOptimizer);
  if (interior) ctx.check("overlapping_max_distinguishability", *interior, Comparison::less, 1e-4);
  ctx.csv("sweep.csv", {"s", "max_distinguishability", "max_residual"}, rows);
}

bool valid_name(const std::string& name) {
  if (name.empty() || name == "." || name == "..") return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
           c == '_' || c == '-' || c == '.';
  });
}

std::string shortest(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  out << contents;
  out.close();
  if (!out) throw ConfigError("", "cannot write " + path.string());
}

// Top-level fields each kind may use besides kind/name/seed/description/
// optimizer. Checked before running so a typo fails fast; the per-field
// checks after the run remain the authority.
void reject_unknown_fields(const Json& config, const std::string& kind) {
  static const std::map<std::string, std::set<std::string>> kAllowed = {
      {"identity", {"u", "v", "copy", "ready", "records", "expect_violation", "random"}},
      {"record-orthogonality", {"rho_u", "rho_v", "chain", "random", "adversarial"}},
      {"actionability",
       {"preset", "environment", "composite_u", "composite_v", "k", "test_dim", "expect", "min_score"}},
      {"mixtures", {"records", "quadruples"}},
      {"purified", {"pairs", "random"}},
      {"bell", {}},
      {"povm",
       {"preset", "dim", "y_basis", "z_basis", "evolution", "states", "random_states", "expect_projective"}},
      {"sweep", {"grid"}},
  };
  static const std::set<std::string> kCommon = {"kind", "name", "seed", "description", "optimizer"};
  const auto allowed = kAllowed.find(kind);
  if (allowed == kAllowed.end()) return;
  for (auto it = config.begin(); it != config.end(); ++it) {
    if (!kCommon.count(it.key()) && !allowed->second.count(it.key())) {
      throw ConfigError(it.key(), "unknown field");
    }
  }
}

}  // namespace

ActionabilityCase actionability_preset(const std::string& name, bool environment) {
  if (name == "cnot-records" || name == "identical") {
    const UnitaryOperator cnot = computational_copy(2);
    const CompositeDims dims{2, 2};
    const Vector a0 = StateVector::basis(2, 0).amplitudes();
    const Vector a1 = StateVector::basis(2, 1).amplitudes();
    const DensityOperator cu = pure_composite(cnot.matrix() * kron(a0, a0), dims);
    const DensityOperator cv = pure_composite(cnot.matrix() * kron(a1, a0), dims);
    return {cu, name == "identical" ? cu : cv, 1, 2};
  }
  if (name == "mixed-ready") {
    Matrix ready = Matrix::Zero(4, 4);
    ready(0, 0) = 0.5;
    ready(1, 1) = 0.5;
    // S = |1> shifts the apparatus by two, so the records occupy span{|0>,|1>}
    // and span{|2>,|3>}.
    Matrix shift = Matrix::Zero(4, 4);
    for (Eigen::Index a = 0; a < 4; ++a) shift((a + 2) % 4, a) = 1.0;
    Matrix coupling = Matrix::Zero(8, 8);
    coupling.topLeftCorner(4, 4).setIdentity();
    coupling.bottomRightCorner(4, 4) = shift;
    MixedCopy step{DensityOperator(ready), UnitaryOperator(coupling), std::nullopt, std::nullopt};
    if (environment) {
      Matrix parity = Matrix::Zero(8, 8);  // A (x) E: flip E when A is odd
      for (Eigen::Index a = 0; a < 4; ++a) {
        for (Eigen::Index e = 0; e < 2; ++e) parity(2 * a + ((e + a) % 2), 2 * a + e) = 1.0;
      }
      step.environment = DensityOperator::pure(StateVector::basis(2, 0));
      step.environment_coupling = UnitaryOperator(parity);
    }
    return {run_mixed_copy(DensityOperator::pure(StateVector::basis(2, 0)), step),
            run_mixed_copy(DensityOperator::pure(StateVector::basis(2, 1)), step), 1, 2};
  }
  throw PreconditionError("unknown actionability preset: " + name);
}

Json load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot read config");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string(), std::string("malformed JSON: ") + e.what());
  }
}

RunReport run_scenario(const Json& config, const std::string& default_name,
                       std::optional<Seed> seed_override) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  Fields f(config, "");
  const std::string kind = f.text("kind");
  const std::string name = f.text("name", default_name);
  if (!valid_name(name)) throw ConfigError("name", "use letters, digits, '.', '_' or '-'");
  Seed seed = f.integer("seed", 0, std::numeric_limits<std::uint64_t>::max());
  if (seed_override) seed = *seed_override;
  f.has("description");
  reject_unknown_fields(config, kind);

  report.scenario = config;
  report.scenario["name"] = name;
  report.scenario["seed"] = seed;
  Context ctx{seed, &report};
  try {
    if (kind == "identity") {
      run_identity(f, ctx);
    } else if (kind == "record-orthogonality") {
      run_record_orthogonality(f, ctx);
    } else if (kind == "actionability") {
      run_actionability(f, ctx);
    } else if (kind == "mixtures") {
      run_mixtures(f, ctx);
    } else if (kind == "purified") {
      run_purified(f, ctx);
    } else if (kind == "bell") {
      run_bell(f, ctx);
    } else if (kind == "povm") {
      run_povm(f, ctx);
    } else if (kind == "sweep") {
      run_sweep(f, ctx);
    } else {
      throw ConfigError("kind", "unknown kind \"" + kind + "\"");
    }
  } catch (const FormatError& e) {
    throw ConfigError(e.field(), strip_field(e));
  }
  f.finish();
  report.artifacts.push_back({"details.json", report.details.dump(2) + "\n"});
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

fs::path write_report(const RunReport& report, const fs::path& outdir) {
  const fs::path dir = outdir / report.name();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("", "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& a : report.artifacts) write_file(dir / a.filename, a.contents);
  const fs::path path = dir / "report.json";
  write_file(path, to_json(report).dump(2) + "\n");
  return path;
}

RunOutcome run(const fs::path& config_path, const RunOptions& options) {
  RunOutcome out;
  out.config = config_path;
  out.name = config_path.stem().string();
  try {
    const Json config = load_config(config_path);
    RunReport report = run_scenario(config, out.name, options.seed_override);
    out.name = report.name();
    out.report_path = write_report(report, options.outdir);
    out.status = report.pass() ? 0 : 1;
    if (!options.quiet) {
      for (const auto& v : report.verdicts) {
        std::cout << (v.pass ? "PASS " : "FAIL ") << out.name << ' ' << v.name << ' '
                  << shortest(v.value) << ' ' << comparison_symbol(v.comparison) << ' '
                  << shortest(v.threshold) << '\n';
      }
    }
    out.report = std::move(report);
  } catch (const ConfigError& e) {
    out.status = 2;
    out.error = config_path.string() + ": " + e.what();
  } catch (const Error& e) {
    // inconsistent inputs rejected by the library (dimensions, unitarity, ...)
    out.status = 2;
    out.error = config_path.string() + ": " + e.what();
  } catch (const Json::exception& e) {
    out.status = 2;
    out.error = config_path.string() + ": " + e.what();
  }
  if (out.status == 2) std::cerr << "error: " << out.error << '\n';
  return out;
}

SuiteOutcome run_suite(const fs::path& dir, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SuiteOutcome suite;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    RunOutcome bad;
    bad.config = dir;
    bad.status = 2;
    bad.error = dir.string() + ": not a directory";
    std::cerr << "error: " << bad.error << '\n';
    suite.scenarios.push_back(bad);
    suite.status = 2;
    return suite;
  }
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") configs.push_back(entry.path());
  }
  std::sort(configs.begin(), configs.end());

  std::set<std::string> names;
  for (const auto& path : configs) {
    RunOutcome r = run(path, options);
    if (r.status != 2 && !names.insert(r.name).second) {
      r.status = 2;
      r.error = path.string() + ": duplicate scenario name \"" + r.name + "\"";
      std::cerr << "error: " << r.error << '\n';
    }
    suite.status = std::max(suite.status, r.status);
    suite.scenarios.push_back(std::move(r));
  }
  suite.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  Json entries = Json::array();
  for (const auto& r : suite.scenarios) {
    Json e{{"config", r.config.filename().string()}, {"name", r.name}, {"status", r.status}};
    if (!r.error.empty()) e["error"] = r.error;
    if (r.report) e["wall_time"] = r.report->wall_time;
    entries.push_back(e);
  }
  const Json summary{{"scenarios", entries},
                     {"count", suite.scenarios.size()},
                     {"pass", suite.status == 0},
                     {"status", suite.status},
                     {"wall_time", suite.wall_time}};
  try {
    fs::create_directories(options.outdir, ec);
    if (ec) throw ConfigError("", "cannot create " + options.outdir.string());
    suite.report_path = options.outdir / "suite_report.json";
    write_file(suite.report_path, summary.dump(2) + "\n");
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    suite.status = 2;
  }
  if (!options.quiet) {
    std::cout << (suite.status == 0 ? "suite passed" : "suite failed") << ": "
              << suite.scenarios.size() << " scenario(s)\n";
  }
  return suite;
}

}  // namespace qrepeat
