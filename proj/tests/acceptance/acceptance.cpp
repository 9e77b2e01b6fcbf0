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


// Acceptance criteria AC1..AC8. One PASS/FAIL line per criterion; a criterion
// also fails when it overruns its time budget. Usage: acceptance <scenario dir>
// [AC...] (no list: run all).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "qrepeat/copy_dynamics.hpp"
#include "qrepeat/generators.hpp"
#include "qrepeat/optimizer.hpp"
#include "qrepeat/povm.hpp"
#include "qrepeat/rng.hpp"
#include "qrepeat/scenario.hpp"
#include "qrepeat/theorems.hpp"

using namespace qrepeat;
namespace fs = std::filesystem;

namespace {

constexpr Seed kMaster = 20260417;

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects the worst value of each check so the summary line says why.
class Checks {
 public:
  void less(const std::string& what, double value, double bound) {
    record(value < bound, what, value, "<", bound);
  }
  void at_least(const std::string& what, double value, double bound) {
    record(value >= bound, what, value, ">=", bound);
  }
  void greater(const std::string& what, double value, double bound) {
    record(value > bound, what, value, ">", bound);
  }
  void require(const std::string& what, bool ok) {
    if (!ok) fail(what);
  }
  void fail(const std::string& what) {
    ok_ = false;
    failures_.push_back(what);
  }
  Outcome outcome() const {
    std::ostringstream s;
    for (std::size_t i = 0; i < lines_.size(); ++i) s << (i ? "; " : "") << lines_[i];
    for (const auto& f : failures_) s << "; FAILED " << f;
    return {ok_, s.str()};
  }

 private:
  void record(bool ok, const std::string& what, double value, const char* op, double bound) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s %.3g %s %.3g", what.c_str(), value, op, bound);
    lines_.emplace_back(buf);
    if (!ok) {
      ok_ = false;
      failures_.push_back(what);
    }
  }
  bool ok_ = true;
  std::vector<std::string> lines_;
  std::vector<std::string> failures_;
};

// ---- AC1: scalar-product identity over random repeatable couplings ----------

Outcome ac1() {
  Checks c;
  double worst = 0.0;
  double worst_gap = 0.0;
  int orthogonal = 0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const RepeatableCase rc = random_repeatable_case(derive_seed(kMaster + 1, i), 4);
    const ScalarProductReport r =
        verify_scalar_product_identity(rc.u, rc.v, rc.copy, rc.tags.ready, rc.setup.records);
    worst = std::max(worst, r.identity.residual);
    worst_gap = std::max(worst_gap, std::min(std::abs(r.system_overlap), std::abs(r.tag_overlap - 1.0)));
    if (!r.dichotomy) c.fail("dichotomy in case " + std::to_string(i));
    orthogonal += r.originals_orthogonal ? 1 : 0;
  }
  c.less("max identity residual", worst, 1e-9);
  c.less("max dichotomy gap", worst_gap, 1e-9);
  // both branches of the dichotomy must actually be exercised
  c.require("mix of orthogonal and same-record cases", orthogonal > 100 && orthogonal < 900);
  return c.outcome();
}

// ---- AC2: two-apparatus norm bookkeeping -------------------------------------

Outcome ac2() {
  Checks c;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const ChainCase cc = random_chain_case(derive_seed(kMaster + 2, i), 2, 4, 3);
    const ChainRun ru = run_copy_chain(cc.rho_u, cc.chain);
    const ChainRun rv = run_copy_chain(cc.rho_v, cc.chain);
    const RecordOrthogonalityReport r = verify_record_orthogonality(cc.rho_u, cc.rho_v, ru, rv);
    if (r.steps.size() != 2) c.fail("expected two bookkeeping steps in chain " + std::to_string(i));
    for (const auto& s : r.steps) worst = std::max(worst, s.residual);
  }
  c.less("max residual over both steps", worst, 1e-9);
  return c.outcome();
}

// ---- AC3: adversarial repeatable-copy search ---------------------------------

Outcome ac3() {
  Checks c;
  OptimizationConfig cfg;  // 64 restarts
  double worst_overlapping = 0.0;
  double weakest_orthogonal = 1.0;
  double widest = 0.0;
  double narrowest = 1.0;
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto [ru, rv] = random_overlapping_pair(derive_seed(kMaster + 3, i), 2, 0.05, 0.5);
    const double overlap = hs_inner(ru, rv);
    narrowest = std::min(narrowest, overlap);
    widest = std::max(widest, overlap);
    cfg.seed = derive_seed(kMaster + 30, i);
    worst_overlapping =
        std::max(worst_overlapping, max_repeatable_distinguishability(ru, rv, 2, cfg).distinguishability);
  }
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto [ru, rv] = random_orthogonal_pair(derive_seed(kMaster + 4, i), 2);
    cfg.seed = derive_seed(kMaster + 40, i);
    const DistinguisherSearch s = max_repeatable_distinguishability(ru, rv, 2, cfg);
    weakest_orthogonal = std::min(weakest_orthogonal, s.distinguishability);
  }
  c.require("overlaps inside [0.05, 0.5]", narrowest >= 0.05 && widest <= 0.5);
  c.less("overlapping max distinguishability", worst_overlapping, 1e-4);
  c.at_least("orthogonal min distinguishability", weakest_orthogonal, 0.5);
  return c.outcome();
}

// ---- AC4: actionability ------------------------------------------------------

Outcome ac4() {
  Checks c;
  OptimizationConfig cfg;
  cfg.seed = derive_seed(kMaster + 5, 0);
  const ActionabilityCase cnot = actionability_preset("cnot-records");
  const ActionabilityVerdict vc =
      actionability_test(cnot.composite_u, cnot.composite_v, cnot.k, cnot.test_dim, cfg);
  c.require("cnot records actionable", vc.actionable);
  c.greater("cnot best_score", vc.best_score, 0.99);

  cfg.seed = derive_seed(kMaster + 5, 1);
  const ActionabilityCase same = actionability_preset("identical");
  const ActionabilityVerdict vi =
      actionability_test(same.composite_u, same.composite_v, same.k, same.test_dim, cfg);
  c.less("identical best_score", vi.best_score, 1e-6);

  // Every actionable verdict on a record-copy composite must sit on orthogonal
  // system states: cnot records and the mixed-ready apparatus with and
  // without environment.
  double worst_overlap = 0.0;
  int actionable = vc.actionable ? 1 : 0;
  if (vc.actionable) worst_overlap = std::max(worst_overlap, vc.system_overlap);
  for (int env = 0; env < 2; ++env) {
    cfg.seed = derive_seed(kMaster + 5, 2 + env);
    const ActionabilityCase m = actionability_preset("mixed-ready", env == 1);
    const ActionabilityVerdict v =
        actionability_test(m.composite_u, m.composite_v, m.k, m.test_dim, cfg);
    if (v.actionable) {
      ++actionable;
      worst_overlap = std::max(worst_overlap, v.system_overlap);
    }
    c.require(std::string("mixed-ready") + (env ? " with environment" : "") + " not contradicting",
              v.orthogonality_consistent);
  }
  c.require("some actionable verdict to check", actionable > 0);
  c.less("system overlap of actionable verdicts", worst_overlap, 1e-9);
  return c.outcome();
}

// ---- AC5: mixtures of orthogonal records ------------------------------------

Outcome ac5() {
  Checks c;
  struct Records {
    const char* name;
    DensityOperator u;
    DensityOperator v;
    std::vector<std::array<double, 4>> nontrivial;
  };
  Matrix mixed = Matrix::Zero(3, 3);
  mixed(1, 1) = mixed(2, 2) = 0.5;
  const std::vector<Records> sets = {
      {"qubit", DensityOperator::pure(StateVector::basis(2, 0)),
       DensityOperator::pure(StateVector::basis(2, 1)),
       {{0.5, 0.5, 0.25, 0.75}, {0.5, 0.5, 0.5, 0.5}, {0.9, 0.1, 0.1, 0.9}, {1, 0, 0.5, 0.5},
        {0.3, 0.7, 0.6, 0.4}}},
      {"qutrit", DensityOperator::pure(StateVector::basis(3, 0)), DensityOperator(mixed),
       {{0.5, 0.5, 0.25, 0.75}, {0.99, 0.01, 0.01, 0.99}, {0.2, 0.8, 0.7, 0.3}, {0, 1, 0.5, 0.5},
        {0.4, 0.6, 0.4, 0.6}}},
  };
  double worst = 0.0;
  int nontrivial = 0;
  std::uint64_t index = 0;
  OptimizationConfig cfg;
  for (const auto& s : sets) {
    for (const auto& q : s.nontrivial) {
      cfg.seed = derive_seed(kMaster + 6, index++);
      const ActionabilityVerdict v = mixtures_dont_mix_check(s.u, s.v, {q[0], q[1]}, {q[2], q[3]}, cfg);
      worst = std::max(worst, v.best_score);
      ++nontrivial;
    }
    for (const auto& q : {std::array<double, 4>{1, 0, 0, 1}, std::array<double, 4>{0, 1, 1, 0}}) {
      cfg.seed = derive_seed(kMaster + 6, index++);
      const ActionabilityVerdict v = mixtures_dont_mix_check(s.u, s.v, {q[0], q[1]}, {q[2], q[3]}, cfg);
      if (!v.actionable) {
        c.fail(std::string(s.name) + " endpoint (" + std::to_string(static_cast<int>(q[0])) +
               ",...) not actionable: " + status_name(v.status) + ", score " +
               std::to_string(v.best_score) + ", product residual " +
               std::to_string(v.product_residual));
      }
    }
  }
  c.require("10 nontrivial quadruples", nontrivial == 10);
  c.less("nontrivial max best_score", worst, 1e-6);
  return c.outcome();
}

// ---- AC6: purifications and the Bell demo ------------------------------------

Outcome ac6() {
  Checks c;
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto [gu, gv] = random_purification_pair(derive_seed(kMaster + 7, i), 4);
    worst = std::max(worst, purified_orthogonality(gu, gv).identity.residual);
  }
  c.less("max Schmidt-sum residual", worst, 1e-9);
  OptimizationConfig cfg;
  cfg.seed = derive_seed(kMaster + 7, 1000);
  const BellDemoReport b = bell_phase_demo(cfg);
  c.less("|Tr rho+ rho- - 1/2|", std::abs(b.reduced_overlap_before - 0.5), 1e-9);
  c.less("|<g+|g->|", b.global_overlap, 1e-12);
  c.less("local best_score", b.local_record.best_score, 1e-6);
  return c.outcome();
}

// ---- AC7: sequential measurement as a POVM -----------------------------------

Outcome ac7() {
  Checks c;
  const double h = 1.0 / std::sqrt(2.0);
  Matrix plus_minus(2, 2);
  plus_minus << h, h, h, -h;
  const SequentialMeasurement m = build_sequential_povm(
      basis_from_columns(plus_minus), basis_from_columns(Matrix::Identity(2, 2)),
      UnitaryOperator::identity(2));
  double entry = 0.0;
  for (std::size_t k = 0; k < 2; ++k) {
    const Matrix expected = 0.5 * m.y_basis[k].projector();
    for (std::size_t l = 0; l < 2; ++l) {
      entry = std::max(entry, (m.element(k, l).matrix - expected).cwiseAbs().maxCoeff());
    }
  }
  c.less("max |F(k,l) - |y_k><y_k|/2|", entry, 1e-12);
  double prob = 0.0;
  for (const auto& p : outcome_probabilities(m, DensityOperator::pure(StateVector::basis(2, 0)))) {
    prob = std::max(prob, std::abs(p.p - 0.25));
  }
  c.less("max |p(k,l) - 1/4|", prob, 1e-12);
  c.less("resolution of identity", check_povm(m).identity_residual, 1e-9);

  // independent oracle: collapse onto y_k, evolve, read z_l
  double oracle = 0.0;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const Seed s = derive_seed(kMaster + 8, i);
    const SequentialMeasurement q = build_sequential_povm(
        basis_from_columns(random_unitary(3, derive_seed(s, 0)).matrix()),
        basis_from_columns(random_unitary(3, derive_seed(s, 1)).matrix()),
        random_unitary(3, derive_seed(s, 2)));
    const DensityOperator rho = random_density(3, 3, derive_seed(s, 3));
    for (const auto& p : outcome_probabilities(q, rho)) {
      const Matrix py = q.y_basis[p.k].projector();
      const Matrix after = q.evolution.matrix() * py * rho.matrix() * py * q.evolution.matrix().adjoint();
      const double direct = (q.z_basis[p.l].projector() * after).trace().real();
      oracle = std::max(oracle, std::abs(p.p - direct));
    }
  }
  c.less("max |formula - two-step oracle|", oracle, 1e-9);
  return c.outcome();
}

// ---- AC8: reproducible suite -------------------------------------------------

void strip_wall_time(Json& j) {
  if (j.is_object()) {
    j.erase("wall_time");
    for (auto& [key, value] : j.items()) strip_wall_time(value);
  } else if (j.is_array()) {
    for (auto& value : j) strip_wall_time(value);
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Every file below `root`, relative, sorted.
std::set<fs::path> tree(const fs::path& root) {
  std::set<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out.insert(fs::relative(e.path(), root));
  }
  return out;
}

Outcome ac8(const fs::path& scenarios, double* suite_seconds) {
  Checks c;
  const fs::path base = fs::temp_directory_path() /
                        ("qrepeat_acceptance_" + std::to_string(std::random_device{}()));
  std::vector<fs::path> dirs;
  for (int run = 0; run < 2; ++run) {
    RunOptions options;
    options.outdir = base / ("run" + std::to_string(run));
    options.quiet = true;
    const auto start = std::chrono::steady_clock::now();
    const SuiteOutcome s = run_suite(scenarios, options);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (run == 0) *suite_seconds = seconds;
    c.require("suite run " + std::to_string(run) + " passes (status " + std::to_string(s.status) + ")",
              s.status == 0);
    c.require("suite run " + std::to_string(run) + " is not empty", !s.scenarios.empty());
    dirs.push_back(options.outdir);
  }
  const auto a = tree(dirs[0]);
  const auto b = tree(dirs[1]);
  c.require("same set of output files", a == b);
  int compared = 0;
  for (const auto& rel : a) {
    if (!b.count(rel)) continue;
    std::string x = slurp(dirs[0] / rel);
    std::string y = slurp(dirs[1] / rel);
    if (rel.extension() == ".json") {
      Json jx = Json::parse(x);
      Json jy = Json::parse(y);
      strip_wall_time(jx);
      strip_wall_time(jy);
      x = jx.dump();
      y = jy.dump();
    }
    if (x != y) c.fail("differs: " + rel.string());
    ++compared;
  }
  c.require("reports compared", compared > 0);
  c.less("suite wall time (s)", *suite_seconds, 15 * 60);
  std::error_code ignored;
  fs::remove_all(base, ignored);
  return c.outcome();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: acceptance <scenario dir> [AC1 ... AC8]\n";
    return 2;
  }
  const fs::path scenarios = argv[1];
  std::set<std::string> only(argv + 2, argv + argc);
  double suite_seconds = 0.0;
  struct Criterion {
    const char* id;
    double budget;  // seconds
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"AC1", 10, ac1},
      {"AC2", 10, ac2},
      {"AC3", 300, ac3},
      {"AC4", 120, ac4},
      {"AC5", 300, ac5},
      {"AC6", 60, ac6},
      {"AC7", 10, ac7},
      // two suite runs; the suite's own budget is checked inside
      {"AC8", 1800, [&] { return ac8(scenarios, &suite_seconds); }},
  };
  bool all = true;
  for (const auto& cr : criteria) {
    if (!only.empty() && !only.count(cr.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (seconds >= cr.budget) {
      o.pass = false;
      o.detail += "; over time budget";
    }
    std::printf("%s %s (%.1f s / %.0f s) %s\n", o.pass ? "PASS" : "FAIL", cr.id, seconds, cr.budget,
                o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
