// Copyright 2026 The graphscore Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Acceptance runner: one PASS/FAIL line per criterion on stdout, details and
// child logs under the work directory. Exit status 0 only when all pass.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "graphscore/csv.h"
#include "graphscore/evaluation.h"

#ifndef GRAPHSCORE_CLI
#error "GRAPHSCORE_CLI must name the graphscore executable"
#endif
#ifndef GRAPHSCORE_TEST_DIR
#error "GRAPHSCORE_TEST_DIR must name the directory of the unit test executables"
#endif
#ifndef GRAPHSCORE_ACCEPTANCE_CONFIG
#error "GRAPHSCORE_ACCEPTANCE_CONFIG must name the acceptance run configuration"
#endif

namespace {

namespace fs = std::filesystem;
namespace ev = graphscore::evaluation;
using Clock = std::chrono::steady_clock;

struct Options {
  fs::path work = "acceptance-work";
  std::string config = GRAPHSCORE_ACCEPTANCE_CONFIG;
  int seeds = 10;
  unsigned jobs = 1;
  std::vector<int> only;
  int beta0_people = 20000;
  bool keep = false;
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string shell_quote(const std::string& s) { return "'" + s + "'"; }

// Runs a shell command with output captured in `log`; returns the exit status.
int run_logged(const std::string& cmd, const fs::path& log) {
  const std::string full = cmd + " > " + shell_quote(log.string()) + " 2>&1";
  const int status = std::system(full.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Count from gtest's "[  PASSED  ] N tests." summary line, 0 when absent.
int passed_tests(const std::string& log) {
  const std::string tag = "[  PASSED  ] ";
  const auto at = log.rfind(tag);
  return at == std::string::npos ? 0 : std::atoi(log.c_str() + at + tag.size());
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

class Runner {
 public:
  explicit Runner(Options o) : opt_(std::move(o)) {}

  // Unit suites under gtest filters; the criterion holds when each exits 0.
  Outcome gtest_suites(const std::string& tag,
                       const std::vector<std::pair<std::string, std::string>>& suites,
                       double budget_s) {
    const auto t0 = Clock::now();
    std::vector<std::string> failed;
    for (const auto& [binary, filter] : suites) {
      const fs::path exe = fs::path(GRAPHSCORE_TEST_DIR) / binary;
      const fs::path log = opt_.work / fmt::format("{}_{}.log", tag, binary);
      const int rc = run_logged(shell_quote(exe.string()) + " --gtest_filter=" + shell_quote(filter), log);
      // A filter that matches nothing also exits 0.
      const auto patterns = static_cast<int>(std::count(filter.begin(), filter.end(), ':')) + 1;
      const int ran = passed_tests(slurp(log));
      if (rc != 0 || ran < patterns)
        failed.push_back(fmt::format("{} (exit {}, {} tests passed for {} patterns, see {})",
                                     binary, rc, ran, patterns, log.string()));
    }
    const double elapsed = seconds_since(t0);
    Outcome o;
    o.pass = failed.empty() && elapsed < budget_s;
    o.detail = fmt::format("{} suites, {:.1f} s (budget {:.0f} s)", suites.size(), elapsed,
                           budget_s);
    for (const auto& f : failed) o.detail += "; failed: " + f;
    return o;
  }

  // Full CLI run; returns wall seconds or throws on a nonzero exit.
  double study(const fs::path& out, std::uint64_t seed, const std::string& env) {
    const auto t0 = Clock::now();
    const std::string cmd = fmt::format(
        "{} {} --config {} --seed {} --jobs {} --out {} run", env, shell_quote(GRAPHSCORE_CLI),
        shell_quote(opt_.config), seed, opt_.jobs, shell_quote(out.string()));
    const fs::path log = out.string() + ".log";
    const int rc = run_logged(cmd, log);
    if (rc != 0)
      throw std::runtime_error(fmt::format("run {} exited {} (see {})", out.string(), rc,
                                           log.string()));
    return seconds_since(t0);
  }

  fs::path seed_dir(int seed) const { return opt_.work / fmt::format("beta1_seed{:02d}", seed); }

  // Seed runs shared by criteria 4 to 7.
  void ensure_seed_runs() {
    if (!seed_seconds_.empty()) return;
    for (int s = 1; s <= opt_.seeds; ++s) {
      seed_seconds_.push_back(study(seed_dir(s), static_cast<std::uint64_t>(s), ""));
      std::cerr << fmt::format("seed {} done in {:.0f} s\n", s, seed_seconds_.back());
    }
  }

  static ev::CVResult load_cv(const fs::path& run) {
    return ev::cv_from_json(read_json(run / "train" / "cv.json"));
  }

  Outcome stacking() {
    ensure_seed_runs();
    int beats_ab = 0;
    std::vector<std::string> worse;
    std::string per_seed;
    for (int s = 1; s <= opt_.seeds; ++s) {
      const auto cv = load_cv(seed_dir(s));
      const auto ab = ev::compare(cv, "A+B+C+D+E", "A+B", ev::Metric::Auc);
      if (ab.reject && ab.mean_diff > 0) ++beats_ab;
      for (const char* subset : {"A+B+C+D", "A+B+C+E"}) {
        const auto v = ev::compare(cv, "A+B+C+D+E", subset, ev::Metric::Auc);
        if (v.reject && v.mean_diff < 0)
          worse.push_back(fmt::format("seed {} vs {} (diff {:+.4f}, p {:.3g})", s, subset,
                                      v.mean_diff, v.p));
      }
      per_seed += fmt::format("{}{:+.4f}/p={:.2g}", s == 1 ? "" : " ", ab.mean_diff, ab.p);
    }
    const double slowest = *std::max_element(seed_seconds_.begin(), seed_seconds_.end());
    const int needed = (opt_.seeds * 8 + 9) / 10;
    Outcome o;
    o.pass = beats_ab >= needed && worse.empty() && slowest < 15 * 60;
    o.detail = fmt::format(
        "A+B+C+D+E > A+B (p<0.05) in {}/{} seeds (need {}); significantly worse than a "
        "C+D or C+E subset in {} cases; slowest seed {:.0f} s; AUC diff vs A+B per seed: {}",
        beats_ab, opt_.seeds, needed, worse.size(), slowest, per_seed);
    for (const auto& w : worse) o.detail += "; worse: " + w;
    return o;
  }

  static double full_blend_gain(const fs::path& run) {
    for (const auto& r : ev::relative_improvement_table(load_cv(run)))
      if (r.feature_set == "A+B+C+D+E" && r.metric == ev::Metric::Auc) return r.mean;
    throw std::runtime_error("no A+B+C+D+E row in " + run.string());
  }

  Outcome scenario_gap() {
    ensure_seed_runs();
    // Behavioral scoring on the seed 1 population, read back from its files.
    const fs::path beh = opt_.work / "behavioral_seed01";
    const std::string env = "GS_SCENARIO__SCORING=Behavioral GS_INPUT__DIR=" +
                            shell_quote((seed_dir(1) / "data").string());
    study(beh, 1, env);
    const double app = full_blend_gain(seed_dir(1));
    const double bhv = full_blend_gain(beh);
    return {app > bhv,
            fmt::format("A+B+C+D+E relative AUC gain over BENCH: Application {:+.2f}%, "
                        "Behavioral {:+.2f}%",
                        100 * app, 100 * bhv)};
  }

  Outcome determinism() {
    ensure_seed_runs();
    const fs::path again = opt_.work / "determinism_seed01";
    fs::remove_all(again);
    study(again, 1, "");
    std::set<std::string> names;
    for (const fs::path& dir : {seed_dir(1) / "report", again / "report"})
      for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file())
          names.insert(e.path().filename().string());
    std::vector<std::string> differ;
    for (const auto& n : names) {
      const fs::path a = seed_dir(1) / "report" / n;
      const fs::path b = again / "report" / n;
      if (!fs::exists(a) || !fs::exists(b) || slurp(a) != slurp(b)) differ.push_back(n);
    }
    Outcome o;
    o.pass = differ.empty() && !names.empty();
    o.detail = fmt::format("{} report files compared between two fresh runs, {} differ",
                           names.size(), differ.size());
    for (const auto& d : differ) o.detail += "; differs: " + d;
    return o;
  }

  Outcome importance() {
    ensure_seed_runs();
    struct Row {
      std::string feature, group;
      double mean_abs;
    };
    std::vector<Row> rows;
    {
      graphscore::CsvReader r((seed_dir(1) / "explain/importance.csv").string());
      const auto fc = r.require_column("feature");
      const auto gc = r.require_column("group");
      const auto mc = r.require_column("mean_abs_attr");
      std::vector<std::string_view> f;
      while (r.next(f))
        rows.push_back({std::string(f[fc]), std::string(f[gc]), r.parse_double(f[mc], "")});
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.mean_abs > b.mean_abs; });
    std::string network_top;
    for (std::size_t i = 0; i < std::min<std::size_t>(10, rows.size()); ++i)
      if (network_top.empty() && (rows[i].group == "D" || rows[i].group == "E"))
        network_top = fmt::format("{} ({}, rank {})", rows[i].feature, rows[i].group, i + 1);

    const fs::path zero = opt_.work / "beta0_seed01";
    study(zero, 1,
          fmt::format("GS_INPUT__SYNTH__BETA=0 GS_INPUT__SYNTH__N_PEOPLE={} "
                      "GS_INPUT__SYNTH__N_COMPANIES={}",
                      opt_.beta0_people, std::max(10, opt_.beta0_people / 10)));
    const auto share = read_json(zero / "explain/explain.json")["group_share"];
    const double cde =
        share["C"].get<double>() + share["D"].get<double>() + share["E"].get<double>();

    Outcome o;
    o.pass = !network_top.empty() && cde < 0.15;
    o.detail = fmt::format(
        "beta=1: first D/E feature in top 10: {}; beta=0 (n_people {}): C+D+E share {:.1f}% "
        "(C {:.1f}%, D {:.1f}%, E {:.1f}%)",
        network_top.empty() ? "none" : network_top, opt_.beta0_people, 100 * cde,
        100 * share["C"].get<double>(), 100 * share["D"].get<double>(),
        100 * share["E"].get<double>());
    return o;
  }

  // Rank agreement of attribution and permutation importance; reported only.
  std::string sanity_note() {
    const fs::path p = seed_dir(1) / "explain/explain.json";
    if (!fs::exists(p)) return {};
    const auto j = read_json(p);
    if (!j.contains("spearman_attribution_vs_permutation")) return {};
    const double rho = j["spearman_attribution_vs_permutation"].get<double>();
    return fmt::format("INFO attribution vs permutation Spearman (beta=1, seed 1): {:.3f} ({})",
                       rho, rho > 0.6 ? "above 0.6" : "below 0.6");
  }

  const Options& options() const { return opt_; }

 private:
  Options opt_;
  std::vector<double> seed_seconds_;
};

}  // namespace

int main(int argc, char** argv) {
  Options opt;
  std::string work = opt.work.string();
  CLI::App app{"Runs the acceptance criteria and prints one PASS/FAIL line per criterion."};
  app.add_option("--work", work, "Work directory for runs and logs (wiped unless --keep)");
  app.add_option("--config", opt.config, "Run configuration for the study criteria")
      ->check(CLI::ExistingFile);
  app.add_option("--seeds", opt.seeds, "Seeds for the stacking criterion")
      ->check(CLI::PositiveNumber);
  app.add_option("--jobs", opt.jobs, "Worker threads per run")->check(CLI::PositiveNumber);
  app.add_option("--only", opt.only, "Criteria to run (default all)")->check(CLI::Range(1, 7));
  app.add_option("--beta0-people", opt.beta0_people, "Population of the beta=0 importance run")
      ->check(CLI::PositiveNumber);
  app.add_flag("--keep", opt.keep, "Reuse runs already in the work directory");
  CLI11_PARSE(app, argc, argv);
  opt.work = work;
  if (!opt.keep) fs::remove_all(opt.work);
  fs::create_directories(opt.work);

  Runner runner(opt);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"oracle equivalence suite",
       [&] {
         return runner.gtest_suites(
             "c1",
             {{"metrics_test", "Auc.EqualsPairwiseOracleExactly:Ks.EqualsThresholdSweepOracleExactly"},
              {"netstats_test",
               "PageRank.MatchesDenseIteration:Triads.MatchesBruteForce:"
               "ArticulationPoints.MatchesRemovalOracle:Bridges.MatchesRemovalOracle"},
              {"gnn_test", "GcnLayer.MatchesDenseOracle"},
              {"explain_test", "TreeShap.MatchesExhaustiveShapleyOnRandomEnsembles"}},
             300);
       }},
      {"gradient checks",
       [&] {
         return runner.gtest_suites(
             "c2",
             {{"gnn_test",
               "GcnTraining.GradientMatchesFiniteDifferences:"
               "GaeTraining.GradientMatchesFiniteDifferences"},
              {"node2vec_test", "SkipGram.GradientMatchesFiniteDifferences"}},
             300);
       }},
      {"selection algorithm",
       [&] {
         return runner.gtest_suites(
             "c3", {{"selection_test", "BivariateFilter.*:GreedyDecorrelate.*:TwoStageSelection.*"}},
             300);
       }},
      {"stacking (A+B+C+D+E vs subsets)", [&] { return runner.stacking(); }},
      {"Application > Behavioral gain", [&] { return runner.scenario_gap(); }},
      {"determinism of CLI reports", [&] { return runner.determinism(); }},
      {"importance sanity", [&] { return runner.importance(); }},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end())
      continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << fmt::format("{} C{} {}: {}", o.pass ? "PASS" : "FAIL", id, criteria[i].first,
                             o.detail)
              << std::endl;
  }
  if (const auto note = runner.sanity_note(); !note.empty()) std::cout << note << std::endl;
  return failures == 0 ? 0 : 1;
}
