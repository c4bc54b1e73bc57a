// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "cmawiz/cli.hpp"
#include "cmawiz/cma_engine.hpp"
#include "cmawiz/common.hpp"
#include "cmawiz/evaluation.hpp"
#include "cmawiz/racing.hpp"
#include "cmawiz/validation.hpp"
#include "cmawiz/wizard.hpp"
#include "hand_oracle.hpp"

using namespace cmawiz;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

double unit_noise(std::uint64_t seed, std::uint64_t tag) {
  return static_cast<double>(derive_seed(seed, tag) >> 11) * 0x1.0p-53;
}

Verdict dispatch_truth_table() {
  int matched = 0;
  int cases = 0;
  for (bool bounded : {false, true})
    for (long budget : {49L, 50L})
      for (int dim : {15, 16})
        for (int workers : {20, 21}) {
          std::string want;
          if (bounded) {
            want = "CMAbounded";
          } else if (budget < 50) {
            want = dim <= 15 ? "CMAtuning" : "CMAsmall";
          } else {
            want = workers > 20 ? "CMApara" : "CMAstd";
          }
          matched += meta_cma_select({budget, dim, workers, bounded}) == want;
          ++cases;
        }
  return {matched == cases, std::to_string(matched) + "/" + std::to_string(cases) + " cases"};
}

Verdict registry_table_fidelity() {
  const std::string text = serialize_registry(ConfigRegistry::defaults());
  const std::vector<std::vector<std::string>> table = {
      {"CMAstd", "0.3607", "3", "false", "false"},    {"CMAsmall", "0.4151", "9", "false", "false"},
      {"CMAtuning", "0.4847", "1", "true", "false"},  {"CMApara", "0.8905", "8", "true", "true"},
      {"CMAbounded", "1.5884", "1", "true", "true"},
  };
  int ok = 0;
  for (const auto& row : table) {
    const std::string section = "[" + row[0] + "]\nscale = " + row[1] + "\npopsize_factor = " + row[2] +
                                "\nelitist = " + row[3] + "\ndiagonal = " + row[4] + "\n";
    ok += text.find(section) != std::string::npos;
  }
  return {ok == 5, std::to_string(ok) + "/5 sections byte-equal"};
}

Verdict population_oracle() {
  using Big = boost::multiprecision::cpp_dec_float_50;
  long mismatches = 0;
  for (int d = 1; d <= 3000; ++d) {
    const Big ln = boost::multiprecision::log(Big(d));
    for (int f = 1; f <= 9; ++f) {
      const int want = static_cast<int>(boost::multiprecision::floor(Big(4) + Big(f) * ln));
      mismatches += population_size(CmaConfig(1.0, f, false, false), d) != want;
    }
  }
  return {mismatches == 0, std::to_string(mismatches) + " mismatches over 27000 pairs"};
}

Verdict sphere_convergence() {
  std::ostringstream detail;
  bool pass = true;
  for (int d : {2, 5, 10}) {
    std::vector<double> finals;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      InstanceSpec inst;
      inst.function = FunctionId::Sphere;
      inst.dimension = d;
      inst.budget = 400L * d;
      inst.rotation_seed = 1000 + seed;
      finals.push_back(run(CmaConfig{}, inst, seed).final_loss);
    }
    std::sort(finals.begin(), finals.end());
    const double median = 0.5 * (finals[9] + finals[10]);
    pass &= median < 1e-6;
    detail << "d=" << d << " median=" << median << " ";
  }
  return {pass, detail.str()};
}

Verdict elitist_invariant() {
  std::mt19937_64 rng(5);
  int tells = 0;
  int violations = 0;
  while (tells < 1000) {
    const int d = std::uniform_int_distribution<int>(1, 12)(rng);
    const CmaConfig config(std::uniform_real_distribution<double>(0.2, 5.0)(rng),
                           std::uniform_int_distribution<int>(1, 9)(rng), true, rng() % 2 == 0);
    CmaState state = init_state(config, d, std::nullopt, rng());
    std::normal_distribution<double> noise(0.0, 1.0);
    const Vector center = Vector::Random(d) * 3.0;
    for (int g = 0; g < 50 && tells < 1000; ++g, ++tells) {
      const auto previous = state.best_seen();
      const auto points = state.ask();
      std::vector<double> losses;
      for (const auto& p : points) losses.push_back((p - center).squaredNorm() + 5.0 * noise(rng));
      state.tell(points, losses);
      if (!previous) continue;
      const auto& pool = state.last_selected_losses();
      const double population_best = *std::min_element(pool.begin(), pool.end());
      violations += population_best > previous->loss;
      violations += state.best_seen()->loss > previous->loss;
    }
  }
  return {violations == 0, std::to_string(violations) + " violations over " + std::to_string(tells) + " tells"};
}

Verdict racing_schedule() {
  const ParamSpace space = cma_space();
  const std::size_t factor = space.index_of("popsize_factor");
  // Candidates with popsize_factor >= 5 are shifted by +100 on every instance.
  const Target target = [factor](const Candidate& c, const InstanceSpec&, std::uint64_t seed) {
    return unit_noise(seed, 1) + 1e-3 * unit_noise(seed, static_cast<std::uint64_t>(c.id) + 7) +
           (c.values[factor] >= 5.0 ? 100.0 : 0.0);
  };
  TunerSettings settings;
  settings.max_experiments = 10000;
  settings.seed = 17;
  const TuneResult r = tune(space, suite_by_name("YABBOB"), settings, target);

  bool early = false;
  for (const auto& e : r.state.eliminations) early |= e.blocks_seen < settings.first_test_after_blocks;

  std::set<int> shifted_first;
  std::set<int> eliminated_at_first_test;
  for (const auto& e : r.state.log)
    if (e.iteration == 1 && e.loss >= 100.0) shifted_first.insert(e.candidate);
  for (const auto& e : r.state.eliminations)
    if (e.iteration == 1 && e.blocks_seen == settings.first_test_after_blocks) eliminated_at_first_test.insert(e.candidate);
  const bool shifted_gone = !shifted_first.empty() && std::includes(eliminated_at_first_test.begin(),
                                                                     eliminated_at_first_test.end(),
                                                                     shifted_first.begin(), shifted_first.end());
  std::ostringstream detail;
  detail << "experiments=" << r.state.experiments_used << " early_eliminations=" << (early ? "yes" : "no")
         << " shifted=" << shifted_first.size() << " removed_at_block_5=" << eliminated_at_first_test.size();
  return {r.state.experiments_used <= 10000 && !early && shifted_gone, detail.str()};
}

Verdict synthetic_recovery() {
  const ParamSpace space = cma_space();
  const std::size_t scale = space.index_of("scale");
  const Target target = [scale](const Candidate& c, const InstanceSpec&, std::uint64_t) {
    return (c.values[scale] - 2.0) * (c.values[scale] - 2.0);
  };
  int hits = 0;
  std::ostringstream detail;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    TunerSettings settings;
    settings.seed = seed;
    const TuneResult r = tune(space, suite_by_name("YABBOB"), settings, target);
    const double s = r.elites.front().candidate.values[scale];
    hits += s > 1.5 && s < 2.5;
  }
  detail << hits << "/10 seeds in (1.5, 2.5)";
  return {hits >= 9, detail.str()};
}

Verdict tuned_versus_default() {
  const ParamSpace space = cma_space();
  const SuiteSpec suite = suite_by_name("YASMALLBBOB");
  int tuned_wins = 0;
  std::ostringstream detail;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    TunerSettings settings;
    settings.max_experiments = 2000;
    settings.seed = derive_seed(2023, rep);
    const TuneResult r = tune(space, suite, settings);
    const CmaConfig best = to_cma_config(space, r.elites.front().candidate);
    ValidationOptions options;
    options.n_runs = 10;
    options.seed = derive_seed(2024, rep);
    const ValidationReport report = validate({{"tuned", best}}, suite, options);
    const bool won = report.winner().name == "tuned";
    tuned_wins += won;
    detail << (won ? 'T' : 'd');
  }
  detail << " tuned won " << tuned_wins << "/10 pipelines";
  return {tuned_wins >= 7, detail.str()};
}

std::vector<RunRecord> random_collection(std::mt19937_64& rng) {
  const int algs = std::uniform_int_distribution<int>(2, 6)(rng);
  const int insts = std::uniform_int_distribution<int>(1, 5)(rng);
  const int seeds = std::uniform_int_distribution<int>(1, 3)(rng);
  std::vector<long> budgets;
  for (int i = 0; i < insts; ++i) budgets.push_back(std::uniform_int_distribution<long>(5, 200)(rng));
  std::vector<RunRecord> out;
  for (int a = 0; a < algs; ++a)
    for (int i = 0; i < insts; ++i)
      for (int s = 0; s < seeds; ++s) {
        const long budget = budgets[static_cast<std::size_t>(i)];
        std::vector<HistoryPoint> h;
        double best = 1000.0;
        long evals = 0;
        while (evals < budget) {
          evals = std::min(budget, evals + std::uniform_int_distribution<long>(1, budget / 2 + 1)(rng));
          best = std::min(best, static_cast<double>(std::uniform_int_distribution<int>(0, 50)(rng)));
          h.push_back({evals, best});
        }
        auto r = oracle::hand_record("alg" + std::to_string(a), budget, static_cast<std::uint64_t>(i + 1), h);
        r.seed = static_cast<std::uint64_t>(s);
        out.push_back(std::move(r));
      }
  return out;
}

Verdict score_matrix_algebra() {
  std::mt19937_64 rng(31337);
  int failures = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    auto records = random_collection(rng);
    const ScoreMatrix m = score_matrix(records);
    bool ok = true;
    for (std::size_t a = 0; a < m.algorithms.size(); ++a) {
      ok &= m.wins[a][a] == 0.5;
      for (std::size_t b = 0; b < m.algorithms.size(); ++b)
        if (a != b) ok &= m.wins[a][b] + m.wins[b][a] == 1.0;
    }
    std::map<std::uint64_t, double> factor;
    for (const auto& r : records)
      if (!factor.count(r.instance.rotation_seed))
        factor[r.instance.rotation_seed] = std::exp(std::uniform_real_distribution<double>(-5.0, 5.0)(rng));
    for (auto& r : records)
      for (auto& p : r.history) p.best_loss *= factor[r.instance.rotation_seed];
    const ScoreMatrix scaled = score_matrix(records);
    ok &= scaled.algorithms == m.algorithms && scaled.wins == m.wins && scaled.global_score == m.global_score;
    failures += !ok;
  }
  return {failures == 0, std::to_string(failures) + " failing trials of 1000"};
}

Verdict hand_oracle() {
  const auto records = oracle::hand_records();
  const oracle::HandExpectation want;
  const ScoreMatrix m = score_matrix(records, oracle::kHandCheckpoints);
  bool ok = m.algorithms == want.order && m.wins == want.wins && m.global_score == want.scores &&
            m.settings == want.settings;
  for (std::size_t i = 0; i < want.labels.size() && ok; ++i) {
    ok &= std::abs(m.standard_error[i] - want.standard_errors[i]) <= 1e-15;
    ok &= format_rank_label(m, want.order[i]) == want.labels[i];
  }
  const auto curves = convergence_curves(records, oracle::kHandCheckpoints);
  ok &= curves.size() == 3;
  for (std::size_t a = 0; a < curves.size() && ok; ++a)
    for (std::size_t k = 0; k < 2; ++k) ok &= std::abs(curves[a].points[k].second - want.curves[a][k]) <= 1e-15;
  return {ok, ok ? "matrix, scores, labels and curves match the hand enumeration" : "mismatch"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int quiet_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_main(args, out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

Verdict determinism_and_resume() {
  const fs::path root = fs::temp_directory_path() / "cmawiz_acceptance_ac11";
  fs::remove_all(root);
  const std::string a = (root / "a").string();
  const std::string b = (root / "b").string();
  bool ok = true;

  const std::vector<std::string> tune = {"tune", "--suite", "YASMALLBBOB", "--max-experiments", "2000"};
  auto with = [](std::string dir, std::vector<std::string> rest) {
    std::vector<std::string> args = {"--seed", "7", "--out-dir", dir};
    args.insert(args.end(), rest.begin(), rest.end());
    return args;
  };
  ok &= quiet_cli(with(a, tune)) == 0;
  // An interrupted earlier attempt leaves a truncated elites file behind.
  fs::create_directories(fs::path(b) / "elites");
  {
    std::ofstream partial(fs::path(b) / "elites" / "YASMALLBBOB.elites.jsonl");
    partial << slurp(fs::path(a) / "elites" / "YASMALLBBOB.elites.jsonl").substr(0, 60);
  }
  auto tune_workers = with(b, tune);
  tune_workers.insert(tune_workers.begin(), {"--workers", "2"});
  ok &= quiet_cli(tune_workers) == 0;
  const bool tune_same =
      slurp(fs::path(a) / "elites" / "YASMALLBBOB.elites.jsonl") == slurp(fs::path(b) / "elites" / "YASMALLBBOB.elites.jsonl") &&
      slurp(fs::path(a) / "reports" / "YASMALLBBOB.race.jsonl") == slurp(fs::path(b) / "reports" / "YASMALLBBOB.race.jsonl");

  const std::vector<std::string> run = {"run", "--suite", "YABBOB", "--algorithm", "MetaCMA", "--blocks", "3",
                                        "--seeds", "2"};
  ok &= quiet_cli(with(a, run)) == 0;
  auto limited = run;
  limited.insert(limited.end(), {"--limit", "23"});
  ok &= quiet_cli(with(b, limited)) == 0;
  // Simulate a crash in the middle of an append.
  const fs::path store_b = fs::path(b) / "runs" / "store.jsonl";
  const std::string partial = slurp(store_b);
  {
    std::ofstream out(store_b, std::ios::binary | std::ios::trunc);
    out << partial.substr(0, partial.size() - 40);
  }
  ok &= quiet_cli(with(b, run)) == 0;
  const bool run_same = slurp(fs::path(a) / "runs" / "store.jsonl") == slurp(store_b);
  fs::remove_all(root);

  std::ostringstream detail;
  detail << "tune files " << (tune_same ? "identical" : "differ") << ", resumed store "
         << (run_same ? "identical" : "differs");
  return {ok && tune_same && run_same, detail.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"AC1 dispatch truth table", dispatch_truth_table},
      {"AC2 registry defaults byte-equal", registry_table_fidelity},
      {"AC3 population formula oracle", population_oracle},
      {"AC4 sphere convergence", sphere_convergence},
      {"AC5 elitist invariant", elitist_invariant},
      {"AC6 racing budget and schedule", racing_schedule},
      {"AC7 synthetic tuning recovery", synthetic_recovery},
      {"AC8 tuned beats default on YASMALLBBOB", tuned_versus_default},
      {"AC9 score-matrix algebra", score_matrix_algebra},
      {"AC10 hand-computed evaluation oracle", hand_oracle},
      {"AC11 determinism and resume", determinism_and_resume},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v{false, ""};
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << (v.pass ? "PASS " : "FAIL ") << name << " | " << v.detail << " | " << secs << " s" << std::endl;
    failed += !v.pass;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
