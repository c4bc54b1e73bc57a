#include "cmawiz/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "cmawiz/baselines.hpp"
#include "cmawiz/benchmark.hpp"
#include "cmawiz/cma_engine.hpp"
#include "cmawiz/common.hpp"
#include "cmawiz/error.hpp"
#include "cmawiz/evaluation.hpp"
#include "cmawiz/io.hpp"
#include "cmawiz/racing.hpp"
#include "cmawiz/run_store.hpp"
#include "cmawiz/validation.hpp"
#include "cmawiz/wizard.hpp"

namespace cmawiz {

namespace fs = std::filesystem;

namespace {

constexpr const char* kElitesSchema = "cmawizard.elites";
constexpr const char* kRaceLogSchema = "cmawizard.racelog";
constexpr const char* kValidationSchema = "cmawizard.validation";

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string out_dir = "cmawizard-out";
};

struct SuiteOptions {
  std::string name;
  int blocks = 0;
  int dim_cap = 0;
  std::vector<std::string> functions;

  SuiteSpec resolve() const {
    SuiteSpec suite = suite_by_name(name);
    if (dim_cap > 0) {
      if (dim_cap < suite.min_dimension)
        throw Error(ErrorKind::InvalidConfig, "dim-cap " + std::to_string(dim_cap) + " is below the suite's minimum dimension");
      if (suite.id == SuiteId::YaHdBbob && dim_cap > 3000)
        throw Error(ErrorKind::InvalidConfig, "dim-cap for YAHDBBOB is at most 3000");
      suite.max_dimension = suite.id == SuiteId::YaHdBbob ? dim_cap : std::min(suite.max_dimension, dim_cap);
    }
    for (const auto& f : functions) suite.functions.push_back(function_from_name(f));
    return suite;
  }
};

void add_suite_options(CLI::App* cmd, SuiteOptions& s, int default_blocks) {
  s.blocks = default_blocks;
  cmd->add_option("--suite", s.name, "Benchmark suite name")->required();
  cmd->add_option("--blocks", s.blocks, "Number of instance blocks")->capture_default_str()->check(CLI::NonNegativeNumber);
  cmd->add_option("--dim-cap", s.dim_cap, "Upper dimension cap (YAHDBBOB: up to 3000)");
  cmd->add_option("--functions", s.functions, "Restrict the function catalog")->delimiter(',');
}

std::string elites_file(const TuneResult& result, const ParamSpace& space, const std::string& suite,
                        const TunerSettings& settings) {
  std::ostringstream os;
  os << io::header_line(kElitesSchema) << "\n";
  io::Json meta;
  meta["suite"] = suite;
  meta["seed"] = settings.seed;
  meta["max_experiments"] = settings.max_experiments;
  meta["experiments_used"] = result.state.experiments_used;
  meta["iterations"] = result.iterations;
  os << meta.dump() << "\n";
  int rank = 1;
  for (const auto& e : result.elites) {
    io::Json j;
    j["rank"] = rank;
    j["name"] = "elite-" + std::to_string(rank);
    j["candidate"] = e.candidate.id;
    j["mean_loss"] = io::real(e.mean_loss);
    j["instances"] = e.instances;
    j["config"] = io::to_json(to_cma_config(space, e.candidate));
    os << j.dump() << "\n";
    ++rank;
  }
  return os.str();
}

std::vector<NamedConfig> read_elites(const fs::path& path) {
  const auto lines = io::read_lines(path);
  if (lines.empty()) throw Error(ErrorKind::Parse, path.string() + ": empty file");
  io::check_header(lines[0], kElitesSchema, path.string());
  std::vector<NamedConfig> out;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    try {
      const auto j = io::Json::parse(lines[i]);
      out.push_back({j.at("name").get<std::string>(), io::config_from_json(j.at("config"))});
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, path.string() + " line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

std::string race_log_file(const TuneResult& result, const ParamSpace& space) {
  std::ostringstream os;
  os << io::header_line(kRaceLogSchema) << "\n";
  for (const auto& e : result.state.log) {
    io::Json j;
    j["type"] = "experiment";
    j["iteration"] = e.iteration;
    j["block"] = e.block;
    j["instance"] = e.instance;
    j["candidate"] = e.candidate;
    j["seed"] = e.seed;
    j["loss"] = io::real(e.loss);
    os << j.dump() << "\n";
  }
  for (const auto& e : result.state.eliminations) {
    io::Json j;
    j["type"] = "elimination";
    j["iteration"] = e.iteration;
    j["candidate"] = e.candidate;
    j["against"] = e.against;
    j["blocks_seen"] = e.blocks_seen;
    j["t"] = io::real(e.t_statistic);
    j["p"] = io::real(e.p_value);
    os << j.dump() << "\n";
  }
  for (const auto& e : result.elites) {
    io::Json j;
    j["type"] = "elite";
    j["candidate"] = e.candidate.id;
    j["description"] = describe_candidate(space, e.candidate);
    os << j.dump() << "\n";
  }
  return os.str();
}

std::string validation_file(const ValidationReport& report) {
  std::ostringstream os;
  os << io::header_line(kValidationSchema) << "\n";
  for (std::size_t c = 0; c < report.contenders.size(); ++c) {
    io::Json j;
    j["type"] = "contender";
    j["index"] = c;
    j["name"] = report.contenders[c].name;
    j["config"] = io::to_json(report.contenders[c].config);
    os << j.dump() << "\n";
  }
  for (std::size_t r = 0; r < report.per_run_winners.size(); ++r) {
    io::Json j;
    j["type"] = "run";
    j["run"] = r;
    j["instances"] = report.instances_per_run[r];
    j["winner"] = report.per_run_winners[r];
    io::Json wins = io::Json::array();
    for (double w : report.per_instance_win_counts[r]) wins.push_back(io::real(w));
    j["instance_wins"] = std::move(wins);
    os << j.dump() << "\n";
  }
  io::Json j;
  j["type"] = "result";
  j["vote"] = report.vote == VoteMode::OverRuns ? "runs" : "pooled";
  j["winner"] = report.overall_winner;
  j["winner_name"] = report.winner().name;
  j["tie"] = report.tie;
  os << j.dump() << "\n";
  return os.str();
}

bool is_slot(const std::string& name) {
  return std::any_of(kConfigNames.begin(), kConfigNames.end(), [&](const char* n) { return name == n; });
}

RunRecord run_algorithm(const std::string& algorithm, const InstanceSpec& instance, const ConfigRegistry& registry,
                        std::uint64_t seed) {
  if (algorithm == "MetaCMA") return wizard_run(ProblemDescriptor::from_instance(instance), instance, registry, seed);
  if (is_baseline(algorithm)) return run_baseline(algorithm, instance, seed);
  RunRecord r;
  if (is_slot(algorithm)) {
    r = run(registry.at(algorithm), instance, seed);
  } else if (algorithm == "default") {
    r = run(CmaConfig{}, instance, seed);
  } else {
    throw Error(ErrorKind::UnknownName, "unknown algorithm '" + algorithm + "'");
  }
  r.algorithm = algorithm;
  r.variant = algorithm;
  return r;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"cmawizard: tuned-CMA algorithm selection toolkit", "cmawizard"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  app.allow_config_extras(CLI::config_extras_mode::error);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "Master seed")->envname("CMAWIZARD_SEED")->capture_default_str();
  app.add_option("--workers", g.workers, "Worker threads (wall-clock only)")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "Output directory")->capture_default_str();

  // suite
  auto* suite_cmd = app.add_subcommand("suite", "List suites or sample instances");
  suite_cmd->require_subcommand(1, 1);
  suite_cmd->fallthrough();
  auto* suite_list = suite_cmd->add_subcommand("list", "List implemented suites");
  auto* suite_sample = suite_cmd->add_subcommand("sample", "Print sampled instances");
  suite_sample->fallthrough();
  std::string sample_name;
  int sample_blocks = 3;
  suite_sample->add_option("name", sample_name, "Suite name")->required();
  suite_sample->add_option("--blocks", sample_blocks, "Number of blocks")->capture_default_str()->check(CLI::PositiveNumber);

  // tune
  auto* tune_cmd = app.add_subcommand("tune", "Tune CMA on a suite by elitist iterated racing");
  tune_cmd->fallthrough();
  SuiteOptions tune_suite;
  add_suite_options(tune_cmd, tune_suite, 0);
  TunerSettings settings;
  tune_cmd->add_option("--max-experiments", settings.max_experiments, "Experiment budget")->capture_default_str();
  tune_cmd->add_option("--first-test", settings.first_test_after_blocks, "Blocks before the first test")->capture_default_str();
  tune_cmd->add_option("--alpha", settings.alpha, "t-test level")->capture_default_str();
  tune_cmd->add_option("--min-survivors", settings.min_survivors)->capture_default_str();
  tune_cmd->add_option("--max-elites", settings.max_elites)->capture_default_str();

  // validate
  auto* validate_cmd = app.add_subcommand("validate", "Majority-vote validation of elites against the default");
  validate_cmd->fallthrough();
  SuiteOptions val_suite;
  add_suite_options(validate_cmd, val_suite, 10);
  std::string elites_path;
  std::string base_registry;
  std::string slot;
  int top = 1;
  ValidationOptions vopts;
  bool pooled = false;
  validate_cmd->add_option("--elites", elites_path, "Elites file from tune")->required();
  validate_cmd->add_option("--runs", vopts.n_runs, "Validation runs")->capture_default_str()->check(CLI::PositiveNumber);
  validate_cmd->add_option("--top", top, "Number of elites entered")->capture_default_str()->check(CLI::PositiveNumber);
  validate_cmd->add_option("--slot", slot, "Registry slot to replace (default: the suite's slot)");
  validate_cmd->add_option("--registry", base_registry, "Base registry (default: built-in values)");
  validate_cmd->add_flag("--pooled", pooled, "Vote on pooled instance wins instead of run winners");

  // run
  auto* run_cmd = app.add_subcommand("run", "Run an algorithm over a suite into the run store");
  run_cmd->fallthrough();
  SuiteOptions run_suite;
  add_suite_options(run_cmd, run_suite, 5);
  std::string algorithm;
  std::string run_registry;
  std::string store_path;
  int replicates = 1;
  long limit = -1;
  run_cmd->add_option("--algorithm", algorithm, "MetaCMA, a registry slot, default, or a baseline")->required();
  run_cmd->add_option("--seeds", replicates, "Replicate seeds per instance")->capture_default_str()->check(CLI::PositiveNumber);
  run_cmd->add_option("--registry", run_registry, "Registry file (default: built-in values)");
  run_cmd->add_option("--store", store_path, "Run store (default: <out-dir>/runs/store.jsonl)");
  run_cmd->add_option("--limit", limit, "Stop after this many new records");

  // compare
  auto* compare_cmd = app.add_subcommand("compare", "Score matrix, curves and rank labels from a run store");
  compare_cmd->fallthrough();
  std::string compare_store;
  std::vector<double> checkpoints = kDefaultCheckpoints;
  compare_cmd->add_option("--store", compare_store, "Run store (default: <out-dir>/runs/store.jsonl)");
  compare_cmd->add_option("--checkpoints", checkpoints, "Budget fractions")->delimiter(',');

  // report
  auto* report_cmd = app.add_subcommand("report", "Render the compare outputs as text tables");
  report_cmd->fallthrough();
  int report_rows = 6;
  report_cmd->add_option("--rows", report_rows, "Heatmap rows")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ConfigError& e) {
    err << "cmawizard: invalid config: " << e.what() << "\n";
    return 1;
  } catch (const CLI::ConversionError& e) {
    err << "cmawizard: invalid value: " << e.what() << "\n";
    return 1;
  } catch (const CLI::ValidationError& e) {
    err << "cmawizard: invalid value: " << e.what() << "\n";
    return 1;
  } catch (const CLI::ParseError& e) {
    err << "cmawizard: " << e.what() << "\n" << app.help();
    return 2;
  }

  const fs::path out_dir(g.out_dir);
  try {
    if (*suite_list) {
      for (const auto& name : suite_names()) out << name << "\t" << suite_by_name(name).context() << "\n";
    } else if (*suite_sample) {
      const SuiteSpec suite = suite_by_name(sample_name);
      const auto blocks = generate_suite(suite, sample_blocks, g.seed);
      out << "block\tfunction\tdimension\tbudget\tnum_workers\tbounded\trotation_seed\n";
      for (std::size_t b = 0; b < blocks.size(); ++b)
        for (const auto& i : blocks[b].instances)
          out << b << "\t" << describe(i.function).name << "\t" << i.dimension << "\t" << i.budget << "\t"
              << i.num_workers << "\t" << (i.fully_bounded() ? "true" : "false") << "\t" << i.rotation_seed << "\n";
    } else if (*tune_cmd) {
      const SuiteSpec suite = tune_suite.resolve();
      settings.seed = g.seed;
      settings.workers = g.workers;
      settings.n_blocks = tune_suite.blocks;
      const ParamSpace space = cma_space();
      const TuneResult result = tune(space, suite, settings);
      const fs::path elites = out_dir / "elites" / (suite.name + ".elites.jsonl");
      io::write_file_atomic(elites, elites_file(result, space, suite.name, settings));
      io::write_file_atomic(out_dir / "reports" / (suite.name + ".race.jsonl"), race_log_file(result, space));
      out << "experiments used: " << result.state.experiments_used << " / " << settings.max_experiments << "\n";
      for (std::size_t i = 0; i < result.elites.size(); ++i)
        out << i + 1 << ". " << to_cma_config(space, result.elites[i].candidate).to_string()
            << " mean_loss=" << format_real(result.elites[i].mean_loss) << "\n";
      out << "elites written to " << elites.string() << "\n";
    } else if (*validate_cmd) {
      const SuiteSpec suite = val_suite.resolve();
      auto contenders = read_elites(elites_path);
      if (contenders.empty()) throw Error(ErrorKind::InvalidConfig, "elites file holds no configurations");
      if (static_cast<std::size_t>(top) < contenders.size()) contenders.resize(static_cast<std::size_t>(top));
      vopts.n_blocks = val_suite.blocks;
      vopts.seed = g.seed;
      vopts.workers = g.workers;
      vopts.vote = pooled ? VoteMode::Pooled : VoteMode::OverRuns;
      const ValidationReport report = validate(contenders, suite, vopts);
      const std::string target = slot.empty() ? slot_for_suite(suite.name) : slot;
      ConfigRegistry registry = base_registry.empty() ? ConfigRegistry::defaults() : load_registry(base_registry);
      registry.set(target, report.winner().config);
      const fs::path reg_path = out_dir / "registries" / (suite.name + ".registry");
      io::write_file_atomic(reg_path, serialize_registry(registry));
      io::write_file_atomic(out_dir / "reports" / (suite.name + ".validation.jsonl"), validation_file(report));
      for (std::size_t r = 0; r < report.per_run_winners.size(); ++r)
        out << "run " << r + 1 << ": " << report.contenders[static_cast<std::size_t>(report.per_run_winners[r])].name
            << "\n";
      out << "winner: " << report.winner().name << " (" << report.winner().config.to_string() << ")"
          << (report.tie ? " [tie broken]" : "") << "\n";
      out << "registry written to " << reg_path.string() << "\n";
    } else if (*run_cmd) {
      const SuiteSpec suite = run_suite.resolve();
      const ConfigRegistry registry = run_registry.empty() ? ConfigRegistry::defaults() : load_registry(run_registry);
      if (algorithm != "MetaCMA" && algorithm != "default" && !is_slot(algorithm) && !is_baseline(algorithm))
        throw Error(ErrorKind::UnknownName, "unknown algorithm '" + algorithm + "'");
      RunStore store(store_path.empty() ? out_dir / "runs" / "store.jsonl" : fs::path(store_path));

      struct Task {
        InstanceSpec instance;
        std::uint64_t seed;
      };
      std::vector<Task> pending;
      const auto blocks = generate_suite(suite, run_suite.blocks, g.seed);
      std::size_t index = 0;
      for (const auto& b : blocks) {
        for (const auto& instance : b.instances) {
          for (int k = 0; k < replicates; ++k) {
            const std::uint64_t seed = derive_seed(g.seed, 0x5eed, index, k);
            if (!store.contains({algorithm, suite.name, instance_hash(instance), seed})) pending.push_back({instance, seed});
          }
          ++index;
        }
      }
      if (limit >= 0 && static_cast<std::size_t>(limit) < pending.size()) pending.resize(static_cast<std::size_t>(limit));

      // Batches keep appends in task order whatever the worker count.
      const std::size_t batch = std::max<std::size_t>(g.workers, 1);
      std::size_t written = 0;
      for (std::size_t start = 0; start < pending.size(); start += batch) {
        const std::size_t n = std::min(batch, pending.size() - start);
        std::vector<RunRecord> results(n);
        parallel_for(n, g.workers, [&](std::size_t i) {
          results[i] = run_algorithm(algorithm, pending[start + i].instance, registry, pending[start + i].seed);
          results[i].suite = suite.name;
        });
        for (const auto& r : results) written += store.append(r) ? 1 : 0;
      }
      out << "appended " << written << " record(s) to " << store.path().string() << " (" << store.records().size()
          << " total)\n";
    } else if (*compare_cmd) {
      RunStore store(compare_store.empty() ? out_dir / "runs" / "store.jsonl" : fs::path(compare_store));
      const ScoreMatrix matrix = score_matrix(store.records(), checkpoints);
      const auto curves = convergence_curves(store.records(), checkpoints);
      io::write_file_atomic(out_dir / "reports" / "score_matrix.tsv", write_score_matrix(matrix));
      io::write_file_atomic(out_dir / "reports" / "curves.tsv", write_curves(curves));
      for (const auto& a : matrix.algorithms) out << a << "\t" << format_rank_label(matrix, a) << "\n";
    } else if (*report_cmd) {
      const ScoreMatrix matrix = parse_score_matrix(read_text(out_dir / "reports" / "score_matrix.tsv"));
      const auto curves = parse_curves(read_text(out_dir / "reports" / "curves.tsv"));
      out << render_score_table(matrix, static_cast<std::size_t>(std::max(report_rows, 1))) << "\n"
          << render_curves(curves);
    }
  } catch (const Error& e) {
    err << "cmawizard: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "cmawizard: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace cmawiz
