#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "prmforge/annotator.hpp"
#include "prmforge/config.hpp"
#include "prmforge/cot.hpp"
#include "prmforge/dataset.hpp"
#include "prmforge/error.hpp"
#include "prmforge/http_backend.hpp"
#include "prmforge/io.hpp"
#include "prmforge/mock_backend.hpp"
#include "prmforge/remote_scorer.hpp"
#include "prmforge/rerank.hpp"
#include "prmforge/scoring.hpp"
#include "prmforge/telemetry.hpp"

namespace {

using nlohmann::json;
using namespace prmforge;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitData = 2;   // unreadable or malformed input
constexpr int kExitAuth = 3;   // endpoint rejected credentials
constexpr int kExitUsage = 64;  // bad flags or option values

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const AuthError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitAuth;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

std::unique_ptr<PolicyBackend> make_backend(const RunConfig& cfg) {
  if (cfg.backend == BackendKind::Mock) {
    MockScript script = cfg.mock_script_path.empty()
                            ? MockScript::parametric(cfg.mock_q)
                            : MockScript::load_file(cfg.mock_script_path);
    return std::make_unique<MockBackend>(std::move(script), cfg.seed);
  }
  HttpBackendConfig hc;
  hc.http.base_url = cfg.api_base;
  hc.http.api_key = cfg.api_key;
  hc.model = cfg.model;
  hc.send_top_k = cfg.send_top_k;
  return std::make_unique<HttpPolicyBackend>(std::move(hc));
}

std::unique_ptr<scoring::StepScorer> make_scorer(const RunConfig& cfg) {
  const std::string& name = cfg.scorer;
  if (name == "oracle") return std::make_unique<scoring::OracleScorer>();
  if (name == "random") return std::make_unique<scoring::SeededRandomScorer>(cfg.seed);
  if (name.rfind("constant:", 0) == 0) {
    const std::string value = name.substr(9);
    char* end = nullptr;
    const double p = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
      throw ValidationError("bad constant scorer probability: '" + value + "'");
    return std::make_unique<scoring::ConstantScorer>(p);
  }
  if (name.rfind("http://", 0) == 0 || name.rfind("https://", 0) == 0) {
    net::HttpConfig hc;
    hc.base_url = name;
    hc.api_key = cfg.api_key;
    return std::make_unique<scoring::RemoteScorer>(std::move(hc));
  }
  throw ValidationError("unknown scorer: '" + name +
                        "' (expected oracle, random, constant:<p>, or a scorer URL)");
}

// ---------------------------------------------------------------------------
// generate

int cmd_generate(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.problems_path.empty()) throw IoError("no problems file configured");
  if (cfg.out_path.empty()) throw IoError("no annotation output path configured");

  const std::vector<Problem> problems = io::load_problems_file(cfg.problems_path);
  const auto backend = make_backend(cfg);

  annotate::AnnotatorConfig acfg;
  acfg.c_puct = cfg.c_puct;
  acfg.k_rollouts = cfg.k_rollouts;
  acfg.sampling = cfg.sampling;
  acfg.max_search_steps = cfg.max_search_steps;
  acfg.max_rollouts = cfg.max_rollouts;

  StreamTelemetry telemetry(std::cerr);
  std::vector<annotate::AnnotateResult> results(problems.size());

  std::atomic<size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  const auto worker = [&] {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= problems.size()) return;
      try {
        SearchBudget budget(cfg.max_search_steps, cfg.max_rollouts);
        results[i] = annotate::annotate_problem(problems[i], *backend, acfg, budget, &telemetry);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  if (cfg.workers <= 1 || problems.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const size_t n_threads = std::min<size_t>(cfg.workers, problems.size());
    pool.reserve(n_threads);
    for (size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<dataset::StepAnnotation> annotations;
  std::int64_t skipped = 0;
  std::int64_t rollouts_used = 0;
  std::int64_t search_steps_used = 0;
  for (const auto& r : results) {
    annotations.insert(annotations.end(), r.annotations.begin(), r.annotations.end());
    if (r.skipped) ++skipped;
    rollouts_used += r.budget.used_rollouts;
    search_steps_used += r.budget.used_search_steps;
  }

  const dataset::ProblemIndex index(problems);
  std::ofstream out(cfg.out_path);
  if (!out) throw IoError("cannot open '" + cfg.out_path + "' for writing");
  const size_t emitted = dataset::emit(
      annotations, cfg.hard_labels ? dataset::LabelMode::Hard : dataset::LabelMode::Soft, out,
      index);
  out.close();
  if (!out) throw IoError("failed to finalize '" + cfg.out_path + "'");

  json summary;
  summary["problems"] = problems.size();
  summary["processed"] = static_cast<std::int64_t>(problems.size()) - skipped;
  summary["skipped"] = skipped;
  summary["annotations"] = annotations.size();
  summary["emitted"] = emitted;
  summary["rollouts_used"] = rollouts_used;
  summary["search_steps_used"] = search_steps_used;
  summary["backend_calls"] = backend->ledger().calls();
  summary["backend_samples"] = backend->ledger().samples();
  std::cout << summary.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// rerank / eval-agg

int cmd_rerank(const RunConfig& cfg) {
  validate(cfg);
  if (cfg.problems_path.empty()) throw IoError("no problems file configured");
  if (cfg.candidates_path.empty()) throw IoError("no candidates file configured");

  const std::vector<Problem> problems = io::load_problems_file(cfg.problems_path);
  const std::vector<io::CandidateSet> sets = io::load_candidates_file(cfg.candidates_path);

  std::vector<rerank::AggregationMethod> methods;
  if (cfg.method_names.empty()) {
    const auto all = rerank::all_methods();
    methods.assign(all.begin(), all.end());
  } else {
    for (const auto& name : cfg.method_names)
      methods.push_back(rerank::method_from_string(name));
  }

  // Parse candidate texts up front; a malformed candidate keeps its index
  // slot as a placeholder that can never match a gold answer.
  std::map<std::string, std::vector<Solution>> table;
  for (const auto& set : sets) {
    auto& parsed = table[set.problem_id];
    parsed.reserve(set.candidates.size());
    for (const auto& raw : set.candidates) {
      try {
        parsed.push_back(cot::parse_solution(raw));
      } catch (const ParseError&) {
        parsed.push_back(Solution{{"(unparseable candidate)"}, "(unparseable)"});
      }
    }
  }

  int max_n = 1;
  for (int n : cfg.n_values) max_n = std::max(max_n, n);
  for (const auto& problem : problems) {
    const auto it = table.find(problem.id);
    if (it == table.end())
      throw ParseError("no candidates for problem '" + problem.id + "'");
    if (static_cast<int>(it->second.size()) < max_n)
      throw ParseError("problem '" + problem.id + "' has " +
                       std::to_string(it->second.size()) + " candidates, need " +
                       std::to_string(max_n));
  }

  const auto scorer = make_scorer(cfg);
  StreamTelemetry telemetry(std::cerr);
  const auto candidates_for = [&table](const Problem& p) -> std::span<const Solution> {
    return table.at(p.id);
  };

  json reports = json::array();
  for (int n : cfg.n_values) {
    const rerank::EvalReport report = rerank::evaluate_accuracy(
        problems, candidates_for, *scorer, methods, n, cfg.seed, &telemetry);
    reports.push_back(json::parse(report.to_json_text()));
  }

  const std::string text =
      (reports.size() == 1 ? reports.front() : reports).dump(2) + "\n";
  if (cfg.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(cfg.out_path);
    if (!out) throw IoError("cannot open '" + cfg.out_path + "' for writing");
    out << text;
    if (!out) throw IoError("failed to write '" + cfg.out_path + "'");
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// stats

int cmd_stats(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  const dataset::StatsReport report = dataset::stats(in);
  std::cout << report.to_json_text() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// flag plumbing: flags > config file > environment > defaults

struct FlagSet {
  RunConfig bound;  // flag targets, initialized to defaults so --help shows them
  std::string config_path;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> overrides;

  void bind(CLI::Option* opt, std::function<void(RunConfig&)> apply) {
    overrides.emplace_back(opt, std::move(apply));
  }

  // Defaults → env → config file → explicitly passed flags.
  RunConfig resolve() const {
    RunConfig cfg = overlay_env(RunConfig{});
    if (!config_path.empty()) cfg = overlay_file(std::move(cfg), config_path);
    for (const auto& [opt, apply] : overrides)
      if (opt->count() > 0) apply(cfg);
    return cfg;
  }
};

void add_common_flags(CLI::App* cmd, FlagSet& f) {
  cmd->add_option("--config", f.config_path, "JSON config file (lower precedence than flags)");
  f.bind(cmd->add_option("--problems", f.bound.problems_path, "Problems JSONL path"),
         [&f](RunConfig& c) { c.problems_path = f.bound.problems_path; });
  f.bind(cmd->add_option("--out", f.bound.out_path, "Output path"),
         [&f](RunConfig& c) { c.out_path = f.bound.out_path; });
  f.bind(cmd->add_option("--seed", f.bound.seed, "Root seed for all derived randomness")
             ->capture_default_str(),
         [&f](RunConfig& c) { c.seed = f.bound.seed; });
}

void add_backend_flags(CLI::App* cmd, FlagSet& f) {
  f.bind(cmd->add_option("--backend", f.bound.backend, "Policy backend: mock or http")
             ->transform(CLI::CheckedTransformer(
                 std::map<std::string, BackendKind>{{"mock", BackendKind::Mock},
                                                    {"http", BackendKind::Http}}))
             ->default_str("mock"),
         [&f](RunConfig& c) { c.backend = f.bound.backend; });
  f.bind(cmd->add_option("--mock-script", f.bound.mock_script_path,
                         "Mock policy script JSON (omit for the parametric mock)"),
         [&f](RunConfig& c) { c.mock_script_path = f.bound.mock_script_path; });
  f.bind(cmd->add_option("--mock-q", f.bound.mock_q,
                         "Parametric mock per-rollout success probability")
             ->capture_default_str(),
         [&f](RunConfig& c) { c.mock_q = f.bound.mock_q; });
}

int dispatch(int argc, char** argv) {
  CLI::App app{"Step-level process supervision: MCTS annotation and best-of-N reranking"};
  app.require_subcommand(1);

  // -- generate
  auto* gen = app.add_subcommand(
      "generate", "Annotate problems with Monte Carlo step-correctness labels");
  FlagSet gf;
  add_common_flags(gen, gf);
  add_backend_flags(gen, gf);
  gf.bind(gen->add_option("--max-rollouts", gf.bound.max_rollouts,
                          "Per-problem rollout cap")
              ->capture_default_str(),
          [&gf](RunConfig& c) { c.max_rollouts = gf.bound.max_rollouts; });
  gf.bind(gen->add_option("--max-search-steps", gf.bound.max_search_steps,
                          "Per-problem search-step cap")
              ->capture_default_str(),
          [&gf](RunConfig& c) { c.max_search_steps = gf.bound.max_search_steps; });
  gf.bind(gen->add_option("--k", gf.bound.k_rollouts, "Rollouts per new prefix")
              ->capture_default_str(),
          [&gf](RunConfig& c) { c.k_rollouts = gf.bound.k_rollouts; });
  gf.bind(gen->add_option("--c-puct", gf.bound.c_puct, "Exploration coefficient")
              ->capture_default_str(),
          [&gf](RunConfig& c) { c.c_puct = gf.bound.c_puct; });
  gf.bind(gen->add_option("--workers", gf.bound.workers, "Concurrent annotation workers")
              ->capture_default_str(),
          [&gf](RunConfig& c) { c.workers = gf.bound.workers; });
  gf.bind(gen->add_flag("--hard-labels", gf.bound.hard_labels,
                        "Emit binarized labels (1 iff MC > 0) instead of soft labels"),
          [&gf](RunConfig& c) { c.hard_labels = gf.bound.hard_labels; });

  // -- rerank (eval-agg is the same command with an explicit method list)
  auto* rr = app.add_subcommand("rerank",
                                "Best-of-N evaluation: score, aggregate, select, verify");
  rr->alias("eval-agg");
  FlagSet rf;
  add_common_flags(rr, rf);
  rf.bind(rr->add_option("--candidates", rf.bound.candidates_path,
                         "Candidate solutions JSONL path"),
          [&rf](RunConfig& c) { c.candidates_path = rf.bound.candidates_path; });
  rf.bind(rr->add_option("--n", rf.bound.n_values,
                         "Candidates per problem; repeat or comma-separate for a sweep")
              ->delimiter(',')
              ->capture_default_str(),
          [&rf](RunConfig& c) { c.n_values = rf.bound.n_values; });
  rf.bind(rr->add_option("--methods", rf.bound.method_names,
                         "Aggregation methods (default: all seven)")
              ->delimiter(','),
          [&rf](RunConfig& c) { c.method_names = rf.bound.method_names; });
  rf.bind(rr->add_option("--scorer", rf.bound.scorer,
                         "Step scorer: oracle, random, constant:<p>, or a scorer URL")
              ->capture_default_str(),
          [&rf](RunConfig& c) { c.scorer = rf.bound.scorer; });

  // -- stats
  auto* st = app.add_subcommand("stats", "Corpus statistics for an annotation JSONL file");
  std::string stats_path;
  st->add_option("path", stats_path, "Annotation JSONL path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);  // --help and friends
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  if (gen->parsed()) return run_guarded([&] { return cmd_generate(gf.resolve()); });
  if (rr->parsed()) return run_guarded([&] { return cmd_rerank(rf.resolve()); });
  if (st->parsed()) return run_guarded([&] { return cmd_stats(stats_path); });
  return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) { return dispatch(argc, argv); }
