#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

using nlohmann::json;

namespace {

// Runs the CLI under test (path in PRM_FORGE_CLI) with shell-quoted
// arguments, capturing exit code, stdout, and stderr.
struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

std::string temp_path(const std::string& tag) {
  static int counter = 0;
  return "/tmp/prmforge_cli_test_" + std::to_string(getpid()) + "_" + tag + "_" +
         std::to_string(counter++);
}

RunResult run_cli(const std::string& args) {
  const char* cli = std::getenv("PRM_FORGE_CLI");
  REQUIRE_MESSAGE(cli != nullptr, "PRM_FORGE_CLI must point at the binary under test");
  const std::string out_path = temp_path("stdout");
  const std::string err_path = temp_path("stderr");
  const std::string command =
      std::string(cli) + " " + args + " >" + out_path + " 2>" + err_path;
  const int raw = std::system(command.c_str());
  RunResult result;
  result.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  std::remove(out_path.c_str());
  std::remove(err_path.c_str());
  return result;
}

std::string write_file(const std::string& tag, const std::string& content) {
  const std::string path = temp_path(tag);
  std::ofstream out(path);
  out << content;
  return path;
}

std::string problems_jsonl(int count) {
  std::ostringstream text;
  for (int i = 0; i < count; ++i)
    text << R"({"id": "p)" << i << R"(", "question": "Q)" << i
         << R"(", "gold_answer": "42", "kind": "fill_in_blank"})" << "\n";
  return text.str();
}

// Candidate sets where candidate 0 is wrong and candidate 1 is right.
std::string candidates_jsonl(int count) {
  std::ostringstream text;
  for (int i = 0; i < count; ++i)
    text << R"({"problem_id": "p)" << i
         << R"(", "candidates": ["<step>s</step><answer>41</answer>", "<step>s</step><answer>42</answer>"]})"
         << "\n";
  return text.str();
}

int count_lines(const std::string& text) {
  int lines = 0;
  for (char c : text)
    if (c == '\n') ++lines;
  return lines;
}

}  // namespace

TEST_CASE("--help succeeds and names the subcommands") {
  const RunResult r = run_cli("--help");
  CHECK(r.exit_code == 0);
  CHECK(r.out.find("generate") != std::string::npos);
  CHECK(r.out.find("rerank") != std::string::npos);
  CHECK(r.out.find("stats") != std::string::npos);
}

TEST_CASE("generate --help lists every flag with its default") {
  const RunResult r = run_cli("generate --help");
  CHECK(r.exit_code == 0);
  for (const char* flag : {"--problems", "--out", "--backend", "--mock-script",
                           "--max-rollouts", "--max-search-steps", "--k", "--c-puct",
                           "--seed", "--workers", "--config"})
    CHECK_MESSAGE(r.out.find(flag) != std::string::npos, flag);
  // The budget and exploration defaults are visible.
  CHECK(r.out.find("1000") != std::string::npos);
  CHECK(r.out.find("200") != std::string::npos);
  CHECK(r.out.find("0.125") != std::string::npos);
}

TEST_CASE("rerank --help lists its flags") {
  const RunResult r = run_cli("rerank --help");
  CHECK(r.exit_code == 0);
  for (const char* flag : {"--problems", "--candidates", "--n", "--methods", "--seed"})
    CHECK_MESSAGE(r.out.find(flag) != std::string::npos, flag);
}

TEST_CASE("generate writes annotations consistent with its summary") {
  const std::string problems = write_file("problems", problems_jsonl(10));
  const std::string out = temp_path("annotations");
  const std::string script =
      write_file("script", R"({"default": {"error_step": 3, "solution_len": 4}})");
  const RunResult r2 = run_cli("generate --problems " + problems + " --out " + out +
                               " --mock-script " + script + " --seed 3");
  REQUIRE(r2.exit_code == 0);
  const json summary = json::parse(r2.out);
  CHECK(summary.at("problems") == 10);
  CHECK(summary.at("emitted") == count_lines(slurp(out)));
  CHECK(summary.at("annotations") == summary.at("emitted"));
  std::remove(problems.c_str());
  std::remove(out.c_str());
  std::remove(script.c_str());
}

TEST_CASE("an all-correct policy skips every problem") {
  const std::string problems = write_file("problems", problems_jsonl(10));
  const std::string out = temp_path("annotations");
  const RunResult r =
      run_cli("generate --problems " + problems + " --out " + out + " --mock-q 1.0 --seed 1");
  REQUIRE(r.exit_code == 0);
  const json summary = json::parse(r.out);
  CHECK(summary.at("skipped") == 10);
  CHECK(summary.at("annotations") == 0);
  CHECK(slurp(out).empty());
  std::remove(problems.c_str());
  std::remove(out.c_str());
}

TEST_CASE("per-problem rollout budgets are respected") {
  const std::string problems = write_file("problems", problems_jsonl(5));
  const std::string out = temp_path("annotations");
  const RunResult r = run_cli("generate --problems " + problems + " --out " + out +
                              " --max-rollouts 8 --seed 2");
  REQUIRE(r.exit_code == 0);
  // Telemetry reports per-problem budget use on problem_done events.
  std::istringstream err(r.err);
  std::string line;
  int done_events = 0;
  while (std::getline(err, line)) {
    if (line.find("problem_done") == std::string::npos) continue;
    ++done_events;
    const json event = json::parse(line);
    CHECK(event.at("used_rollouts").get<int>() <= 8);
  }
  CHECK(done_events == 5);
  std::remove(problems.c_str());
  std::remove(out.c_str());
}

TEST_CASE("generate without --problems is a data error") {
  const RunResult r = run_cli("generate --out /tmp/nowhere.jsonl");
  CHECK(r.exit_code == 2);
}

TEST_CASE("a missing problems file is a data error") {
  const RunResult r =
      run_cli("generate --problems /nonexistent/p.jsonl --out /tmp/nowhere.jsonl");
  CHECK(r.exit_code == 2);
}

TEST_CASE("rerank evaluates all seven methods by default") {
  const std::string problems = write_file("problems", problems_jsonl(6));
  const std::string candidates = write_file("candidates", candidates_jsonl(6));
  const RunResult r = run_cli("rerank --problems " + problems + " --candidates " + candidates +
                              " --n 2 --seed 4");
  REQUIRE(r.exit_code == 0);
  const json report = json::parse(r.out);
  CHECK(report.at("accuracy").size() == 7);
  CHECK(report.at("n") == 2);
  // Candidate 1 is always correct, so every score-based method finds it.
  CHECK(report.at("accuracy").at("MeanOdds") == 1.0);
  std::remove(problems.c_str());
  std::remove(candidates.c_str());
}

TEST_CASE("eval-agg is an alias of rerank") {
  const std::string problems = write_file("problems", problems_jsonl(3));
  const std::string candidates = write_file("candidates", candidates_jsonl(3));
  const RunResult r = run_cli("eval-agg --problems " + problems + " --candidates " +
                              candidates + " --n 2 --methods Min,Max --seed 4");
  REQUIRE(r.exit_code == 0);
  const json report = json::parse(r.out);
  CHECK(report.at("accuracy").size() == 2);
  std::remove(problems.c_str());
  std::remove(candidates.c_str());
}

TEST_CASE("an n sweep produces one report per n") {
  const std::string problems = write_file("problems", problems_jsonl(4));
  const std::string candidates = write_file("candidates", candidates_jsonl(4));
  const RunResult r = run_cli("rerank --problems " + problems + " --candidates " + candidates +
                              " --n 1,2 --methods Average --seed 4");
  REQUIRE(r.exit_code == 0);
  const json reports = json::parse(r.out);
  REQUIRE(reports.is_array());
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].at("n") == 1);
  CHECK(reports[1].at("n") == 2);
  // With the correct candidate at index 1, Average at n=1 sees only the
  // wrong candidate; at n=2 it finds the right one.
  CHECK(reports[0].at("accuracy").at("Average") == 0.0);
  CHECK(reports[1].at("accuracy").at("Average") == 1.0);
  std::remove(problems.c_str());
  std::remove(candidates.c_str());
}

TEST_CASE("unknown aggregation methods are usage errors") {
  const std::string problems = write_file("problems", problems_jsonl(2));
  const std::string candidates = write_file("candidates", candidates_jsonl(2));
  const RunResult r = run_cli("rerank --problems " + problems + " --candidates " + candidates +
                              " --n 2 --methods Geometric");
  CHECK(r.exit_code == 64);
  std::remove(problems.c_str());
  std::remove(candidates.c_str());
}

TEST_CASE("a problem with too few candidates is a data error") {
  const std::string problems = write_file("problems", problems_jsonl(2));
  const std::string candidates = write_file("candidates", candidates_jsonl(2));
  const RunResult r = run_cli("rerank --problems " + problems + " --candidates " + candidates +
                              " --n 4");
  CHECK(r.exit_code == 2);
  std::remove(problems.c_str());
  std::remove(candidates.c_str());
}

TEST_CASE("stats reports on a valid annotations file") {
  const std::string problems = write_file("problems", problems_jsonl(3));
  const std::string script =
      write_file("script", R"({"default": {"error_step": 3, "solution_len": 4}})");
  const std::string out = temp_path("annotations");
  REQUIRE(run_cli("generate --problems " + problems + " --out " + out + " --mock-script " +
                  script + " --seed 5")
              .exit_code == 0);

  const RunResult r = run_cli("stats " + out);
  REQUIRE(r.exit_code == 0);
  const json report = json::parse(r.out);
  CHECK(report.at("records").get<int>() > 0);
  CHECK(report.at("problems") == 3);
  std::remove(problems.c_str());
  std::remove(script.c_str());
  std::remove(out.c_str());
}

TEST_CASE("stats on an empty file reports zero counts") {
  const std::string empty = write_file("empty", "");
  const RunResult r = run_cli("stats " + empty);
  REQUIRE(r.exit_code == 0);
  const json report = json::parse(r.out);
  CHECK(report.at("records") == 0);
  std::remove(empty.c_str());
}

TEST_CASE("stats on a missing file is a data error") {
  CHECK(run_cli("stats /nonexistent/annotations.jsonl").exit_code == 2);
}

TEST_CASE("flags beat the config file, which beats defaults") {
  const std::string problems = write_file("problems", problems_jsonl(2));
  const std::string candidates = write_file("candidates", candidates_jsonl(2));
  const std::string config = write_file(
      "config", R"({"seed": 11, "n_values": [2], "methods": ["Average"]})");

  // Config file supplies the seed.
  const RunResult from_file = run_cli("rerank --config " + config + " --problems " + problems +
                                      " --candidates " + candidates);
  REQUIRE(from_file.exit_code == 0);
  CHECK(json::parse(from_file.out).at("seed") == 11);

  // A flag overrides it.
  const RunResult from_flag = run_cli("rerank --config " + config + " --problems " + problems +
                                      " --candidates " + candidates + " --seed 7");
  REQUIRE(from_flag.exit_code == 0);
  CHECK(json::parse(from_flag.out).at("seed") == 7);

  std::remove(problems.c_str());
  std::remove(candidates.c_str());
  std::remove(config.c_str());
}

TEST_CASE("unknown flags are usage errors") {
  CHECK(run_cli("generate --no-such-flag").exit_code == 64);
  CHECK(run_cli("frobnicate").exit_code == 64);
}

TEST_CASE("serial generate runs are byte-identical across invocations") {
  const std::string problems = write_file("problems", problems_jsonl(5));
  const std::string script =
      write_file("script", R"({"default": {"error_step": 2, "solution_len": 3}})");
  const std::string out_a = temp_path("annotations_a");
  const std::string out_b = temp_path("annotations_b");
  REQUIRE(run_cli("generate --problems " + problems + " --out " + out_a + " --mock-script " +
                  script + " --seed 9")
              .exit_code == 0);
  REQUIRE(run_cli("generate --problems " + problems + " --out " + out_b + " --mock-script " +
                  script + " --seed 9")
              .exit_code == 0);
  CHECK(slurp(out_a) == slurp(out_b));
  CHECK_FALSE(slurp(out_a).empty());
  std::remove(problems.c_str());
  std::remove(script.c_str());
  std::remove(out_a.c_str());
  std::remove(out_b.c_str());
}

TEST_CASE("--hard-labels binarizes the emitted labels") {
  const std::string problems = write_file("problems", problems_jsonl(3));
  const std::string script =
      write_file("script", R"({"default": {"error_step": 3, "solution_len": 4}})");
  const std::string out = temp_path("annotations");
  REQUIRE(run_cli("generate --problems " + problems + " --out " + out + " --mock-script " +
                  script + " --seed 5 --hard-labels")
              .exit_code == 0);
  std::istringstream lines(slurp(out));
  std::string line;
  int records = 0;
  while (std::getline(lines, line)) {
    ++records;
    const json record = json::parse(line);
    const double label = record.at("label").get<double>();
    CHECK((label == 0.0 || label == 1.0));
  }
  CHECK(records > 0);
  std::remove(problems.c_str());
  std::remove(script.c_str());
  std::remove(out.c_str());
}
