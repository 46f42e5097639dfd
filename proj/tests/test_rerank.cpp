#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "prmforge/error.hpp"
#include "prmforge/rerank.hpp"
#include "prmforge/rng.hpp"
#include "prmforge/scoring.hpp"

using namespace prmforge;
using rerank::aggregate;
using rerank::AggregationMethod;
using rerank::Candidate;
using rerank::method_from_string;
using rerank::select_best;
using scoring::StepScoreVector;

namespace {

StepScoreVector vec(std::vector<double> probs) { return StepScoreVector(std::move(probs)); }

Problem fixture_problem(const std::string& id = "bon-prob") {
  Problem p;
  p.id = id;
  p.question = "Q";
  p.gold_answer = "42";
  p.kind = AnswerKind::FillInBlank;
  return p;
}

Solution candidate_solution(int steps, const std::string& answer) {
  Solution s;
  for (int i = 1; i <= steps; ++i) s.steps.push_back("step " + std::to_string(i));
  s.final_answer = answer;
  return s;
}

}  // namespace

TEST_CASE("method names round-trip") {
  for (AggregationMethod m : rerank::all_methods())
    CHECK(method_from_string(rerank::to_string(m)) == m);
  CHECK(method_from_string("sumlogpr") == AggregationMethod::SumLogPr);
  CHECK_THROWS_AS(method_from_string("geometric"), ValidationError);
  CHECK(rerank::all_methods().size() == 7);
  CHECK(rerank::score_methods().size() == 6);
  CHECK(rerank::all_methods().back() == AggregationMethod::Random);
}

TEST_CASE("the symmetric half-half vector") {
  const auto v = vec({0.5, 0.5});
  CHECK(aggregate(v, AggregationMethod::Average) == 0.5);
  CHECK(aggregate(v, AggregationMethod::SumLogOdds) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(aggregate(v, AggregationMethod::MeanOdds) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("the documented three-step example at high precision") {
  const auto v = vec({0.9, 0.8, 0.1});
  CHECK(aggregate(v, AggregationMethod::Min) == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(aggregate(v, AggregationMethod::Max) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(aggregate(v, AggregationMethod::Average) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(aggregate(v, AggregationMethod::SumLogPr) ==
        doctest::Approx(-2.631089).epsilon(1e-6));
  CHECK(aggregate(v, AggregationMethod::SumLogOdds) ==
        doctest::Approx(1.386294).epsilon(1e-6));
  CHECK(aggregate(v, AggregationMethod::MeanOdds) ==
        doctest::Approx(4.370370).epsilon(1e-6));
}

TEST_CASE("single-element vectors reduce to their closed forms") {
  for (double p : {0.2, 0.5, 0.8}) {
    const auto v = vec({p});
    CHECK(aggregate(v, AggregationMethod::Min) == p);
    CHECK(aggregate(v, AggregationMethod::Max) == p);
    CHECK(aggregate(v, AggregationMethod::Average) == p);
    CHECK(aggregate(v, AggregationMethod::SumLogPr) == doctest::Approx(std::log(p)));
    CHECK(aggregate(v, AggregationMethod::SumLogOdds) ==
          doctest::Approx(std::log(p / (1.0 - p))));
    CHECK(aggregate(v, AggregationMethod::MeanOdds) == doctest::Approx(p / (1.0 - p)));
  }
}

TEST_CASE("aggregate rejects misuse") {
  CHECK_THROWS_AS(aggregate(StepScoreVector(), AggregationMethod::Average), ValidationError);
  CHECK_THROWS_AS(aggregate(vec({0.5}), AggregationMethod::Random), ValidationError);
}

TEST_CASE("aggregation is permutation-invariant") {
  rng::Stream root(55);
  for (int trial = 0; trial < 100; ++trial) {
    rng::Stream s = root.derive(static_cast<std::uint64_t>(trial));
    std::vector<double> probs;
    const int n = 1 + static_cast<int>(s.next_below(10));
    for (int i = 0; i < n; ++i) probs.push_back(s.next_unit());
    std::vector<double> shuffled = probs;
    for (size_t i = shuffled.size(); i > 1; --i)
      std::swap(shuffled[i - 1], shuffled[s.next_below(i)]);

    for (AggregationMethod m : rerank::score_methods()) {
      CAPTURE(trial);
      CHECK(aggregate(vec(probs), m) == doctest::Approx(aggregate(vec(shuffled), m)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Min <= Average <= Max on every vector") {
  rng::Stream root(56);
  for (int trial = 0; trial < 200; ++trial) {
    rng::Stream s = root.derive(static_cast<std::uint64_t>(trial));
    std::vector<double> probs;
    const int n = 1 + static_cast<int>(s.next_below(16));
    for (int i = 0; i < n; ++i) probs.push_back(s.next_unit());
    const auto v = vec(probs);
    const double lo = aggregate(v, AggregationMethod::Min);
    const double mid = aggregate(v, AggregationMethod::Average);
    const double hi = aggregate(v, AggregationMethod::Max);
    CHECK(lo <= mid + 1e-15);
    CHECK(mid <= hi + 1e-15);
  }
}

TEST_CASE("raising one probability raises every smooth aggregate") {
  const std::vector<double> base{0.3, 0.6, 0.2};
  std::vector<double> bumped = base;
  bumped[1] = 0.7;
  for (AggregationMethod m : {AggregationMethod::Average, AggregationMethod::SumLogPr,
                              AggregationMethod::SumLogOdds, AggregationMethod::MeanOdds})
    CHECK(aggregate(vec(bumped), m) > aggregate(vec(base), m));
  CHECK(aggregate(vec(bumped), AggregationMethod::Min) >=
        aggregate(vec(base), AggregationMethod::Min));
  CHECK(aggregate(vec(bumped), AggregationMethod::Max) >=
        aggregate(vec(base), AggregationMethod::Max));
}

TEST_CASE("all aggregates stay finite on boundary inputs") {
  const auto v = vec({0.0, 1.0, 0.5});  // clamped at construction
  for (AggregationMethod m : rerank::score_methods()) CHECK(std::isfinite(aggregate(v, m)));
}

TEST_CASE("ties in select_best go to the lowest index") {
  const std::vector<Candidate> candidates{
      {candidate_solution(1, "a"), vec({0.2})},
      {candidate_solution(1, "b"), vec({0.9})},
      {candidate_solution(1, "c"), vec({0.9})},
  };
  CHECK(select_best(candidates, AggregationMethod::Average, 0) == 1);
}

TEST_CASE("a single candidate wins under every method") {
  const std::vector<Candidate> one{{candidate_solution(2, "a"), vec({0.4, 0.6})}};
  for (AggregationMethod m : rerank::all_methods()) CHECK(select_best(one, m, 123) == 0);
}

TEST_CASE("Random selection is seed-reproducible and seed-sensitive") {
  const std::vector<Candidate> candidates{
      {candidate_solution(1, "a"), vec({0.2})},
      {candidate_solution(1, "b"), vec({0.5})},
      {candidate_solution(1, "c"), vec({0.8})},
  };
  const size_t pick = select_best(candidates, AggregationMethod::Random, 9);
  CHECK(select_best(candidates, AggregationMethod::Random, 9) == pick);

  std::set<size_t> seen;
  for (std::uint64_t seed = 0; seed < 64; ++seed)
    seen.insert(select_best(candidates, AggregationMethod::Random, seed));
  CHECK(seen.size() == 3);  // every index reachable
}

TEST_CASE("select_best validates its inputs") {
  CHECK_THROWS_AS(select_best({}, AggregationMethod::Average, 0), ValidationError);
  const std::vector<Candidate> mismatched{{candidate_solution(2, "a"), vec({0.5})}};
  CHECK_THROWS_AS(select_best(mismatched, AggregationMethod::Average, 0), ValidationError);
}

TEST_CASE("select_best is invariant under monotone rescaling of scores") {
  // Squaring all probabilities is strictly increasing on (0,1); the
  // argmax under Average-of-squares equals the argmax under MeanOdds of
  // the squared vectors, etc. Here we check directly that uniformly
  // transforming candidates' score vectors by p -> p^2 preserves the
  // winner for single-step candidates (where aggregate is p itself).
  rng::Stream s(17);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Candidate> raw, squared;
    const int n = 2 + static_cast<int>(s.next_below(6));
    for (int i = 0; i < n; ++i) {
      const double p = 0.05 + 0.9 * s.next_unit();
      raw.push_back({candidate_solution(1, "x"), vec({p})});
      squared.push_back({candidate_solution(1, "x"), vec({p * p})});
    }
    for (AggregationMethod m : rerank::score_methods())
      CHECK(select_best(raw, m, 0) == select_best(squared, m, 0));
  }
}

namespace {

// Test scaffolding for evaluate_accuracy: per-problem candidate lists with
// the correct answers planted at known positions.
struct Fixture {
  std::vector<Problem> problems;
  std::map<std::string, std::vector<Solution>> candidates;

  std::function<std::span<const Solution>(const Problem&)> source() const {
    return [this](const Problem& p) -> std::span<const Solution> {
      return candidates.at(p.id);
    };
  }
};

Fixture make_fixture(int n_problems, int n_candidates, int n_correct, std::uint64_t seed) {
  Fixture f;
  rng::Stream root(seed);
  for (int i = 0; i < n_problems; ++i) {
    Problem p = fixture_problem("p" + std::to_string(i));
    rng::Stream s = root.derive(p.id);
    std::set<size_t> correct_at;
    while (correct_at.size() < static_cast<size_t>(n_correct))
      correct_at.insert(s.next_below(static_cast<std::uint64_t>(n_candidates)));
    std::vector<Solution> cands;
    for (int c = 0; c < n_candidates; ++c)
      cands.push_back(candidate_solution(3, correct_at.count(c) ? "42" : "41"));
    f.candidates[p.id] = std::move(cands);
    f.problems.push_back(std::move(p));
  }
  return f;
}

}  // namespace

TEST_CASE("the oracle scorer achieves perfect accuracy when a correct candidate exists") {
  const Fixture f = make_fixture(50, 8, 2, 1);
  scoring::OracleScorer oracle;
  const AggregationMethod methods[] = {AggregationMethod::MeanOdds};
  const auto report = rerank::evaluate_accuracy(f.problems, f.source(), oracle, methods, 8, 0);
  REQUIRE(report.per_method.size() == 1);
  CHECK(report.per_method[0].accuracy == 1.0);
  CHECK(report.problems == 50);
  CHECK(report.scoring_failures == 0);
}

TEST_CASE("at n = 1 every method matches the Random baseline exactly") {
  const Fixture f = make_fixture(40, 4, 2, 2);
  scoring::OracleScorer oracle;
  const auto report =
      rerank::evaluate_accuracy(f.problems, f.source(), oracle, rerank::all_methods(), 1, 5);
  REQUIRE(report.per_method.size() == 7);
  for (const auto& m : report.per_method)
    CHECK(m.accuracy == report.per_method[0].accuracy);
}

TEST_CASE("Random accuracy matches its analytic expectation") {
  // 4 of 16 candidates correct → expected accuracy 0.25; 500 problems.
  const Fixture f = make_fixture(500, 16, 4, 3);
  scoring::OracleScorer oracle;
  const AggregationMethod methods[] = {AggregationMethod::Random};
  const auto report = rerank::evaluate_accuracy(f.problems, f.source(), oracle, methods, 16, 11);
  CHECK(std::abs(report.per_method[0].accuracy - 0.25) <= 0.06);
}

TEST_CASE("nested candidate sets give nondecreasing oracle accuracy") {
  const Fixture f = make_fixture(100, 16, 2, 4);
  scoring::OracleScorer oracle;
  const AggregationMethod methods[] = {AggregationMethod::MeanOdds};
  double last = -1.0;
  for (int n : {2, 4, 8, 16}) {
    const auto report = rerank::evaluate_accuracy(f.problems, f.source(), oracle, methods, n, 0);
    CHECK(report.per_method[0].accuracy >= last);
    last = report.per_method[0].accuracy;
  }
}

TEST_CASE("a problem with too few candidates is rejected") {
  const Fixture f = make_fixture(3, 4, 1, 5);
  scoring::OracleScorer oracle;
  const AggregationMethod methods[] = {AggregationMethod::Average};
  CHECK_THROWS_AS(rerank::evaluate_accuracy(f.problems, f.source(), oracle, methods, 8, 0),
                  ValidationError);
}

namespace {

// Scorer that fails on candidates whose answer is "fail" and otherwise
// defers to the oracle rule.
struct FlakyScorer final : scoring::StepScorer {
  scoring::OracleScorer oracle;
  StepScoreVector score(const Problem& p, const Solution& s) override {
    if (s.final_answer == "fail") throw TransportError("scorer offline");
    return oracle.score(p, s);
  }
};

}  // namespace

TEST_CASE("scoring failures are logged and never win") {
  Fixture f;
  Problem p = fixture_problem("flaky");
  f.candidates["flaky"] = {candidate_solution(2, "fail"), candidate_solution(2, "42")};
  f.problems.push_back(p);
  FlakyScorer scorer;
  const AggregationMethod methods[] = {AggregationMethod::Average};
  const auto report = rerank::evaluate_accuracy(f.problems, f.source(), scorer, methods, 2, 0);
  CHECK(report.scoring_failures == 1);
  CHECK(report.per_method[0].accuracy == 1.0);  // the scorable candidate won
}

TEST_CASE("when every candidate fails, index zero is selected") {
  Fixture f;
  Problem p = fixture_problem("doomed");
  f.candidates["doomed"] = {candidate_solution(2, "fail"), candidate_solution(2, "fail")};
  f.problems.push_back(p);
  FlakyScorer scorer;
  const AggregationMethod methods[] = {AggregationMethod::Average};
  const auto report = rerank::evaluate_accuracy(f.problems, f.source(), scorer, methods, 2, 0);
  CHECK(report.scoring_failures == 2);
  CHECK(report.per_method[0].accuracy == 0.0);
}

TEST_CASE("the evaluation report serializes method accuracies") {
  const Fixture f = make_fixture(10, 4, 1, 6);
  scoring::OracleScorer oracle;
  const auto report =
      rerank::evaluate_accuracy(f.problems, f.source(), oracle, rerank::all_methods(), 4, 9);
  const std::string text = report.to_json_text();
  CHECK(text.find("\"accuracy\"") != std::string::npos);
  CHECK(text.find("\"MeanOdds\"") != std::string::npos);
  CHECK(text.find("\"Random\"") != std::string::npos);
  CHECK(text.find("\"n\": 4") != std::string::npos);
  CHECK(text.find("\"seed\": 9") != std::string::npos);
  CHECK(text.find("\"problems\": 10") != std::string::npos);
}
