#include "prmforge/dataset.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

#include "prmforge/error.hpp"
#include "prmforge/io.hpp"

namespace prmforge::dataset {

using nlohmann::json;

void validate(const StepAnnotation& a) {
  if (a.problem_id.empty()) throw ValidationError("annotation problem_id must be non-empty");
  if (a.step.empty()) throw ValidationError("annotation step must be non-empty");
  if (a.n_rollouts < 1) throw ValidationError("annotation needs at least one rollout");
  if (a.n_correct < 0 || a.n_correct > a.n_rollouts)
    throw ValidationError("annotation n_correct out of range");
  if (a.soft_label != static_cast<double>(a.n_correct) / a.n_rollouts)
    throw ValidationError("annotation soft_label must equal n_correct / n_rollouts");
}

std::string MarkedSequence::to_text() const {
  std::string out = question;
  for (const auto& [step, marker] : segments) {
    out += ' ';
    out += step;
    out += ' ';
    out += marker;
  }
  return out;
}

MarkedSequence interleave_markers(const Problem& problem, const Solution& solution) {
  if (solution.steps.empty())
    throw ValidationError("interleave_markers requires at least one step");
  MarkedSequence seq;
  seq.question = problem.question;
  seq.segments.reserve(solution.steps.size());
  for (const auto& step : solution.steps)
    seq.segments.emplace_back(step, std::string(kStepMarker));
  return seq;
}

int hard_label(double mc) {
  if (!(mc >= 0.0 && mc <= 1.0)) throw ValidationError("MC value must lie in [0, 1]");
  return mc > 0.0 ? 1 : 0;
}

ProblemIndex::ProblemIndex(std::span<const Problem> problems) {
  for (const auto& p : problems) add(p);
}

void ProblemIndex::add(Problem problem) {
  validate(problem);
  auto [it, inserted] = by_id_.emplace(problem.id, std::move(problem));
  if (!inserted) throw ValidationError("duplicate problem id: '" + it->first + "'");
}

const Problem* ProblemIndex::find(const std::string& id) const {
  auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &it->second;
}

size_t emit(std::span<const StepAnnotation> annotations, LabelMode mode, std::ostream& sink,
            const ProblemIndex& problems) {
  size_t written = 0;
  for (const auto& a : annotations) {
    validate(a);
    const Problem* problem = problems.find(a.problem_id);
    if (problem == nullptr)
      throw ValidationError("annotation references unknown problem '" + a.problem_id + "'");

    json record;
    record["problem_id"] = a.problem_id;
    record["question"] = problem->question;
    record["images"] = io::images_to_json(problem->images);
    record["prefix"] = a.prefix;
    record["step"] = a.step;
    if (mode == LabelMode::Soft)
      record["label"] = a.soft_label;
    else
      record["label"] = hard_label(a.soft_label);
    record["n_rollouts"] = a.n_rollouts;
    record["n_correct"] = a.n_correct;

    sink << record.dump() << '\n';
    if (!sink.good())
      throw IoError("annotation sink failed after " + std::to_string(written) + " of " +
                    std::to_string(annotations.size()) + " records");
    ++written;
  }
  return written;
}

std::vector<StepAnnotation> load_annotations(std::istream& source) {
  std::vector<StepAnnotation> out;
  std::string line;
  int line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded() || !record.is_object())
      throw ParseError("line " + std::to_string(line_no) + ": invalid JSON");
    try {
      StepAnnotation a;
      a.problem_id = record.at("problem_id").get<std::string>();
      a.prefix = record.at("prefix").get<std::vector<std::string>>();
      a.step = record.at("step").get<std::string>();
      a.n_rollouts = record.at("n_rollouts").get<int>();
      a.n_correct = record.at("n_correct").get<int>();
      if (a.n_rollouts < 1)
        throw ValidationError("n_rollouts must be positive");
      a.soft_label = static_cast<double>(a.n_correct) / a.n_rollouts;
      validate(a);
      out.push_back(std::move(a));
    } catch (const json::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

StatsReport stats(std::istream& source) {
  StatsReport report;
  std::set<std::string> problem_ids;
  std::int64_t zero_count = 0;
  std::int64_t one_count = 0;

  std::string line;
  int line_no = 0;
  while (std::getline(source, line)) {
    ++line_no;
    if (line.empty()) continue;
    json record = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (record.is_discarded() || !record.is_object()) {
      report.malformed.emplace_back(line_no, "invalid JSON");
      continue;
    }
    try {
      const auto problem_id = record.at("problem_id").get<std::string>();
      const auto prefix = record.at("prefix").get<std::vector<std::string>>();
      record.at("step").get<std::string>();
      const double label = record.at("label").get<double>();
      if (!(label >= 0.0 && label <= 1.0)) {
        report.malformed.emplace_back(line_no, "label out of [0, 1]");
        continue;
      }
      ++report.records;
      problem_ids.insert(problem_id);
      ++report.steps_per_record[static_cast<int>(prefix.size()) + 1];
      auto bin = static_cast<size_t>(label * 10.0);
      if (bin >= report.label_histogram.size()) bin = report.label_histogram.size() - 1;
      ++report.label_histogram[bin];
      if (label == 0.0) ++zero_count;
      if (label == 1.0) ++one_count;
    } catch (const json::exception& e) {
      report.malformed.emplace_back(line_no, e.what());
    }
  }

  report.problems = static_cast<std::int64_t>(problem_ids.size());
  if (report.records > 0) {
    report.zero_label_fraction = static_cast<double>(zero_count) / report.records;
    report.one_label_fraction = static_cast<double>(one_count) / report.records;
  }
  return report;
}

std::string StatsReport::to_json_text() const {
  json j;
  j["records"] = records;
  j["problems"] = problems;
  json steps = json::object();
  for (const auto& [count, n] : steps_per_record) steps[std::to_string(count)] = n;
  j["steps_per_record"] = steps;
  j["label_histogram"] = label_histogram;
  j["zero_label_fraction"] = zero_label_fraction;
  j["one_label_fraction"] = one_label_fraction;
  json malformed_list = json::array();
  for (const auto& [line, message] : malformed)
    malformed_list.push_back(json{{"line", line}, {"error", message}});
  j["malformed"] = malformed_list;
  return j.dump(2);
}

}  // namespace prmforge::dataset
