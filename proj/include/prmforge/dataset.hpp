#pragma once

#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "prmforge/types.hpp"

namespace prmforge::dataset {

// One supervision record. `prefix` holds the steps before the labeled
// step; the soft label is the MC value of the path that ends at `step`,
// and equals n_correct / n_rollouts exactly.
struct StepAnnotation {
  std::string problem_id;
  std::vector<std::string> prefix;
  std::string step;
  double soft_label = 0.0;
  int n_rollouts = 0;
  int n_correct = 0;

  bool operator==(const StepAnnotation&) const = default;
};

void validate(const StepAnnotation& annotation);

inline constexpr std::string_view kStepMarker = "<prm>";

// PRM input form: the question followed by step/marker pairs, one marker
// after every step.
struct MarkedSequence {
  std::string question;
  std::vector<std::pair<std::string, std::string>> segments;

  std::string to_text() const;
};

MarkedSequence interleave_markers(const Problem& problem, const Solution& solution);

// 1 iff mc > 0. Throws ValidationError outside [0, 1].
int hard_label(double mc);

enum class LabelMode { Soft, Hard };

// Problems by id, for embedding question/images into emitted records.
class ProblemIndex {
 public:
  ProblemIndex() = default;
  explicit ProblemIndex(std::span<const Problem> problems);

  void add(Problem problem);  // duplicate id -> ValidationError
  const Problem* find(const std::string& id) const;
  size_t size() const { return by_id_.size(); }

 private:
  std::map<std::string, Problem> by_id_;
};

/**
 * Writes one JSON object per annotation:
 *   {problem_id, question, images, prefix, step, label, n_rollouts, n_correct}
 * label is the soft value in soft mode and hard_label(soft) in hard mode.
 * Returns the number of lines written; stream failures raise IoError
 * carrying the partial-write count.
 */
size_t emit(std::span<const StepAnnotation> annotations, LabelMode mode, std::ostream& sink,
            const ProblemIndex& problems);

// Reads annotations back from emitted JSONL. Line numbers appear in
// ParseError messages.
std::vector<StepAnnotation> load_annotations(std::istream& source);

struct StatsReport {
  std::int64_t records = 0;
  std::int64_t problems = 0;
  std::map<int, std::int64_t> steps_per_record;
  std::vector<std::int64_t> label_histogram = std::vector<std::int64_t>(10, 0);
  double zero_label_fraction = 0.0;
  double one_label_fraction = 0.0;
  std::vector<std::pair<int, std::string>> malformed;  // (line number, message)

  std::string to_json_text() const;
};

// Corpus statistics over an annotation JSONL stream. Malformed lines are
// reported with their line number and skipped.
StatsReport stats(std::istream& source);

}  // namespace prmforge::dataset
