#include <fstream>
#include <sstream>

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "prmforge/annotator.hpp"
#include "prmforge/answers.hpp"
#include "prmforge/budget.hpp"
#include "prmforge/cot.hpp"
#include "prmforge/dataset.hpp"
#include "prmforge/error.hpp"
#include "prmforge/io.hpp"
#include "prmforge/mc.hpp"
#include "prmforge/mock_backend.hpp"
#include "prmforge/rerank.hpp"
#include "prmforge/scoring.hpp"

namespace py = pybind11;

using namespace prmforge;

PYBIND11_MODULE(prmforge, m) {
  m.doc() = "Step-level process supervision: MCTS annotation, PRM scoring math, "
            "and best-of-N reranking";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<BudgetExhausted>(m, "BudgetExhausted", PyExc_RuntimeError);
  py::register_exception<ProtocolError>(m, "ProtocolError", PyExc_RuntimeError);

  // -- Domain types -------------------------------------------------------
  py::enum_<AnswerKind>(m, "AnswerKind")
      .value("MULTIPLE_CHOICE", AnswerKind::MultipleChoice)
      .value("FILL_IN_BLANK", AnswerKind::FillInBlank);

  py::class_<ImageRef>(m, "ImageRef")
      .def(py::init<>())
      .def_readwrite("uri", &ImageRef::uri)
      .def_readwrite("b64", &ImageRef::b64)
      .def_readwrite("media_type", &ImageRef::media_type);

  py::class_<Problem>(m, "Problem")
      .def(py::init([](std::string id, std::string question, std::string gold_answer,
                       AnswerKind kind, std::vector<ImageRef> images) {
             Problem p{std::move(id), std::move(question), std::move(images),
                       std::move(gold_answer), kind};
             validate(p);
             return p;
           }),
           py::arg("id"), py::arg("question"), py::arg("gold_answer"),
           py::arg("kind") = AnswerKind::FillInBlank,
           py::arg("images") = std::vector<ImageRef>{})
      .def_readwrite("id", &Problem::id)
      .def_readwrite("question", &Problem::question)
      .def_readwrite("images", &Problem::images)
      .def_readwrite("gold_answer", &Problem::gold_answer)
      .def_readwrite("kind", &Problem::kind);

  py::class_<Solution>(m, "Solution")
      .def(py::init([](std::vector<std::string> steps, std::string final_answer) {
             Solution s{std::move(steps), std::move(final_answer)};
             validate(s);
             return s;
           }),
           py::arg("steps"), py::arg("final_answer"))
      .def_readwrite("steps", &Solution::steps)
      .def_readwrite("final_answer", &Solution::final_answer)
      .def("__eq__", [](const Solution& a, const Solution& b) { return a == b; });

  py::class_<dataset::StepAnnotation>(m, "StepAnnotation")
      .def(py::init<>())
      .def_readwrite("problem_id", &dataset::StepAnnotation::problem_id)
      .def_readwrite("prefix", &dataset::StepAnnotation::prefix)
      .def_readwrite("step", &dataset::StepAnnotation::step)
      .def_readwrite("soft_label", &dataset::StepAnnotation::soft_label)
      .def_readwrite("n_rollouts", &dataset::StepAnnotation::n_rollouts)
      .def_readwrite("n_correct", &dataset::StepAnnotation::n_correct)
      .def("__eq__", [](const dataset::StepAnnotation& a, const dataset::StepAnnotation& b) {
        return a == b;
      });

  // -- Parsing and verification -------------------------------------------
  m.def("parse_solution", &cot::parse_solution, py::arg("raw"),
        "Extract <step>/<answer> tagged spans into a Solution");
  m.def("render_solution", &cot::render_solution, py::arg("solution"));
  m.def("verify_answer", &answers::verify_answer, py::arg("predicted"), py::arg("gold"),
        py::arg("kind"),
        "Normalized answer comparison (numeric tolerance for fill-in-blank)");

  // -- PRM scoring math ----------------------------------------------------
  m.def("step_probability", &scoring::step_probability, py::arg("z_yes"), py::arg("z_no"),
        "Stable two-logit softmax");
  m.def(
      "prm_loss",
      [](const std::vector<double>& preds, const std::vector<double>& targets) {
        return scoring::prm_loss(preds, targets);
      },
      py::arg("preds"), py::arg("targets"), "Summed soft-label cross-entropy");
  m.def("hard_label", &dataset::hard_label, py::arg("mc"), "1 iff mc > 0");
  m.def(
      "interleave_markers",
      [](const Problem& problem, const Solution& solution) {
        return dataset::interleave_markers(problem, solution).to_text();
      },
      py::arg("problem"), py::arg("solution"),
      "Marker-interleaved PRM input text (one <prm> after every step)");

  // -- Aggregation / reranking ---------------------------------------------
  m.def(
      "aggregate",
      [](const std::vector<double>& probs, const std::string& method) {
        return rerank::aggregate(scoring::StepScoreVector(probs),
                                 rerank::method_from_string(method));
      },
      py::arg("probs"), py::arg("method"),
      "Reduce a step-score vector to a scalar path score");
  m.def(
      "select_best",
      [](const std::vector<std::pair<Solution, std::vector<double>>>& candidates,
         const std::string& method, std::uint64_t seed) {
        std::vector<rerank::Candidate> cs;
        cs.reserve(candidates.size());
        for (const auto& [solution, probs] : candidates)
          cs.push_back({solution, scoring::StepScoreVector(probs)});
        return rerank::select_best(cs, rerank::method_from_string(method), seed);
      },
      py::arg("candidates"), py::arg("method"), py::arg("seed") = 0,
      "Winner index; argmax with lowest-index ties, or a seeded draw for Random");

  // -- Error localization ----------------------------------------------------
  m.def(
      "locate_first_error",
      [](const Problem& problem, const Solution& solution,
         const std::function<double(std::vector<std::string>)>& mc_fn) {
        SearchBudget budget(1 << 20, 1 << 20);
        const annotate::McFn fn = [&mc_fn](std::span<const std::string> prefix,
                                           SearchBudget&) {
          MCEstimate est;
          est.value = mc_fn(std::vector<std::string>(prefix.begin(), prefix.end()));
          est.n_rollouts = 1;
          est.n_correct = est.value > 0.0 ? 1 : 0;
          return est;
        };
        return annotate::locate_first_error(problem, solution, fn, budget);
      },
      py::arg("problem"), py::arg("solution"), py::arg("mc_fn"),
      "Smallest t with mc_fn(steps[:t]) == 0, or None");

  // -- Annotation pipeline ---------------------------------------------------
  py::class_<MockScript>(m, "MockScript")
      .def_static("parametric", &MockScript::parametric, py::arg("q"),
                  py::arg("solution_len") = 3)
      .def_static("from_json_text", &MockScript::from_json_text, py::arg("text"));

  py::class_<PolicyBackend>(m, "PolicyBackend");  // opaque base

  py::class_<MockBackend, PolicyBackend>(m, "MockBackend")
      .def(py::init<MockScript, std::uint64_t>(), py::arg("script"), py::arg("seed"));

  py::class_<annotate::AnnotatorConfig>(m, "AnnotatorConfig")
      .def(py::init<>())
      .def_readwrite("c_puct", &annotate::AnnotatorConfig::c_puct)
      .def_readwrite("k_rollouts", &annotate::AnnotatorConfig::k_rollouts)
      .def_readwrite("max_search_steps", &annotate::AnnotatorConfig::max_search_steps)
      .def_readwrite("max_rollouts", &annotate::AnnotatorConfig::max_rollouts);

  py::class_<BudgetSnapshot>(m, "BudgetSnapshot")
      .def_readonly("max_search_steps", &BudgetSnapshot::max_search_steps)
      .def_readonly("max_rollouts", &BudgetSnapshot::max_rollouts)
      .def_readonly("used_search_steps", &BudgetSnapshot::used_search_steps)
      .def_readonly("used_rollouts", &BudgetSnapshot::used_rollouts);

  py::class_<annotate::AnnotateResult>(m, "AnnotateResult")
      .def_readonly("annotations", &annotate::AnnotateResult::annotations)
      .def_readonly("budget", &annotate::AnnotateResult::budget)
      .def_readonly("skipped", &annotate::AnnotateResult::skipped)
      .def_readonly("skip_reason", &annotate::AnnotateResult::skip_reason);

  m.def(
      "annotate_problem",
      [](const Problem& problem, PolicyBackend& backend,
         const annotate::AnnotatorConfig& config) {
        SearchBudget budget(config.max_search_steps, config.max_rollouts);
        return annotate::annotate_problem(problem, backend, config, budget);
      },
      py::arg("problem"), py::arg("backend"),
      py::arg("config") = annotate::AnnotatorConfig{},
      "Run MCTS error localization over one problem and harvest annotations");

  // -- Dataset I/O -----------------------------------------------------------
  m.def(
      "emit_annotations",
      [](const std::vector<dataset::StepAnnotation>& annotations, const std::string& path,
         const std::vector<Problem>& problems, bool hard) {
        const dataset::ProblemIndex index(problems);
        std::ofstream out(path);
        if (!out) throw IoError("cannot open '" + path + "' for writing");
        return dataset::emit(annotations,
                             hard ? dataset::LabelMode::Hard : dataset::LabelMode::Soft, out,
                             index);
      },
      py::arg("annotations"), py::arg("path"), py::arg("problems"), py::arg("hard") = false,
      "Write annotation JSONL; returns lines written");
  m.def(
      "load_annotations",
      [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open '" + path + "' for reading");
        return dataset::load_annotations(in);
      },
      py::arg("path"));
  m.def(
      "stats_json",
      [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open '" + path + "' for reading");
        return dataset::stats(in).to_json_text();
      },
      py::arg("path"), "Corpus statistics as a JSON document");
}
