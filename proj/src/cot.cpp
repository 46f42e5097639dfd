#include "prmforge/cot.hpp"

#include <cctype>

#include "prmforge/error.hpp"

namespace prmforge::cot {
namespace {

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Collects the contents of every <tag>...</tag> span, in order.
// An opening tag without a matching close is malformed.
std::vector<std::string> scan_spans(std::string_view raw, std::string_view tag) {
  const std::string open = "<" + std::string(tag) + ">";
  const std::string close = "</" + std::string(tag) + ">";
  std::vector<std::string> out;
  size_t pos = 0;
  while (true) {
    const size_t o = raw.find(open, pos);
    if (o == std::string_view::npos) break;
    const size_t body = o + open.size();
    const size_t c = raw.find(close, body);
    if (c == std::string_view::npos) throw ParseError("malformed tags");
    out.emplace_back(trim(raw.substr(body, c - body)));
    pos = c + close.size();
  }
  return out;
}

struct Scanned {
  std::vector<std::string> steps;
  std::vector<std::string> answers;
};

Scanned scan(std::string_view raw) {
  Scanned s;
  for (auto& step : scan_spans(raw, "step"))
    if (!step.empty()) s.steps.push_back(std::move(step));
  s.answers = scan_spans(raw, "answer");
  return s;
}

}  // namespace

Solution parse_solution(std::string_view raw) {
  Scanned s = scan(raw);
  if (s.steps.empty()) throw ParseError("no steps");
  if (s.answers.empty() || s.answers.front().empty()) throw ParseError("no answer");
  return Solution{std::move(s.steps), std::move(s.answers.front())};
}

Continuation parse_continuation(std::string_view raw) {
  Scanned s = scan(raw);
  if (s.answers.empty() || s.answers.front().empty()) throw ParseError("no answer");
  return Continuation{std::move(s.steps), std::move(s.answers.front())};
}

std::string render_solution(const Solution& solution) {
  std::string out = render_prefix(solution.steps);
  out += "<answer>";
  out += solution.final_answer;
  out += "</answer>";
  return out;
}

std::string render_prefix(std::span<const std::string> steps) {
  std::string out;
  for (const auto& step : steps) {
    out += "<step>";
    out += step;
    out += "</step>";
  }
  return out;
}

}  // namespace prmforge::cot
