#include "prmforge/answers.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>

#include "prmforge/error.hpp"

namespace prmforge::answers {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::optional<long double> parse_decimal(std::string_view text) {
  if (text.empty()) return std::nullopt;
  std::string buf(text);
  const char* begin = buf.c_str();
  char* end = nullptr;
  errno = 0;
  const long double v = std::strtold(begin, &end);
  if (end != begin + buf.size() || errno == ERANGE) return std::nullopt;
  if (!std::isfinite(static_cast<double>(v))) return std::nullopt;
  return v;
}

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return s.substr(b, e - b);
}

}  // namespace

std::optional<long double> parse_numeric(std::string_view text) {
  text = trim(text);
  if (text.empty()) return std::nullopt;
  const size_t slash = text.find('/');
  if (slash != std::string_view::npos) {
    const auto num = parse_decimal(trim(text.substr(0, slash)));
    const auto den = parse_decimal(trim(text.substr(slash + 1)));
    if (!num || !den || *den == 0.0L) return std::nullopt;
    return *num / *den;
  }
  return parse_decimal(text);
}

std::string normalize_choice(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc) || std::ispunct(uc)) continue;
    out.push_back(static_cast<char>(std::toupper(uc)));
  }
  return out;
}

std::string normalize_text(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : trim(text)) {
    if (is_space(c)) {
      pending_space = true;
      continue;
    }
    if (pending_space && !out.empty()) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

bool verify_answer(std::string_view predicted, std::string_view gold, AnswerKind kind) {
  if (predicted.empty() || gold.empty())
    throw ValidationError("verify_answer requires non-empty texts");
  if (kind == AnswerKind::MultipleChoice)
    return normalize_choice(predicted) == normalize_choice(gold);

  const auto a = parse_numeric(predicted);
  const auto b = parse_numeric(gold);
  if (a && b) {
    if (*a == *b) return true;
    const long double scale = std::max(std::fabs(*a), std::fabs(*b));
    return std::fabs(*a - *b) <= kNumericRelTol * scale;
  }
  return normalize_text(predicted) == normalize_text(gold);
}

}  // namespace prmforge::answers
