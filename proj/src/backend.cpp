#include "prmforge/backend.hpp"

#include <cctype>

#include "prmforge/error.hpp"

namespace prmforge {

void PolicyBackend::check_request(const CompletionRequest& request) const {
  if (request.n < 1) throw ValidationError("complete() requires n >= 1");
  if (request.problem == nullptr) throw ValidationError("complete() requires a problem");
  if (request.draw_base < 0) throw ValidationError("draw_base must be nonnegative");
  validate(request.params);
  validate(*request.problem);
}

std::int64_t approx_token_count(std::string_view text) {
  std::int64_t count = 0;
  bool in_token = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_token) ++count;
    in_token = !space;
  }
  return count;
}

}  // namespace prmforge
