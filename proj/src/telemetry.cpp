#include "prmforge/telemetry.hpp"

#include <ostream>

namespace prmforge {

void StreamTelemetry::emit(const std::string& json_line) {
  std::lock_guard<std::mutex> lock(mu_);
  out_ << json_line << '\n';
  out_.flush();
}

}  // namespace prmforge
