#pragma once

#include <iosfwd>
#include <mutex>
#include <string>

namespace prmforge {

// Structured progress events, one JSON object per line. Implementations
// must be safe to call from multiple workers.
class TelemetrySink {
 public:
  virtual ~TelemetrySink() = default;
  virtual void emit(const std::string& json_line) = 0;
};

class StreamTelemetry final : public TelemetrySink {
 public:
  explicit StreamTelemetry(std::ostream& out) : out_(out) {}
  void emit(const std::string& json_line) override;

 private:
  std::ostream& out_;
  std::mutex mu_;
};

}  // namespace prmforge
