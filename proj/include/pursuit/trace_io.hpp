#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "pursuit/engine.hpp"
#include "pursuit/scenario.hpp"

namespace pursuit {

// A trace plus everything needed to re-derive it.
struct TraceFile {
  ScenarioDoc scenario;
  SimConfig config;
  SimTrace trace;

  friend bool operator==(const TraceFile &, const TraceFile &) = default;
};

enum class TraceFormat { kColumnar, kStructured };

std::string_view to_string(TraceFormat format);
std::optional<TraceFormat> parse_trace_format(std::string_view name);

// Column order of the columnar format.
inline constexpr const char *kColumnarHeader =
    "t,theta_G,sum_r,P,min_dist,edge_min,edge_max";

// Columnar text uses 9 significant digits. Structured output keeps doubles
// bit-exact so a load reproduces the frames.
std::string columnar_text(const SimTrace &trace);
std::string structured_text(const TraceFile &file);

// Throws kValidation on an empty trace and kIo with the path on I/O errors.
void save_trace(const TraceFile &file, const std::filesystem::path &path,
                TraceFormat format);

TraceFile parse_trace(std::string_view text);
TraceFile load_trace(const std::filesystem::path &path);

struct ReplayFinding {
  long tick = 0;
  std::string check;
  std::string detail;
};

struct ReplayReport {
  std::size_t frames_checked = 0;
  std::vector<ReplayFinding> findings;

  bool ok() const { return findings.empty(); }
};

// Recomputes every derived quantity from the stored positions and reports
// frames that disagree with it or with the motion model.
ReplayReport replay_verify(const TraceFile &file);

}  // namespace pursuit
