#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pursuit/evader.hpp"
#include "pursuit/fields.hpp"
#include "pursuit/vec2.hpp"

namespace pursuit {

// sp2: surround + hunt only. sp5: adds distance maintenance and collision
// avoidance, then normalizes to max speed.
enum class ControlMode { kSp2, kSp5 };

std::string_view to_string(ControlMode mode);
std::optional<ControlMode> parse_control_mode(std::string_view name);

struct PursuerInit {
  int id = 0;
  Vec2 position;
  double max_speed = 0.0;

  friend bool operator==(const PursuerInit &, const PursuerInit &) = default;
};

// Neighbor lists are given by pursuer id, aligned with the pursuer list.
struct NeighborSpec {
  double sensing_radius = 100.0;
  std::optional<std::vector<std::vector<int>>> omega;
  std::optional<std::vector<std::vector<int>>> polygon;

  friend bool operator==(const NeighborSpec &, const NeighborSpec &) = default;
};

struct SimSettings {
  double dt = 0.01;
  double horizon = 200.0;
  ControlMode mode = ControlMode::kSp2;
  std::uint64_t seed = 0;

  friend bool operator==(const SimSettings &, const SimSettings &) = default;
};

struct ScenarioDoc {
  std::string name;
  std::vector<PursuerInit> pursuers;
  Vec2 evader_position;
  EvaderSpec evader;
  double d_c = 1.0;
  std::optional<FieldParams> fields;
  NeighborSpec neighbor;
  SimSettings sim;

  friend bool operator==(const ScenarioDoc &, const ScenarioDoc &) = default;
};

struct Violation {
  std::string path;
  std::string reason;
};

std::vector<Violation> validate(const ScenarioDoc &doc);

// Throws kValidation listing every violation.
void require_valid(const ScenarioDoc &doc);

// Smallest pursuer/evader speed ratio.
double lambda_min(const ScenarioDoc &doc);

// Parses a scenario document (JSON) and validates it. Throws kParse on
// malformed input and kValidation with field paths on schema violations.
ScenarioDoc parse_scenario(std::string_view text);
ScenarioDoc load_scenario(const std::filesystem::path &path);

std::string dump_scenario(const ScenarioDoc &doc);
void save_scenario(const ScenarioDoc &doc, const std::filesystem::path &path);

// Resolves a bare scenario name such as "scenario_C" against
// $PURSUIT_SCENARIO_DIR and then the bundled scenario directory; explicit
// paths are returned unchanged.
std::filesystem::path resolve_scenario_path(std::string_view name_or_path);

}  // namespace pursuit
