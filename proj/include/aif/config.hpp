#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aif/harness.hpp"

namespace aif {

// Invalid experiment configuration; carries the offending line (0 when the
// problem is not tied to one line) and the dotted field name.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::size_t line, std::string field, const std::string& message);
  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

// Parses a TOML-style experiment document:
//   top level:      name, episodes, seeds, output_dir, trace, record_wall_time
//   [environment]   kind = "grid" | "cartpole", maze, step_limit, cart-pole constants
//   [[mutation]]    episode plus environment overrides (repeatable)
//   [agent] [planner] [mixer] [learner] [calibration]
// Maze references are "builtin:<name>" or paths relative to base_dir.
// Unknown sections or keys are errors.
ExperimentConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

// Resolves "builtin:<name>" or a file path to maze text.
std::string maze_text(const std::string& reference, const std::filesystem::path& base_dir);

// Data compiled into the binary.
std::vector<std::string> builtin_maze_names();
std::string_view builtin_maze(std::string_view name);  // throws std::out_of_range
std::vector<std::pair<std::string, std::string_view>> builtin_presets();
std::string_view builtin_preset(std::string_view name);  // throws std::out_of_range

}  // namespace aif
