#pragma once

#include "flexoiga/io.hpp"
#include "flexoiga/lattice.hpp"

#include <functional>
#include <string>
#include <vector>

namespace flexoiga {

/// JSON scenario description. Every config is merged onto the built-in defaults,
/// and a "base" key names a built-in scenario to start from.
class ScenarioConfig {
 public:
  /// Throws config-error on malformed JSON. A non-empty base applies when the
  /// text has no "base" key of its own.
  static ScenarioConfig from_text(const std::string& json_text, const std::string& base = "");
  static ScenarioConfig from_file(const std::string& path, const std::string& base = "");
  static ScenarioConfig builtin(const std::string& name);

  /// Dotted-path override. The value is parsed as JSON and kept as a string
  /// when it does not parse. A sweep over the same key is dropped.
  void set(const std::string& dotted_key, const std::string& value);
  std::string name() const;
  /// Pretty-printed effective config.
  std::string text() const;
  /// Parses every sweep point; throws config-error on the first invalid one.
  void validate() const;

 private:
  explicit ScenarioConfig(std::string text) : text_(std::move(text)) {}
  std::string text_;
};

std::vector<std::string> builtin_scenarios();

struct RunObserver {
  /// Called after each solve with a label unique within the run.
  std::function<void(const std::string& label, const MultiPatchMesh&, const SolutionField&)> on_solution;
  /// Called after each sweep point with its wall time.
  std::function<void(const std::string& label, double seconds)> on_point;
};

struct ScenarioResult {
  std::string name;
  Table table;
  /// Field profile along the vertical midline; empty unless requested.
  Table profile;
};

ScenarioResult run_scenario(const ScenarioConfig& config, const RunObserver& observer = {});

}  // namespace flexoiga
