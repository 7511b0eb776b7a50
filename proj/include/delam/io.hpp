#pragma once

#include "delam/scenarios.hpp"

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace delam {

inline constexpr int kConfigSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const ScenarioConfig& cfg);
/// Missing keys keep the defaults of `base`; unknown keys and a wrong
/// schema_version throw ConfigError.
ScenarioConfig config_from_json(const nlohmann::json& j, const ScenarioConfig& base = {});
ScenarioConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const DomainMesh& mesh);
DomainMesh mesh_from_json(const nlohmann::json& j);

/// Fixed-width scientific formatting used by every CSV writer.
std::string format_number(double v);

/// Writes `content` to a sibling temporary file and renames it into place.
void write_atomically(const std::filesystem::path& path, const std::string& content);

/// Per-step and per-snapshot CSV tables of one run; returns the file names.
std::vector<std::string> write_run_tables(const std::filesystem::path& dir, const ScenarioConfig& cfg,
                                          const Simulator& sim, const EvolutionRecord& rec);

std::string spring_csv(const std::vector<SpringSample>& samples);
std::string gc_sweep_csv(const std::vector<GcPoint>& points);

/// Step and element count of the first damage event (step 0 when none).
struct DamageEvent {
  Index step = 0;
  double time = 0.0;
  Index elements = 0;
  double length = 0.0;  // mm
};
DamageEvent first_damage(const EvolutionRecord& rec, const InterfacePairing& pairing);

/// |a − b| / |b| in percent.
double percentage_difference(double a, double b);

}  // namespace delam
