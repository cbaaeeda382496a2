#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "aqua/metrics/report.hpp"
#include "aqua/scenarios/scenarios.hpp"

namespace aqua::config {

enum class CloneMode { With, Without, Both };

/// Everything one `run` needs. Parsed from a JSON document whose top-level
/// keys are: scenario, seed | seeds, topology, clone, task, allocation,
/// offload, streaming, c2c, mptcp, abr, evolved_bs, output.
struct RunConfig {
  std::string scenario;
  std::vector<std::uint64_t> seeds{1};

  scenarios::TopologyParams topology;
  scenarios::CloneParams clone;
  scenarios::OffloadSpec offload;  // tasks and allocation folded in
  scenarios::StreamingSpec streaming;
  CloneMode streaming_mode = CloneMode::With;
  scenarios::C2CScenarioSpec c2c;
  scenarios::MptcpSpec mptcp;
  std::uint64_t mptcp_bytes = 10000000;
  scenarios::AbrSpec abr;
  std::string evolved_base = "offload";

  std::optional<std::string> output_path;
  metrics::Format format = metrics::Format::Csv;
};

/// Names of the runnable scenarios.
const std::vector<std::string>& scenario_names();

/// Parses and validates. Every failure is a ConfigurationError whose
/// message starts with the dotted key at fault, e.g.
/// "topology.access.loss_prob: must be in [0, 1), got 1.2".
RunConfig parse_config(const nlohmann::json& doc);

/// Reads a JSON file; IoError when unreadable, ConfigurationError when it
/// is not valid JSON.
nlohmann::json read_document(const std::filesystem::path& path);

/// One report per seed and variant, in seed-major order.
std::vector<metrics::MetricsReport> run(const RunConfig& config);

/// Sets `key` (dotted, objects created as needed) in `doc`.
void set_dotted(nlohmann::json& doc, std::string_view key, nlohmann::json value);

/// A sweep value token: any JSON literal ("0.05", "true", "[1,2]"),
/// otherwise taken as a plain string.
nlohmann::json parse_token(std::string_view token);

struct SweepSpec {
  std::string param;
  std::vector<std::string> values;
  unsigned jobs = 1;  // worker threads; output does not depend on it
};

/// Validates every swept config, then runs them. Reports come out in value
/// order, each tagged with metadata `sweep.<param>` = value token.
std::vector<metrics::MetricsReport> run_sweep(const nlohmann::json& base, const SweepSpec& sweep,
                                              std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace aqua::config
