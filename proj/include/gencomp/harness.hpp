#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "gencomp/diagonal.hpp"
#include "gencomp/rational.hpp"
#include "gencomp/error.hpp"

namespace gencomp {

// Experiment orchestration. A config is one JSON document (schema in
// docs/formats.md); every run is a pure function of it.

enum class ExitCode : int { kPass = 0, kError = 1, kParse = 2, kBudget = 3, kInvariant = 4 };

ExitCode exit_code_for(ErrorKind kind) noexcept;

enum class Scenario { kSingleDiagonal, kPairDiagonal, kCodingRoundtrip, kRelationEmbed, kOperatorCompile };
std::string_view to_string(Scenario scenario);

struct ExperimentConfig {
  static constexpr int kVersion = 1;

  Scenario scenario = Scenario::kSingleDiagonal;
  /// The validated document, with defaults filled in. Stored in traces.
  nlohmann::json doc;
};

/// kParse for malformed documents, unknown fields, missing seeds.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

struct Overrides {
  std::optional<Stage> stages;
  std::optional<std::uint64_t> seed;
};

/// Applies command-line overrides and revalidates.
ExperimentConfig with_overrides(const ExperimentConfig& config, const Overrides& overrides);

// ---- adversaries -----------------------------------------------------------

struct AdversaryInfo {
  std::string name;
  std::string summary;
  bool needs_seed = false;
};

std::vector<AdversaryInfo> builtin_adversaries();
/// kParse for unknown names or a missing seed.
std::shared_ptr<const Opponent> make_adversary(const std::string& name, std::optional<std::uint64_t> seed = {});

/// The engine config a diagonal scenario describes.
DiagonalConfig diagonal_config(const ExperimentConfig& config);

// ---- running ---------------------------------------------------------------

struct RunResult {
  nlohmann::json report;
  std::vector<Verdict> verdicts;
  std::optional<Trace> trace;
  std::optional<Trace> mirror;  // rightmost counterpart of a double run
  std::string csv;

  bool passed() const;
};

/// Runs the scenario; throws Error on budget or parse problems.
RunResult run_experiment(const ExperimentConfig& config, const CheckOptions& checks = {});

/// Runs and writes trace/report/CSV under `out_dir` (paths from the config's
/// "outputs"). Returns the exit code; errors are reported on stderr.
ExitCode run_experiment_file(const std::filesystem::path& config_path, const Overrides& overrides,
                             const std::filesystem::path& out_dir);

/// Invariant checks plus a replay comparison when the trace carries its config.
std::vector<Verdict> verify_trace(const Trace& trace, const CheckOptions& checks = {});
ExitCode verify_trace_file(const std::filesystem::path& trace_path);

/// Member densities |W_e| 2^{i+1}| / 2^{i+1} at block ends below 2^stages.
std::vector<std::pair<Index, Rational>> block_end_densities(const IntervalSet& w, Stage stages);
/// Blocks i < stages with |W| 2^{i+1}| / 2^{i+1} <= 1 - 2^{-e-1}.
std::size_t density_dips(const IntervalSet& w, unsigned e, Stage stages);

nlohmann::json rational_json(const Rational& r);

}  // namespace gencomp
