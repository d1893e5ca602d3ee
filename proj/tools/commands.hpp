#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bearing_forms::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAnalysisNegative = 2;
inline constexpr int kExitGainViolation = 3;
inline constexpr int kExitBearingLoss = 4;
inline constexpr int kExitUsage = 64;
inline constexpr int kExitFailure = 1;

struct RunOverrides {
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<std::uint64_t> seed;
};

int cmd_analyze(const std::string& scenario_ref, const std::string& out_dir);

int cmd_simulate(const std::string& scenario_ref, const std::string& out_dir,
                 const RunOverrides& overrides, bool force, int stride);

int cmd_observe(const std::string& scenario_ref, const std::string& out_dir,
                const RunOverrides& overrides, int stride);

int cmd_scenarios_list();
int cmd_scenarios_export(const std::string& name);

int cmd_sweep(const std::string& scenario_ref, const std::string& out_dir,
              const std::vector<std::string>& grid_specs, int jobs);

}  // namespace bearing_forms::cli
