#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdsm/config.hpp"
#include "tdsm/error.hpp"
#include "tdsm/forward.hpp"
#include "tdsm/indicator.hpp"

namespace tdsm {

/// 0 success, 2 config/usage, 3 solver, 4 I/O or file format.
[[nodiscard]] int exit_code(ErrorKind kind) noexcept;

/// Runs the configured forward model and noise; metadata carries the config echo.
[[nodiscard]] ScatteredDataSet synthesize(const RunConfig& config, int threads = 1);

/// Sweeps the config's grid. i1prime needs a single point-model scatterer.
[[nodiscard]] IndicatorField reconstruct_field(const ScatteredDataSet& data, const RunConfig& config,
                                               IndicatorKind kind, int threads = 1);

/// Canned configuration for one case of examples 1..6 (see repro_cases).
struct ReproCase {
  std::string name;          ///< file stem, e.g. "ex3_kite_c11"
  nlohmann::json config;     ///< raw config without reconstruct.indicator
  std::vector<IndicatorKind> indicators;
  /// 3D only: (axis, coordinate) slices to export.
  std::vector<std::pair<int, double>> slices;
};

/// Throws a config error for ids outside 1..6 (7: volumetric solver is out of scope).
[[nodiscard]] std::vector<ReproCase> repro_cases(int example, std::uint64_t seed);

/// Synthesizes and reconstructs every case, writing .tdis and .csv files to dir.
std::vector<std::filesystem::path> run_repro(int example, const std::filesystem::path& dir, std::uint64_t seed,
                                             int threads, std::ostream& log);

/// Full command-line entry point (subcommands synth, reconstruct, repro, validate).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tdsm
