#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "tdsm/bie.hpp"
#include "tdsm/forward.hpp"
#include "tdsm/geometry.hpp"
#include "tdsm/indicator.hpp"
#include "tdsm/signal.hpp"
#include "tdsm/spectral.hpp"

namespace tdsm {

/// Parses "[section.sub]" / "key = value" text (or JSON when the text starts
/// with '{') into nested JSON. Values become bools, numbers, lists ("[a, b]")
/// or strings. Throws a config error with the line number on malformed input.
[[nodiscard]] nlohmann::json parse_config_text(std::string_view text);
[[nodiscard]] nlohmann::json load_config_file(const std::filesystem::path& path);

/// Angles accept numbers and forms like "pi", "3pi/2", "2*pi", "pi/4".
[[nodiscard]] double parse_angle(const nlohmann::json& value, const std::string& field);

struct ScattererSpec {
  Shape shape = Shape::point;
  Vec3 center = Vec3::Zero();
  double scale = 1.0;
  double strength = 1.0;
};

struct RunConfig {
  nlohmann::json effective;  ///< defaulted, canonical; echoed into outputs
  SignalSpec signal;
  Medium medium;
  TimeGrid time;
  SurfaceGeometry sensors;
  SamplingGrid grid;
  std::vector<ScattererSpec> scatterers;
  std::string model = "point_model";
  int dimension = 2;
  NoiseSpec noise;
  BieOptions bie;
  SpectralOptions spectral;
  IndicatorKind indicator = IndicatorKind::i1;
  std::string out;

  [[nodiscard]] Acquisition acquisition() const;
  [[nodiscard]] std::vector<BoundaryCurve> boundaries() const;
  [[nodiscard]] std::vector<PointScatterer> point_scatterers() const;
};

/// Fills defaults, validates ranges and builds the run objects. Errors name
/// the offending field path (e.g. "geometry.sensors").
[[nodiscard]] RunConfig resolve_config(const nlohmann::json& raw);

/// Canonical single-line JSON (sorted keys).
[[nodiscard]] std::string config_echo(const RunConfig& config);

}  // namespace tdsm
