#pragma once

#include <cstddef>
#include <vector>

#include "tdsm/geometry.hpp"
#include "tdsm/indicator.hpp"

namespace tdsm {

struct LocalMax {
  std::size_t index = 0;
  double value = 0.0;
};

/// Probes not exceeded by any grid neighbour (8- or 26-connected), strongest
/// first, keeping only peaks at least `min_separation` from a stronger kept one.
[[nodiscard]] std::vector<LocalMax> local_maxima(const IndicatorField& field, double min_separation,
                                                 std::size_t max_count);

/// Connected superlevel set {value >= fraction * max} around the argmax of a
/// 2D field, with interior holes filled.
struct SuperlevelRegion {
  double level = 0.0;
  std::vector<char> mask;  ///< per probe
  std::size_t count = 0;
  Vec3 centroid = Vec3::Zero();
  bool touches_border = false;
};

[[nodiscard]] SuperlevelRegion superlevel_region(const IndicatorField& field, double fraction);

/// True when p lies inside the region: the bilinear interpolant of the mask is >= 1/2.
[[nodiscard]] bool region_contains(const SuperlevelRegion& region, const SamplingGrid& grid, const Vec3& p);

}  // namespace tdsm
