#include "tdsm/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "tdsm/error.hpp"

namespace tdsm {

namespace {

// Visits the in-grid neighbours of idx (all offsets in {-1, 0, 1}^d except 0).
template <class F>
void for_each_neighbour(const SamplingGrid& grid, std::size_t idx, bool diagonal, F&& visit) {
  const auto base = grid.unflatten(idx);
  const int dim = grid.dimension();
  for (int code = 0; code < 27; ++code) {
    std::array<int, 3> off{code % 3 - 1, (code / 3) % 3 - 1, (code / 9) % 3 - 1};
    int moved = 0;
    bool ok = true;
    std::array<int, 3> at = base;
    for (int a = 0; a < 3; ++a) {
      if (a >= dim) {
        ok = ok && off[a] == 0;
        continue;
      }
      moved += off[a] != 0;
      at[a] += off[a];
      ok = ok && at[a] >= 0 && at[a] < grid.axes()[a].count;
    }
    if (!ok || moved == 0 || (!diagonal && moved > 1)) {
      continue;
    }
    visit(grid.flatten(at));
  }
}

bool on_border(const SamplingGrid& grid, std::size_t idx) {
  const auto m = grid.unflatten(idx);
  for (int a = 0; a < grid.dimension(); ++a) {
    if (m[a] == 0 || m[a] == grid.axes()[a].count - 1) {
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<LocalMax> local_maxima(const IndicatorField& field, double min_separation, std::size_t max_count) {
  const auto& grid = field.grid;
  require(field.values.size() == grid.size(), "local_maxima: field and grid sizes differ");
  std::vector<LocalMax> candidates;
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    const double v = field.values[idx];
    bool peak = true;
    for_each_neighbour(grid, idx, true, [&](std::size_t n) { peak = peak && field.values[n] <= v; });
    if (peak) {
      candidates.push_back({idx, v});
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const LocalMax& a, const LocalMax& b) { return a.value > b.value; });
  std::vector<LocalMax> kept;
  for (const auto& c : candidates) {
    if (kept.size() >= max_count) {
      break;
    }
    const bool far = std::all_of(kept.begin(), kept.end(), [&](const LocalMax& k) {
      return (grid.point(k.index) - grid.point(c.index)).norm() >= min_separation;
    });
    if (far) {
      kept.push_back(c);
    }
  }
  return kept;
}

SuperlevelRegion superlevel_region(const IndicatorField& field, double fraction) {
  const auto& grid = field.grid;
  require(grid.dimension() == 2, "superlevel_region: 2D fields only");
  require(fraction > 0.0 && fraction <= 1.0, "superlevel_region: fraction must lie in (0, 1]");
  SuperlevelRegion out;
  out.level = fraction * field.max_value();
  out.mask.assign(grid.size(), 0);

  const std::size_t seed = field.argmax();
  std::deque<std::size_t> queue{seed};
  out.mask[seed] = 1;
  while (!queue.empty()) {
    const std::size_t idx = queue.front();
    queue.pop_front();
    for_each_neighbour(grid, idx, true, [&](std::size_t n) {
      if (!out.mask[n] && field.values[n] >= out.level) {
        out.mask[n] = 1;
        queue.push_back(n);
      }
    });
  }

  // Fill holes: complement cells not reachable from the border.
  std::vector<char> outside(grid.size(), 0);
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (!out.mask[idx] && on_border(grid, idx)) {
      outside[idx] = 1;
      queue.push_back(idx);
    }
  }
  while (!queue.empty()) {
    const std::size_t idx = queue.front();
    queue.pop_front();
    for_each_neighbour(grid, idx, false, [&](std::size_t n) {
      if (!out.mask[n] && !outside[n]) {
        outside[n] = 1;
        queue.push_back(n);
      }
    });
  }
  for (std::size_t idx = 0; idx < grid.size(); ++idx) {
    if (!outside[idx]) {
      out.mask[idx] = 1;
    }
    if (out.mask[idx]) {
      ++out.count;
      out.centroid += grid.point(idx);
      out.touches_border = out.touches_border || on_border(grid, idx);
    }
  }
  out.centroid /= static_cast<double>(out.count);
  return out;
}

bool region_contains(const SuperlevelRegion& region, const SamplingGrid& grid, const Vec3& p) {
  require(grid.dimension() == 2 && region.mask.size() == grid.size(), "region_contains: 2D region expected");
  std::array<int, 3> cell{0, 0, 0};
  std::array<double, 2> frac{0.0, 0.0};
  for (int a = 0; a < 2; ++a) {
    const auto& ax = grid.axes()[a];
    const double s = (p[a] - ax.lo) / ax.spacing();
    if (s < 0.0 || s > ax.count - 1) {
      return false;
    }
    cell[a] = std::min(static_cast<int>(std::floor(s)), ax.count - 2);
    frac[a] = s - cell[a];
  }
  double acc = 0.0;
  for (int dx = 0; dx < 2; ++dx) {
    for (int dy = 0; dy < 2; ++dy) {
      const std::size_t idx = grid.flatten({cell[0] + dx, cell[1] + dy, 0});
      const double w = (dx ? frac[0] : 1.0 - frac[0]) * (dy ? frac[1] : 1.0 - frac[1]);
      acc += w * (region.mask[idx] ? 1.0 : 0.0);
    }
  }
  return acc >= 0.5;
}

}  // namespace tdsm
