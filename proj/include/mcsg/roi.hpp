#pragma once

#include <span>
#include <vector>

#include "mcsg/dataset.hpp"

namespace mcsg {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Drops repeated consecutive vertices and an explicit closing vertex.
/// Throws validation when fewer than 3 vertices remain, a coordinate is not
/// finite, or the outline self-intersects.
std::vector<Point> cleanup_polygon(std::span<const Point> polygon);

/// Valid pixels whose centers (x + 0.5, y + 0.5) lie inside the polygon
/// under the even-odd rule, ascending. Coordinates are dataset pixels.
/// Throws empty_region when no valid pixel is covered.
std::vector<PixelIndex> rasterize_polygon(std::span<const Point> polygon, const PixelGrid& grid);

/// Channels with at least ceil(sigma * |region|) region pixels whose
/// normalized intensity is >= mu. mu and sigma must lie in [0, 1].
std::vector<ChannelIndex> match_nodes(const MsiDataset& ds, std::span<const PixelIndex> region,
                                      double mu, double sigma);

struct RoiSelection {
  std::vector<Point> polygon;
  double mu = 0.0;
  double sigma = 0.0;
  std::vector<PixelIndex> region;
  std::vector<ChannelIndex> matched_nodes;
};

RoiSelection select_roi(const MsiDataset& ds, std::span<const Point> polygon, double mu,
                        double sigma);

}  // namespace mcsg
