#include "mcsg/roi.hpp"

#include <algorithm>
#include <cmath>

#include "mcsg/error.hpp"

namespace mcsg {

namespace {

double cross(Point o, Point a, Point b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

bool on_segment(Point p, Point q, Point r) {
  return std::min(p.x, r.x) <= q.x && q.x <= std::max(p.x, r.x) && std::min(p.y, r.y) <= q.y &&
         q.y <= std::max(p.y, r.y);
}

int orientation(Point a, Point b, Point c) {
  const double v = cross(a, b, c);
  return v > 0 ? 1 : (v < 0 ? -1 : 0);
}

bool segments_intersect(Point p1, Point p2, Point p3, Point p4) {
  const int o1 = orientation(p1, p2, p3), o2 = orientation(p1, p2, p4);
  const int o3 = orientation(p3, p4, p1), o4 = orientation(p3, p4, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p3, p2)) return true;
  if (o2 == 0 && on_segment(p1, p4, p2)) return true;
  if (o3 == 0 && on_segment(p3, p1, p4)) return true;
  if (o4 == 0 && on_segment(p3, p2, p4)) return true;
  return false;
}

}  // namespace

std::vector<Point> cleanup_polygon(std::span<const Point> polygon) {
  std::vector<Point> out;
  for (const auto& p : polygon) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      fail(ErrorKind::validation, "polygon vertex is not finite");
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  }
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  if (out.size() < 3) fail(ErrorKind::validation, "polygon needs at least 3 distinct vertices");

  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Point a = out[i], b = out[(i + 1) % n];
    for (std::size_t j = i + 1; j < n; ++j) {
      // Adjacent edges share a vertex by construction.
      if (j == i + 1 || (i == 0 && j == n - 1)) continue;
      if (segments_intersect(a, b, out[j], out[(j + 1) % n]))
        fail(ErrorKind::validation, "polygon self-intersects (edges " + std::to_string(i) + " and " +
                                        std::to_string(j) + ")");
    }
  }
  return out;
}

std::vector<PixelIndex> rasterize_polygon(std::span<const Point> polygon, const PixelGrid& grid) {
  const auto poly = cleanup_polygon(polygon);
  const std::size_t n = poly.size();
  std::vector<PixelIndex> out;
  std::vector<double> xs;
  for (int y = 0; y < grid.height(); ++y) {
    const double cy = y + 0.5;
    xs.clear();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Point a = poly[i], b = poly[j];
      if ((a.y > cy) != (b.y > cy)) xs.push_back((b.x - a.x) * (cy - a.y) / (b.y - a.y) + a.x);
    }
    std::sort(xs.begin(), xs.end());
    // A center cx is inside iff an odd number of crossings lie strictly to
    // its right, i.e. cx falls in some [xs[2k], xs[2k+1]).
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      int x = std::max(0, static_cast<int>(std::ceil(xs[k] - 0.5)) - 1);
      while (x < grid.width() && x + 0.5 < xs[k]) ++x;
      for (; x < grid.width() && x + 0.5 < xs[k + 1]; ++x)
        if (grid.valid(x, y)) out.push_back(grid.index(x, y));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  if (out.empty()) fail(ErrorKind::empty_region, "polygon covers no valid pixel");
  return out;
}

std::vector<ChannelIndex> match_nodes(const MsiDataset& ds, std::span<const PixelIndex> region,
                                      double mu, double sigma) {
  if (!(mu >= 0.0 && mu <= 1.0) || !(sigma >= 0.0 && sigma <= 1.0))
    fail(ErrorKind::invalid_argument, "mu and sigma must lie in [0, 1]");
  if (region.empty()) fail(ErrorKind::empty_region, "region is empty");
  const auto size = static_cast<double>(region.size());
  // The small slack keeps products like 0.6 * 10 from rounding up to 7.
  const auto needed = static_cast<std::size_t>(std::max(0.0, std::ceil(sigma * size - 1e-9)));
  std::vector<ChannelIndex> out;
  for (ChannelIndex c = 0; c < ds.channel_count(); ++c) {
    const auto& img = ds.channel(c).intensities;
    const auto& range = ds.range(c);
    const double span = range.max - range.min;
    std::size_t count = 0;
    for (PixelIndex p : region) {
      const double v = range.constant() ? 0.0 : (img[p] - range.min) / span;
      if (v >= mu) ++count;
    }
    if (count >= needed) out.push_back(c);
  }
  return out;
}

RoiSelection select_roi(const MsiDataset& ds, std::span<const Point> polygon, double mu,
                        double sigma) {
  RoiSelection sel;
  sel.polygon = cleanup_polygon(polygon);
  sel.mu = mu;
  sel.sigma = sigma;
  sel.region = rasterize_polygon(sel.polygon, ds.grid());
  sel.matched_nodes = match_nodes(ds, sel.region, mu, sigma);
  return sel;
}

}  // namespace mcsg
