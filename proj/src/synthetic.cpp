#include "mcsg/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "mcsg/error.hpp"

namespace mcsg {

namespace {

// Pattern k lives in the k-th vertical sector of the grid, so supports are
// disjoint. Shapes cycle through ellipse, box and double stripe.
// u, v are relative pixel-center coordinates in [0,1).
bool in_pattern(int k, int patterns, double u, double v) {
  const double sector = static_cast<double>(k) / patterns;
  const double width = 1.0 / patterns;
  const double cx = sector + width / 2;
  switch (k % 3) {
    case 0: {
      const double dx = (u - cx) / (width * 0.42);
      const double dy = (v - 0.4) / 0.3;
      return dx * dx + dy * dy <= 1.0;
    }
    case 1:
      return std::abs(u - cx) <= width * 0.4 && v >= 0.15 && v <= 0.55;
    default:
      return std::abs(u - cx) <= width * 0.4 && ((v >= 0.2 && v <= 0.3) || (v >= 0.6 && v <= 0.8));
  }
}

}  // namespace

SyntheticDataset generate_synthetic(const SyntheticOptions& o) {
  if (o.width < 4 || o.height < 4 || o.patterns < 1 || o.channels_per_pattern < 1 ||
      o.background_channels < 0 || !(o.noise >= 0.0))
    fail(ErrorKind::invalid_argument, "synthetic options out of range");

  const std::size_t pixels = static_cast<std::size_t>(o.width) * static_cast<std::size_t>(o.height);
  std::vector<std::uint8_t> mask(pixels, 1);
  for (int y = 0; y < o.height; ++y)
    for (int x = 0; x < o.width; ++x) {
      const int dx = std::min(x, o.width - 1 - x);
      const int dy = std::min(y, o.height - 1 - y);
      if (dx + dy < 3) mask[static_cast<std::size_t>(y) * o.width + x] = 0;
    }
  PixelGrid grid(o.width, o.height, mask);

  std::vector<std::vector<PixelIndex>> support(o.patterns);
  std::vector<int> owner(pixels, -1);
  for (int y = 0; y < o.height; ++y)
    for (int x = 0; x < o.width; ++x) {
      const PixelIndex p = grid.index(x, y);
      if (!grid.valid(p)) continue;
      const double u = (x + 0.5) / o.width;
      const double v = (y + 0.5) / o.height;
      for (int k = 0; k < o.patterns; ++k)
        if (in_pattern(k, o.patterns, u, v)) {
          owner[p] = k;
          support[k].push_back(p);
          break;
        }
    }

  std::mt19937_64 rng(o.seed);
  const int total = o.patterns * o.channels_per_pattern + o.background_channels;
  std::vector<int> group(total);
  for (int i = 0; i < total; ++i)
    group[i] = i < o.patterns * o.channels_per_pattern ? i / o.channels_per_pattern : -1;
  std::shuffle(group.begin(), group.end(), rng);

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> amplitude(0.6, 1.4);
  std::uniform_real_distribution<double> jitter(0.0, 0.5);

  std::vector<MassChannelImage> channels;
  channels.reserve(total);
  double mz = 100.0;
  for (int c = 0; c < total; ++c) {
    MassChannelImage img;
    char id[16];
    std::snprintf(id, sizeof id, "ch%03d", c);
    img.id = id;
    mz += 5.0 + jitter(rng);
    img.mz = std::round(mz * 1e4) / 1e4;
    img.intensities.assign(pixels, 0.0f);
    const double a = amplitude(rng);
    for (PixelIndex p = 0; p < pixels; ++p) {
      if (!grid.valid(p)) continue;
      double value;
      if (group[c] >= 0) {
        value = (owner[p] == group[c] ? a : 0.0) + o.noise * gauss(rng);
      } else {
        value = 0.3 * std::exp(gauss(rng));
      }
      img.intensities[p] = static_cast<float>(std::max(0.0, value));
    }
    channels.push_back(std::move(img));
  }

  // Optical stand-in: each pattern support gets a stain-like tint.
  RgbRaster optical{"stain", std::vector<std::uint8_t>(3 * pixels, 0)};
  static constexpr std::uint8_t tints[3][3] = {{190, 80, 160}, {120, 60, 180}, {230, 150, 190}};
  for (PixelIndex p = 0; p < pixels; ++p) {
    const std::uint8_t* rgb = mask[p] == 0 ? nullptr : (owner[p] < 0 ? nullptr : tints[owner[p] % 3]);
    const std::uint8_t base[3] = {static_cast<std::uint8_t>(mask[p] ? 245 : 255),
                                  static_cast<std::uint8_t>(mask[p] ? 225 : 255),
                                  static_cast<std::uint8_t>(mask[p] ? 235 : 255)};
    for (int k = 0; k < 3; ++k) optical.rgb[3 * p + k] = rgb ? rgb[k] : base[k];
  }

  return SyntheticDataset{
      MsiDataset("synthetic-" + std::to_string(o.patterns) + "x" +
                     std::to_string(o.channels_per_pattern),
                 std::move(grid), std::move(channels), {std::move(optical)}),
      std::move(group), std::move(support)};
}

}  // namespace mcsg
