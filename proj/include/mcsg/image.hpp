#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mcsg/dataset.hpp"
#include "mcsg/projection.hpp"

namespace mcsg {

enum class Colormap { viridis, gray };

std::string_view to_string(Colormap c);
std::optional<Colormap> parse_colormap(std::string_view name);

using Rgb8 = std::array<std::uint8_t, 3>;

/// Map t in [0,1] through the colormap. viridis interpolates a shipped
/// 17-entry table whose luminance increases monotonically.
Rgb8 apply_colormap(Colormap c, double t);

/// RGBA raster; pixels outside the mask are fully transparent.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgba;

  friend bool operator==(const Raster&, const Raster&) = default;
};

Raster render_scalar(const PixelGrid& grid, std::span<const double> values, Colormap c);
Raster render_channel(const MsiDataset& ds, ChannelIndex c, Colormap cmap);
/// Pixelwise mean of the normalized images of `channels` (duplicates count
/// once). Throws invalid_argument for an empty set.
std::vector<double> mean_normalized_image(const MsiDataset& ds, std::span<const ChannelIndex> channels);
Raster render_aggregate(const MsiDataset& ds, std::span<const ChannelIndex> channels, Colormap cmap);
Raster render_projection(const MsiDataset& ds, const RgbProjection& projection);
Raster render_optical(const MsiDataset& ds, const RgbRaster& image);

/// 8-bit RGBA PNG (zlib-compressed, no filtering).
std::string encode_png(const Raster& raster);
/// Decoder for the subset encode_png writes; used to verify served images.
Raster decode_png(std::string_view data);

}  // namespace mcsg
