#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mcsg {

using ChannelIndex = std::uint32_t;
using PixelIndex = std::size_t;

/// Pixel domain shared by every image of a dataset. Pixels are addressed
/// row-major: index = y * width + x.
class PixelGrid {
 public:
  /// Full grid with every pixel valid.
  PixelGrid(int width, int height);
  /// `mask` holds width*height entries, nonzero = valid tissue pixel.
  PixelGrid(int width, int height, std::vector<std::uint8_t> mask);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return mask_.size(); }

  bool valid(PixelIndex p) const { return mask_[p] != 0; }
  bool valid(int x, int y) const { return mask_[index(x, y)] != 0; }
  PixelIndex index(int x, int y) const {
    return static_cast<PixelIndex>(y) * static_cast<PixelIndex>(width_) +
           static_cast<PixelIndex>(x);
  }

  const std::vector<std::uint8_t>& mask() const noexcept { return mask_; }
  /// Valid pixel indices in ascending order.
  const std::vector<PixelIndex>& valid_pixels() const noexcept { return valid_; }

  friend bool operator==(const PixelGrid&, const PixelGrid&) = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> mask_;
  std::vector<PixelIndex> valid_;
};

/// Intensities are stored for the full grid (row-major, 32-bit float). Only
/// values at valid pixels carry meaning; the rest are kept verbatim so a
/// dataset round-trips through its file format.
struct MassChannelImage {
  std::string id;
  double mz = 0.0;
  std::vector<float> intensities;

  friend bool operator==(const MassChannelImage&, const MassChannelImage&) = default;
};

struct RgbRaster {
  std::string name;
  std::vector<std::uint8_t> rgb;  // 3 bytes per pixel, row-major

  friend bool operator==(const RgbRaster&, const RgbRaster&) = default;
};

struct ChannelRange {
  double min = 0.0;
  double max = 0.0;
  bool constant() const noexcept { return !(max > min); }
};

/// Immutable stack of mass-channel images over a masked grid.
class MsiDataset {
 public:
  /// Validates every invariant; throws mcsg::Error (validation) on violation.
  MsiDataset(std::string name, PixelGrid grid,
             std::vector<MassChannelImage> channels,
             std::vector<RgbRaster> optical = {});

  const std::string& name() const noexcept { return name_; }
  const PixelGrid& grid() const noexcept { return grid_; }
  std::size_t channel_count() const noexcept { return channels_.size(); }
  const std::vector<MassChannelImage>& channels() const noexcept { return channels_; }
  const MassChannelImage& channel(ChannelIndex c) const { return channels_.at(c); }
  const std::vector<RgbRaster>& optical_images() const noexcept { return optical_; }

  /// Min/max over valid pixels, cached at construction.
  const ChannelRange& range(ChannelIndex c) const { return ranges_.at(c); }

  std::optional<ChannelIndex> find_channel(std::string_view id) const;
  /// Throws not_found.
  ChannelIndex require_channel(std::string_view id) const;
  const RgbRaster* find_optical(std::string_view name) const;

  friend bool operator==(const MsiDataset& a, const MsiDataset& b) {
    return a.name_ == b.name_ && a.grid_ == b.grid_ && a.channels_ == b.channels_ &&
           a.optical_ == b.optical_;
  }

 private:
  std::string name_;
  PixelGrid grid_;
  std::vector<MassChannelImage> channels_;
  std::vector<RgbRaster> optical_;
  std::vector<ChannelRange> ranges_;
};

/// True if `id` is usable as a node identifier (non-empty, drawn from
/// [A-Za-z0-9_.:-]). Commas and slashes are reserved by the query syntax
/// and by community identifiers.
bool is_valid_node_id(std::string_view id);

// Container format ------------------------------------------------------------

/// Parses a dataset container. Relative sidecar paths resolve against
/// `base_dir`. Format errors carry the offending field path and, for syntax
/// errors, the line number.
MsiDataset parse_dataset(std::string_view text,
                         const std::filesystem::path& base_dir = {});
MsiDataset load_dataset(const std::filesystem::path& path);

enum class SidecarMode { inline_values, binary_sidecar };

/// Writes the dataset container; with binary_sidecar the intensities go to
/// `<path stem>.bin` next to the JSON file.
void save_dataset(const MsiDataset& ds, const std::filesystem::path& path,
                  SidecarMode mode = SidecarMode::inline_values);
std::string serialize_dataset_inline(const MsiDataset& ds);

/// Run lengths alternate invalid/valid starting with an invalid run (which may
/// be zero), row-major.
std::vector<std::uint64_t> encode_mask_rle(std::span<const std::uint8_t> mask);
std::vector<std::uint8_t> decode_mask_rle(std::span<const std::uint64_t> runs,
                                          std::size_t pixel_count);

// Normalization ---------------------------------------------------------------

/// Per-channel min-max scaling over valid pixels. Returns width*height values;
/// invalid pixels and constant channels are 0.
std::vector<double> normalized_channel(const MsiDataset& ds, ChannelIndex c);
std::vector<double> normalized_channel(const MsiDataset& ds, std::string_view id);

}  // namespace mcsg
