#include "mcsg/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <zlib.h>

#include "mcsg/error.hpp"

namespace mcsg {

namespace {

// matplotlib viridis sampled at k/16.
constexpr std::array<Rgb8, 17> kViridis = {{
    {68, 1, 84},    {72, 24, 106},  {71, 45, 123},  {66, 64, 134},  {59, 82, 139},
    {51, 99, 141},  {44, 114, 142}, {38, 130, 142}, {33, 145, 140}, {31, 160, 136},
    {40, 174, 128}, {63, 188, 115}, {94, 201, 98},  {132, 212, 75}, {173, 220, 48},
    {216, 226, 25}, {253, 231, 37},
}};

void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>((v >> 24) & 0xFF));
  out.push_back(static_cast<char>((v >> 16) & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
  out.push_back(static_cast<char>(v & 0xFF));
}

std::uint32_t get_u32(std::string_view data, std::size_t at) {
  auto b = [&](std::size_t i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(data[at + i])); };
  return (b(0) << 24) | (b(1) << 16) | (b(2) << 8) | b(3);
}

void put_chunk(std::string& out, const char type[4], std::string_view payload) {
  put_u32(out, static_cast<std::uint32_t>(payload.size()));
  std::string body(type, 4);
  body.append(payload);
  out.append(body);
  const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size()));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

constexpr unsigned char kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};

}  // namespace

std::string_view to_string(Colormap c) { return c == Colormap::viridis ? "viridis" : "gray"; }

std::optional<Colormap> parse_colormap(std::string_view name) {
  if (name == "viridis") return Colormap::viridis;
  if (name == "gray") return Colormap::gray;
  return std::nullopt;
}

Rgb8 apply_colormap(Colormap c, double t) {
  t = std::isfinite(t) ? std::clamp(t, 0.0, 1.0) : 0.0;
  if (c == Colormap::gray) {
    const auto v = static_cast<std::uint8_t>(std::lround(t * 255.0));
    return {v, v, v};
  }
  const double pos = t * static_cast<double>(kViridis.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, kViridis.size() - 1);
  const double f = pos - static_cast<double>(lo);
  Rgb8 out{};
  for (int k = 0; k < 3; ++k)
    out[k] = static_cast<std::uint8_t>(
        std::lround(kViridis[lo][k] + (kViridis[hi][k] - kViridis[lo][k]) * f));
  return out;
}

Raster render_scalar(const PixelGrid& grid, std::span<const double> values, Colormap c) {
  if (values.size() != grid.pixel_count())
    fail(ErrorKind::invalid_argument, "image size does not match grid");
  Raster r{grid.width(), grid.height(), std::vector<std::uint8_t>(4 * grid.pixel_count(), 0)};
  for (PixelIndex p : grid.valid_pixels()) {
    const auto rgb = apply_colormap(c, values[p]);
    std::copy(rgb.begin(), rgb.end(), r.rgba.begin() + static_cast<std::ptrdiff_t>(4 * p));
    r.rgba[4 * p + 3] = 255;
  }
  return r;
}

Raster render_channel(const MsiDataset& ds, ChannelIndex c, Colormap cmap) {
  return render_scalar(ds.grid(), normalized_channel(ds, c), cmap);
}

std::vector<double> mean_normalized_image(const MsiDataset& ds, std::span<const ChannelIndex> channels) {
  std::vector<ChannelIndex> unique(channels.begin(), channels.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  if (unique.empty()) fail(ErrorKind::invalid_argument, "aggregate needs at least one channel");
  std::vector<double> mean(ds.grid().pixel_count(), 0.0);
  for (auto c : unique) {
    const auto img = normalized_channel(ds, c);
    for (std::size_t p = 0; p < mean.size(); ++p) mean[p] += img[p];
  }
  for (auto& v : mean) v /= static_cast<double>(unique.size());
  return mean;
}

Raster render_aggregate(const MsiDataset& ds, std::span<const ChannelIndex> channels, Colormap cmap) {
  return render_scalar(ds.grid(), mean_normalized_image(ds, channels), cmap);
}

Raster render_projection(const MsiDataset& ds, const RgbProjection& projection) {
  const auto& grid = ds.grid();
  Raster r{grid.width(), grid.height(), std::vector<std::uint8_t>(4 * grid.pixel_count(), 0)};
  for (PixelIndex p : grid.valid_pixels()) {
    for (int k = 0; k < 3; ++k)
      r.rgba[4 * p + k] = static_cast<std::uint8_t>(std::lround(std::clamp(projection.rgb[p][k], 0.0, 1.0) * 255.0));
    r.rgba[4 * p + 3] = 255;
  }
  return r;
}

Raster render_optical(const MsiDataset& ds, const RgbRaster& image) {
  const auto& grid = ds.grid();
  Raster r{grid.width(), grid.height(), std::vector<std::uint8_t>(4 * grid.pixel_count(), 0)};
  for (PixelIndex p = 0; p < grid.pixel_count(); ++p) {
    for (int k = 0; k < 3; ++k) r.rgba[4 * p + k] = image.rgb[3 * p + k];
    r.rgba[4 * p + 3] = 255;
  }
  return r;
}

std::string encode_png(const Raster& raster) {
  const auto w = static_cast<std::size_t>(raster.width);
  const auto h = static_cast<std::size_t>(raster.height);
  if (raster.rgba.size() != 4 * w * h) fail(ErrorKind::invalid_argument, "raster size mismatch");
  std::string raw;
  raw.reserve(h * (4 * w + 1));
  for (std::size_t y = 0; y < h; ++y) {
    raw.push_back('\0');
    raw.append(reinterpret_cast<const char*>(raster.rgba.data() + 4 * w * y), 4 * w);
  }
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::string compressed(bound, '\0');
  if (compress2(reinterpret_cast<Bytef*>(compressed.data()), &bound,
                reinterpret_cast<const Bytef*>(raw.data()), static_cast<uLong>(raw.size()),
                Z_BEST_SPEED) != Z_OK)
    fail(ErrorKind::integrity, "zlib compression failed");
  compressed.resize(bound);

  std::string out(reinterpret_cast<const char*>(kSignature), 8);
  std::string ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(w));
  put_u32(ihdr, static_cast<std::uint32_t>(h));
  ihdr += std::string{'\x08', '\x06', '\0', '\0', '\0'};
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", compressed);
  put_chunk(out, "IEND", {});
  return out;
}

Raster decode_png(std::string_view data) {
  if (data.size() < 8 || std::memcmp(data.data(), kSignature, 8) != 0)
    fail(ErrorKind::format, "not a PNG");
  std::size_t at = 8;
  Raster r;
  std::string idat;
  while (at + 12 <= data.size()) {
    const auto len = get_u32(data, at);
    if (at + 12 + len > data.size()) fail(ErrorKind::format, "truncated PNG chunk");
    const auto type = data.substr(at + 4, 4);
    const auto body = data.substr(at + 8, len);
    if (type == "IHDR") {
      r.width = static_cast<int>(get_u32(body, 0));
      r.height = static_cast<int>(get_u32(body, 4));
      if (body[8] != 8 || body[9] != 6) fail(ErrorKind::format, "only 8-bit RGBA PNG supported");
    } else if (type == "IDAT") {
      idat.append(body);
    } else if (type == "IEND") {
      break;
    }
    at += 12 + len;
  }
  const auto w = static_cast<std::size_t>(r.width);
  const auto h = static_cast<std::size_t>(r.height);
  std::string raw(h * (4 * w + 1), '\0');
  uLongf size = static_cast<uLongf>(raw.size());
  if (uncompress(reinterpret_cast<Bytef*>(raw.data()), &size,
                 reinterpret_cast<const Bytef*>(idat.data()), static_cast<uLong>(idat.size())) != Z_OK ||
      size != raw.size())
    fail(ErrorKind::format, "corrupt PNG image data");
  r.rgba.resize(4 * w * h);
  for (std::size_t y = 0; y < h; ++y) {
    if (raw[y * (4 * w + 1)] != 0) fail(ErrorKind::format, "unsupported PNG filter");
    std::memcpy(r.rgba.data() + 4 * w * y, raw.data() + y * (4 * w + 1) + 1, 4 * w);
  }
  return r;
}

}  // namespace mcsg
