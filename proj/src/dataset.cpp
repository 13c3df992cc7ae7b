#include "mcsg/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mcsg/error.hpp"

namespace mcsg {

using nlohmann::json;

namespace {

constexpr std::string_view kFormatTag = "msi-dataset";
constexpr int kFormatVersion = 1;

std::vector<std::uint8_t> all_valid(int width, int height) {
  if (width <= 0 || height <= 0)
    fail(ErrorKind::validation, "grid dimensions must be positive");
  return std::vector<std::uint8_t>(
      static_cast<std::size_t>(width) * static_cast<std::size_t>(height), 1);
}

}  // namespace

PixelGrid::PixelGrid(int width, int height)
    : PixelGrid(width, height, all_valid(width, height)) {}

PixelGrid::PixelGrid(int width, int height, std::vector<std::uint8_t> mask)
    : width_(width), height_(height), mask_(std::move(mask)) {
  if (width_ <= 0 || height_ <= 0)
    fail(ErrorKind::validation, "grid dimensions must be positive");
  const auto expected = static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  if (mask_.size() != expected)
    fail(ErrorKind::validation, "mask has " + std::to_string(mask_.size()) +
                                    " entries, grid needs " + std::to_string(expected));
  for (PixelIndex p = 0; p < mask_.size(); ++p) {
    if (mask_[p] != 0) {
      mask_[p] = 1;
      valid_.push_back(p);
    }
  }
  if (valid_.empty()) fail(ErrorKind::validation, "mask has no valid pixel");
}

bool is_valid_node_id(std::string_view id) {
  if (id.empty()) return false;
  return std::all_of(id.begin(), id.end(), [](char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
           ch == '_' || ch == '.' || ch == ':' || ch == '-';
  });
}

MsiDataset::MsiDataset(std::string name, PixelGrid grid,
                       std::vector<MassChannelImage> channels,
                       std::vector<RgbRaster> optical)
    : name_(std::move(name)),
      grid_(std::move(grid)),
      channels_(std::move(channels)),
      optical_(std::move(optical)) {
  const std::size_t n = grid_.pixel_count();
  for (std::size_t c = 0; c < channels_.size(); ++c) {
    const auto& ch = channels_[c];
    const std::string where = "channel '" + ch.id + "'";
    if (!is_valid_node_id(ch.id))
      fail(ErrorKind::validation, where + ": invalid channel id");
    if (!(std::isfinite(ch.mz) && ch.mz > 0.0))
      fail(ErrorKind::validation, where + ": mz must be positive and finite");
    if (c > 0 && !(ch.mz > channels_[c - 1].mz))
      fail(ErrorKind::validation, where + ": channels must be ordered by strictly ascending mz");
    if (ch.intensities.size() != n)
      fail(ErrorKind::validation, where + ": dimension mismatch, " +
                                      std::to_string(ch.intensities.size()) +
                                      " intensities for a grid of " + std::to_string(n) +
                                      " pixels");
    ChannelRange range{std::numeric_limits<double>::infinity(),
                       -std::numeric_limits<double>::infinity()};
    for (PixelIndex p : grid_.valid_pixels()) {
      const double v = ch.intensities[p];
      if (!std::isfinite(v) || v < 0.0)
        fail(ErrorKind::validation, where + ": intensity at pixel " + std::to_string(p) +
                                        " is negative or not finite");
      range.min = std::min(range.min, v);
      range.max = std::max(range.max, v);
    }
    ranges_.push_back(range);
  }
  for (std::size_t i = 0; i < channels_.size(); ++i)
    for (std::size_t j = i + 1; j < channels_.size(); ++j)
      if (channels_[i].id == channels_[j].id)
        fail(ErrorKind::validation, "duplicate channel id '" + channels_[i].id + "'");
  for (const auto& img : optical_) {
    if (img.name.empty() || img.name.find('/') != std::string::npos)
      fail(ErrorKind::validation, "optical image name must be non-empty without '/'");
    if (img.rgb.size() != 3 * n)
      fail(ErrorKind::validation, "optical image '" + img.name + "': dimension mismatch, " +
                                      std::to_string(img.rgb.size()) + " bytes for " +
                                      std::to_string(n) + " RGB pixels");
  }
  for (std::size_t i = 0; i < optical_.size(); ++i)
    for (std::size_t j = i + 1; j < optical_.size(); ++j)
      if (optical_[i].name == optical_[j].name)
        fail(ErrorKind::validation, "duplicate optical image '" + optical_[i].name + "'");
}

std::optional<ChannelIndex> MsiDataset::find_channel(std::string_view id) const {
  for (std::size_t c = 0; c < channels_.size(); ++c)
    if (channels_[c].id == id) return static_cast<ChannelIndex>(c);
  return std::nullopt;
}

ChannelIndex MsiDataset::require_channel(std::string_view id) const {
  auto c = find_channel(id);
  if (!c) fail(ErrorKind::not_found, "unknown channel '" + std::string(id) + "'");
  return *c;
}

const RgbRaster* MsiDataset::find_optical(std::string_view name) const {
  for (const auto& img : optical_)
    if (img.name == name) return &img;
  return nullptr;
}

// Mask RLE --------------------------------------------------------------------

std::vector<std::uint64_t> encode_mask_rle(std::span<const std::uint8_t> mask) {
  std::vector<std::uint64_t> runs;
  bool current = false;
  std::uint64_t length = 0;
  for (auto m : mask) {
    const bool v = m != 0;
    if (v != current) {
      runs.push_back(length);
      current = v;
      length = 0;
    }
    ++length;
  }
  runs.push_back(length);
  return runs;
}

std::vector<std::uint8_t> decode_mask_rle(std::span<const std::uint64_t> runs,
                                          std::size_t pixel_count) {
  std::vector<std::uint8_t> mask;
  mask.reserve(pixel_count);
  std::uint8_t value = 0;
  for (auto run : runs) {
    if (run > pixel_count - mask.size())
      fail(ErrorKind::validation, "mask_rle covers more than " + std::to_string(pixel_count) +
                                      " pixels");
    mask.insert(mask.end(), run, value);
    value ^= 1;
  }
  if (mask.size() != pixel_count)
    fail(ErrorKind::validation, "mask_rle covers " + std::to_string(mask.size()) +
                                    " pixels, grid has " + std::to_string(pixel_count));
  return mask;
}

// Container parsing -------------------------------------------------------------

namespace {

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

const json& field(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(ErrorKind::format, path + "." + key + ": missing field");
  return *it;
}

template <typename T>
T get_as(const json& v, const std::string& path, const char* expected) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    fail(ErrorKind::format, path + ": expected " + expected);
  }
}

int get_positive_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(ErrorKind::format, path + ": expected integer");
  auto value = v.get<std::int64_t>();
  if (value <= 0 || value > (1 << 20)) fail(ErrorKind::validation, path + ": out of range");
  return static_cast<int>(value);
}

std::vector<float> read_sidecar(const std::filesystem::path& file, std::uint64_t offset,
                                std::size_t count, const std::string& path) {
  std::ifstream in(file, std::ios::binary);
  if (!in) fail(ErrorKind::io, path + ": cannot open sidecar " + file.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::uint64_t>(in.tellg());
  const std::uint64_t bytes = static_cast<std::uint64_t>(count) * 4;
  if (offset > size || size - offset < bytes)
    fail(ErrorKind::validation, path + ": dimension mismatch, sidecar holds " +
                                    std::to_string((size > offset ? size - offset : 0) / 4) +
                                    " values past offset, grid needs " + std::to_string(count));
  in.seekg(static_cast<std::streamoff>(offset));
  std::vector<unsigned char> raw(bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(bytes));
  std::vector<float> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    const unsigned char* b = raw.data() + 4 * i;
    const std::uint32_t bits = std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) |
                               (std::uint32_t{b[2]} << 16) | (std::uint32_t{b[3]} << 24);
    values[i] = std::bit_cast<float>(bits);
  }
  return values;
}

}  // namespace

MsiDataset parse_dataset(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::format, "line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
  }
  if (!doc.is_object()) fail(ErrorKind::format, "$: expected object");
  if (get_as<std::string>(field(doc, "format", "$"), "$.format", "string") != kFormatTag)
    fail(ErrorKind::format, "$.format: expected \"msi-dataset\"");
  if (get_as<int>(field(doc, "version", "$"), "$.version", "integer") != kFormatVersion)
    fail(ErrorKind::format, "$.version: unsupported version");

  std::string name = doc.contains("name") ? get_as<std::string>(doc["name"], "$.name", "string")
                                          : std::string{};
  const json& g = field(doc, "grid", "$");
  const int width = get_positive_int(field(g, "width", "$.grid"), "$.grid.width");
  const int height = get_positive_int(field(g, "height", "$.grid"), "$.grid.height");
  const std::size_t pixels = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  std::vector<std::uint8_t> mask(pixels, 1);
  if (g.contains("mask_rle")) {
    auto runs = get_as<std::vector<std::uint64_t>>(g["mask_rle"], "$.grid.mask_rle",
                                                   "array of non-negative integers");
    mask = decode_mask_rle(runs, pixels);
  }
  PixelGrid grid(width, height, std::move(mask));

  std::filesystem::path sidecar;
  if (doc.contains("sidecar"))
    sidecar = base_dir / get_as<std::string>(doc["sidecar"], "$.sidecar", "string");

  const json& chans = field(doc, "channels", "$");
  if (!chans.is_array()) fail(ErrorKind::format, "$.channels: expected array");
  std::vector<MassChannelImage> channels;
  for (std::size_t i = 0; i < chans.size(); ++i) {
    const std::string path = "$.channels[" + std::to_string(i) + "]";
    const json& c = chans[i];
    if (!c.is_object()) fail(ErrorKind::format, path + ": expected object");
    MassChannelImage img;
    img.id = get_as<std::string>(field(c, "id", path), path + ".id", "string");
    img.mz = get_as<double>(field(c, "mz", path), path + ".mz", "number");
    if (c.contains("intensities")) {
      const json& vals = c["intensities"];
      if (!vals.is_array()) fail(ErrorKind::format, path + ".intensities: expected array");
      img.intensities.reserve(vals.size());
      for (std::size_t k = 0; k < vals.size(); ++k) {
        if (!vals[k].is_number())
          fail(ErrorKind::format,
               path + ".intensities[" + std::to_string(k) + "]: expected number");
        img.intensities.push_back(static_cast<float>(vals[k].get<double>()));
      }
    } else if (c.contains("offset")) {
      if (sidecar.empty()) fail(ErrorKind::format, path + ".offset: no sidecar declared");
      auto offset = get_as<std::uint64_t>(c["offset"], path + ".offset", "non-negative integer");
      img.intensities = read_sidecar(sidecar, offset, pixels, path);
    } else {
      fail(ErrorKind::format, path + ": needs either intensities or offset");
    }
    channels.push_back(std::move(img));
  }

  std::vector<RgbRaster> optical;
  if (doc.contains("optical")) {
    const json& opt = doc["optical"];
    if (!opt.is_array()) fail(ErrorKind::format, "$.optical: expected array");
    for (std::size_t i = 0; i < opt.size(); ++i) {
      const std::string path = "$.optical[" + std::to_string(i) + "]";
      RgbRaster r;
      r.name = get_as<std::string>(field(opt[i], "name", path), path + ".name", "string");
      r.rgb = get_as<std::vector<std::uint8_t>>(field(opt[i], "rgb", path), path + ".rgb",
                                                "array of bytes");
      optical.push_back(std::move(r));
    }
  }
  return MsiDataset(std::move(name), std::move(grid), std::move(channels), std::move(optical));
}

MsiDataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::io, "cannot open dataset " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str(), path.parent_path());
}

namespace {

json dataset_header(const MsiDataset& ds) {
  json doc;
  doc["format"] = kFormatTag;
  doc["version"] = kFormatVersion;
  doc["name"] = ds.name();
  doc["grid"] = {{"width", ds.grid().width()},
                 {"height", ds.grid().height()},
                 {"mask_rle", encode_mask_rle(ds.grid().mask())}};
  json optical = json::array();
  for (const auto& img : ds.optical_images())
    optical.push_back({{"name", img.name}, {"rgb", img.rgb}});
  if (!optical.empty()) doc["optical"] = std::move(optical);
  return doc;
}

}  // namespace

std::string serialize_dataset_inline(const MsiDataset& ds) {
  json doc = dataset_header(ds);
  json channels = json::array();
  for (const auto& ch : ds.channels()) {
    json values = json::array();
    for (float v : ch.intensities) values.push_back(v);
    channels.push_back({{"id", ch.id}, {"mz", ch.mz}, {"intensities", std::move(values)}});
  }
  doc["channels"] = std::move(channels);
  return doc.dump(1);
}

void save_dataset(const MsiDataset& ds, const std::filesystem::path& path, SidecarMode mode) {
  std::string text;
  if (mode == SidecarMode::inline_values) {
    text = serialize_dataset_inline(ds);
  } else {
    auto bin_path = path;
    bin_path.replace_extension(".bin");
    std::ofstream bin(bin_path, std::ios::binary);
    if (!bin) fail(ErrorKind::io, "cannot write sidecar " + bin_path.string());
    json doc = dataset_header(ds);
    doc["sidecar"] = bin_path.filename().string();
    json channels = json::array();
    std::uint64_t offset = 0;
    for (const auto& ch : ds.channels()) {
      for (float v : ch.intensities) {
        const auto bits = std::bit_cast<std::uint32_t>(v);
        const char b[4] = {static_cast<char>(bits & 0xFF), static_cast<char>((bits >> 8) & 0xFF),
                           static_cast<char>((bits >> 16) & 0xFF),
                           static_cast<char>((bits >> 24) & 0xFF)};
        bin.write(b, 4);
      }
      channels.push_back({{"id", ch.id}, {"mz", ch.mz}, {"offset", offset}});
      offset += 4 * ch.intensities.size();
    }
    doc["channels"] = std::move(channels);
    text = doc.dump(1);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::io, "cannot write dataset " + path.string());
  out << text;
}

// Normalization -----------------------------------------------------------------

std::vector<double> normalized_channel(const MsiDataset& ds, ChannelIndex c) {
  const auto& img = ds.channel(c);
  const auto& range = ds.range(c);
  std::vector<double> out(ds.grid().pixel_count(), 0.0);
  if (range.constant()) return out;
  const double span = range.max - range.min;
  for (PixelIndex p : ds.grid().valid_pixels())
    out[p] = std::clamp((img.intensities[p] - range.min) / span, 0.0, 1.0);
  return out;
}

std::vector<double> normalized_channel(const MsiDataset& ds, std::string_view id) {
  return normalized_channel(ds, ds.require_channel(id));
}

}  // namespace mcsg
