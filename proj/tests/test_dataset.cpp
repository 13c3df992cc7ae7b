#include <algorithm>
#include <cstring>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <random>

#include <doctest.h>
#include <json.hpp>

#include "mcsg/dataset.hpp"
#include "mcsg/synthetic.hpp"
#include "support/check.hpp"
#include "support/fixtures.hpp"

using namespace mcsg;
using nlohmann::json;

namespace {

json minimal_container() {
  return {{"format", "msi-dataset"},
          {"version", 1},
          {"name", "tiny"},
          {"grid", {{"width", 2}, {"height", 2}, {"mask_rle", {0, 4}}}},
          {"channels",
           {{{"id", "a"}, {"mz", 100.5}, {"intensities", {3, 3, 3, 3}}},
            {{"id", "b"}, {"mz", 200.25}, {"intensities", {1, 1, 1, 1}}}}}};
}

std::filesystem::path temp_dir() {
  auto dir = std::filesystem::temp_directory_path() / ("mcsg_test_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("grid validates its mask") {
  CHECK_ERROR_KIND(PixelGrid(0, 3), ErrorKind::validation);
  CHECK_ERROR_KIND(PixelGrid(2, 2, {1, 1, 1}), ErrorKind::validation);
  CHECK_ERROR_KIND(PixelGrid(2, 2, {0, 0, 0, 0}), ErrorKind::validation);
  const PixelGrid g(3, 2, {0, 1, 1, 0, 0, 1});
  CHECK(g.valid_pixels() == std::vector<PixelIndex>{1, 2, 5});
  CHECK(g.index(2, 1) == 5);
}

TEST_CASE("minimal container loads") {
  const auto ds = parse_dataset(minimal_container().dump());
  CHECK(ds.channel_count() == 2);
  CHECK(ds.grid().valid_pixels().size() == 4);
  CHECK(ds.channel(0).id == "a");
  CHECK(ds.range(0).constant());
}

TEST_CASE("dimension mismatch is a validation error") {
  auto doc = minimal_container();
  doc["channels"][1]["intensities"] = {1, 1, 1};
  const auto [kind, msg] = check::error_of([&] { parse_dataset(doc.dump()); });
  CHECK(kind == ErrorKind::validation);
  CHECK(msg.find("dimension mismatch") != std::string::npos);
}

TEST_CASE("empty mask is a validation error") {
  auto doc = minimal_container();
  doc["grid"]["mask_rle"] = {4};
  CHECK_ERROR_KIND(parse_dataset(doc.dump()), ErrorKind::validation);
}

TEST_CASE("format errors carry line and field diagnostics") {
  const auto [kind, msg] = check::error_of([] { parse_dataset("{\n  \"format\": \"msi-dataset\",\n  oops\n}"); });
  CHECK(kind == ErrorKind::format);
  CHECK(msg.find("line 3") != std::string::npos);

  auto doc = minimal_container();
  doc["channels"][0].erase("mz");
  const auto [kind2, msg2] = check::error_of([&] { parse_dataset(doc.dump()); });
  CHECK(kind2 == ErrorKind::format);
  CHECK(msg2.find("channels[0]") != std::string::npos);
  CHECK(msg2.find("mz") != std::string::npos);

  doc = minimal_container();
  doc["channels"][0]["intensities"][2] = "x";
  CHECK_ERROR_KIND(parse_dataset(doc.dump()), ErrorKind::format);
}

TEST_CASE("channel invariants") {
  auto doc = minimal_container();
  doc["channels"][1]["mz"] = 50.0;
  CHECK_ERROR_KIND(parse_dataset(doc.dump()), ErrorKind::validation);
  doc = minimal_container();
  doc["channels"][1]["id"] = "a";
  CHECK_ERROR_KIND(parse_dataset(doc.dump()), ErrorKind::validation);
  doc = minimal_container();
  doc["channels"][1]["intensities"][0] = -1.0;
  CHECK_ERROR_KIND(parse_dataset(doc.dump()), ErrorKind::validation);
  doc = minimal_container();
  doc["channels"][1]["id"] = "has,comma";
  CHECK_ERROR_KIND(parse_dataset(doc.dump()), ErrorKind::validation);
}

TEST_CASE("mask run-length encoding round-trips") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::uint8_t> mask(1 + rng() % 200);
    for (auto& m : mask) m = rng() % 3 == 0 ? 0 : 1;
    const auto runs = encode_mask_rle(mask);
    CHECK(decode_mask_rle(runs, mask.size()) == mask);
  }
  const std::vector<std::uint8_t> starts_valid{1, 1, 0, 1};
  CHECK(encode_mask_rle(starts_valid) == std::vector<std::uint64_t>{0, 2, 1, 1});
  const std::vector<std::uint64_t> too_long{0, 5};
  CHECK_ERROR_KIND(decode_mask_rle(too_long, 4), ErrorKind::validation);
}

TEST_CASE("normalization examples") {
  const auto ds = fixture::dataset_from(2, 2, {{0, 5, 10, 10}, {7, 7, 7, 7}});
  CHECK(normalized_channel(ds, "c00") == std::vector<double>{0, 0.5, 1, 1});
  CHECK(normalized_channel(ds, "c01") == std::vector<double>{0, 0, 0, 0});
  CHECK_ERROR_KIND(normalized_channel(ds, "nope"), ErrorKind::not_found);
}

TEST_CASE("normalization ignores masked-out pixels") {
  const auto ds = fixture::dataset_from(2, 2, {{100, 2, 4, 6}}, {0, 1, 1, 1});
  CHECK(normalized_channel(ds, ChannelIndex{0}) == std::vector<double>{0, 0, 0.5, 1});
}

TEST_CASE("normalization is in range and rank preserving") {
  std::mt19937_64 rng(11);
  const auto ds = fixture::random_dataset(rng, 9, 7, 6);
  for (ChannelIndex c = 0; c < ds.channel_count(); ++c) {
    const auto n = normalized_channel(ds, c);
    const auto& raw = ds.channel(c).intensities;
    CHECK(*std::min_element(n.begin(), n.end()) == 0.0);
    CHECK(*std::max_element(n.begin(), n.end()) == 1.0);
    const double lo = *std::min_element(raw.begin(), raw.end());
    const double hi = *std::max_element(raw.begin(), raw.end());
    for (std::size_t p = 0; p < n.size(); ++p) {
      CHECK(n[p] == doctest::Approx((raw[p] - lo) / (hi - lo)).epsilon(1e-12));
      for (std::size_t q = 0; q < n.size(); ++q)
        if (raw[p] < raw[q]) CHECK(n[p] < n[q]);
    }
  }
}

TEST_CASE("synthetic dataset has the documented header") {
  const auto synth = generate_synthetic();
  const auto& ds = synth.dataset;
  CHECK(ds.channel_count() == 50);
  CHECK(ds.grid().width() == 32);
  CHECK(ds.grid().height() == 32);
  for (ChannelIndex c = 1; c < ds.channel_count(); ++c) CHECK(ds.channel(c).mz > ds.channel(c - 1).mz);
  CHECK(std::count(synth.group.begin(), synth.group.end(), -1) == 5);
  for (int g = 0; g < 3; ++g) CHECK(std::count(synth.group.begin(), synth.group.end(), g) == 15);
  CHECK(ds.find_optical("stain") != nullptr);
  CHECK(generate_synthetic() .dataset == ds);
}

TEST_CASE("save and load round-trip bit-exactly") {
  const auto dir = temp_dir();
  const auto ds = generate_synthetic().dataset;
  for (auto mode : {SidecarMode::inline_values, SidecarMode::binary_sidecar}) {
    const auto path = dir / (mode == SidecarMode::inline_values ? "inline.json" : "sidecar.json");
    save_dataset(ds, path, mode);
    const auto back = load_dataset(path);
    CHECK(back == ds);
    for (ChannelIndex c = 0; c < ds.channel_count(); ++c)
      CHECK(std::memcmp(back.channel(c).intensities.data(), ds.channel(c).intensities.data(),
                        ds.channel(c).intensities.size() * sizeof(float)) == 0);
  }
  CHECK(std::filesystem::file_size(dir / "sidecar.bin") == 50u * 32u * 32u * 4u);
  CHECK_ERROR_KIND(load_dataset(dir / "missing.json"), ErrorKind::io);
  std::filesystem::remove_all(dir);
}

TEST_CASE("sidecar size mismatch is reported") {
  const auto dir = temp_dir();
  const auto ds = fixture::dataset_from(2, 2, {{1, 2, 3, 4}, {4, 3, 2, 1}});
  save_dataset(ds, dir / "d.json", SidecarMode::binary_sidecar);
  std::filesystem::resize_file(dir / "d.bin", 20);
  CHECK_ERROR_KIND(load_dataset(dir / "d.json"), ErrorKind::validation);
  std::filesystem::remove_all(dir);
}
