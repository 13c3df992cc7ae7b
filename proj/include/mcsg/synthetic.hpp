#pragma once

#include <cstdint>
#include <vector>

#include "mcsg/dataset.hpp"

namespace mcsg {

/// Planted-pattern generator: `patterns` spatial patterns with disjoint
/// supports, `channels_per_pattern` noisy scaled copies of each, plus
/// `background_channels` of heavy-tailed spatially unstructured noise.
/// Channel order is shuffled so pattern groups interleave in mz.
struct SyntheticOptions {
  int width = 32;
  int height = 32;
  int patterns = 3;
  int channels_per_pattern = 15;
  int background_channels = 5;
  double noise = 0.05;  // standard deviation of additive Gaussian noise
  std::uint64_t seed = 1;
};

struct SyntheticDataset {
  MsiDataset dataset;
  std::vector<int> group;                      // per channel; -1 for background
  std::vector<std::vector<PixelIndex>> support;  // valid pixels of each pattern
};

SyntheticDataset generate_synthetic(const SyntheticOptions& options = {});

}  // namespace mcsg
