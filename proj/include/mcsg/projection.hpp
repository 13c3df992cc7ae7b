#pragma once

#include <array>
#include <vector>

#include "mcsg/dataset.hpp"

namespace mcsg {

/// Three-component PCA false-color image. Observations are valid pixels,
/// features are channels. Component k drives color channel k (R, G, B) after
/// min-max scaling over valid pixels; components with no variance render 0.
struct RgbProjection {
  std::vector<std::array<double, 3>> rgb;       // per grid pixel, 0 outside the mask
  std::vector<double> eigenvalues;              // covariance spectrum, descending
  std::array<std::vector<double>, 3> loadings;  // unit vectors over channels
  std::array<std::vector<double>, 3> scores;    // centered data projected, per valid pixel
};

/// Throws insufficient_data for fewer than 3 channels. The sign of each
/// component makes its largest-magnitude loading positive.
RgbProjection compute_projection(const MsiDataset& ds);

}  // namespace mcsg
