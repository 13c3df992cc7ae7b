#include "mcsg/similarity.hpp"

#include <algorithm>
#include <cmath>

#include "mcsg/error.hpp"

namespace mcsg {

std::string_view to_string(SimilarityMeasure m) {
  return m == SimilarityMeasure::pearson ? "pearson" : "cosine";
}

std::optional<SimilarityMeasure> parse_similarity_measure(std::string_view name) {
  if (name == "pearson") return SimilarityMeasure::pearson;
  if (name == "cosine") return SimilarityMeasure::cosine;
  return std::nullopt;
}

SimilarityMatrix::SimilarityMatrix(std::size_t n, SimilarityMeasure measure)
    : n_(n), measure_(measure), values_(n * n, 0.0), degenerate_(n, 0) {}

SimilarityMatrix compute_similarity(const MsiDataset& ds, SimilarityMeasure measure) {
  const std::size_t n = ds.channel_count();
  if (n < 2)
    fail(ErrorKind::insufficient_data, "similarity needs at least 2 channels, dataset has " +
                                           std::to_string(n));
  const auto& pixels = ds.grid().valid_pixels();
  const std::size_t m = pixels.size();

  // Each channel becomes a unit vector (centered first for Pearson); the
  // similarity is then a plain dot product.
  std::vector<std::vector<double>> unit(n, std::vector<double>(m));
  SimilarityMatrix sim(n, measure);
  for (std::size_t c = 0; c < n; ++c) {
    const auto& values = ds.channel(static_cast<ChannelIndex>(c)).intensities;
    auto& u = unit[c];
    for (std::size_t k = 0; k < m; ++k) u[k] = values[pixels[k]];
    if (measure == SimilarityMeasure::pearson) {
      double mean = 0.0;
      for (double v : u) mean += v;
      mean /= static_cast<double>(m);
      for (double& v : u) v -= mean;
    }
    double norm = 0.0;
    for (double v : u) norm += v * v;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || (measure == SimilarityMeasure::pearson && ds.range(static_cast<ChannelIndex>(c)).constant())) {
      sim.mark_degenerate(c);
      std::fill(u.begin(), u.end(), 0.0);
      continue;
    }
    for (double& v : u) v /= norm;
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!sim.degenerate(i)) sim.set(i, i, 1.0);
    for (std::size_t j = i + 1; j < n; ++j) {
      if (sim.degenerate(i) || sim.degenerate(j)) continue;
      double dot = 0.0;
      const auto& a = unit[i];
      const auto& b = unit[j];
      for (std::size_t k = 0; k < m; ++k) dot += a[k] * b[k];
      sim.set(i, j, std::clamp(dot, -1.0, 1.0));
    }
  }
  return sim;
}

}  // namespace mcsg
