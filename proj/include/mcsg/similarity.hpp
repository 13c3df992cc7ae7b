#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "mcsg/dataset.hpp"

namespace mcsg {

enum class SimilarityMeasure { pearson, cosine };

std::string_view to_string(SimilarityMeasure m);
std::optional<SimilarityMeasure> parse_similarity_measure(std::string_view name);

/// Symmetric n x n similarity over valid pixels. Degenerate channels (zero
/// variance for Pearson, zero norm for cosine) have similarity 0 everywhere,
/// including the diagonal.
class SimilarityMatrix {
 public:
  SimilarityMatrix(std::size_t n, SimilarityMeasure measure);

  std::size_t size() const noexcept { return n_; }
  SimilarityMeasure measure() const noexcept { return measure_; }
  double at(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }
  void set(std::size_t i, std::size_t j, double v) {
    values_[i * n_ + j] = v;
    values_[j * n_ + i] = v;
  }
  bool degenerate(std::size_t i) const { return degenerate_[i] != 0; }
  void mark_degenerate(std::size_t i) { degenerate_[i] = 1; }
  const std::vector<double>& values() const noexcept { return values_; }

 private:
  std::size_t n_;
  SimilarityMeasure measure_;
  std::vector<double> values_;
  std::vector<char> degenerate_;
};

/// Throws insufficient_data for fewer than 2 channels.
SimilarityMatrix compute_similarity(const MsiDataset& ds,
                                    SimilarityMeasure measure = SimilarityMeasure::pearson);

}  // namespace mcsg
