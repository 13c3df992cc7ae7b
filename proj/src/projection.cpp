#include "mcsg/projection.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "mcsg/error.hpp"

namespace mcsg {

RgbProjection compute_projection(const MsiDataset& ds) {
  const std::size_t channels = ds.channel_count();
  if (channels < 3)
    fail(ErrorKind::insufficient_data, "projection needs at least 3 channels, dataset has " +
                                           std::to_string(channels));
  const auto& pixels = ds.grid().valid_pixels();
  const auto rows = static_cast<Eigen::Index>(pixels.size());
  const auto cols = static_cast<Eigen::Index>(channels);

  Eigen::MatrixXd x(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    const auto& values = ds.channel(static_cast<ChannelIndex>(c)).intensities;
    for (Eigen::Index r = 0; r < rows; ++r) x(r, c) = values[pixels[static_cast<std::size_t>(r)]];
  }
  x.rowwise() -= x.colwise().mean();
  const double dof = rows > 1 ? static_cast<double>(rows - 1) : 1.0;
  const Eigen::MatrixXd cov = (x.transpose() * x) / dof;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) fail(ErrorKind::integrity, "eigendecomposition failed");
  const Eigen::VectorXd values = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd vectors = solver.eigenvectors();

  RgbProjection out;
  out.eigenvalues.resize(channels);
  for (std::size_t k = 0; k < channels; ++k)
    out.eigenvalues[k] = std::max(0.0, values(cols - 1 - static_cast<Eigen::Index>(k)));
  out.rgb.assign(ds.grid().pixel_count(), {0.0, 0.0, 0.0});

  const double scale = std::max(1.0, out.eigenvalues.front());
  for (int k = 0; k < 3; ++k) {
    Eigen::VectorXd v = vectors.col(cols - 1 - k);
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < cols; ++i)
      if (std::abs(v(i)) > std::abs(v(arg)) + 1e-12) arg = i;
    if (v(arg) < 0) v = -v;
    out.loadings[k].assign(v.data(), v.data() + cols);

    const Eigen::VectorXd s = x * v;
    out.scores[k].assign(s.data(), s.data() + rows);
    if (!(out.eigenvalues[k] > 1e-12 * scale)) continue;
    const double lo = s.minCoeff(), hi = s.maxCoeff();
    if (!(hi > lo)) continue;
    for (Eigen::Index r = 0; r < rows; ++r)
      out.rgb[pixels[static_cast<std::size_t>(r)]][k] = (s(r) - lo) / (hi - lo);
  }
  return out;
}

}  // namespace mcsg
