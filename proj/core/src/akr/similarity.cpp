#include "bridgekit/akr/similarity.hpp"

#include <algorithm>

#include "bridgekit/error.hpp"

namespace bridgekit {

void PairSimilarity::row(int i, std::span<double> out) const {
  if (static_cast<int>(out.size()) != size()) throw ConfigError("similarity row: output size mismatch");
  for (int j = 0; j < size(); ++j) out[static_cast<std::size_t>(j)] = at(i, j);
}

CosineSimilarity::CosineSimilarity(const Matrix& embeddings) : unit_(normalize_rows(embeddings)) {}

double CosineSimilarity::at(int i, int j) const {
  // Fixed operand order keeps at(i, j) == at(j, i) bitwise.
  const int lo = std::min(i, j);
  const int hi = std::max(i, j);
  double s = 0.0;
  for (Eigen::Index k = 0; k < unit_.cols(); ++k) s += unit_(lo, k) * unit_(hi, k);
  return s;
}

void CosineSimilarity::row(int i, std::span<double> out) const {
  if (static_cast<int>(out.size()) != size()) throw ConfigError("similarity row: output size mismatch");
  for (int j = 0; j < size(); ++j) out[static_cast<std::size_t>(j)] = at(i, j);
}

DenseSimilarity::DenseSimilarity(Matrix values, double threshold) : threshold_(threshold) {
  if (values.rows() != values.cols()) throw ConfigError("dense similarity must be square");
  values_ = Matrix(values.rows(), values.cols());
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = i; j < values.cols(); ++j) {
      const double s = 0.5 * (values(i, j) + values(j, i));
      values_(i, j) = s;
      values_(j, i) = s;
    }
  }
}

void DenseSimilarity::row(int i, std::span<double> out) const {
  if (static_cast<int>(out.size()) != size()) throw ConfigError("similarity row: output size mismatch");
  for (int j = 0; j < size(); ++j) out[static_cast<std::size_t>(j)] = values_(i, j);
}

}  // namespace bridgekit
