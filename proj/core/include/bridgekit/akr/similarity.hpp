#pragma once

#include <span>
#include <vector>

#include "bridgekit/data/dataset.hpp"
#include "bridgekit/numerics/matrix.hpp"

namespace bridgekit {

/// Symmetric pairwise similarity over dataset node ids.
class PairSimilarity {
 public:
  virtual ~PairSimilarity() = default;

  virtual int size() const = 0;
  virtual double at(int i, int j) const = 0;
  /// Similarities of node i against every node; `out` has size() entries.
  virtual void row(int i, std::span<double> out) const;
  /// Pairs with similarity >= threshold are classified as same-class.
  virtual double decision_threshold() const = 0;
};

/// Cosine similarity between rows of an embedding matrix (row = node id).
/// Rows with norm < 1e-12 have similarity 0 to everything.
class CosineSimilarity final : public PairSimilarity {
 public:
  explicit CosineSimilarity(const Matrix& embeddings);

  int size() const override { return static_cast<int>(unit_.rows()); }
  double at(int i, int j) const override;
  void row(int i, std::span<double> out) const override;
  /// sigmoid(S) >= 0.5  <=>  S >= 0.
  double decision_threshold() const override { return 0.0; }

  const Matrix& unit_rows() const { return unit_; }

 private:
  Matrix unit_;
};

/// Precomputed N x N similarity matrix. The matrix is symmetrized on
/// construction as (S + S^T) / 2.
class DenseSimilarity final : public PairSimilarity {
 public:
  DenseSimilarity(Matrix values, double threshold);

  int size() const override { return static_cast<int>(values_.rows()); }
  double at(int i, int j) const override { return values_(i, j); }
  void row(int i, std::span<double> out) const override;
  double decision_threshold() const override { return threshold_; }

 private:
  Matrix values_;
  double threshold_;
};

}  // namespace bridgekit
