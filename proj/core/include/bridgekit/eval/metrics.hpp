#pragma once

#include <vector>

#include "bridgekit/numerics/matrix.hpp"

namespace bridgekit {

struct Metrics {
  double accuracy = 0.0;
  double binary_f1 = 0.0;  // F1 of class 1
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  double auc = 0.0;  // binary, or one-vs-rest macro for C > 2
};

double accuracy(const std::vector<int>& truth, const std::vector<int>& pred);
/// F1 of one class; 0 when the class never appears in truth or prediction.
double class_f1(const std::vector<int>& truth, const std::vector<int>& pred, int cls);
/// Unweighted mean of class_f1 over classes 0..n_classes-1.
double macro_f1(const std::vector<int>& truth, const std::vector<int>& pred, int n_classes);
double micro_f1(const std::vector<int>& truth, const std::vector<int>& pred);

/// Probability that a random positive outranks a random negative, ties
/// counting one half. 0.5 when either group is empty.
double binary_auc(const std::vector<int>& is_positive, const std::vector<double>& score);

/// Metrics from truth, hard predictions and per-class scores (N x C).
/// Throws ConfigError on length or shape mismatch.
Metrics compute_metrics(const std::vector<int>& truth, const std::vector<int>& pred, const Matrix& scores);

}  // namespace bridgekit
