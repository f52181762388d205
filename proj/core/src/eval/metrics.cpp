#include "bridgekit/eval/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "bridgekit/error.hpp"

namespace bridgekit {

namespace {

void check_lengths(const std::vector<int>& truth, const std::vector<int>& pred) {
  if (truth.size() != pred.size()) throw ConfigError("metrics: truth and prediction lengths differ");
}

}  // namespace

double accuracy(const std::vector<int>& truth, const std::vector<int>& pred) {
  check_lengths(truth, pred);
  if (truth.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == pred[i] ? 1 : 0;
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

double class_f1(const std::vector<int>& truth, const std::vector<int>& pred, int cls) {
  check_lengths(truth, pred);
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool t = truth[i] == cls;
    const bool p = pred[i] == cls;
    tp += (t && p) ? 1 : 0;
    fp += (!t && p) ? 1 : 0;
    fn += (t && !p) ? 1 : 0;
  }
  const double denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2 * tp / denom;
}

double macro_f1(const std::vector<int>& truth, const std::vector<int>& pred, int n_classes) {
  if (n_classes < 1) throw ConfigError("metrics: n_classes must be positive");
  double sum = 0.0;
  for (int c = 0; c < n_classes; ++c) sum += class_f1(truth, pred, c);
  return sum / n_classes;
}

double micro_f1(const std::vector<int>& truth, const std::vector<int>& pred) {
  // Single-label: every miss is one false positive and one false negative,
  // so 2TP / (2TP + FP + FN) reduces to the hit rate.
  return accuracy(truth, pred);
}

double binary_auc(const std::vector<int>& is_positive, const std::vector<double>& score) {
  if (is_positive.size() != score.size()) throw ConfigError("auc: label and score lengths differ");
  const std::size_t n = score.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
  // Mid-ranks handle ties.
  double pos_rank_sum = 0.0;
  double n_pos = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && score[order[j]] == score[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (is_positive[order[k]]) {
        pos_rank_sum += mid;
        n_pos += 1;
      }
    }
    i = j;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0) return 0.5;
  return (pos_rank_sum - n_pos * (n_pos + 1) / 2) / (n_pos * n_neg);
}

Metrics compute_metrics(const std::vector<int>& truth, const std::vector<int>& pred, const Matrix& scores) {
  check_lengths(truth, pred);
  if (scores.rows() != static_cast<Eigen::Index>(truth.size())) throw ConfigError("metrics: score rows differ from labels");
  const int c = static_cast<int>(scores.cols());
  if (c < 2) throw ConfigError("metrics: scores need at least two columns");
  Metrics m;
  m.accuracy = accuracy(truth, pred);
  m.binary_f1 = class_f1(truth, pred, 1);
  m.macro_f1 = macro_f1(truth, pred, c);
  m.micro_f1 = micro_f1(truth, pred);
  std::vector<int> pos(truth.size());
  std::vector<double> s(truth.size());
  if (c == 2) {
    for (std::size_t i = 0; i < truth.size(); ++i) {
      pos[i] = truth[i] == 1;
      s[i] = scores(static_cast<Eigen::Index>(i), 1);
    }
    m.auc = binary_auc(pos, s);
  } else {
    double sum = 0.0;
    int used = 0;
    for (int k = 0; k < c; ++k) {
      int n_pos = 0;
      for (std::size_t i = 0; i < truth.size(); ++i) {
        pos[i] = truth[i] == k;
        n_pos += pos[i];
        s[i] = scores(static_cast<Eigen::Index>(i), k);
      }
      if (n_pos == 0 || n_pos == static_cast<int>(truth.size())) continue;
      sum += binary_auc(pos, s);
      ++used;
    }
    m.auc = used == 0 ? 0.5 : sum / used;
  }
  return m;
}

}  // namespace bridgekit
