#pragma once

#include <vector>

namespace sigsvdd {

/// Detection-positive class is the anomaly (label -1). tp counts anomalies
/// flagged as anomalies.
struct ConfusionMatrix {
  long long tp = 0;
  long long fp = 0;
  long long tn = 0;
  long long fn = 0;

  long long total() const { return tp + fp + tn + fn; }
};

/// Prediction is positive iff score > threshold.
ConfusionMatrix confusion(const std::vector<double>& scores, const std::vector<int>& labels,
                          double threshold);

ConfusionMatrix aggregate(const std::vector<ConfusionMatrix>& parts);

struct PrecisionRecallF1 {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// 0/0 ratios are defined as 0.
PrecisionRecallF1 precision_recall_f1(const ConfusionMatrix& cm);

/// sqrt(sensitivity * specificity), 0/0 -> 0.
double g_mean(const ConfusionMatrix& cm);

/// Average precision: sum of precision * delta-recall over descending-score
/// thresholds, equal scores processed as one threshold. Requires both classes.
double au_pr(const std::vector<double>& scores, const std::vector<int>& labels);

struct MetricsReport {
  PrecisionRecallF1 prf;
  double au_pr = 0.0;
  double g_mean = 0.0;
  ConfusionMatrix aggregate;
  std::vector<ConfusionMatrix> per_subset;
};

/// Metrics for one or more score/label subsets at a shared threshold;
/// threshold metrics come from the aggregated confusion matrix.
MetricsReport metrics_report(const std::vector<std::vector<double>>& subset_scores,
                             const std::vector<std::vector<int>>& subset_labels, double threshold);

}  // namespace sigsvdd
