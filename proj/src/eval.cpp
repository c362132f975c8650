#include "sigsvdd/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sigsvdd {

ConfusionMatrix confusion(const std::vector<double>& scores, const std::vector<int>& labels,
                          double threshold) {
  if (scores.size() != labels.size()) throw std::invalid_argument("confusion: length mismatch");
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    bool anomaly = labels[i] == -1;
    bool predicted = scores[i] > threshold;
    if (anomaly && predicted)
      ++cm.tp;
    else if (anomaly)
      ++cm.fn;
    else if (predicted)
      ++cm.fp;
    else
      ++cm.tn;
  }
  return cm;
}

ConfusionMatrix aggregate(const std::vector<ConfusionMatrix>& parts) {
  if (parts.empty()) throw std::invalid_argument("aggregate: empty list");
  ConfusionMatrix total;
  for (const auto& cm : parts) {
    total.tp += cm.tp;
    total.fp += cm.fp;
    total.tn += cm.tn;
    total.fn += cm.fn;
  }
  return total;
}

namespace {
double ratio(long long num, long long den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}
}  // namespace

PrecisionRecallF1 precision_recall_f1(const ConfusionMatrix& cm) {
  PrecisionRecallF1 out;
  out.precision = ratio(cm.tp, cm.tp + cm.fp);
  out.recall = ratio(cm.tp, cm.tp + cm.fn);
  double s = out.precision + out.recall;
  out.f1 = s == 0.0 ? 0.0 : 2.0 * out.precision * out.recall / s;
  return out;
}

double g_mean(const ConfusionMatrix& cm) {
  double sens = ratio(cm.tp, cm.tp + cm.fn);
  double spec = ratio(cm.tn, cm.tn + cm.fp);
  return std::sqrt(sens * spec);
}

double au_pr(const std::vector<double>& scores, const std::vector<int>& labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("au_pr: length mismatch");
  long long positives = 0;
  for (int lab : labels) positives += lab == -1 ? 1 : 0;
  if (positives == 0 || positives == static_cast<long long>(labels.size()))
    throw std::invalid_argument("au_pr: both classes must be present");
  for (double s : scores)
    if (!std::isfinite(s)) throw std::invalid_argument("au_pr: scores must be finite");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });

  double ap = 0.0, prev_recall = 0.0;
  long long tp = 0, fp = 0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == -1)
        ++tp;
      else
        ++fp;
    }
    double recall = static_cast<double>(tp) / static_cast<double>(positives);
    double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += precision * (recall - prev_recall);
    prev_recall = recall;
    i = j;
  }
  return ap;
}

MetricsReport metrics_report(const std::vector<std::vector<double>>& subset_scores,
                             const std::vector<std::vector<int>>& subset_labels, double threshold) {
  if (subset_scores.size() != subset_labels.size() || subset_scores.empty())
    throw std::invalid_argument("metrics_report: inconsistent subsets");
  MetricsReport rep;
  std::vector<double> all_scores;
  std::vector<int> all_labels;
  for (std::size_t s = 0; s < subset_scores.size(); ++s) {
    rep.per_subset.push_back(confusion(subset_scores[s], subset_labels[s], threshold));
    all_scores.insert(all_scores.end(), subset_scores[s].begin(), subset_scores[s].end());
    all_labels.insert(all_labels.end(), subset_labels[s].begin(), subset_labels[s].end());
  }
  rep.aggregate = aggregate(rep.per_subset);
  rep.prf = precision_recall_f1(rep.aggregate);
  rep.g_mean = sigsvdd::g_mean(rep.aggregate);
  rep.au_pr = sigsvdd::au_pr(all_scores, all_labels);
  return rep;
}

}  // namespace sigsvdd
