#include "ong/metrics.h"

#include <stdexcept>

#include "ong/tree.h"

namespace ong {

Metrics metrics_from_counts(long tp, long fp, long fn) {
  Metrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.precision = tp + fp > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
  m.f1 = m.precision + m.recall > 0.0
             ? 2.0 * m.precision * m.recall / (m.precision + m.recall)
             : 0.0;
  return m;
}

Metrics score_spans(const std::vector<SpanSet>& predicted,
                    const std::vector<SpanSet>& gold) {
  if (predicted.size() != gold.size())
    throw std::invalid_argument("score_spans example count mismatch");
  long tp = 0, fp = 0, fn = 0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    for (const auto& sp : predicted[i])
      gold[i].count(sp) ? ++tp : ++fp;
    for (const auto& sp : gold[i])
      if (!predicted[i].count(sp)) ++fn;
  }
  return metrics_from_counts(tp, fp, fn);
}

const std::vector<std::string>& bucket_keys() {
  static const std::vector<std::string> keys = {"1", "2", "3", ">3"};
  return keys;
}

std::map<std::string, std::vector<int>> bucket_by_distance(
    const std::vector<Sentence>& data) {
  std::map<std::string, std::vector<int>> folds;
  for (const auto& k : bucket_keys()) folds[k];
  for (size_t i = 0; i < data.size(); ++i) {
    const auto opinions = opinion_tokens(data[i]);
    if (opinions.empty()) continue;
    const DepTree tree(data[i].heads);
    const auto dist = tree_distances(tree, data[i].target_span);
    int longest = 0;
    for (int tok : opinions)
      longest = std::max(longest, dist[static_cast<size_t>(tok)]);
    const std::string key = longest > 3 ? ">3" : std::to_string(longest);
    folds[key].push_back(static_cast<int>(i));
  }
  return folds;
}

}  // namespace ong
