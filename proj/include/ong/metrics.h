#pragma once

#include <map>
#include <string>
#include <vector>

#include "ong/corpus.h"

namespace ong {

struct Metrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long tp = 0;
  long fp = 0;
  long fn = 0;
};

// Exact-span matching micro-averaged over examples: a predicted span counts
// only when both boundaries equal a gold span of the same example.
Metrics score_spans(const std::vector<SpanSet>& predicted,
                    const std::vector<SpanSet>& gold);

Metrics metrics_from_counts(long tp, long fp, long fn);

// Fold key: the longest tree distance from the target to any gold opinion
// token. Keys are "1", "2", "3" and ">3"; opinion-free examples are
// assigned to no fold.
std::map<std::string, std::vector<int>> bucket_by_distance(
    const std::vector<Sentence>& data);

const std::vector<std::string>& bucket_keys();

}  // namespace ong
