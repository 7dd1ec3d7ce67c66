#pragma once

#include <Eigen/Dense>
#include <compare>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ong {

inline constexpr int kRootHead = -1;

// Inclusive token-index span.
struct Span {
  int start = 0;
  int end = 0;
  auto operator<=>(const Span&) const = default;
};

using SpanSet = std::set<Span>;

enum class Tag : std::uint8_t { B, I, O };
using BioLabels = std::vector<Tag>;

char tag_char(Tag t);

// One (sentence, target) example. `heads` encodes a single-rooted dependency
// tree (kRootHead marks the root). `context_vectors` holds optional
// precomputed per-token features attached after parsing; it is not part of
// the serialized record and does not participate in equality.
struct Sentence {
  std::vector<std::string> tokens;
  std::vector<int> heads;
  Span target_span;
  SpanSet opinion_spans;
  std::optional<Eigen::MatrixXd> context_vectors;

  int size() const { return static_cast<int>(tokens.size()); }
  bool operator==(const Sentence& o) const {
    return tokens == o.tokens && heads == o.heads &&
           target_span == o.target_span && opinion_spans == o.opinion_spans;
  }
};

struct ParseError : std::runtime_error {
  ParseError(int line_no, const std::string& what);
  int line;
};

struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Throws ParseError (line 0) if any Sentence invariant is violated.
void validate_sentence(const Sentence& s, int line_no = 0);

// Tab-separated records, one example per line:
//   tokens<TAB>heads<TAB>target<TAB>opinions
// tokens/heads space-joined, heads use -1 for the root, spans are "s:e"
// inclusive, opinions comma-joined (empty string for none).
std::vector<Sentence> parse_corpus(const std::string& text);
std::string to_tsv(const Sentence& s);
std::string format_corpus(const std::vector<Sentence>& data);

// CoNLL-U ingestion: columns ID, FORM and HEAD are used (HEAD=0 is the
// root). `annotations` carries one "target<TAB>opinions" line per sentence,
// fields formatted as in the tab format above.
std::vector<Sentence> parse_conllu(const std::string& conllu,
                                   const std::string& annotations);

// Reads `path` as the tab format, or as CoNLL-U when the name ends in
// ".conllu" (annotations are then read from path + ".ann").
std::vector<Sentence> load_corpus_file(const std::string& path);
void write_corpus_file(const std::string& path,
                       const std::vector<Sentence>& data);

BioLabels encode_bio(const SpanSet& spans, int n);

// Tolerant decoding: an I with no open span starts a new one.
SpanSet decode_bio(const BioLabels& labels);

// Deterministic partition; dev gets round(ratio * |data|) examples sampled
// by seeded shuffle.
std::pair<std::vector<Sentence>, std::vector<Sentence>> split_train_dev(
    const std::vector<Sentence>& data, double ratio, std::uint64_t seed);

struct SyntheticConfig {
  int n_sentences = 0;
  int min_len = 5;
  int max_len = 12;
  std::uint64_t seed = 0;
  // probability that a marker token is attached at tree distance 1 from the
  // target (and therefore annotated); otherwise it becomes a distractor at
  // tree distance 3
  double p_adjacent = 0.8;
};

std::vector<Sentence> gen_synthetic(const SyntheticConfig& cfg);
std::vector<Sentence> gen_synthetic(int n_sentences,
                                    std::pair<int, int> length_range,
                                    std::uint64_t seed);

// All token indices outside the target span and all opinion spans.
std::set<int> opinion_tokens(const Sentence& s);
std::set<int> other_tokens(const Sentence& s);

}  // namespace ong
