#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "ong/corpus.h"
#include "ong/nn.h"

namespace ong {

struct Vocab {
  static constexpr const char* kUnk = "<unk>";

  std::vector<std::string> words;
  std::unordered_map<std::string, int> index;

  static Vocab build(const std::vector<Sentence>& data);
  static Vocab from_words(std::vector<std::string> words);

  int id(const std::string& w) const {
    auto it = index.find(w);
    return it == index.end() ? 0 : it->second;
  }
  int size() const { return static_cast<int>(words.size()); }
};

struct EmbeddingTable {
  nn::Tensor table;  // |V| x dim, row 0 = UNK

  static EmbeddingTable create(int vocab_size, int dim, Rng& rng);
  int dim() const { return static_cast<int>(table.value.cols()); }
};

struct PositionTable {
  nn::Tensor table;  // (2*rmax+1) x dim
  int rmax = 0;

  static PositionTable create(int rmax, int dim, Rng& rng);
  int dim() const { return static_cast<int>(table.value.cols()); }
  int row_for_offset(int r) const;
};

// r_i = i - s left of the span, 0 inside, i - e right of it.
std::vector<int> relative_positions(int n, Span target_span);

// X row i = [token embedding ; position embedding]. When the sentence
// carries precomputed context vectors they replace the table lookup and stay
// frozen (constants on the tape).
nn::Var encode_sentence(nn::Graph& g, const Sentence& s, const Vocab& vocab,
                        EmbeddingTable& emb, PositionTable& pos);
Eigen::MatrixXd encode_sentence(const Sentence& s, const Vocab& vocab,
                                EmbeddingTable& emb, PositionTable& pos);

struct SidecarVectors {
  int dim = 0;
  std::vector<Eigen::MatrixXd> examples;  // one N x dim matrix per example
};

// Format: header "N_EXAMPLES D_TOK", then per example "EXAMPLE i N"
// followed by N whitespace-separated float lines.
SidecarVectors load_sidecar(const std::string& path);
SidecarVectors parse_sidecar(const std::string& text);
void attach_sidecar(std::vector<Sentence>& data, const SidecarVectors& sv);

}  // namespace ong
