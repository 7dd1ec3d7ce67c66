#include "ong/encoder.h"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace ong {

Vocab Vocab::build(const std::vector<Sentence>& data) {
  Vocab v;
  v.words.push_back(kUnk);
  v.index[kUnk] = 0;
  for (const auto& s : data)
    for (const auto& tok : s.tokens)
      if (!v.index.count(tok)) {
        v.index[tok] = static_cast<int>(v.words.size());
        v.words.push_back(tok);
      }
  return v;
}

Vocab Vocab::from_words(std::vector<std::string> words) {
  Vocab v;
  v.words = std::move(words);
  for (size_t i = 0; i < v.words.size(); ++i)
    v.index[v.words[i]] = static_cast<int>(i);
  return v;
}

EmbeddingTable EmbeddingTable::create(int vocab_size, int dim, Rng& rng) {
  EmbeddingTable t;
  t.table = nn::Tensor("emb.table", vocab_size, dim);
  t.table.init_uniform(rng, -0.1, 0.1);
  return t;
}

PositionTable PositionTable::create(int rmax, int dim, Rng& rng) {
  PositionTable t;
  t.rmax = rmax;
  t.table = nn::Tensor("pos.table", 2 * rmax + 1, dim);
  t.table.init_uniform(rng, -0.1, 0.1);
  return t;
}

int PositionTable::row_for_offset(int r) const {
  return std::clamp(r, -rmax, rmax) + rmax;
}

std::vector<int> relative_positions(int n, Span target_span) {
  if (target_span.start < 0 || target_span.end >= n)
    throw std::out_of_range("target span out of range");
  std::vector<int> r(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    if (i < target_span.start)
      r[static_cast<size_t>(i)] = i - target_span.start;
    else if (i > target_span.end)
      r[static_cast<size_t>(i)] = i - target_span.end;
    else
      r[static_cast<size_t>(i)] = 0;
  }
  return r;
}

nn::Var encode_sentence(nn::Graph& g, const Sentence& s, const Vocab& vocab,
                        EmbeddingTable& emb, PositionTable& pos) {
  const int n = s.size();
  nn::Var tok;
  if (s.context_vectors) {
    if (s.context_vectors->rows() != n)
      throw DataError("sidecar vector count does not match sentence length");
    tok = g.constant(*s.context_vectors);
  } else {
    std::vector<int> ids;
    ids.reserve(static_cast<size_t>(n));
    for (const auto& w : s.tokens) ids.push_back(vocab.id(w));
    tok = g.gather_rows(emb.table, std::move(ids));
  }
  std::vector<int> rows;
  rows.reserve(static_cast<size_t>(n));
  for (int r : relative_positions(n, s.target_span))
    rows.push_back(pos.row_for_offset(r));
  nn::Var p = g.gather_rows(pos.table, std::move(rows));
  return g.hconcat(tok, p);
}

Eigen::MatrixXd encode_sentence(const Sentence& s, const Vocab& vocab,
                                EmbeddingTable& emb, PositionTable& pos) {
  nn::Graph g;
  return g.value(encode_sentence(g, s, vocab, emb, pos));
}

SidecarVectors parse_sidecar(const std::string& text) {
  std::istringstream in(text);
  SidecarVectors sv;
  int n_examples = 0;
  if (!(in >> n_examples >> sv.dim))
    throw DataError("sidecar: bad header, expected N_EXAMPLES D_TOK");
  sv.examples.reserve(static_cast<size_t>(n_examples));
  for (int e = 0; e < n_examples; ++e) {
    std::string kw;
    int idx = 0, n = 0;
    if (!(in >> kw >> idx >> n) || kw != "EXAMPLE" || idx != e)
      throw DataError("sidecar: bad example header at index " +
                      std::to_string(e));
    Eigen::MatrixXd m(n, sv.dim);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < sv.dim; ++j)
        if (!(in >> m(i, j)))
          throw DataError("sidecar: truncated vectors at example " +
                          std::to_string(e));
    sv.examples.push_back(std::move(m));
  }
  return sv;
}

SidecarVectors load_sidecar(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_sidecar(ss.str());
}

void attach_sidecar(std::vector<Sentence>& data, const SidecarVectors& sv) {
  if (sv.examples.size() != data.size())
    throw DataError("sidecar example count " +
                    std::to_string(sv.examples.size()) +
                    " does not match corpus size " +
                    std::to_string(data.size()));
  for (size_t i = 0; i < data.size(); ++i) {
    if (sv.examples[i].rows() != data[i].size())
      throw DataError("sidecar vector count does not match sentence length "
                      "at example " +
                      std::to_string(i));
    data[i].context_vectors = sv.examples[i];
  }
}

}  // namespace ong
