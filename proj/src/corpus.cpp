#include "ong/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>

#include "ong/rng.h"

namespace ong {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

int parse_int(const std::string& s, int line_no, const char* what) {
  try {
    size_t pos = 0;
    int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line_no, std::string("bad ") + what + " integer '" + s +
                                  "'");
  }
}

Span parse_span(const std::string& s, int line_no) {
  auto parts = split(s, ':');
  if (parts.size() != 2)
    throw ParseError(line_no, "bad span '" + s + "', expected s:e");
  Span sp{parse_int(parts[0], line_no, "span"),
          parse_int(parts[1], line_no, "span")};
  if (sp.start > sp.end)
    throw ParseError(line_no, "bad span '" + s + "', start exceeds end");
  return sp;
}

std::string span_str(const Span& s) {
  return std::to_string(s.start) + ":" + std::to_string(s.end);
}

bool overlaps(const Span& a, const Span& b) {
  return a.start <= b.end && b.start <= a.end;
}

}  // namespace

char tag_char(Tag t) {
  switch (t) {
    case Tag::B:
      return 'B';
    case Tag::I:
      return 'I';
    default:
      return 'O';
  }
}

ParseError::ParseError(int line_no, const std::string& what)
    : std::runtime_error("line " + std::to_string(line_no) + ": " + what),
      line(line_no) {}

void validate_sentence(const Sentence& s, int line_no) {
  const int n = s.size();
  if (n < 1) throw ParseError(line_no, "empty sentence");
  if (static_cast<int>(s.heads.size()) != n)
    throw ParseError(line_no, "token/head count mismatch");

  int root = -1;
  for (int i = 0; i < n; ++i) {
    const int h = s.heads[i];
    if (h == kRootHead) {
      if (root >= 0) throw ParseError(line_no, "multiple roots");
      root = i;
    } else if (h < 0 || h >= n) {
      throw ParseError(line_no, "head index out of range");
    } else if (h == i) {
      throw ParseError(line_no, "cyclic heads");
    }
  }
  if (root < 0) throw ParseError(line_no, "cyclic heads");

  // Every node must reach the root; with one head per non-root node this is
  // equivalent to the heads forming a tree.
  std::vector<std::vector<int>> children(n);
  for (int i = 0; i < n; ++i)
    if (s.heads[i] != kRootHead) children[s.heads[i]].push_back(i);
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(root);
  seen[root] = 1;
  int reached = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    ++reached;
    for (int v : children[u])
      if (!seen[v]) {
        seen[v] = 1;
        q.push(v);
      }
  }
  if (reached != n) throw ParseError(line_no, "cyclic heads");

  auto check_span = [&](const Span& sp, const char* what) {
    if (sp.start < 0 || sp.end >= n || sp.start > sp.end)
      throw ParseError(line_no, std::string(what) + " span out of range");
  };
  check_span(s.target_span, "target");
  std::vector<Span> spans(s.opinion_spans.begin(), s.opinion_spans.end());
  for (size_t i = 0; i < spans.size(); ++i) {
    check_span(spans[i], "opinion");
    if (overlaps(spans[i], s.target_span))
      throw ParseError(line_no, "span overlap");
    for (size_t j = i + 1; j < spans.size(); ++j)
      if (overlaps(spans[i], spans[j]))
        throw ParseError(line_no, "span overlap");
  }
}

std::vector<Sentence> parse_corpus(const std::string& text) {
  std::vector<Sentence> out;
  auto lines = split(text, '\n');
  for (size_t li = 0; li < lines.size(); ++li) {
    const std::string& line = lines[li];
    const int line_no = static_cast<int>(li) + 1;
    if (line.empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != 4)
      throw ParseError(line_no, "expected 4 tab-separated fields, got " +
                                    std::to_string(fields.size()));
    Sentence s;
    s.tokens = split_ws(fields[0]);
    for (const auto& h : split_ws(fields[1]))
      s.heads.push_back(parse_int(h, line_no, "head"));
    s.target_span = parse_span(fields[2], line_no);
    if (!fields[3].empty()) {
      for (const auto& sp : split(fields[3], ','))
        s.opinion_spans.insert(parse_span(sp, line_no));
    }
    validate_sentence(s, line_no);
    out.push_back(std::move(s));
  }
  return out;
}

std::string to_tsv(const Sentence& s) {
  std::string out;
  for (size_t i = 0; i < s.tokens.size(); ++i) {
    if (i) out += ' ';
    out += s.tokens[i];
  }
  out += '\t';
  for (size_t i = 0; i < s.heads.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(s.heads[i]);
  }
  out += '\t';
  out += span_str(s.target_span);
  out += '\t';
  bool first = true;
  for (const auto& sp : s.opinion_spans) {
    if (!first) out += ',';
    first = false;
    out += span_str(sp);
  }
  return out;
}

std::string format_corpus(const std::vector<Sentence>& data) {
  std::string out;
  for (const auto& s : data) {
    out += to_tsv(s);
    out += '\n';
  }
  return out;
}

std::vector<Sentence> parse_conllu(const std::string& conllu,
                                   const std::string& annotations) {
  struct Block {
    std::vector<std::string> tokens;
    std::vector<int> heads;
  };
  std::vector<Block> blocks;
  Block cur;
  auto lines = split(conllu, '\n');
  for (size_t li = 0; li < lines.size(); ++li) {
    const std::string& line = lines[li];
    const int line_no = static_cast<int>(li) + 1;
    if (line.empty()) {
      if (!cur.tokens.empty()) {
        blocks.push_back(std::move(cur));
        cur = Block{};
      }
      continue;
    }
    if (line[0] == '#') continue;
    auto cols = split(line, '\t');
    if (cols.size() < 8)
      throw ParseError(line_no, "expected at least 8 CoNLL-U columns");
    // multiword-token ranges and empty nodes carry non-integer ids; skip them
    if (cols[0].find('-') != std::string::npos ||
        cols[0].find('.') != std::string::npos)
      continue;
    const int id = parse_int(cols[0], line_no, "token id");
    if (id != static_cast<int>(cur.tokens.size()) + 1)
      throw ParseError(line_no, "non-sequential token id");
    const int head = parse_int(cols[6], line_no, "head");
    cur.tokens.push_back(cols[1]);
    cur.heads.push_back(head == 0 ? kRootHead : head - 1);
  }
  if (!cur.tokens.empty()) blocks.push_back(std::move(cur));

  std::vector<Sentence> out;
  auto ann_lines = split(annotations, '\n');
  size_t bi = 0;
  for (size_t li = 0; li < ann_lines.size(); ++li) {
    const std::string& line = ann_lines[li];
    const int line_no = static_cast<int>(li) + 1;
    if (line.empty()) continue;
    if (bi >= blocks.size())
      throw ParseError(line_no, "more annotation lines than sentences");
    auto fields = split(line, '\t');
    if (fields.size() != 2)
      throw ParseError(line_no, "expected 2 tab-separated annotation fields");
    Sentence s;
    s.tokens = blocks[bi].tokens;
    s.heads = blocks[bi].heads;
    s.target_span = parse_span(fields[0], line_no);
    if (!fields[1].empty())
      for (const auto& sp : split(fields[1], ','))
        s.opinion_spans.insert(parse_span(sp, line_no));
    validate_sentence(s, line_no);
    out.push_back(std::move(s));
    ++bi;
  }
  if (bi != blocks.size())
    throw ParseError(0, "fewer annotation lines than sentences");
  return out;
}

std::vector<Sentence> load_corpus_file(const std::string& path) {
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot open " + p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  if (path.size() > 7 && path.substr(path.size() - 7) == ".conllu")
    return parse_conllu(slurp(path), slurp(path + ".ann"));
  return parse_corpus(slurp(path));
}

void write_corpus_file(const std::string& path,
                       const std::vector<Sentence>& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << format_corpus(data);
}

BioLabels encode_bio(const SpanSet& spans, int n) {
  BioLabels labels(static_cast<size_t>(n), Tag::O);
  const Span* prev = nullptr;
  for (const auto& sp : spans) {
    if (sp.start < 0 || sp.end >= n)
      throw std::out_of_range("span out of range for length " +
                              std::to_string(n));
    if (prev && prev->end >= sp.start)
      throw std::invalid_argument("overlapping spans");
    prev = &sp;
    labels[static_cast<size_t>(sp.start)] = Tag::B;
    for (int i = sp.start + 1; i <= sp.end; ++i)
      labels[static_cast<size_t>(i)] = Tag::I;
  }
  return labels;
}

SpanSet decode_bio(const BioLabels& labels) {
  SpanSet spans;
  int open = -1;
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
    const Tag t = labels[static_cast<size_t>(i)];
    if (t == Tag::B) {
      if (open >= 0) spans.insert({open, i - 1});
      open = i;
    } else if (t == Tag::I) {
      if (open < 0) open = i;  // orphan I opens a span
    } else {
      if (open >= 0) spans.insert({open, i - 1});
      open = -1;
    }
  }
  if (open >= 0) spans.insert({open, static_cast<int>(labels.size()) - 1});
  return spans;
}

std::pair<std::vector<Sentence>, std::vector<Sentence>> split_train_dev(
    const std::vector<Sentence>& data, double ratio, std::uint64_t seed) {
  if (data.empty()) throw DataError("cannot split an empty corpus");
  if (!(ratio > 0.0 && ratio < 1.0))
    throw DataError("split ratio must be in (0, 1)");
  std::vector<int> order(data.size());
  for (size_t i = 0; i < data.size(); ++i) order[i] = static_cast<int>(i);
  Rng rng(seed);
  rng.shuffle(order);
  const auto n_dev = static_cast<size_t>(
      std::llround(ratio * static_cast<double>(data.size())));
  std::vector<Sentence> dev, train;
  for (size_t i = 0; i < order.size(); ++i) {
    (i < n_dev ? dev : train).push_back(data[static_cast<size_t>(order[i])]);
  }
  return {std::move(train), std::move(dev)};
}

std::vector<Sentence> gen_synthetic(const SyntheticConfig& cfg) {
  if (cfg.min_len < 3 || cfg.min_len > cfg.max_len)
    throw DataError("infeasible length range");
  Rng rng(cfg.seed);
  std::vector<Sentence> out;
  out.reserve(static_cast<size_t>(std::max(cfg.n_sentences, 0)));

  for (int si = 0; si < cfg.n_sentences; ++si) {
    const int n = static_cast<int>(rng.uniform_int(cfg.min_len, cfg.max_len));
    const int t = static_cast<int>(rng.uniform_int(0, n - 1));
    int n_markers = n >= 7 ? static_cast<int>(rng.uniform_int(1, 2)) : 1;

    std::vector<int> gold_pos, distractor_pos;
    std::vector<char> used(static_cast<size_t>(n), 0);
    used[static_cast<size_t>(t)] = 1;
    auto take_nearest = [&](bool nearest) {
      int best = -1;
      for (int i = 0; i < n; ++i) {
        if (used[static_cast<size_t>(i)]) continue;
        if (best < 0 ||
            (nearest ? std::abs(i - t) < std::abs(best - t)
                     : std::abs(i - t) > std::abs(best - t)))
          best = i;
      }
      used[static_cast<size_t>(best)] = 1;
      return best;
    };
    for (int m = 0; m < n_markers; ++m) {
      // distractor trees need the target, a two-node chain and the marker
      const bool gold = n < 5 ? true : rng.bernoulli(cfg.p_adjacent);
      if (gold)
        gold_pos.push_back(take_nearest(true));
      else
        distractor_pos.push_back(take_nearest(false));
    }
    std::vector<int> filler_pos;
    for (int i = 0; i < n; ++i)
      if (!used[static_cast<size_t>(i)]) filler_pos.push_back(i);

    // undirected tree over sequence positions
    std::vector<std::pair<int, int>> edges;
    std::vector<int> connected{t};
    for (int g : gold_pos) {
      edges.emplace_back(t, g);
      connected.push_back(g);
    }
    size_t next_filler = 0;
    if (!distractor_pos.empty()) {
      const int c1 = filler_pos[next_filler++];
      const int c2 = filler_pos[next_filler++];
      edges.emplace_back(t, c1);
      edges.emplace_back(c1, c2);
      connected.push_back(c1);
      connected.push_back(c2);
      for (int d : distractor_pos) {
        edges.emplace_back(c2, d);
        connected.push_back(d);
      }
    }
    for (; next_filler < filler_pos.size(); ++next_filler) {
      const int f = filler_pos[next_filler];
      const int attach = connected[static_cast<size_t>(rng.uniform_int(
          0, static_cast<std::int64_t>(connected.size()) - 1))];
      edges.emplace_back(attach, f);
      connected.push_back(f);
    }

    // orient from a random root
    std::vector<std::vector<int>> adj(static_cast<size_t>(n));
    for (auto [a, b] : edges) {
      adj[static_cast<size_t>(a)].push_back(b);
      adj[static_cast<size_t>(b)].push_back(a);
    }
    const int root = static_cast<int>(rng.uniform_int(0, n - 1));
    std::vector<int> heads(static_cast<size_t>(n), kRootHead);
    std::vector<char> seen(static_cast<size_t>(n), 0);
    std::queue<int> q;
    q.push(root);
    seen[static_cast<size_t>(root)] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v : adj[static_cast<size_t>(u)])
        if (!seen[static_cast<size_t>(v)]) {
          seen[static_cast<size_t>(v)] = 1;
          heads[static_cast<size_t>(v)] = u;
          q.push(v);
        }
    }

    Sentence s;
    s.tokens.assign(static_cast<size_t>(n), "");
    s.tokens[static_cast<size_t>(t)] = "TGT";
    for (int g : gold_pos)
      s.tokens[static_cast<size_t>(g)] =
          "OPN_" + std::to_string(rng.uniform_int(0, 3));
    for (int d : distractor_pos)
      s.tokens[static_cast<size_t>(d)] =
          "OPN_" + std::to_string(rng.uniform_int(0, 3));
    for (auto& tok : s.tokens)
      if (tok.empty()) tok = "w" + std::to_string(rng.uniform_int(0, 9));
    s.heads = std::move(heads);
    s.target_span = {t, t};
    for (int g : gold_pos) s.opinion_spans.insert({g, g});
    validate_sentence(s);
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<Sentence> gen_synthetic(int n_sentences,
                                    std::pair<int, int> length_range,
                                    std::uint64_t seed) {
  SyntheticConfig cfg;
  cfg.n_sentences = n_sentences;
  cfg.min_len = length_range.first;
  cfg.max_len = length_range.second;
  cfg.seed = seed;
  return gen_synthetic(cfg);
}

std::set<int> opinion_tokens(const Sentence& s) {
  std::set<int> out;
  for (const auto& sp : s.opinion_spans)
    for (int i = sp.start; i <= sp.end; ++i) out.insert(i);
  return out;
}

std::set<int> other_tokens(const Sentence& s) {
  std::set<int> out;
  const auto opn = opinion_tokens(s);
  for (int i = 0; i < s.size(); ++i) {
    if (i >= s.target_span.start && i <= s.target_span.end) continue;
    if (opn.count(i)) continue;
    out.insert(i);
  }
  return out;
}

}  // namespace ong
