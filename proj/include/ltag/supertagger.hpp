#pragma once

// Supertag disambiguation: unigram, n-gram (order 2 or 3) and head-distance
// dependency models trained from tagged corpora.
//
// Corpus format: one token per line, `word<TAB>supertag<TAB>head`, heads
// 1-based with 0 for the root; a blank line ends a sentence.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "ltag/derivation.hpp"
#include "ltag/expected.hpp"
#include "ltag/grammar.hpp"
#include "ltag/text.hpp"

namespace ltag {

struct TaggedToken {
  std::string word;
  std::string supertag;
  int head = 0;

  bool operator==(const TaggedToken&) const = default;
};

using TaggedSentence = std::vector<TaggedToken>;

struct TaggedCorpus {
  std::vector<TaggedSentence> sentences;

  std::size_t tokens() const {
    std::size_t n = 0;
    for (const auto& s : sentences) n += s.size();
    return n;
  }
  bool operator==(const TaggedCorpus&) const = default;
};

class SupertagError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Empty string if the head links of `s` form a tree rooted at 0.
inline std::string check_heads(const TaggedSentence& s) {
  const int n = static_cast<int>(s.size());
  for (int i = 0; i < n; ++i) {
    int h = s[i].head;
    if (h < 0 || h > n) return "token " + std::to_string(i + 1) + ": head " + std::to_string(h) + " out of range";
    if (h == i + 1) return "token " + std::to_string(i + 1) + " heads itself";
  }
  for (int i = 0; i < n; ++i) {
    int cur = i + 1, steps = 0;
    while (cur != 0) {
      cur = s[cur - 1].head;
      if (++steps > n) return "token " + std::to_string(i + 1) + " is on a head cycle";
    }
  }
  return {};
}

inline TaggedCorpus parse_corpus(std::string_view source, const std::string& origin = "<corpus>") {
  TaggedCorpus out;
  TaggedSentence cur;
  int start_line = 1;
  auto flush = [&](int line) {
    if (cur.empty()) return;
    if (auto why = check_heads(cur); !why.empty()) throw SyntaxError(origin, start_line, why);
    out.sentences.push_back(std::move(cur));
    cur.clear();
    (void)line;
  };
  int line_no = 0;
  std::size_t i = 0;
  while (i < source.size()) {
    std::size_t j = source.find('\n', i);
    if (j == std::string_view::npos) j = source.size();
    ++line_no;
    std::string line = text::trim(source.substr(i, j - i));
    i = j + 1;
    if (line.empty()) {
      flush(line_no);
      continue;
    }
    if (line[0] == '%') continue;
    if (cur.empty()) start_line = line_no;
    std::vector<std::string> fields;
    std::size_t a = 0;
    for (;;) {
      std::size_t b = line.find('\t', a);
      fields.push_back(line.substr(a, b == std::string::npos ? std::string::npos : b - a));
      if (b == std::string::npos) break;
      a = b + 1;
    }
    if (fields.size() != 3) throw SyntaxError(origin, line_no, "expected word<TAB>supertag<TAB>head");
    char* end = nullptr;
    long head = std::strtol(fields[2].c_str(), &end, 10);
    if (fields[2].empty() || *end != '\0') throw SyntaxError(origin, line_no, "head must be an integer");
    cur.push_back({fields[0], fields[1], static_cast<int>(head)});
  }
  flush(line_no);
  return out;
}

inline std::string write_corpus(const TaggedCorpus& c) {
  std::string out;
  for (std::size_t s = 0; s < c.sentences.size(); ++s) {
    if (s) out += "\n";
    for (const auto& t : c.sentences[s]) out += t.word + "\t" + t.supertag + "\t" + std::to_string(t.head) + "\n";
  }
  return out;
}

/// Reads supertags and heads off replayed derivations. A token's head is the
/// first anchor of the tree its own tree attaches into; extra anchors and
/// terminals of a tree point to the tree's first anchor.
inline Expected<TaggedCorpus, std::string> extract_corpus(
    const std::vector<std::pair<std::vector<std::string>, DerivationNode>>& derivations, const Grammar& g) {
  TaggedCorpus out;
  for (std::size_t s = 0; s < derivations.size(); ++s) {
    const auto& [tokens, d] = derivations[s];
    auto derived = replay(d, g);
    std::string where = "sentence " + std::to_string(s + 1) + ": ";
    if (!derived) return fail(where + derived.error().describe());
    std::vector<const TreeNode*> leaves;
    derived->tree.preorder([&](const TreeNode& n, const GornAddress&) {
      if (n.is_leaf() && n.is_lexical()) leaves.push_back(&n);
    });
    if (leaves.size() != tokens.size()) return fail(where + "derivation yield does not match the tokens");
    std::vector<int> first_anchor(derived->instances.size(), -1);
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (std::string(leaves[i]->lexeme()) != tokens[i]) {
        return fail(where + "token " + std::to_string(i + 1) + " '" + tokens[i] + "' does not match the derivation");
      }
      int inst = leaves[i]->instance;
      if (leaves[i]->marker == Marker::Anchor && first_anchor[inst] < 0) first_anchor[inst] = static_cast<int>(i);
    }
    TaggedSentence sentence;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      int inst = leaves[i]->instance;
      TaggedToken t{tokens[i], derived->instances[inst], 0};
      if (first_anchor[inst] != static_cast<int>(i)) {
        t.head = first_anchor[inst] + 1;
      } else if (int parent = derived->parents[inst]; parent >= 0) {
        t.head = first_anchor[parent] + 1;
      }
      sentence.push_back(std::move(t));
    }
    out.sentences.push_back(std::move(sentence));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Models

inline constexpr std::string_view kStart = "<s>";
inline constexpr std::string_view kEnd = "</s>";

/// Order 1 scores P(tag | word); orders 2 and 3 are hidden Markov models with
/// P(tag | previous order-1 tags) and P(word | tag). All distributions are
/// add-one smoothed: tags over the training tag set (plus </s> for
/// transitions), words over the training vocabulary plus one unknown word.
struct NGramModel {
  int order = 3;
  std::set<std::string> tags;
  std::set<std::string> vocabulary;
  std::map<std::pair<std::string, std::string>, long> emissions;  // (word, tag)
  std::map<std::string, long> word_counts;
  std::map<std::string, long> tag_counts;
  std::map<std::vector<std::string>, std::map<std::string, long>> transitions;  // context -> tag
  std::map<std::vector<std::string>, long> context_counts;

  double tag_given_word(const std::string& tag, const std::string& word) const {
    auto e = emissions.find({word, tag});
    auto w = word_counts.find(word);
    double c = e == emissions.end() ? 0.0 : static_cast<double>(e->second);
    double total = w == word_counts.end() ? 0.0 : static_cast<double>(w->second);
    return (c + 1.0) / (total + static_cast<double>(tags.size()));
  }

  double word_given_tag(const std::string& word, const std::string& tag) const {
    auto e = emissions.find({word, tag});
    auto t = tag_counts.find(tag);
    double c = e == emissions.end() ? 0.0 : static_cast<double>(e->second);
    double total = t == tag_counts.end() ? 0.0 : static_cast<double>(t->second);
    return (c + 1.0) / (total + static_cast<double>(vocabulary.size()) + 1.0);
  }

  double transition(const std::vector<std::string>& context, const std::string& tag) const {
    double c = 0.0, total = 0.0;
    if (auto it = transitions.find(context); it != transitions.end()) {
      if (auto t = it->second.find(tag); t != it->second.end()) c = static_cast<double>(t->second);
    }
    if (auto it = context_counts.find(context); it != context_counts.end()) total = static_cast<double>(it->second);
    return (c + 1.0) / (total + static_cast<double>(tags.size()) + 1.0);
  }
};

/// P((dependent tag, signed distance) | head tag) with distance = dependent
/// position - head position in 1..D or -D..-1, add-one smoothed over
/// tags x distances; P_root(tag) for tokens attached to the root; and the
/// unigram lexical distribution P(tag | word).
struct DependencyModel {
  std::set<std::string> tags;
  int max_distance = 1;
  std::map<std::string, std::map<std::pair<std::string, int>, long>> dependents;  // head tag -> (tag, d)
  std::map<std::string, long> head_totals;
  std::map<std::string, long> roots;
  long root_total = 0;
  NGramModel lexical;  // order 1

  long count(const std::string& head, const std::string& dep, int distance) const {
    auto h = dependents.find(head);
    if (h == dependents.end()) return 0;
    auto it = h->second.find({dep, distance});
    return it == h->second.end() ? 0 : it->second;
  }

  double dependent(const std::string& head, const std::string& dep, int distance) const {
    auto total = head_totals.find(head);
    double t = total == head_totals.end() ? 0.0 : static_cast<double>(total->second);
    double outcomes = static_cast<double>(tags.size()) * 2.0 * max_distance;
    return (static_cast<double>(count(head, dep, distance)) + 1.0) / (t + outcomes);
  }

  double root(const std::string& tag) const {
    auto it = roots.find(tag);
    double c = it == roots.end() ? 0.0 : static_cast<double>(it->second);
    return (c + 1.0) / (static_cast<double>(root_total) + static_cast<double>(tags.size()));
  }
};

using SupertagModel = std::variant<NGramModel, DependencyModel>;

inline std::string model_kind(const SupertagModel& m) {
  if (const auto* n = std::get_if<NGramModel>(&m)) {
    return n->order == 1 ? "unigram" : n->order == 2 ? "bigram" : "trigram";
  }
  return "dependency";
}

namespace detail {

inline void require_corpus(const TaggedCorpus& c) {
  if (c.sentences.empty() || c.tokens() == 0) throw SupertagError("empty training corpus");
  for (std::size_t i = 0; i < c.sentences.size(); ++i) {
    if (auto why = check_heads(c.sentences[i]); !why.empty()) {
      throw SupertagError("sentence " + std::to_string(i + 1) + ": " + why);
    }
  }
}

inline std::vector<std::string> context_of(const std::vector<std::string>& tags, std::size_t i, int order) {
  std::vector<std::string> ctx;
  for (int k = order - 1; k >= 1; --k) {
    std::ptrdiff_t at = static_cast<std::ptrdiff_t>(i) - k;
    ctx.push_back(at < 0 ? std::string(kStart) : tags[static_cast<std::size_t>(at)]);
  }
  return ctx;
}

}  // namespace detail

inline NGramModel train_ngram(const TaggedCorpus& c, int order) {
  if (order < 1 || order > 3) throw SupertagError("n-gram order must be 1, 2 or 3");
  detail::require_corpus(c);
  NGramModel m;
  m.order = order;
  for (const auto& s : c.sentences) {
    std::vector<std::string> tags;
    for (const auto& t : s) {
      m.tags.insert(t.supertag);
      m.vocabulary.insert(t.word);
      ++m.emissions[{t.word, t.supertag}];
      ++m.word_counts[t.word];
      ++m.tag_counts[t.supertag];
      tags.push_back(t.supertag);
    }
    if (order == 1) continue;
    for (std::size_t i = 0; i <= tags.size(); ++i) {
      auto ctx = detail::context_of(tags, i, order);
      ++m.transitions[ctx][i == tags.size() ? std::string(kEnd) : tags[i]];
      ++m.context_counts[ctx];
    }
  }
  return m;
}

inline NGramModel train_unigram(const TaggedCorpus& c) { return train_ngram(c, 1); }
inline NGramModel train_trigram(const TaggedCorpus& c) { return train_ngram(c, 3); }

inline DependencyModel train_dependency(const TaggedCorpus& c) {
  detail::require_corpus(c);
  DependencyModel m;
  m.lexical = train_unigram(c);
  for (const auto& s : c.sentences) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      m.tags.insert(s[i].supertag);
      if (s[i].head == 0) {
        ++m.roots[s[i].supertag];
        ++m.root_total;
        continue;
      }
      int distance = static_cast<int>(i + 1) - s[i].head;
      m.max_distance = std::max(m.max_distance, std::abs(distance));
      const std::string& head = s[static_cast<std::size_t>(s[i].head - 1)].supertag;
      ++m.dependents[head][{s[i].supertag, distance}];
      ++m.head_totals[head];
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Decoding

struct TagOptions {
  std::size_t beam_width = 20;
};

namespace detail {

/// Left-to-right accumulation shared by the decoders and the exhaustive
/// search, so equal sequences get bit-identical scores.
inline double accumulate(double score, double term) { return score + term; }

inline double ngram_step(const NGramModel& m, const std::vector<std::string>& ctx, const std::string& tag,
                         const std::string& word) {
  return std::log(m.transition(ctx, tag)) + std::log(m.word_given_tag(word, tag));
}

/// Greedy head for position i under a full or partial assignment: the nearest
/// position (left first on ties) whose tag has been seen heading `tags[i]` at
/// exactly that distance. Returns -1 if there is none.
inline int greedy_head(const DependencyModel& m, const std::vector<std::string>& tags, std::size_t i,
                       std::size_t known) {
  for (int d = 1; d <= m.max_distance; ++d) {
    for (int side : {-1, 1}) {
      std::ptrdiff_t j = static_cast<std::ptrdiff_t>(i) + side * d;
      if (j < 0 || static_cast<std::size_t>(j) >= known) continue;
      int distance = static_cast<int>(i) - static_cast<int>(j);
      if (m.count(tags[static_cast<std::size_t>(j)], tags[i], distance) > 0) return static_cast<int>(j);
    }
  }
  return -1;
}

inline double dependency_term(const DependencyModel& m, const std::vector<std::string>& words,
                              const std::vector<std::string>& tags, std::size_t i, std::size_t known) {
  double term = std::log(m.lexical.tag_given_word(tags[i], words[i]));
  int h = greedy_head(m, tags, i, known);
  if (h < 0) return term + std::log(m.root(tags[i]));
  int distance = static_cast<int>(i) - h;
  return term + std::log(m.dependent(tags[static_cast<std::size_t>(h)], tags[i], distance));
}

inline bool better(double a, const std::vector<std::string>& pa, double b, const std::vector<std::string>& pb) {
  if (a != b) return a > b;
  return pa < pb;
}

}  // namespace detail

/// Log probability of a complete tag sequence under an n-gram model.
inline double score_sequence(const NGramModel& m, const std::vector<std::string>& words,
                             const std::vector<std::string>& tags) {
  double s = 0.0;
  if (m.order == 1) {
    for (std::size_t i = 0; i < words.size(); ++i) s = detail::accumulate(s, std::log(m.tag_given_word(tags[i], words[i])));
    return s;
  }
  for (std::size_t i = 0; i < words.size(); ++i) {
    s = detail::accumulate(s, detail::ngram_step(m, detail::context_of(tags, i, m.order), tags[i], words[i]));
  }
  return detail::accumulate(s, std::log(m.transition(detail::context_of(tags, words.size(), m.order), std::string(kEnd))));
}

/// Log score of a complete sequence under the dependency model.
inline double score_sequence(const DependencyModel& m, const std::vector<std::string>& words,
                             const std::vector<std::string>& tags) {
  double s = 0.0;
  for (std::size_t i = 0; i < words.size(); ++i) {
    s = detail::accumulate(s, detail::dependency_term(m, words, tags, i, words.size()));
  }
  return s;
}

/// Decodes over explicit candidate lists (sorted, non-empty per token).
inline std::vector<std::string> tag(const std::vector<std::string>& words,
                                    const std::vector<std::vector<std::string>>& candidates, const SupertagModel& model,
                                    const TagOptions& options = {}) {
  const std::size_t n = words.size();
  if (const auto* m = std::get_if<NGramModel>(&model)) {
    if (m->order == 1) {
      std::vector<std::string> out;
      for (std::size_t i = 0; i < n; ++i) {
        const std::string* best = nullptr;
        double best_p = 0.0;
        for (const auto& t : candidates[i]) {
          double p = m->tag_given_word(t, words[i]);
          if (!best || p > best_p || (p == best_p && t < *best)) {
            best = &t;
            best_p = p;
          }
        }
        out.push_back(*best);
      }
      return out;
    }
    // Viterbi over states = last (order-1) tags, keeping full paths.
    struct Hyp {
      double score;
      std::vector<std::string> path;
    };
    std::map<std::vector<std::string>, Hyp> states;
    states[std::vector<std::string>(static_cast<std::size_t>(m->order - 1), std::string(kStart))] = {0.0, {}};
    for (std::size_t i = 0; i < n; ++i) {
      std::map<std::vector<std::string>, Hyp> next;
      for (const auto& [ctx, hyp] : states) {
        for (const auto& t : candidates[i]) {
          double s = detail::accumulate(hyp.score, detail::ngram_step(*m, ctx, t, words[i]));
          std::vector<std::string> path = hyp.path;
          path.push_back(t);
          std::vector<std::string> key(ctx.begin() + 1, ctx.end());
          key.push_back(t);
          auto it = next.find(key);
          if (it == next.end() || detail::better(s, path, it->second.score, it->second.path)) {
            next[key] = {s, std::move(path)};
          }
        }
      }
      states = std::move(next);
    }
    const Hyp* best = nullptr;
    double best_s = 0.0;
    for (const auto& [ctx, hyp] : states) {
      double s = detail::accumulate(hyp.score, std::log(m->transition(ctx, std::string(kEnd))));
      if (!best || detail::better(s, hyp.path, best_s, best->path)) {
        best = &hyp;
        best_s = s;
      }
    }
    return best->path;
  }
  const auto& m = std::get<DependencyModel>(model);
  struct Hyp {
    double score;
    std::vector<std::string> path;
  };
  std::vector<Hyp> beam{{0.0, {}}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Hyp> next;
    for (const auto& h : beam) {
      for (const auto& t : candidates[i]) {
        Hyp e{0.0, h.path};
        e.path.push_back(t);
        std::vector<std::string> padded = e.path;
        padded.resize(n);
        for (std::size_t k = 0; k <= i; ++k) {
          e.score = detail::accumulate(e.score, detail::dependency_term(m, words, padded, k, i + 1));
        }
        next.push_back(std::move(e));
      }
    }
    std::sort(next.begin(), next.end(),
              [](const Hyp& a, const Hyp& b) { return detail::better(a.score, a.path, b.score, b.path); });
    if (next.size() > options.beam_width) next.resize(std::max<std::size_t>(options.beam_width, 1));
    beam = std::move(next);
  }
  const Hyp* best = nullptr;
  double best_s = 0.0;
  for (const auto& h : beam) {
    double s = score_sequence(m, words, h.path);
    if (!best || detail::better(s, h.path, best_s, best->path)) {
      best = &h;
      best_s = s;
    }
  }
  return best->path;
}

/// Sorted supertag ids selectable for each token.
inline Expected<std::vector<std::vector<std::string>>, std::string> candidate_supertags(
    const std::vector<std::string>& words, const Grammar& g) {
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::vector<std::string> ids;
    for (const auto* t : g.supertags_for(words[i])) ids.push_back(t->id);
    if (ids.empty()) return fail("token " + std::to_string(i + 1) + " '" + words[i] + "' has no supertags");
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    out.push_back(std::move(ids));
  }
  return out;
}

/// One supertag per token, chosen among those the grammar selects.
inline Expected<std::vector<std::string>, std::string> tag(const std::vector<std::string>& words,
                                                           const SupertagModel& model, const Grammar& g,
                                                           const TagOptions& options = {}) {
  auto candidates = candidate_supertags(words, g);
  if (!candidates) return fail(candidates.error());
  return tag(words, candidates.value(), model, options);
}

/// Fraction of gold tokens whose predicted supertag matches. Sentences that
/// cannot be tagged count as wrong throughout.
inline double evaluate(const SupertagModel& model, const TaggedCorpus& gold, const Grammar& g,
                       const TagOptions& options = {}) {
  std::size_t total = 0, correct = 0;
  for (const auto& s : gold.sentences) {
    std::vector<std::string> words;
    for (const auto& t : s) words.push_back(t.word);
    total += s.size();
    auto predicted = tag(words, model, g, options);
    if (!predicted) continue;
    for (std::size_t i = 0; i < s.size(); ++i) correct += predicted.value()[i] == s[i].supertag ? 1 : 0;
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

// ---------------------------------------------------------------------------
// Model files

namespace detail {

inline std::string join_tab(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += '\t';
    out += fields[i];
  }
  return out;
}

inline void write_ngram_tables(const NGramModel& m, std::string& out) {
  out += "order\t" + std::to_string(m.order) + "\n";
  for (const auto& t : m.tags) out += "tag\t" + t + "\n";
  for (const auto& w : m.vocabulary) out += "word\t" + w + "\n";
  for (const auto& [key, c] : m.emissions) out += "emit\t" + key.first + "\t" + key.second + "\t" + std::to_string(c) + "\n";
  for (const auto& [ctx, row] : m.transitions) {
    for (const auto& [t, c] : row) {
      out += "trans\t" + join_tab(ctx) + "\t" + t + "\t" + std::to_string(c) + "\n";
    }
  }
}

}  // namespace detail

/// Versioned plain-text serialization with sorted tables.
inline std::string write_model(const SupertagModel& model) {
  std::string out = "model " + model_kind(model) + " v1\n";
  if (const auto* m = std::get_if<NGramModel>(&model)) {
    detail::write_ngram_tables(*m, out);
    return out;
  }
  const auto& m = std::get<DependencyModel>(model);
  out += "max-distance\t" + std::to_string(m.max_distance) + "\n";
  for (const auto& [head, row] : m.dependents) {
    for (const auto& [key, c] : row) {
      out += "dep\t" + head + "\t" + key.first + "\t" + std::to_string(key.second) + "\t" + std::to_string(c) + "\n";
    }
  }
  for (const auto& [t, c] : m.roots) out += "root\t" + t + "\t" + std::to_string(c) + "\n";
  detail::write_ngram_tables(m.lexical, out);
  return out;
}

inline SupertagModel read_model(std::string_view source, const std::string& origin = "<model>") {
  std::vector<std::pair<int, std::vector<std::string>>> rows;
  int line_no = 0;
  std::string header;
  std::size_t i = 0;
  while (i < source.size()) {
    std::size_t j = source.find('\n', i);
    if (j == std::string_view::npos) j = source.size();
    ++line_no;
    std::string line(source.substr(i, j - i));
    i = j + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header.empty()) {
      header = line;
      continue;
    }
    std::vector<std::string> fields;
    std::size_t a = 0;
    for (;;) {
      std::size_t b = line.find('\t', a);
      fields.push_back(line.substr(a, b == std::string::npos ? std::string::npos : b - a));
      if (b == std::string::npos) break;
      a = b + 1;
    }
    rows.emplace_back(line_no, std::move(fields));
  }
  auto words = text::split_ws(header);
  if (words.size() != 3 || words[0] != "model" || words[2] != "v1") {
    throw SyntaxError(origin, 1, "expected 'model unigram|bigram|trigram|dependency v1'");
  }
  const std::string kind = words[1];
  auto number = [&](int line, const std::string& s) {
    char* end = nullptr;
    long v = std::strtol(s.c_str(), &end, 10);
    if (s.empty() || *end != '\0') throw SyntaxError(origin, line, "expected an integer, found '" + s + "'");
    return v;
  };
  NGramModel ngram;
  DependencyModel dep;
  bool have_order = false;
  for (auto& [line, f] : rows) {
    const std::string& key = f[0];
    auto need = [&, line = line, &f = f](std::size_t n) {
      if (f.size() != n) throw SyntaxError(origin, line, "malformed '" + f[0] + "' row");
    };
    if (key == "order") {
      need(2);
      ngram.order = static_cast<int>(number(line, f[1]));
      have_order = true;
    } else if (key == "tag") {
      need(2);
      ngram.tags.insert(f[1]);
    } else if (key == "word") {
      need(2);
      ngram.vocabulary.insert(f[1]);
    } else if (key == "emit") {
      need(4);
      long c = number(line, f[3]);
      ngram.emissions[{f[1], f[2]}] = c;
      ngram.word_counts[f[1]] += c;
      ngram.tag_counts[f[2]] += c;
    } else if (key == "trans") {
      if (f.size() < 3) throw SyntaxError(origin, line, "malformed 'trans' row");
      std::vector<std::string> ctx(f.begin() + 1, f.end() - 2);
      long c = number(line, f.back());
      ngram.transitions[ctx][f[f.size() - 2]] = c;
      ngram.context_counts[ctx] += c;
    } else if (key == "max-distance" && kind == "dependency") {
      need(2);
      dep.max_distance = static_cast<int>(number(line, f[1]));
    } else if (key == "dep" && kind == "dependency") {
      need(5);
      long c = number(line, f[4]);
      dep.dependents[f[1]][{f[2], static_cast<int>(number(line, f[3]))}] = c;
      dep.head_totals[f[1]] += c;
    } else if (key == "root" && kind == "dependency") {
      need(3);
      long c = number(line, f[2]);
      dep.roots[f[1]] = c;
      dep.root_total += c;
    } else {
      throw SyntaxError(origin, line, "unknown row '" + key + "'");
    }
  }
  if (!have_order) throw SyntaxError(origin, 1, "missing 'order' row");
  if (kind == "dependency") {
    dep.lexical = std::move(ngram);
    dep.tags = dep.lexical.tags;
    return dep;
  }
  int expected = kind == "unigram" ? 1 : kind == "bigram" ? 2 : kind == "trigram" ? 3 : 0;
  if (expected == 0) throw SyntaxError(origin, 1, "unknown model kind '" + kind + "'");
  if (ngram.order != expected) throw SyntaxError(origin, 1, "order does not match model kind");
  return ngram;
}

}  // namespace ltag
