#pragma once

// Bottom-up chart parser for feature-based TAG.
//
// Items are (tree, node, phase, i, j, p, q): phase 0 is the node's top (the
// node and everything adjoined at it span i..j), phase k > 0 means the first
// k children span i..j. (p, q) is the span under the foot, if the item
// dominates one. The structural pass checks features only locally, between the
// elementary structures an operation touches; every extracted derivation is
// then replayed and finalized, which decides acceptance.
//
// Derivations are returned sorted by their serialization.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "ltag/derivation.hpp"
#include "ltag/expected.hpp"
#include "ltag/grammar.hpp"

namespace ltag {

struct ParseOptions {
  std::size_t max_derivations = 64;
  std::size_t max_candidates = 50000;  // fragments enumerated per chart item
  bool first_only = false;             // stop at the first accepted derivation
};

struct ParseStatistics {
  std::size_t items = 0;
  std::size_t supertags = 0;   // candidate supertags over all tokens
  std::size_t candidates = 0;  // structurally complete derivations examined
  std::size_t rejected = 0;    // candidates failing replay or finalize
  bool cap_exceeded = false;
};

struct ParseResult {
  std::vector<DerivationNode> derivations;
  ParseStatistics statistics;
};

struct ParseError {
  enum class Kind { EmptyInput, UnknownToken, BadSupertag };
  Kind kind = Kind::EmptyInput;
  std::size_t index = 0;
  std::string message;

  std::string describe() const {
    switch (kind) {
      case Kind::EmptyInput: return "empty input";
      case Kind::UnknownToken: return "unknown-token(" + std::to_string(index) + "): " + message;
      case Kind::BadSupertag: return "supertag not selectable for token(" + std::to_string(index) + "): " + message;
    }
    return message;
  }
};

/// Splits on whitespace and drops sentence-final punctuation. A token the
/// lexicon does not know is replaced by its lowercase form when that is known.
inline std::vector<std::string> tokenize(std::string_view sentence, const Grammar& g) {
  std::vector<std::string> out;
  for (auto& w : text::split_ws(sentence)) {
    while (!w.empty() && (w.back() == '?' || w.back() == '.' || w.back() == '!')) w.pop_back();
    if (w.empty()) continue;
    if (!g.knows(w)) {
      std::string lower = w;
      for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      if (g.knows(lower)) w = lower;
    }
    out.push_back(w);
  }
  return out;
}

namespace detail {

struct ChartNode {
  std::string label;
  Marker marker = Marker::Internal;
  std::string lexeme;
  int parent = -1;
  int index_in_parent = 0;  // 0-based
  std::vector<int> children;
  GornAddress address;
  FeatureId top = 0;
  FeatureId bottom = 0;
};

struct ChartTree {
  const ElementaryTree* et = nullptr;
  std::vector<ChartNode> nodes;  // preorder; 0 is the root
  int foot = -1;
  bool aux = false;
};

struct Item {
  std::uint16_t tree = 0;
  std::uint16_t node = 0;
  std::uint16_t phase = 0;
  std::int8_t i = 0, j = 0, p = -1, q = -1;

  bool operator==(const Item&) const = default;
  bool has_foot() const { return p >= 0; }
};

struct ItemHash {
  std::size_t operator()(const Item& it) const {
    std::uint64_t k = it.tree;
    k = (k << 16) | it.node;
    k = (k << 16) | it.phase;
    k = k * 1000003u + static_cast<std::uint8_t>(it.i);
    k = k * 131u + static_cast<std::uint8_t>(it.j);
    k = k * 131u + static_cast<std::uint8_t>(it.p);
    k = k * 131u + static_cast<std::uint8_t>(it.q);
    return std::hash<std::uint64_t>()(k);
  }
};

struct Back {
  enum class Type { Leaf, First, Extend, Null, Adjoin, Subst };
  Type type = Type::Leaf;
  int a = -1;
  int b = -1;
};

class Chart {
 public:
  Chart(const Grammar& g, const std::vector<std::string>& tokens, const std::vector<std::set<std::string>>& allowed,
        const ParseOptions& options)
      : g_(g), tokens_(tokens), allowed_(allowed), options_(options), n_(static_cast<int>(tokens.size())) {
    std::set<std::string> active;
    for (const auto& s : allowed) active.insert(s.begin(), s.end());
    for (const auto& id : active) add_tree(*g.supertag(id));
    for (std::size_t t = 0; t < trees_.size(); ++t) {
      for (std::size_t k = 0; k < trees_[t].nodes.size(); ++k) {
        const auto& nd = trees_[t].nodes[k];
        if (nd.marker == Marker::Substitution) subst_sites_[nd.label].emplace_back(t, k);
      }
    }
  }

  ParseResult run() {
    seed();
    while (!agenda_.empty()) {
      int id = agenda_.front();
      agenda_.pop_front();
      process(id);
    }
    ParseResult result;
    result.statistics.items = items_.size();
    for (const auto& s : allowed_) result.statistics.supertags += s.size();
    extract(result);
    return result;
  }

 private:
  void add_tree(const ElementaryTree& et) {
    ChartTree ct;
    ct.et = &et;
    ct.aux = et.kind == TreeKind::Auxiliary;
    auto walk = [&](auto&& self, const TreeNode& n, int parent, int index, GornAddress& at) -> void {
      int id = static_cast<int>(ct.nodes.size());
      ChartNode cn;
      cn.label = n.label;
      cn.marker = n.marker;
      cn.lexeme = std::string(n.lexeme());
      cn.parent = parent;
      cn.index_in_parent = index;
      cn.address = at;
      cn.top = n.top;
      cn.bottom = n.bottom;
      ct.nodes.push_back(cn);
      if (n.marker == Marker::Foot) ct.foot = id;
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        at.path.push_back(static_cast<int>(i + 1));
        int child = static_cast<int>(ct.nodes.size());
        ct.nodes[id].children.push_back(child);
        self(self, n.children[i], id, static_cast<int>(i), at);
        at.path.pop_back();
      }
    };
    GornAddress at;
    walk(walk, et.tree.root, -1, 0, at);
    int t = static_cast<int>(trees_.size());
    if (ct.aux) aux_by_label_[ct.nodes[0].label].push_back(t);
    trees_.push_back(std::move(ct));
  }

  const ChartNode& node_of(const Item& it) const { return trees_[it.tree].nodes[it.node]; }

  // Items and indexes -------------------------------------------------------

  using Key3 = std::tuple<int, int, int>;
  using Key4 = std::tuple<int, int, int, int>;

  int add(const Item& it, Back back) {
    auto [pos, fresh] = index_.try_emplace(it, static_cast<int>(items_.size()));
    if (!fresh) {
      backs_[pos->second].push_back(back);
      return pos->second;
    }
    items_.push_back(it);
    backs_.push_back({back});
    agenda_.push_back(pos->second);
    return pos->second;
  }

  void seed() {
    for (std::size_t t = 0; t < trees_.size(); ++t) {
      const auto& ct = trees_[t];
      for (std::size_t k = 0; k < ct.nodes.size(); ++k) {
        const auto& nd = ct.nodes[k];
        Item it;
        it.tree = static_cast<std::uint16_t>(t);
        it.node = static_cast<std::uint16_t>(k);
        if (nd.marker == Marker::Anchor || (nd.marker == Marker::Terminal && !nd.lexeme.empty())) {
          for (int i = 0; i < n_; ++i) {
            if (tokens_[i] != nd.lexeme) continue;
            if (nd.marker == Marker::Anchor && !allowed_[i].count(ct.et->id)) continue;
            it.i = static_cast<std::int8_t>(i);
            it.j = static_cast<std::int8_t>(i + 1);
            add(it, {});
          }
        } else if (nd.marker == Marker::Terminal) {
          for (int i = 0; i <= n_; ++i) {
            it.i = it.j = static_cast<std::int8_t>(i);
            add(it, {});
          }
        } else if (nd.marker == Marker::Foot) {
          for (int p = 0; p <= n_; ++p) {
            for (int q = p; q <= n_; ++q) {
              it.i = it.p = static_cast<std::int8_t>(p);
              it.j = it.q = static_cast<std::int8_t>(q);
              add(it, {});
            }
          }
        }
      }
    }
  }

  static bool combine_feet(const Item& a, const Item& b, Item& out) {
    if (a.has_foot() && b.has_foot()) return false;
    const Item& f = a.has_foot() ? a : b;
    out.p = f.p;
    out.q = f.q;
    return true;
  }

  void process(int id) {
    Item it = items_[id];
    const ChartTree& ct = trees_[it.tree];
    const ChartNode& nd = ct.nodes[it.node];
    if (it.phase == 0) {
      tops_by_start_[Key3{it.tree, it.node, it.i}].push_back(id);
      if (nd.parent >= 0) {
        const ChartNode& parent = ct.nodes[nd.parent];
        if (nd.index_in_parent == 0) {
          Item d = it;
          d.node = static_cast<std::uint16_t>(nd.parent);
          d.phase = 1;
          add(d, {Back::Type::First, id, -1});
        } else {
          for (int left : dots_by_end_[Key4{it.tree, nd.parent, nd.index_in_parent, it.i}]) {
            extend(left, id);
          }
        }
        (void)parent;
      } else {
        root_top(id);
      }
      return;
    }
    // phase k: first k children recognized
    if (static_cast<std::size_t>(it.phase) < nd.children.size()) {
      dots_by_end_[Key4{it.tree, it.node, it.phase, it.j}].push_back(id);
      int next = nd.children[it.phase];
      for (int right : tops_by_start_[Key3{it.tree, next, it.j}]) extend(id, right);
      return;
    }
    bottom_complete(id);
  }

  void extend(int left, int right) {
    const Item a = items_[left];
    const Item b = items_[right];
    Item d = a;
    if (!combine_feet(a, b, d)) return;
    d.phase = static_cast<std::uint16_t>(a.phase + 1);
    d.j = b.j;
    add(d, {Back::Type::Extend, left, right});
  }

  void bottom_complete(int id) {
    const Item it = items_[id];
    const ChartTree& ct = trees_[it.tree];
    const ChartNode& nd = ct.nodes[it.node];
    // No adjunction.
    if (compatible(it.tree, nd.top, it.tree, nd.bottom)) {
      Item top = it;
      top.phase = 0;
      add(top, {Back::Type::Null, id, -1});
    }
    // Adjunction of any auxiliary root item whose foot spans this node.
    bots_by_span_[Key3{label_id(nd.label), it.i, it.j}].push_back(id);
    for (int aux : aux_by_foot_[Key3{label_id(nd.label), it.i, it.j}]) adjoin(aux, id);
  }

  void root_top(int id) {
    const Item it = items_[id];
    const ChartTree& ct = trees_[it.tree];
    const ChartNode& root = ct.nodes[0];
    if (ct.aux) {
      if (!it.has_foot()) return;
      aux_by_foot_[Key3{label_id(root.label), it.p, it.q}].push_back(id);
      for (int bot : bots_by_span_[Key3{label_id(root.label), it.p, it.q}]) adjoin(id, bot);
      return;
    }
    if (it.has_foot()) return;
    auto sites = subst_sites_.find(root.label);
    if (sites == subst_sites_.end()) return;
    for (auto [t, k] : sites->second) {
      const ChartNode& site = trees_[t].nodes[k];
      if (!compatible(static_cast<int>(t), site.top, it.tree, root.top)) continue;
      Item s;
      s.tree = static_cast<std::uint16_t>(t);
      s.node = static_cast<std::uint16_t>(k);
      s.i = it.i;
      s.j = it.j;
      add(s, {Back::Type::Subst, id, -1});
    }
  }

  void adjoin(int aux_id, int bot_id) {
    const Item aux = items_[aux_id];
    const Item bot = items_[bot_id];
    const ChartTree& at = trees_[aux.tree];
    const ChartNode& site = node_of(bot);
    if (!site.children.size() || site.marker != Marker::Internal) return;
    if (!compatible(bot.tree, site.top, aux.tree, at.nodes[0].top)) return;
    if (!compatible(bot.tree, site.bottom, aux.tree, at.nodes[at.foot].bottom)) return;
    Item top = bot;
    top.phase = 0;
    top.i = aux.i;
    top.j = aux.j;
    add(top, {Back::Type::Adjoin, aux_id, bot_id});
  }

  int label_id(const std::string& label) {
    auto [it, fresh] = labels_.try_emplace(label, static_cast<int>(labels_.size()));
    return it->second;
  }

  /// Whether two elementary structures unify, ignoring the rest of the
  /// derivation. Sound as a filter since later operations only add information.
  bool compatible(int ta, FeatureId a, int tb, FeatureId b) {
    const FeatureGraph& ga = trees_[ta].et->tree.features;
    const FeatureGraph& gb = trees_[tb].et->tree.features;
    if (ga.node(a).is_empty() || gb.node(b).is_empty()) return true;
    auto key = std::make_tuple(ta, a, tb, b);
    if (auto it = compat_.find(key); it != compat_.end()) return it->second;
    FeatureGraph scratch = ga;
    FeatureId off = scratch.append(gb);
    Unifier u(scratch);
    bool ok = u.unify(a, b + off);
    compat_[key] = ok;
    return ok;
  }

  // Extraction ----------------------------------------------------------------

  using Fragment = std::vector<Attachment>;

  const std::vector<Fragment>& fragments(int id) {
    if (auto it = frag_memo_.find(id); it != frag_memo_.end()) return it->second;
    std::vector<Fragment> out;
    auto push = [&](Fragment f) {
      if (out.size() >= options_.max_candidates) {
        cap_ = true;
        return;
      }
      out.push_back(std::move(f));
    };
    for (const Back& b : backs_[id]) {
      switch (b.type) {
        case Back::Type::Leaf:
          push({});
          break;
        case Back::Type::First:
        case Back::Type::Null:
          for (const auto& f : fragments(b.a)) push(f);
          break;
        case Back::Type::Extend: {
          const auto& left = fragments(b.a);
          const auto& right = fragments(b.b);
          for (const auto& l : left) {
            for (const auto& r : right) {
              Fragment f = l;
              f.insert(f.end(), r.begin(), r.end());
              push(std::move(f));
            }
          }
          break;
        }
        case Back::Type::Adjoin: {
          const auto& kids = derivations_at(b.a);
          const auto& below = fragments(b.b);
          const GornAddress& site = node_of(items_[b.b]).address;
          for (const auto& kid : kids) {
            for (const auto& f : below) {
              Fragment g = f;
              g.push_back({Operation::Adjunction, site, kid});
              push(std::move(g));
            }
          }
          break;
        }
        case Back::Type::Subst: {
          const GornAddress& site = node_of(items_[id]).address;
          for (const auto& kid : derivations_at(b.a)) push({{Operation::Substitution, site, kid}});
          break;
        }
      }
    }
    return frag_memo_[id] = std::move(out);
  }

  /// Derivations rooted at a root-top item whose own replay succeeds. A failing
  /// subderivation fails every derivation containing it.
  const std::vector<DerivationNode>& derivations_at(int root_item) {
    if (auto it = deriv_memo_.find(root_item); it != deriv_memo_.end()) return it->second;
    std::vector<DerivationNode> out;
    const ChartTree& ct = trees_[items_[root_item].tree];
    for (const auto& f : fragments(root_item)) {
      DerivationNode d{ct.et->id, f};
      normalize(d);
      if (replays(d)) out.push_back(std::move(d));
    }
    return deriv_memo_[root_item] = std::move(out);
  }

  bool replays(const DerivationNode& d) {
    std::string key = serialize(d);
    if (auto it = replay_memo_.find(key); it != replay_memo_.end()) return it->second;
    bool ok = replay(d, g_).ok();
    replay_memo_[key] = ok;
    return ok;
  }

  void extract(ParseResult& result) {
    std::vector<int> goals;
    for (std::size_t id = 0; id < items_.size(); ++id) {
      const Item& it = items_[id];
      const ChartTree& ct = trees_[it.tree];
      if (it.node == 0 && it.phase == 0 && !ct.aux && it.i == 0 && it.j == n_ && !it.has_foot() &&
          ct.nodes[0].label == g_.start_symbol) {
        goals.push_back(static_cast<int>(id));
      }
    }
    std::map<std::string, DerivationNode> accepted;
    for (int goal : goals) {
      for (const auto& d : derivations_at(goal)) {
        ++result.statistics.candidates;
        std::string key = serialize(d);
        if (accepted.count(key)) continue;
        if (!accepts(d)) {
          ++result.statistics.rejected;
          continue;
        }
        accepted.emplace(std::move(key), d);
        if (options_.first_only) break;
      }
      if (options_.first_only && !accepted.empty()) break;
    }
    for (auto& [key, d] : accepted) {
      if (result.derivations.size() >= options_.max_derivations) {
        cap_ = true;
        break;
      }
      result.derivations.push_back(std::move(d));
    }
    result.statistics.cap_exceeded = cap_;
  }

  bool accepts(const DerivationNode& d) const {
    auto derived = replay(d, g_);
    if (!derived) return false;
    if (derived->tree.root.label != g_.start_symbol) return false;
    if (derived->tree.yield() != tokens_) return false;
    return finalize(derived->tree).ok();
  }

  const Grammar& g_;
  const std::vector<std::string>& tokens_;
  const std::vector<std::set<std::string>>& allowed_;
  ParseOptions options_;
  int n_;

  std::vector<ChartTree> trees_;
  std::map<std::string, std::vector<int>> aux_by_label_;
  std::map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> subst_sites_;
  std::map<std::string, int> labels_;

  std::vector<Item> items_;
  std::vector<std::vector<Back>> backs_;
  std::unordered_map<Item, int, ItemHash> index_;
  std::deque<int> agenda_;
  std::map<Key3, std::vector<int>> tops_by_start_;
  std::map<Key4, std::vector<int>> dots_by_end_;
  std::map<Key3, std::vector<int>> bots_by_span_;
  std::map<Key3, std::vector<int>> aux_by_foot_;
  std::map<std::tuple<int, FeatureId, int, FeatureId>, bool> compat_;

  std::unordered_map<int, std::vector<Fragment>> frag_memo_;
  std::unordered_map<int, std::vector<DerivationNode>> deriv_memo_;
  std::unordered_map<std::string, bool> replay_memo_;
  bool cap_ = false;
};

inline Expected<std::vector<std::set<std::string>>, ParseError> selectable(const std::vector<std::string>& tokens,
                                                                          const Grammar& g) {
  if (tokens.empty()) return fail(ParseError{ParseError::Kind::EmptyInput, 0, {}});
  std::vector<std::set<std::string>> allowed(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!g.knows(tokens[i])) return fail(ParseError{ParseError::Kind::UnknownToken, i, tokens[i]});
    for (const auto* t : g.supertags_for(tokens[i])) allowed[i].insert(t->id);
  }
  return allowed;
}

inline constexpr std::size_t kMaxTokens = 100;

}  // namespace detail

/// All derivations of `tokens` from the start symbol, up to
/// options.max_derivations, in lexicographic order of their serialization.
inline Expected<ParseResult, ParseError> parse(const std::vector<std::string>& tokens, const Grammar& g,
                                               const ParseOptions& options = {}) {
  auto allowed = detail::selectable(tokens, g);
  if (!allowed) return fail(allowed.error());
  if (tokens.size() > detail::kMaxTokens) {
    return fail(ParseError{ParseError::Kind::UnknownToken, detail::kMaxTokens, "sentence too long"});
  }
  detail::Chart chart(g, tokens, allowed.value(), options);
  return chart.run();
}

/// As parse, but token i may only use supertag assignment[i].
inline Expected<ParseResult, ParseError> parse_with_supertags(const std::vector<std::string>& tokens,
                                                              const std::vector<std::string>& assignment,
                                                              const Grammar& g, const ParseOptions& options = {}) {
  auto allowed = detail::selectable(tokens, g);
  if (!allowed) return fail(allowed.error());
  if (assignment.size() != tokens.size()) {
    return fail(ParseError{ParseError::Kind::BadSupertag, std::min(assignment.size(), tokens.size()),
                           "expected one supertag per token"});
  }
  std::vector<std::set<std::string>> restricted(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!allowed.value()[i].count(assignment[i])) {
      return fail(ParseError{ParseError::Kind::BadSupertag, i, assignment[i]});
    }
    restricted[i].insert(assignment[i]);
  }
  detail::Chart chart(g, tokens, restricted, options);
  return chart.run();
}

inline Expected<bool, ParseError> recognize(const std::vector<std::string>& tokens, const Grammar& g) {
  ParseOptions options;
  options.first_only = true;
  auto r = parse(tokens, g, options);
  if (!r) return fail(r.error());
  return !r->derivations.empty();
}

}  // namespace ltag
