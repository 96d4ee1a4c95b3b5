#pragma once

// Tree database, tree families and the syntactic lexicon.
//
// Tree file:
//   start S
//   tree αnx0Vnx1 kind=initial family=Tnx0Vnx1 {
//     S name=S_r ( NP! [top=[case=nom]] VP ( V@ NP! ) )
//   }
//
// Lexicon file, one stanza per entry, blank-line separated:
//   INDEX: think
//   ENTRY: think
//   POS: V
//   FRAME: Tnx0Vs1
//   FS: S_1.top=[mode=ind, comp=that]
//   EX: They think that John sleeps.

#include <algorithm>
#include <map>
#include <set>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ltag/expected.hpp"
#include "ltag/featstruct.hpp"
#include "ltag/text.hpp"
#include "ltag/tree.hpp"

namespace ltag {

struct TreeFamily {
  std::string id;
  std::vector<std::string> members;  // declaration order

  bool operator==(const TreeFamily&) const = default;
};

/// Feature constraint a lexical item places on a named node of its trees.
struct LexConstraint {
  std::string node;
  bool top = true;
  FeatureId value = 0;  // in LexiconEntry::constraint_features
};

struct LexiconEntry {
  std::string index;
  std::vector<std::string> entry;  // word forms; several for idioms
  std::string pos;
  std::string frame;  // family id or single tree id
  FeatureGraph constraint_features;
  std::vector<LexConstraint> constraints;
  std::string example;
  std::string source;
  int line = 0;

  FeatureStructure constraint_fs(std::size_t i) const {
    return FeatureStructure::extract(constraint_features, constraints.at(i).value);
  }

  /// Comparable rendering (variables normalized across all constraints).
  std::string canonical() const {
    std::vector<FeatureId> roots;
    for (const auto& c : constraints) roots.push_back(c.value);
    FeaturePrinter p(constraint_features, roots, FeaturePrinter::Naming::Canonical);
    std::string out = index + "|" + pos + "|" + frame + "|" + example + "|";
    for (const auto& w : entry) out += w + " ";
    for (const auto& c : constraints) out += "|" + c.node + (c.top ? ".top=" : ".bot=") + p.value(c.value);
    return out;
  }
};

class GrammarError : public std::runtime_error {
 public:
  explicit GrammarError(std::vector<std::string> errors)
      : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

  const std::vector<std::string>& errors() const { return errors_; }

 private:
  static std::string join(const std::vector<std::string>& errors) {
    std::string out;
    for (const auto& e : errors) {
      if (!out.empty()) out += "\n";
      out += e;
    }
    return out;
  }
  std::vector<std::string> errors_;
};

namespace detail {

inline std::string join_words(const std::vector<std::string>& words, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out += sep;
    out += words[i];
  }
  return out;
}

/// Variable namespace derived from a supertag id, restricted to characters
/// the feature syntax accepts inside variable names.
inline std::string namespace_for(std::string_view id) {
  std::string out;
  for (char c : id) out += (text::is_delimiter(c) || text::is_space(c) || c == '%') ? '_' : c;
  return out;
}

}  // namespace detail

/// Anchors `templ` with the words of `lex`: variables are renamed into `ns`,
/// anchor slots are filled left to right in preorder, and each lexicon
/// constraint is unified into the designated side of its named node.
inline Expected<ElementaryTree, std::string> anchor_tree(const ElementaryTree& templ, const LexiconEntry& lex,
                                                         std::string_view ns) {
  if (templ.id != lex.frame && (templ.family.empty() || templ.family != lex.frame)) {
    return fail("frame '" + lex.frame + "' does not cover tree '" + templ.id + "'");
  }
  if (lex.entry.size() != templ.anchor_slots.size()) {
    return fail("tree '" + templ.id + "' has " + std::to_string(templ.anchor_slots.size()) + " anchor slot(s) but entry has " +
                std::to_string(lex.entry.size()) + " word(s)");
  }
  ElementaryTree out = templ;
  out.tree.features.rename_variables(ns);
  FeatureGraph lexical = lex.constraint_features;
  lexical.rename_variables(std::string(ns) + ".lex");
  FeatureId offset = out.tree.features.append(lexical);
  Unifier u(out.tree.features);
  for (const auto& c : lex.constraints) {
    auto at = out.tree.address_of_name(c.node);
    if (!at) return fail("constraint names missing node '" + c.node + "' in tree '" + templ.id + "'");
    TreeNode* node = out.tree.find(*at);
    std::string where = c.node + (c.top ? ".top" : ".bot");
    if (!u.unify(c.top ? node->top : node->bottom, c.value + offset, where)) {
      return fail("constraint on " + where + " fails: " + u.error()->describe());
    }
  }
  if (!u.finish(out.tree.feature_refs())) return fail("constraints create " + u.error()->describe());
  for (std::size_t i = 0; i < out.anchor_slots.size(); ++i) out.tree.find(out.anchor_slots[i])->word = lex.entry[i];
  out.words = lex.entry;
  out.id = templ.id + "[" + detail::join_words(lex.entry, ",") + "]";
  return out;
}

class Grammar {
 public:
  std::string start_symbol = "S";

  /// Adds a template tree; families are extended in insertion order.
  void add_tree(ElementaryTree t) {
    if (!t.family.empty()) {
      auto& fam = families_[t.family];
      fam.id = t.family;
      fam.members.push_back(t.id);
    }
    order_.push_back(t.id);
    t.refresh_anchor_slots();
    trees_[t.id] = std::move(t);
    built_ = false;
  }

  void add_entry(LexiconEntry e) {
    entries_.push_back(std::move(e));
    built_ = false;
  }

  /// Validates every invariant and precomputes the supertags of each word.
  /// Throws GrammarError listing every violation with its source location.
  void build() {
    std::vector<std::string> errors;
    std::map<std::string, int> seen;
    for (const auto& id : order_) {
      if (++seen[id] > 1) errors.push_back(tree_location(trees_.at(id)) + ": duplicate tree id '" + id + "'");
    }
    for (const auto& id : order_) {
      const auto& t = trees_.at(id);
      for (const auto& d : validate(t)) errors.push_back(tree_location(t) + ": tree " + id + ": " + d.str());
    }
    for (const auto& e : entries_) {
      std::string where = e.source + ":" + std::to_string(e.line);
      auto members = frame_members(e.frame);
      if (members.empty()) {
        errors.push_back(where + ": unknown frame '" + e.frame + "'");
        continue;
      }
      for (const auto& m : members) {
        const auto& t = trees_.at(m);
        if (t.anchor_slots.size() != e.entry.size()) {
          errors.push_back(where + ": anchor-count mismatch: tree '" + m + "' has " +
                           std::to_string(t.anchor_slots.size()) + " anchor(s), entry has " +
                           std::to_string(e.entry.size()) + " word(s)");
        }
        for (const auto& c : e.constraints) {
          if (!t.tree.address_of_name(c.node)) {
            errors.push_back(where + ": constraint names node '" + c.node + "' missing from tree '" + m + "'");
          }
        }
      }
    }
    if (!errors.empty()) throw GrammarError(std::move(errors));
    index_supertags();
    built_ = true;
  }

  const std::map<std::string, ElementaryTree>& trees() const { return trees_; }
  const std::vector<std::string>& tree_order() const { return order_; }
  const std::map<std::string, TreeFamily>& families() const { return families_; }
  const std::vector<LexiconEntry>& entries() const { return entries_; }

  const ElementaryTree* tree(std::string_view id) const {
    auto it = trees_.find(std::string(id));
    return it == trees_.end() ? nullptr : &it->second;
  }

  /// Tree ids a frame denotes: the family's members, or the single tree.
  std::vector<std::string> frame_members(const std::string& frame) const {
    if (auto f = families_.find(frame); f != families_.end()) return f->second.members;
    if (trees_.count(frame)) return {frame};
    return {};
  }

  /// Entry indexes, in file order, whose ENTRY contains `word`.
  std::vector<std::size_t> entries_for(std::string_view word) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      for (const auto& w : entries_[i].entry) {
        if (w == word) {
          out.push_back(i);
          break;
        }
      }
    }
    return out;
  }

  bool knows(std::string_view word) const { return by_word_.count(std::string(word)) > 0; }

  /// Anchored trees selectable by `word`, in lexicon then family order.
  std::vector<const ElementaryTree*> supertags_for(std::string_view word) const {
    require_built();
    std::vector<const ElementaryTree*> out;
    auto it = by_word_.find(std::string(word));
    if (it == by_word_.end()) return out;
    for (const auto& id : it->second) out.push_back(&anchored_.at(id));
    return out;
  }

  const ElementaryTree* supertag(std::string_view id) const {
    require_built();
    auto it = anchored_.find(std::string(id));
    return it == anchored_.end() ? nullptr : &it->second;
  }

  const std::map<std::string, ElementaryTree>& supertags() const { return anchored_; }

  /// Anchoring failures met while indexing (skipped supertags).
  const std::vector<std::string>& anchoring_diagnostics() const { return anchor_diagnostics_; }

  bool operator==(const Grammar& o) const {
    if (start_symbol != o.start_symbol || order_ != o.order_ || families_ != o.families_) return false;
    for (const auto& [id, t] : trees_) {
      auto it = o.trees_.find(id);
      if (it == o.trees_.end() || !(it->second == t)) return false;
    }
    if (entries_.size() != o.entries_.size()) return false;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      if (entries_[i].canonical() != o.entries_[i].canonical()) return false;
    }
    return true;
  }

 private:
  void require_built() const {
    if (!built_) throw std::logic_error("Grammar::build() has not been called");
  }

  static std::string tree_location(const ElementaryTree& t) {
    return (t.source.empty() ? std::string("<trees>") : t.source) + ":" + std::to_string(t.line);
  }

  void index_supertags() {
    anchored_.clear();
    by_word_.clear();
    anchor_diagnostics_.clear();
    for (std::size_t e = 0; e < entries_.size(); ++e) {
      const auto& lex = entries_[e];
      for (const auto& member : frame_members(lex.frame)) {
        std::string base = member + "[" + detail::join_words(lex.entry, ",") + "]";
        // Entries sharing (tree, words) are told apart by a 1-based ordinal.
        std::vector<std::size_t> same;
        for (std::size_t o = 0; o < entries_.size(); ++o) {
          const auto& other = entries_[o];
          if (other.entry != lex.entry) continue;
          auto ms = frame_members(other.frame);
          if (std::find(ms.begin(), ms.end(), member) != ms.end()) same.push_back(o);
        }
        std::string id = base;
        if (same.size() > 1) {
          auto k = std::find(same.begin(), same.end(), e) - same.begin() + 1;
          id += ":" + std::to_string(k);
        }
        auto anchored = anchor_tree(trees_.at(member), lex, detail::namespace_for(id));
        if (!anchored) {
          anchor_diagnostics_.push_back(lex.source + ":" + std::to_string(lex.line) + ": " + id + ": " +
                                        anchored.error());
          continue;
        }
        ElementaryTree t = std::move(anchored).value();
        t.id = id;
        anchored_[id] = std::move(t);
        std::set<std::string> distinct(lex.entry.begin(), lex.entry.end());
        for (const auto& w : distinct) by_word_[w].push_back(id);
      }
    }
    // Words with entries whose anchoring failed are still known words.
    for (const auto& lex : entries_) {
      for (const auto& w : lex.entry) by_word_.try_emplace(w);
    }
  }

  std::map<std::string, ElementaryTree> trees_;
  std::vector<std::string> order_;
  std::map<std::string, TreeFamily> families_;
  std::vector<LexiconEntry> entries_;

  std::map<std::string, ElementaryTree> anchored_;
  std::map<std::string, std::vector<std::string>> by_word_;
  std::vector<std::string> anchor_diagnostics_;
  bool built_ = false;
};

/// All anchored trees selectable by `word`; empty for unknown words.
inline std::vector<ElementaryTree> select_supertags(std::string_view word, const Grammar& g) {
  std::vector<ElementaryTree> out;
  for (const auto* t : g.supertags_for(word)) out.push_back(*t);
  return out;
}

// ---------------------------------------------------------------------------
// Reading

struct TreeFile {
  std::string start_symbol = "S";
  std::vector<ElementaryTree> trees;
};

inline TreeFile parse_tree_file(std::string_view source, const std::string& origin = "trees.tag") {
  text::Lexer lex(source, origin);
  TreeFile out;
  while (!lex.at_end()) {
    text::Token t = lex.next();
    if (t.is_word("start")) {
      out.start_symbol = lex.expect_word("start symbol");
      continue;
    }
    if (!t.is_word("tree")) lex.error(t, "expected 'tree' or 'start'");
    ElementaryTree et;
    et.source = origin;
    et.line = t.line;
    et.id = lex.expect_word("tree id");
    bool have_kind = false;
    while (lex.peek().is_word() && lex.peek(1).is('=')) {
      text::Token key = lex.next();
      lex.next();
      std::string value = lex.expect_word("attribute value");
      if (key.text == "kind") {
        if (value == "initial") et.kind = TreeKind::Initial;
        else if (value == "auxiliary") et.kind = TreeKind::Auxiliary;
        else lex.error(key, "kind must be 'initial' or 'auxiliary'");
        have_kind = true;
      } else if (key.text == "family") {
        et.family = value;
      } else {
        lex.error(key, "unknown tree attribute '" + key.text + "'");
      }
    }
    if (!have_kind) lex.error("tree '" + et.id + "' lacks kind=initial|auxiliary");
    lex.expect('{');
    FeatureReader reader(et.tree.features);
    et.tree.root = tree_syntax::read_node(lex, reader, et.tree.features);
    lex.expect('}');
    if (auto err = reader.resolve(et.tree.feature_refs())) {
      throw SyntaxError(origin, et.line, "tree '" + et.id + "': inconsistent variables: " + err->describe());
    }
    et.refresh_anchor_slots();
    out.trees.push_back(std::move(et));
  }
  return out;
}

namespace detail {
inline void parse_constraint(LexiconEntry& e, FeatureReader& reader, const std::string& value,
                             const std::string& origin, int line) {
  auto eq = value.find('=');
  if (eq == std::string::npos) throw SyntaxError(origin, line, "FS line must read NODE[.top|.bot]=[...]");
  std::string target = text::trim(std::string_view(value).substr(0, eq));
  LexConstraint c;
  auto dot = target.rfind('.');
  if (dot != std::string::npos && (target.substr(dot + 1) == "top" || target.substr(dot + 1) == "bot")) {
    c.top = target.substr(dot + 1) == "top";
    target = target.substr(0, dot);
  }
  if (target.empty()) throw SyntaxError(origin, line, "FS line names no node");
  c.node = target;
  text::Lexer lex(std::string_view(value).substr(eq + 1), origin, line);
  c.value = reader.read_value(lex);
  if (!lex.at_end()) lex.error("trailing input after feature structure");
  e.constraints.push_back(c);
}
}  // namespace detail

inline std::vector<LexiconEntry> parse_lexicon(std::string_view source, const std::string& origin = "lexicon.lex") {
  std::vector<LexiconEntry> out;
  std::vector<std::pair<int, std::string>> stanza;
  auto flush = [&]() {
    if (stanza.empty()) return;
    LexiconEntry e;
    e.source = origin;
    e.line = stanza.front().first;
    FeatureReader reader(e.constraint_features);
    bool have_entry = false, have_frame = false;
    for (auto& [line, raw] : stanza) {
      auto colon = raw.find(':');
      if (colon == std::string::npos) throw SyntaxError(origin, line, "expected 'KEY: value'");
      std::string key = text::trim(std::string_view(raw).substr(0, colon));
      std::string value = text::trim(std::string_view(raw).substr(colon + 1));
      if (key == "INDEX") {
        e.index = value;
      } else if (key == "ENTRY") {
        e.entry = text::split_ws(value);
        if (e.entry.empty()) throw SyntaxError(origin, line, "ENTRY is empty");
        have_entry = true;
      } else if (key == "POS") {
        e.pos = value;
      } else if (key == "FRAME") {
        if (value.empty()) throw SyntaxError(origin, line, "FRAME is empty");
        e.frame = value;
        have_frame = true;
      } else if (key == "FS") {
        detail::parse_constraint(e, reader, value, origin, line);
      } else if (key == "EX") {
        e.example = value;
      } else {
        throw SyntaxError(origin, line, "unknown lexicon field '" + key + "'");
      }
    }
    if (!have_entry) throw SyntaxError(origin, e.line, "stanza lacks ENTRY");
    if (!have_frame) throw SyntaxError(origin, e.line, "stanza lacks FRAME");
    if (e.index.empty()) e.index = e.entry.front();
    std::vector<FeatureId*> roots;
    for (auto& c : e.constraints) roots.push_back(&c.value);
    if (auto err = reader.resolve(roots)) {
      throw SyntaxError(origin, e.line, "inconsistent variables: " + err->describe());
    }
    out.push_back(std::move(e));
    stanza.clear();
  };
  int line_no = 0;
  std::size_t i = 0;
  while (i <= source.size()) {
    std::size_t j = source.find('\n', i);
    if (j == std::string_view::npos) j = source.size();
    ++line_no;
    std::string line = text::trim(source.substr(i, j - i));
    if (line.empty()) {
      flush();
    } else if (line[0] != '%') {
      stanza.emplace_back(line_no, line);
    }
    i = j + 1;
  }
  flush();
  return out;
}

inline Grammar build_grammar(TreeFile trees, std::vector<LexiconEntry> entries) {
  Grammar g;
  g.start_symbol = trees.start_symbol;
  for (auto& t : trees.trees) g.add_tree(std::move(t));
  for (auto& e : entries) g.add_entry(std::move(e));
  g.build();
  return g;
}

/// Parses and validates a grammar. Throws SyntaxError or GrammarError.
inline Grammar load_grammar(std::string_view tree_source, std::string_view lexicon_source,
                            const std::string& tree_origin = "trees.tag",
                            const std::string& lexicon_origin = "lexicon.lex") {
  return build_grammar(parse_tree_file(tree_source, tree_origin), parse_lexicon(lexicon_source, lexicon_origin));
}

// ---------------------------------------------------------------------------
// Writing

inline std::string write_tree(const ElementaryTree& t) {
  std::string out = "tree " + t.id + " kind=" + std::string(kind_name(t.kind));
  if (!t.family.empty()) out += " family=" + t.family;
  out += " {\n" + tree_syntax::write_tree_body(t.tree, 2) + "}\n";
  return out;
}

inline std::string write_tree_file(const std::string& start_symbol, const std::vector<const ElementaryTree*>& trees) {
  std::string out = "start " + start_symbol + "\n";
  for (const auto* t : trees) out += "\n" + write_tree(*t);
  return out;
}

inline std::string write_tree_file(const Grammar& g) {
  std::vector<const ElementaryTree*> trees;
  for (const auto& id : g.tree_order()) trees.push_back(g.tree(id));
  return write_tree_file(g.start_symbol, trees);
}

inline std::string write_lexicon(const Grammar& g) {
  std::string out;
  bool first = true;
  for (const auto& e : g.entries()) {
    if (!first) out += "\n";
    first = false;
    out += "INDEX: " + e.index + "\n";
    out += "ENTRY: " + detail::join_words(e.entry, " ") + "\n";
    if (!e.pos.empty()) out += "POS: " + e.pos + "\n";
    out += "FRAME: " + e.frame + "\n";
    std::vector<FeatureId> roots;
    for (const auto& c : e.constraints) roots.push_back(c.value);
    FeaturePrinter p(e.constraint_features, roots, FeaturePrinter::Naming::Preserve);
    for (const auto& c : e.constraints) {
      out += "FS: " + c.node + (c.top ? ".top=" : ".bot=") + p.value(c.value) + "\n";
    }
    if (!e.example.empty()) out += "EX: " + e.example + "\n";
  }
  return out;
}

}  // namespace ltag
