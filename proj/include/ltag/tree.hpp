#pragma once

#include <algorithm>
#include <compare>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ltag/featstruct.hpp"
#include "ltag/text.hpp"

namespace ltag {

/// Node address as a path of 1-based child indices; the empty path is the
/// root, written "0".
struct GornAddress {
  std::vector<int> path;

  GornAddress() = default;
  GornAddress(std::initializer_list<int> p) : path(p) {}
  explicit GornAddress(std::vector<int> p) : path(std::move(p)) {}

  bool is_root() const { return path.empty(); }
  std::size_t depth() const { return path.size(); }

  GornAddress child(int index) const {
    GornAddress a = *this;
    a.path.push_back(index);
    return a;
  }

  bool is_prefix_of(const GornAddress& other) const {
    return path.size() <= other.path.size() && std::equal(path.begin(), path.end(), other.path.begin());
  }

  std::string str() const {
    if (path.empty()) return "0";
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
      if (i) out += '.';
      out += std::to_string(path[i]);
    }
    return out;
  }

  /// Parses "0", "1", "2.2"; throws std::invalid_argument.
  static GornAddress parse(std::string_view s) {
    if (s == "0") return {};
    GornAddress a;
    std::size_t i = 0;
    while (i <= s.size()) {
      std::size_t j = s.find('.', i);
      if (j == std::string_view::npos) j = s.size();
      std::string_view part = s.substr(i, j - i);
      if (part.empty() || !std::all_of(part.begin(), part.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw std::invalid_argument("invalid Gorn address '" + std::string(s) + "'");
      }
      int v = std::stoi(std::string(part));
      if (v < 1) throw std::invalid_argument("Gorn address indices are 1-based: '" + std::string(s) + "'");
      a.path.push_back(v);
      i = j + 1;
    }
    return a;
  }

  auto operator<=>(const GornAddress&) const = default;
  bool operator==(const GornAddress&) const = default;
};

enum class Marker { Internal, Substitution, Foot, Anchor, Terminal };

inline std::string_view marker_suffix(Marker m) {
  switch (m) {
    case Marker::Substitution: return "!";
    case Marker::Foot: return "*";
    case Marker::Anchor: return "@";
    default: return "";
  }
}

inline std::string_view marker_name(Marker m) {
  switch (m) {
    case Marker::Internal: return "internal";
    case Marker::Substitution: return "substitution";
    case Marker::Foot: return "foot";
    case Marker::Anchor: return "anchor";
    case Marker::Terminal: return "terminal";
  }
  return "?";
}

struct TreeNode {
  std::string label;  // category; for terminals the word itself ("" = empty element)
  Marker marker = Marker::Internal;
  std::string name;
  std::string word;  // lexical item filled into an anchor
  FeatureId top = 0;
  FeatureId bottom = 0;
  std::vector<TreeNode> children;

  // Provenance in derived trees: index of the contributing elementary tree
  // instance (preorder over the derivation) and the node's address there.
  int instance = -1;
  GornAddress origin;

  bool is_leaf() const { return children.empty(); }
  bool is_empty_terminal() const { return marker == Marker::Terminal && label.empty(); }
  bool is_lexical() const {
    return (marker == Marker::Anchor) || (marker == Marker::Terminal && !label.empty());
  }
  /// Word contributed to the yield, if any.
  std::string_view lexeme() const { return marker == Marker::Anchor ? std::string_view(word) : std::string_view(label); }
  bool adjoinable() const { return marker == Marker::Internal; }
};

/// A tree of nodes together with the feature graph holding all of their
/// top and bottom structures.
struct Tree {
  TreeNode root;
  FeatureGraph features;

  const TreeNode* find(const GornAddress& address) const {
    const TreeNode* cur = &root;
    for (int i : address.path) {
      if (i < 1 || static_cast<std::size_t>(i) > cur->children.size()) return nullptr;
      cur = &cur->children[i - 1];
    }
    return cur;
  }
  TreeNode* find(const GornAddress& address) {
    return const_cast<TreeNode*>(static_cast<const Tree*>(this)->find(address));
  }

  template <class F>
  void preorder(F&& visit) const {
    auto walk = [&](auto&& self, const TreeNode& n, GornAddress& at) -> void {
      visit(n, static_cast<const GornAddress&>(at));
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        at.path.push_back(static_cast<int>(i + 1));
        self(self, n.children[i], at);
        at.path.pop_back();
      }
    };
    GornAddress at;
    walk(walk, root, at);
  }

  template <class F>
  void preorder_mut(F&& visit) {
    auto walk = [&](auto&& self, TreeNode& n) -> void {
      visit(n);
      for (auto& c : n.children) self(self, c);
    };
    walk(walk, root);
  }

  std::vector<FeatureId*> feature_refs() {
    std::vector<FeatureId*> refs;
    preorder_mut([&](TreeNode& n) {
      refs.push_back(&n.top);
      refs.push_back(&n.bottom);
    });
    return refs;
  }

  std::vector<FeatureId> feature_roots() const {
    std::vector<FeatureId> roots;
    preorder([&](const TreeNode& n, const GornAddress&) {
      roots.push_back(n.top);
      roots.push_back(n.bottom);
    });
    return roots;
  }

  /// Drops feature nodes no longer reachable from any tree node.
  void compact() {
    Unifier u(features);
    u.finish(feature_refs());
  }

  std::optional<GornAddress> address_of_name(std::string_view name) const {
    std::optional<GornAddress> found;
    preorder([&](const TreeNode& n, const GornAddress& a) {
      if (!found && n.name == name) found = a;
    });
    return found;
  }

  std::optional<GornAddress> foot_address() const {
    std::optional<GornAddress> found;
    preorder([&](const TreeNode& n, const GornAddress& a) {
      if (!found && n.marker == Marker::Foot) found = a;
    });
    return found;
  }

  std::vector<GornAddress> addresses_of(Marker m) const {
    std::vector<GornAddress> out;
    preorder([&](const TreeNode& n, const GornAddress& a) {
      if (n.marker == m) out.push_back(a);
    });
    return out;
  }

  /// Frontier words, skipping empty elements.
  std::vector<std::string> yield() const {
    std::vector<std::string> out;
    preorder([&](const TreeNode& n, const GornAddress&) {
      if (n.is_leaf() && n.is_lexical()) out.emplace_back(n.lexeme());
    });
    return out;
  }

  /// Longest root-to-leaf path, in edges.
  std::size_t depth() const {
    std::size_t d = 0;
    preorder([&](const TreeNode&, const GornAddress& a) { d = std::max(d, a.depth()); });
    return d;
  }

  FeatureStructure top_fs(const GornAddress& a) const { return FeatureStructure::extract(features, find(a)->top); }
  FeatureStructure bottom_fs(const GornAddress& a) const {
    return FeatureStructure::extract(features, find(a)->bottom);
  }

  /// Structure and features with variable names normalized: equal strings
  /// mean equal trees up to renaming.
  std::string canonical() const {
    auto roots = feature_roots();
    FeaturePrinter p(features, roots, FeaturePrinter::Naming::Canonical);
    std::string out;
    auto walk = [&](auto&& self, const TreeNode& n) -> void {
      out += "(" + n.label + std::string(marker_suffix(n.marker));
      if (n.marker == Marker::Terminal) out += "'";
      if (!n.name.empty()) out += " name=" + n.name;
      if (!n.word.empty()) out += " word=" + n.word;
      out += " " + p.value(n.top) + " " + p.value(n.bottom);
      for (const auto& c : n.children) {
        out += " ";
        self(self, c);
      }
      out += ")";
    };
    walk(walk, root);
    return out;
  }
};

enum class TreeKind { Initial, Auxiliary };

inline std::string_view kind_name(TreeKind k) { return k == TreeKind::Initial ? "initial" : "auxiliary"; }

struct ElementaryTree {
  std::string id;
  TreeKind kind = TreeKind::Initial;
  Tree tree;
  std::string family;
  std::vector<GornAddress> anchor_slots;  // anchors in preorder
  std::vector<std::string> words;         // filled anchor words; empty for templates
  std::string source;                     // file it was declared in
  int line = 0;                           // declaration line in its source file

  void refresh_anchor_slots() { anchor_slots = tree.addresses_of(Marker::Anchor); }
  bool anchored() const { return !words.empty(); }
  const TreeNode& root() const { return tree.root; }

  bool same_structure(const ElementaryTree& other) const {
    return kind == other.kind && tree.canonical() == other.tree.canonical();
  }
  bool operator==(const ElementaryTree& other) const {
    return id == other.id && family == other.family && words == other.words && same_structure(other);
  }
};

struct Diagnostic {
  std::string code;
  std::string message;
  GornAddress at;

  std::string str() const { return code + " at " + at.str() + ": " + message; }
};

namespace detail {
inline bool looks_nonterminal(std::string_view label) {
  return !label.empty() && label[0] >= 'A' && label[0] <= 'Z';
}
}  // namespace detail

/// Well-formedness diagnostics for an elementary tree; empty iff valid.
inline std::vector<Diagnostic> validate(const ElementaryTree& t) {
  std::vector<Diagnostic> out;
  auto report = [&](std::string code, std::string message, const GornAddress& at) {
    out.push_back({std::move(code), std::move(message), at});
  };
  std::vector<GornAddress> feet;
  std::map<std::string, GornAddress> names;
  const FeatureGraph& g = t.tree.features;
  t.tree.preorder([&](const TreeNode& n, const GornAddress& a) {
    if (!n.name.empty()) {
      auto [it, inserted] = names.emplace(n.name, a);
      if (!inserted) report("duplicate-name", "node name '" + n.name + "' already used at " + it->second.str(), a);
    }
    switch (n.marker) {
      case Marker::Internal:
        if (n.children.empty()) {
          report("bare-leaf", "leaf '" + n.label + "' is not terminal, anchor, substitution or foot", a);
        }
        if (!detail::looks_nonterminal(n.label)) {
          report("terminal-label", "internal node labeled by terminal '" + n.label + "'", a);
        }
        break;
      case Marker::Substitution:
        if (!n.children.empty()) report("substitution-with-children", "substitution node has children", a);
        if (!g.node(n.bottom).is_empty()) report("substitution-with-bottom", "substitution node has a bottom FS", a);
        if (!detail::looks_nonterminal(n.label)) report("terminal-label", "substitution node labeled '" + n.label + "'", a);
        break;
      case Marker::Foot:
        feet.push_back(a);
        if (!n.children.empty()) report("leaf-with-children", "foot node has children", a);
        if (!detail::looks_nonterminal(n.label)) report("terminal-label", "foot node labeled '" + n.label + "'", a);
        break;
      case Marker::Anchor:
        if (!n.children.empty()) report("leaf-with-children", "anchor node has children", a);
        break;
      case Marker::Terminal:
        if (!n.children.empty()) report("leaf-with-children", "terminal node has children", a);
        break;
    }
  });
  if (t.kind == TreeKind::Initial) {
    for (const auto& f : feet) report("foot-in-initial", "initial tree contains a foot node", f);
  } else {
    if (feet.empty()) report("missing-foot", "auxiliary tree has no foot node", {});
    if (feet.size() > 1) {
      for (std::size_t i = 1; i < feet.size(); ++i) {
        report("multiple-feet", "auxiliary tree has " + std::to_string(feet.size()) + " foot nodes", feet[i]);
      }
    }
    for (const auto& f : feet) {
      const TreeNode* foot = t.tree.find(f);
      if (foot->label != t.tree.root.label) {
        report("foot-label-mismatch",
               "foot label '" + foot->label + "' differs from root label '" + t.tree.root.label + "'", f);
      }
    }
  }
  if (t.tree.addresses_of(Marker::Anchor).empty()) report("no-anchor", "tree has no anchor", {});
  return out;
}

// ---------------------------------------------------------------------------
// Node syntax shared by the tree and metarule formats:
//   node := WORD attr* ('(' node+ ')')?
//   attr := 'name' '=' WORD | 'word' '=' WORD | '[' ('top'|'bot') '=' value ']'
// WORD suffixes: '!' substitution, '*' foot, '@' anchor. A lowercase leaf is a
// terminal; "X-trace" is an X node dominating an empty element.

namespace tree_syntax {

inline constexpr std::string_view kTraceSuffix = "-trace";

struct Label {
  std::string label;
  Marker marker = Marker::Internal;
  bool trace = false;
};

inline Label split_label(std::string_view word) {
  Label l;
  char last = word.empty() ? '\0' : word.back();
  if (last == '!' || last == '*' || last == '@') {
    l.label = std::string(word.substr(0, word.size() - 1));
    l.marker = last == '!' ? Marker::Substitution : last == '*' ? Marker::Foot : Marker::Anchor;
    return l;
  }
  if (word.size() > kTraceSuffix.size() && word.substr(word.size() - kTraceSuffix.size()) == kTraceSuffix) {
    l.label = std::string(word.substr(0, word.size() - kTraceSuffix.size()));
    l.trace = true;
    return l;
  }
  l.label = word == "ε" ? std::string() : std::string(word);
  l.marker = detail::looks_nonterminal(word) ? Marker::Internal : Marker::Terminal;
  return l;
}

/// Reads node attributes following the label. Returns false on unknown input
/// (leaving it unconsumed).
inline bool read_attribute(text::Lexer& lex, FeatureReader& reader, TreeNode& node) {
  const text::Token& t = lex.peek();
  if ((t.is_word("name") || t.is_word("word")) && lex.peek(1).is('=')) {
    bool is_name = t.text == "name";
    lex.next();
    lex.next();
    std::string v = lex.expect_word(is_name ? "node name" : "word");
    (is_name ? node.name : node.word) = v;
    return true;
  }
  if (t.is('[') && (lex.peek(1).is_word("top") || lex.peek(1).is_word("bot")) && lex.peek(2).is('=')) {
    lex.next();
    bool top = lex.next().text == "top";
    lex.next();
    (top ? node.top : node.bottom) = reader.read_value(lex);
    lex.expect(']');
    return true;
  }
  return false;
}

inline TreeNode read_node(text::Lexer& lex, FeatureReader& reader, FeatureGraph& g) {
  text::Token t = lex.peek();
  if (!t.is_word()) lex.error("expected tree node");
  lex.next();
  Label l = split_label(t.text);
  TreeNode node;
  node.label = l.label;
  node.marker = l.marker;
  node.top = g.add_complex();
  node.bottom = g.add_complex();
  while (read_attribute(lex, reader, node)) {
  }
  if (l.trace) {
    TreeNode empty;
    empty.marker = Marker::Terminal;
    empty.top = g.add_complex();
    empty.bottom = g.add_complex();
    node.children.push_back(std::move(empty));
  }
  if (lex.peek().is('(')) {
    if (l.trace) lex.error("trace node cannot have children");
    lex.next();
    if (node.marker == Marker::Terminal) node.marker = Marker::Internal;  // validate() reports the label
    do {
      node.children.push_back(read_node(lex, reader, g));
    } while (!lex.peek().is(')'));
    lex.expect(')');
  }
  return node;
}

inline bool is_trace(const TreeNode& n, const FeatureGraph& g) {
  return n.marker == Marker::Internal && n.children.size() == 1 && n.children[0].is_empty_terminal() &&
         g.node(n.children[0].top).is_empty() && g.node(n.children[0].bottom).is_empty();
}

/// Writes a tree in node syntax, one node per line, children inside
/// parentheses indented two columns deeper.
inline void write_node(const TreeNode& n, const FeatureGraph& g, FeaturePrinter& p, int indent,
                       std::vector<std::string>& lines, bool open_paren) {
  std::string line(static_cast<std::size_t>(indent), ' ');
  if (open_paren) line += "( ";
  bool trace = is_trace(n, g);
  line += n.label + (trace ? std::string(kTraceSuffix) : std::string(marker_suffix(n.marker)));
  if (n.is_empty_terminal()) line += "ε";
  if (!n.name.empty()) line += " name=" + n.name;
  if (!n.word.empty()) line += " word=" + n.word;
  bool show_top = !g.node(n.top).is_empty() || !g.node(n.top).var.empty();
  bool show_bot = !g.node(n.bottom).is_empty() || !g.node(n.bottom).var.empty();
  if (show_top) line += " [top=" + p.value(n.top) + "]";
  if (show_bot) line += " [bot=" + p.value(n.bottom) + "]";
  lines.push_back(line);
  if (trace || n.children.empty()) return;
  int child_indent = indent + (open_paren ? 2 : 0) + 2;
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    write_node(n.children[i], g, p, i == 0 ? child_indent : child_indent + 2, lines, i == 0);
  }
  lines.back() += " )";
}

inline std::string write_tree_body(const Tree& t, int indent,
                                   FeaturePrinter::Naming naming = FeaturePrinter::Naming::Preserve) {
  auto roots = t.feature_roots();
  FeaturePrinter p(t.features, roots, naming);
  std::vector<std::string> lines;
  write_node(t.root, t.features, p, indent, lines, false);
  std::string out;
  for (auto& l : lines) out += l + "\n";
  return out;
}

}  // namespace tree_syntax

}  // namespace ltag
