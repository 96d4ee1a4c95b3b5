#pragma once

// Metarules: tree-to-tree rules that generate the members of a tree family
// from its base tree.
//
//   metarule subj-wh {
//     lhs: S ( NP! ?REST )
//     rhs: S ( NP! [top=[wh=+]] S ( NP-trace ?REST ) )
//   }
//
// `?X` leaves match whole subtrees. Other lhs nodes match on label, marker and
// child count; their [top=..]/[bot=..] annotations must subsume the matched
// node's structures. On the rhs, variables carry their bound subtree along
// (features included) while every other node is new and carries exactly its
// annotations.

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ltag/expected.hpp"
#include "ltag/featstruct.hpp"
#include "ltag/text.hpp"
#include "ltag/tree.hpp"

namespace ltag {

struct PatternNode {
  std::string var;  // non-empty for ?VAR leaves
  std::string label;
  Marker marker = Marker::Internal;
  bool trace = false;
  std::string name;
  std::optional<FeatureId> top;
  std::optional<FeatureId> bottom;
  std::vector<PatternNode> children;

  bool is_var() const { return !var.empty(); }
};

struct TreePattern {
  PatternNode root;
  FeatureGraph features;

  std::vector<std::string> variables() const {
    std::vector<std::string> out;
    auto walk = [&](auto&& self, const PatternNode& n) -> void {
      if (n.is_var()) out.push_back(n.var);
      for (const auto& c : n.children) self(self, c);
    };
    walk(walk, root);
    return out;
  }
};

struct Metarule {
  std::string id;
  TreePattern lhs;
  TreePattern rhs;
  int line = 0;
};

struct LocalityPredicate {
  int max_applications_per_rule = 2;  // per derivation chain from the base
  int max_substitution_growth = 1;    // added substitution nodes, as a multiset
  int depth_slack = 1;                // output depth <= base depth + slack
};

namespace pattern_syntax {

inline std::vector<FeatureId*> feature_refs(PatternNode& n) {
  std::vector<FeatureId*> out;
  auto walk = [&](auto&& self, PatternNode& p) -> void {
    if (p.top) out.push_back(&*p.top);
    if (p.bottom) out.push_back(&*p.bottom);
    for (auto& c : p.children) self(self, c);
  };
  walk(walk, n);
  return out;
}

inline std::vector<FeatureId> feature_roots(const PatternNode& n) {
  std::vector<FeatureId> out;
  auto walk = [&](auto&& self, const PatternNode& p) -> void {
    if (p.top) out.push_back(*p.top);
    if (p.bottom) out.push_back(*p.bottom);
    for (const auto& c : p.children) self(self, c);
  };
  walk(walk, n);
  return out;
}

inline PatternNode read_node(text::Lexer& lex, FeatureReader& reader) {
  text::Token t = lex.peek();
  if (!t.is_word()) lex.error("expected pattern node");
  lex.next();
  PatternNode node;
  if (t.text.size() > 1 && t.text[0] == '?') {
    node.var = t.text.substr(1);
    return node;
  }
  auto l = tree_syntax::split_label(t.text);
  node.label = l.label;
  node.marker = l.marker;
  node.trace = l.trace;
  for (;;) {
    const text::Token& a = lex.peek();
    if (a.is_word("name") && lex.peek(1).is('=')) {
      lex.next();
      lex.next();
      node.name = lex.expect_word("node name");
    } else if (a.is('[') && (lex.peek(1).is_word("top") || lex.peek(1).is_word("bot")) && lex.peek(2).is('=')) {
      lex.next();
      bool top = lex.next().text == "top";
      lex.next();
      (top ? node.top : node.bottom) = reader.read_value(lex);
      lex.expect(']');
    } else {
      break;
    }
  }
  if (lex.peek().is('(')) {
    if (node.trace) lex.error("trace node cannot have children");
    lex.next();
    if (node.marker == Marker::Terminal) node.marker = Marker::Internal;
    do {
      node.children.push_back(read_node(lex, reader));
    } while (!lex.peek().is(')'));
    lex.expect(')');
  }
  return node;
}

inline TreePattern read_pattern(text::Lexer& lex) {
  TreePattern p;
  FeatureReader reader(p.features);
  int line = lex.line();
  p.root = read_node(lex, reader);
  if (auto err = reader.resolve(feature_refs(p.root))) {
    throw SyntaxError(lex.source(), line, "inconsistent variables: " + err->describe());
  }
  return p;
}

}  // namespace pattern_syntax

/// Parses a metarule file. Throws SyntaxError on malformed input or on rules
/// violating the variable and anchor restrictions.
inline std::vector<Metarule> parse_metarules(std::string_view source, const std::string& origin = "rules.mr") {
  text::Lexer lex(source, origin);
  std::vector<Metarule> out;
  std::set<std::string> ids;
  while (!lex.at_end()) {
    text::Token t = lex.next();
    if (!t.is_word("metarule")) lex.error(t, "expected 'metarule'");
    Metarule m;
    m.line = t.line;
    m.id = lex.expect_word("metarule id");
    if (!ids.insert(m.id).second) throw SyntaxError(origin, t.line, "duplicate metarule '" + m.id + "'");
    lex.expect('{');
    bool have_lhs = false, have_rhs = false;
    while (!lex.peek().is('}')) {
      text::Token side = lex.next();
      if (!side.is_word("lhs") && !side.is_word("rhs")) lex.error(side, "expected 'lhs' or 'rhs'");
      lex.expect(':');
      (side.text == "lhs" ? m.lhs : m.rhs) = pattern_syntax::read_pattern(lex);
      (side.text == "lhs" ? have_lhs : have_rhs) = true;
    }
    lex.expect('}');
    if (!have_lhs || !have_rhs) throw SyntaxError(origin, m.line, "metarule '" + m.id + "' needs lhs and rhs");
    std::set<std::string> bound;
    for (const auto& v : m.lhs.variables()) {
      if (!bound.insert(v).second) {
        throw SyntaxError(origin, m.line, "variable ?" + v + " occurs twice in lhs of '" + m.id + "'");
      }
    }
    for (const auto& v : m.rhs.variables()) {
      if (!bound.count(v)) throw SyntaxError(origin, m.line, "variable ?" + v + " unbound in rhs of '" + m.id + "'");
    }
    bool anchor = false;
    auto walk = [&](auto&& self, const PatternNode& n) -> void {
      anchor = anchor || (!n.is_var() && n.marker == Marker::Anchor);
      for (const auto& c : n.children) self(self, c);
    };
    walk(walk, m.rhs.root);
    if (anchor) throw SyntaxError(origin, m.line, "rhs of '" + m.id + "' introduces an anchor");
    out.push_back(std::move(m));
  }
  return out;
}

struct Match {
  GornAddress at;                               // matched node in the tree
  std::map<std::string, GornAddress> bindings;  // variable -> subtree address
};

namespace detail {

inline bool pattern_matches(const PatternNode& p, const FeatureGraph& pg, const Tree& t, const TreeNode& n,
                            const GornAddress& at, std::map<std::string, GornAddress>& bindings) {
  if (p.is_var()) {
    bindings[p.var] = at;
    return true;
  }
  if (p.label != n.label) return false;
  if (p.trace) {
    if (!tree_syntax::is_trace(n, t.features)) return false;
  } else if (p.marker != n.marker || p.children.size() != n.children.size()) {
    return false;
  }
  if (!p.name.empty() && p.name != n.name) return false;
  auto require = [&](const std::optional<FeatureId>& want, FeatureId have) {
    if (!want) return true;
    return subsumes(FeatureStructure::extract(pg, *want), FeatureStructure::extract(t.features, have));
  };
  if (!require(p.top, n.top) || !require(p.bottom, n.bottom)) return false;
  if (p.trace) return true;
  for (std::size_t i = 0; i < p.children.size(); ++i) {
    if (!pattern_matches(p.children[i], pg, t, n.children[i], at.child(static_cast<int>(i + 1)), bindings)) {
      return false;
    }
  }
  return true;
}

}  // namespace detail

/// First match of `lhs` in preorder over the nodes of `t`.
inline std::optional<Match> match(const TreePattern& lhs, const ElementaryTree& t) {
  std::optional<Match> found;
  t.tree.preorder([&](const TreeNode& n, const GornAddress& at) {
    if (found) return;
    Match m;
    if (detail::pattern_matches(lhs.root, lhs.features, t.tree, n, at, m.bindings)) {
      m.at = at;
      found = std::move(m);
    }
  });
  return found;
}

struct MetaruleError {
  std::string rule;
  std::string tree;
  std::vector<Diagnostic> diagnostics;

  std::string describe() const {
    std::string out = "metarule " + rule + " on " + tree + " yields an invalid tree:";
    for (const auto& d : diagnostics) out += " " + d.str() + ";";
    return out;
  }
};

namespace detail {

inline TreeNode instantiate(const PatternNode& p, FeatureId offset, const Tree& source, const Match& m,
                            FeatureGraph& g) {
  if (p.is_var()) return *source.find(m.bindings.at(p.var));
  TreeNode n;
  n.label = p.label;
  n.marker = p.marker;
  n.name = p.name;
  n.top = p.top ? *p.top + offset : g.add_complex();
  n.bottom = p.bottom ? *p.bottom + offset : g.add_complex();
  if (p.trace) {
    TreeNode empty;
    empty.marker = Marker::Terminal;
    empty.top = g.add_complex();
    empty.bottom = g.add_complex();
    n.children.push_back(std::move(empty));
  }
  for (const auto& c : p.children) n.children.push_back(instantiate(c, offset, source, m, g));
  return n;
}

}  // namespace detail

/// Applies `m` at its first match in `t`: zero trees if the lhs does not
/// match, otherwise one tree with id `t.id + "." + m.id`. An output failing
/// validation is an error.
inline Expected<std::vector<ElementaryTree>, MetaruleError> apply(const Metarule& m, const ElementaryTree& t) {
  auto found = match(m.lhs, t);
  if (!found) return std::vector<ElementaryTree>{};
  ElementaryTree out = t;
  out.id = t.id + "." + m.id;
  FeatureId offset = out.tree.features.append(m.rhs.features);
  TreeNode replacement = detail::instantiate(m.rhs.root, offset, t.tree, *found, out.tree.features);
  *out.tree.find(found->at) = std::move(replacement);
  out.tree.compact();
  out.refresh_anchor_slots();
  auto diagnostics = validate(out);
  if (!diagnostics.empty()) return fail(MetaruleError{m.id, t.id, std::move(diagnostics)});
  return std::vector<ElementaryTree>{std::move(out)};
}

struct Rejection {
  std::string tree;  // id the output would have had
  std::string rule;
  std::string reason;

  std::string str() const { return tree + " (" + rule + "): " + reason; }
};

struct FamilyClosure {
  std::vector<ElementaryTree> members;  // base first, then in discovery order
  std::vector<Rejection> rejected;

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& t : members) out.push_back(t.id);
    return out;
  }
};

namespace detail {

inline std::map<std::string, int> substitution_labels(const Tree& t) {
  std::map<std::string, int> out;
  t.preorder([&](const TreeNode& n, const GornAddress&) {
    if (n.marker == Marker::Substitution) ++out[n.label];
  });
  return out;
}

inline std::vector<std::string> anchor_labels(const Tree& t) {
  std::vector<std::string> out;
  t.preorder([&](const TreeNode& n, const GornAddress&) {
    if (n.marker == Marker::Anchor) out.push_back(n.label);
  });
  return out;
}

/// Reason the predicate rejects `out`, or empty if it is accepted.
inline std::string locality_violation(const ElementaryTree& base, const ElementaryTree& out,
                                      const std::map<std::string, int>& applications, const LocalityPredicate& p) {
  for (const auto& [rule, count] : applications) {
    if (count > p.max_applications_per_rule) {
      return "rule applied " + std::to_string(count) + " times (bound " + std::to_string(p.max_applications_per_rule) + ")";
    }
  }
  auto before = substitution_labels(base.tree);
  auto after = substitution_labels(out.tree);
  int growth = 0;
  for (const auto& [label, count] : after) {
    auto it = before.find(label);
    growth += std::max(0, count - (it == before.end() ? 0 : it->second));
  }
  if (growth > p.max_substitution_growth) {
    return "substitution nodes grow by " + std::to_string(growth) + " (bound " + std::to_string(p.max_substitution_growth) + ")";
  }
  std::size_t limit = base.tree.depth() + static_cast<std::size_t>(std::max(0, p.depth_slack));
  if (out.tree.depth() > limit) {
    return "depth " + std::to_string(out.tree.depth()) + " exceeds " + std::to_string(limit);
  }
  if (anchor_labels(out.tree) != anchor_labels(base.tree)) return "anchors not preserved";
  return {};
}

}  // namespace detail

/// Least set containing `base` and closed under the rules, minus outputs the
/// predicate rejects. Members equal up to variable renaming are merged.
inline FamilyClosure close_family(const ElementaryTree& base, const std::vector<Metarule>& rules,
                                  const LocalityPredicate& p = {}) {
  FamilyClosure out;
  std::string family = base.family.empty() ? base.id : base.family;
  std::set<std::string> seen;
  auto structure = [](const ElementaryTree& t) { return std::string(kind_name(t.kind)) + t.tree.canonical(); };
  struct Pending {
    std::size_t member;
    std::map<std::string, int> applications;
  };
  std::deque<Pending> queue;
  ElementaryTree first = base;
  first.family = family;
  seen.insert(structure(first));
  out.members.push_back(std::move(first));
  queue.push_back({0, {}});
  while (!queue.empty()) {
    Pending cur = std::move(queue.front());
    queue.pop_front();
    for (const auto& rule : rules) {
      const ElementaryTree source = out.members[cur.member];
      auto applied = apply(rule, source);
      std::string id = source.id + "." + rule.id;
      if (!applied) {
        out.rejected.push_back({id, rule.id, applied.error().describe()});
        continue;
      }
      if (applied->empty()) continue;
      ElementaryTree t = applied.value().front();
      auto applications = cur.applications;
      ++applications[rule.id];
      std::string why = detail::locality_violation(base, t, applications, p);
      if (!why.empty()) {
        out.rejected.push_back({id, rule.id, why});
        continue;
      }
      if (!seen.insert(structure(t)).second) continue;
      t.family = family;
      out.members.push_back(std::move(t));
      queue.push_back({out.members.size() - 1, std::move(applications)});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Writing

namespace detail {
inline void write_pattern_node(const PatternNode& n, FeaturePrinter& p, std::string& out) {
  if (n.is_var()) {
    out += "?" + n.var;
    return;
  }
  out += n.label + (n.trace ? std::string(tree_syntax::kTraceSuffix) : std::string(marker_suffix(n.marker)));
  if (n.label.empty() && n.marker == Marker::Terminal) out += "ε";
  if (!n.name.empty()) out += " name=" + n.name;
  if (n.top) out += " [top=" + p.value(*n.top) + "]";
  if (n.bottom) out += " [bot=" + p.value(*n.bottom) + "]";
  if (n.children.empty()) return;
  out += " (";
  for (const auto& c : n.children) {
    out += " ";
    write_pattern_node(c, p, out);
  }
  out += " )";
}
}  // namespace detail

inline std::string write_pattern(const TreePattern& t) {
  auto roots = pattern_syntax::feature_roots(t.root);
  FeaturePrinter p(t.features, roots, FeaturePrinter::Naming::Preserve);
  std::string out;
  detail::write_pattern_node(t.root, p, out);
  return out;
}

inline std::string write_metarule(const Metarule& m) {
  return "metarule " + m.id + " {\n  lhs: " + write_pattern(m.lhs) + "\n  rhs: " + write_pattern(m.rhs) + "\n}\n";
}

}  // namespace ltag
