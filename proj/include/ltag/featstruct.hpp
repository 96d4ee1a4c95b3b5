#pragma once

// Attribute-value feature structures with re-entrancy.
//
// A FeatureGraph is an arena of nodes; a node is either atomic or complex
// (a sorted map from feature name to node). Re-entrancy is node identity:
// two paths share a value iff they reach the same node. Variables in the text
// syntax (#1) are names attached to nodes; an unconstrained variable is an
// empty complex node, which also serves as the unification identity.
//
// Elementary and derived trees keep all of their node feature structures in a
// single graph so that variables can be shared between nodes of one tree.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ltag/expected.hpp"
#include "ltag/text.hpp"

namespace ltag {

using FeatureId = std::uint32_t;

struct FeatureNode {
  enum class Kind : std::uint8_t { Complex, Atom };

  Kind kind = Kind::Complex;
  std::string atom;
  std::vector<std::pair<std::string, FeatureId>> arcs;  // sorted by feature name
  std::string var;                                      // empty when anonymous

  bool is_atom() const { return kind == Kind::Atom; }
  bool is_empty() const { return kind == Kind::Complex && arcs.empty(); }

  std::optional<FeatureId> arc(std::string_view feature) const {
    auto it = std::lower_bound(arcs.begin(), arcs.end(), feature,
                               [](const auto& a, std::string_view f) { return a.first < f; });
    if (it != arcs.end() && it->first == feature) return it->second;
    return std::nullopt;
  }
};

class FeatureGraph {
 public:
  FeatureId add_complex(std::string var = {}) {
    nodes_.push_back(FeatureNode{FeatureNode::Kind::Complex, {}, {}, std::move(var)});
    return static_cast<FeatureId>(nodes_.size() - 1);
  }

  FeatureId add_atom(std::string atom, std::string var = {}) {
    nodes_.push_back(FeatureNode{FeatureNode::Kind::Atom, std::move(atom), {}, std::move(var)});
    return static_cast<FeatureId>(nodes_.size() - 1);
  }

  /// Adds or replaces the arc `feature` of a complex node.
  void set_arc(FeatureId node, std::string feature, FeatureId target) {
    auto& arcs = nodes_.at(node).arcs;
    auto it = std::lower_bound(arcs.begin(), arcs.end(), feature,
                               [](const auto& a, const std::string& f) { return a.first < f; });
    if (it != arcs.end() && it->first == feature) {
      it->second = target;
    } else {
      arcs.emplace(it, std::move(feature), target);
    }
  }

  /// Appends a copy of `other`; returns the offset added to its node ids.
  FeatureId append(const FeatureGraph& other) {
    auto offset = static_cast<FeatureId>(nodes_.size());
    nodes_.reserve(nodes_.size() + other.nodes_.size());
    for (const auto& n : other.nodes_) {
      FeatureNode copy = n;
      for (auto& arc : copy.arcs) arc.second += offset;
      nodes_.push_back(std::move(copy));
    }
    return offset;
  }

  /// Suffixes every variable name with "@ns".
  void rename_variables(std::string_view ns) {
    for (auto& n : nodes_) {
      if (!n.var.empty()) n.var = n.var + "@" + std::string(ns);
    }
  }

  const FeatureNode& node(FeatureId id) const { return nodes_.at(id); }
  FeatureNode& node(FeatureId id) { return nodes_.at(id); }
  std::size_t size() const { return nodes_.size(); }

 private:
  std::vector<FeatureNode> nodes_;
};

struct UnifyError {
  enum class Kind { Clash, Cycle };
  Kind kind = Kind::Clash;
  std::string path;

  std::string describe() const {
    return std::string(kind == Kind::Clash ? "clash(" : "cycle(") + path + ")";
  }
  bool operator==(const UnifyError&) const = default;
};

namespace detail {
inline std::string join_path(std::string_view base, std::string_view feature) {
  if (base.empty()) return std::string(feature);
  return std::string(base) + "." + std::string(feature);
}
}  // namespace detail

/// Destructive union-find unification over one FeatureGraph. Callers work on a
/// private copy of the graph; finish() resolves forwarding, enforces the
/// occurs-check, and rewrites the graph keeping only nodes reachable from the
/// given roots.
class Unifier {
 public:
  explicit Unifier(FeatureGraph& graph) : graph_(graph), forward_(graph.size()) {
    for (FeatureId i = 0; i < forward_.size(); ++i) forward_[i] = i;
  }

  FeatureId find(FeatureId id) {
    FeatureId root = id;
    while (forward_[root] != root) root = forward_[root];
    while (forward_[id] != root) {
      FeatureId next = forward_[id];
      forward_[id] = root;
      id = next;
    }
    return root;
  }

  bool unify(FeatureId a, FeatureId b, std::string_view path = {}) {
    if (error_) return false;
    a = find(a);
    b = find(b);
    if (a == b) return true;
    const FeatureNode& na = graph_.node(a);
    const FeatureNode& nb = graph_.node(b);
    if (na.is_atom() || nb.is_atom()) {
      if (na.is_atom() && nb.is_atom()) {
        if (na.atom != nb.atom) return clash(path);
        link(b, a);
      } else if (na.is_atom()) {
        if (!nb.arcs.empty()) return clash(path);
        link(b, a);
      } else {
        if (!na.arcs.empty()) return clash(path);
        link(a, b);
      }
      return true;
    }
    // Both complex. Link first so that re-entrant paths terminate.
    auto incoming = nb.arcs;
    link(b, a);
    for (auto& [feature, target] : incoming) {
      FeatureId rep = find(a);
      if (graph_.node(rep).is_atom()) return clash(path);
      std::string sub = detail::join_path(path, feature);
      if (auto existing = graph_.node(rep).arc(feature)) {
        if (!unify(*existing, target, sub)) return false;
      } else {
        graph_.set_arc(rep, feature, target);
      }
    }
    return true;
  }

  const std::optional<UnifyError>& error() const { return error_; }

  /// Compacts the graph to the nodes reachable from `roots` (updated in
  /// place). Returns false and sets error() if the result would be cyclic.
  bool finish(const std::vector<FeatureId*>& roots) {
    if (error_) return false;
    std::vector<std::uint8_t> color(graph_.size(), 0);
    for (FeatureId* r : roots) {
      if (!acyclic(*r, color, {})) return false;
    }
    FeatureGraph out;
    std::map<FeatureId, FeatureId> remap;
    for (FeatureId* r : roots) *r = copy_into(out, find(*r), remap);
    graph_ = std::move(out);
    return true;
  }

 private:
  bool clash(std::string_view path) {
    error_ = UnifyError{UnifyError::Kind::Clash, std::string(path)};
    return false;
  }

  void link(FeatureId from, FeatureId to) {
    forward_[from] = to;
    FeatureNode& dst = graph_.node(to);
    const FeatureNode& src = graph_.node(from);
    if (dst.var.empty() && !src.var.empty()) dst.var = src.var;
  }

  bool acyclic(FeatureId id, std::vector<std::uint8_t>& color, const std::string& path) {
    id = find(id);
    if (color[id] == 2) return true;
    if (color[id] == 1) {
      error_ = UnifyError{UnifyError::Kind::Cycle, path};
      return false;
    }
    color[id] = 1;
    auto arcs = graph_.node(id).arcs;
    for (auto& [feature, target] : arcs) {
      if (!acyclic(target, color, detail::join_path(path, feature))) return false;
    }
    color[id] = 2;
    return true;
  }

  FeatureId copy_into(FeatureGraph& out, FeatureId id, std::map<FeatureId, FeatureId>& remap) {
    id = find(id);
    if (auto it = remap.find(id); it != remap.end()) return it->second;
    const FeatureNode& src = graph_.node(id);
    FeatureId fresh = src.is_atom() ? out.add_atom(src.atom, src.var) : out.add_complex(src.var);
    remap.emplace(id, fresh);
    auto arcs = src.arcs;
    for (auto& [feature, target] : arcs) {
      FeatureId t = copy_into(out, target, remap);
      out.set_arc(fresh, feature, t);
    }
    return fresh;
  }

  FeatureGraph& graph_;
  std::vector<FeatureId> forward_;
  std::optional<UnifyError> error_;
};

/// Prints values of one graph in the text syntax `[f=v, g=#1[h=w], k=#1]`.
/// Sharing is computed over all roots passed at construction so variables are
/// consistent across the several feature structures of one tree.
class FeaturePrinter {
 public:
  enum class Naming {
    Preserve,   // keep variable names; name anonymous shared nodes _1, _2, ...
    Canonical,  // drop names; number shared nodes by first occurrence
  };

  FeaturePrinter(const FeatureGraph& graph, std::span<const FeatureId> roots, Naming naming)
      : graph_(graph), naming_(naming), indegree_(graph.size(), 0), names_(graph.size()),
        printed_(graph.size(), false) {
    std::vector<bool> seen(graph.size(), false);
    for (FeatureId r : roots) count(r, seen);
    if (naming_ == Naming::Preserve) {
      for (FeatureId i = 0; i < graph.size(); ++i) {
        if (!graph.node(i).var.empty()) taken_.insert(graph.node(i).var);
      }
    }
  }

  std::string value(FeatureId id) {
    const FeatureNode& n = graph_.node(id);
    if (needs_name(id)) {
      std::string name = "#" + name_of(id);
      if (printed_[id]) return name;
      printed_[id] = true;
      if (n.is_atom()) return name + ":" + n.atom;
      if (n.arcs.empty()) return name;
      return name + complex(id);
    }
    if (n.is_atom()) return n.atom;
    return complex(id);
  }

 private:
  void count(FeatureId id, std::vector<bool>& seen) {
    ++indegree_[id];
    if (seen[id]) return;
    seen[id] = true;
    for (const auto& arc : graph_.node(id).arcs) count(arc.second, seen);
  }

  bool needs_name(FeatureId id) const {
    if (indegree_[id] > 1) return true;
    return naming_ == Naming::Preserve && !graph_.node(id).var.empty();
  }

  std::string name_of(FeatureId id) {
    if (!names_[id].empty()) return names_[id];
    std::string name;
    if (naming_ == Naming::Canonical) {
      name = std::to_string(++counter_);
    } else {
      const std::string& var = graph_.node(id).var;
      if (!var.empty() && !used_.count(var)) {
        name = var;
      } else {
        std::string base = var.empty() ? "_" : var + "~";
        do {
          name = base + std::to_string(++counter_);
        } while (taken_.count(name) || used_.count(name));
      }
    }
    used_.insert(name);
    names_[id] = name;
    return name;
  }

  std::string complex(FeatureId id) {
    std::string out = "[";
    bool first = true;
    for (const auto& [feature, target] : graph_.node(id).arcs) {
      if (!first) out += ", ";
      first = false;
      out += feature + "=" + value(target);
    }
    return out + "]";
  }

  const FeatureGraph& graph_;
  Naming naming_;
  std::vector<int> indegree_;
  std::vector<std::string> names_;
  std::vector<bool> printed_;
  std::set<std::string> taken_;
  std::set<std::string> used_;
  int counter_ = 0;
};

/// Parses feature values into a graph. Variables are scoped to one reader, so
/// a tree file uses one reader per tree. Call resolve() once all values of the
/// scope are read; it unifies repeated variable contents and compacts.
class FeatureReader {
 public:
  explicit FeatureReader(FeatureGraph& graph) : graph_(graph) {}

  /// fs := '[' (name '=' value (',' name '=' value)*)? ']'
  FeatureId read_structure(text::Lexer& lex) {
    lex.expect('[');
    FeatureId node = graph_.add_complex();
    if (lex.accept(']')) return node;
    std::set<std::string> names;
    do {
      text::Token t = lex.peek();
      std::string feature = lex.expect_word("feature name");
      if (!text::is_symbol(feature)) lex.error(t, "invalid feature name '" + feature + "'");
      if (!names.insert(feature).second) lex.error(t, "duplicate feature '" + feature + "'");
      lex.expect('=');
      FeatureId v = read_value(lex);
      graph_.set_arc(node, feature, v);
    } while (lex.accept(','));
    lex.expect(']');
    return node;
  }

  /// value := symbol | fs | '#' id (':' symbol | fs)?
  FeatureId read_value(text::Lexer& lex) {
    const text::Token& t = lex.peek();
    if (t.is('[')) return read_structure(lex);
    if (t.is('#')) {
      lex.next();
      std::string id = lex.expect_word("variable id");
      auto [it, inserted] = vars_.try_emplace(id, 0);
      if (inserted) it->second = graph_.add_complex(id);
      FeatureId var = it->second;
      if (lex.accept(':')) {
        text::Token at = lex.peek();
        std::string sym = lex.expect_word("atomic value");
        if (!text::is_symbol(sym)) lex.error(at, "invalid atomic value '" + sym + "'");
        equations_.emplace_back(var, graph_.add_atom(sym));
      } else if (lex.peek().is('[')) {
        equations_.emplace_back(var, read_structure(lex));
      }
      return var;
    }
    if (t.is_word()) {
      if (!text::is_symbol(t.text)) lex.error(t, "invalid atomic value '" + t.text + "'");
      return graph_.add_atom(lex.next().text);
    }
    lex.error("expected feature value");
  }

  /// Binds variable contents. Returns the failure, if any; the graph is then
  /// compacted with respect to `roots`.
  std::optional<UnifyError> resolve(const std::vector<FeatureId*>& roots) {
    Unifier u(graph_);
    for (auto [var, content] : equations_) {
      if (!u.unify(var, content)) return u.error();
    }
    if (!u.finish(roots)) return u.error();
    equations_.clear();
    vars_.clear();
    return std::nullopt;
  }

 private:
  FeatureGraph& graph_;
  std::map<std::string, FeatureId> vars_;
  std::vector<std::pair<FeatureId, FeatureId>> equations_;
};

/// A standalone feature structure: a graph plus its root. Immutable in use;
/// all operations return new values.
class FeatureStructure {
 public:
  FeatureStructure() { root_ = graph_.add_complex(); }
  FeatureStructure(FeatureGraph graph, FeatureId root) : graph_(std::move(graph)), root_(root) {}

  /// Parses the text syntax, e.g. "[agr=#1[pers=3], subj_agr=#1]".
  static FeatureStructure parse(std::string_view source, std::string origin = "<feature>") {
    text::Lexer lex(source, origin);
    FeatureGraph g;
    FeatureReader reader(g);
    FeatureId root = reader.read_value(lex);
    if (!lex.at_end()) lex.error("trailing input after feature structure");
    if (auto err = reader.resolve({&root})) {
      throw SyntaxError(origin, 1, "inconsistent variable bindings: " + err->describe());
    }
    return FeatureStructure(std::move(g), root);
  }

  /// Copies the part of `graph` reachable from `root`.
  static FeatureStructure extract(const FeatureGraph& graph, FeatureId root) {
    FeatureGraph copy = graph;
    Unifier u(copy);
    u.finish({&root});
    return FeatureStructure(std::move(copy), root);
  }

  const FeatureGraph& graph() const { return graph_; }
  FeatureId root() const { return root_; }
  bool empty() const { return graph_.node(root_).is_empty(); }

  /// Value at a feature path ("agr.num"), if present.
  std::optional<FeatureId> at(std::string_view path) const {
    FeatureId cur = root_;
    std::size_t i = 0;
    while (i <= path.size() && !path.empty()) {
      std::size_t j = path.find('.', i);
      if (j == std::string_view::npos) j = path.size();
      auto next = graph_.node(cur).arc(path.substr(i, j - i));
      if (!next) return std::nullopt;
      cur = *next;
      i = j + 1;
    }
    return cur;
  }

  /// Atomic value at `path`, or empty string.
  std::string atom_at(std::string_view path) const {
    auto id = at(path);
    if (!id || !graph_.node(*id).is_atom()) return {};
    return graph_.node(*id).atom;
  }

  std::string str() const {
    FeatureId roots[] = {root_};
    FeaturePrinter p(graph_, roots, FeaturePrinter::Naming::Preserve);
    return p.value(root_);
  }

  /// Text form with variable names normalized; equal iff the structures are
  /// identical up to variable renaming.
  std::string canonical() const {
    FeatureId roots[] = {root_};
    FeaturePrinter p(graph_, roots, FeaturePrinter::Naming::Canonical);
    return p.value(root_);
  }

  /// Variable names present in the structure.
  std::set<std::string> variables() const {
    std::set<std::string> out;
    for (FeatureId i = 0; i < graph_.size(); ++i) {
      if (!graph_.node(i).var.empty()) out.insert(graph_.node(i).var);
    }
    return out;
  }

 private:
  FeatureGraph graph_;
  FeatureId root_ = 0;
};

inline bool equivalent(const FeatureStructure& a, const FeatureStructure& b) {
  return a.canonical() == b.canonical();
}

/// Most general structure subsumed by both inputs, or the clash/cycle that
/// prevents it. Inputs are untouched.
inline Expected<FeatureStructure, UnifyError> unify(const FeatureStructure& a, const FeatureStructure& b) {
  FeatureGraph g = a.graph();
  FeatureId offset = g.append(b.graph());
  FeatureId root = a.root();
  Unifier u(g);
  if (!u.unify(root, b.root() + offset) || !u.finish({&root})) return fail(*u.error());
  return FeatureStructure(std::move(g), root);
}

/// True iff every path value and every re-entrancy of `general` also holds in
/// `specific`.
inline bool subsumes(const FeatureStructure& general, const FeatureStructure& specific) {
  const FeatureGraph& ga = general.graph();
  const FeatureGraph& gb = specific.graph();
  std::map<FeatureId, FeatureId> mapping;
  auto walk = [&](auto&& self, FeatureId x, FeatureId y) -> bool {
    auto [it, inserted] = mapping.try_emplace(x, y);
    if (!inserted) return it->second == y;
    const FeatureNode& nx = ga.node(x);
    const FeatureNode& ny = gb.node(y);
    if (nx.is_atom()) return ny.is_atom() && ny.atom == nx.atom;
    if (nx.arcs.empty()) return true;
    if (ny.is_atom()) return false;
    for (const auto& [feature, target] : nx.arcs) {
      auto other = ny.arc(feature);
      if (!other || !self(self, target, *other)) return false;
    }
    return true;
  };
  return walk(walk, general.root(), specific.root());
}

/// Same structure with every variable name moved into namespace `ns`.
inline FeatureStructure rename_variables(const FeatureStructure& fs, std::string_view ns) {
  FeatureGraph g = fs.graph();
  g.rename_variables(ns);
  return FeatureStructure(std::move(g), fs.root());
}

}  // namespace ltag
