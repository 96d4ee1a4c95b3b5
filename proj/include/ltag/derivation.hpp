#pragma once

// Substitution, adjunction, derivation trees and their replay.
//
// A derivation records attachments at Gorn addresses of the elementary tree
// being attached to:
//   (αnx0Vnx1[eats] (subst@1 αNXN[John]) (subst@2.2 αNXdxN[cake] (subst@1 αDXD[the])))

#include <algorithm>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "ltag/expected.hpp"
#include "ltag/featstruct.hpp"
#include "ltag/grammar.hpp"
#include "ltag/text.hpp"
#include "ltag/tree.hpp"

namespace ltag {

enum class Operation { Substitution, Adjunction };

inline std::string_view operation_name(Operation op) { return op == Operation::Substitution ? "subst" : "adj"; }

struct Attachment;

struct DerivationNode {
  std::string tree;  // anchored tree id
  std::vector<Attachment> attachments;

  std::size_t size() const;
};

struct Attachment {
  Operation op = Operation::Substitution;
  GornAddress site;
  DerivationNode child;
};

inline std::size_t DerivationNode::size() const {
  std::size_t n = 1;
  for (const auto& a : attachments) n += a.child.size();
  return n;
}

inline std::string serialize(const DerivationNode& d);

namespace detail {
inline void sort_attachments(std::vector<Attachment>& as) {
  std::vector<std::string> rendered;
  for (const auto& a : as) rendered.push_back(serialize(a.child));
  std::vector<std::size_t> order(as.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (as[x].site != as[y].site) return as[x].site < as[y].site;
    if (as[x].op != as[y].op) return as[x].op < as[y].op;
    return rendered[x] < rendered[y];
  });
  std::vector<Attachment> sorted;
  for (auto i : order) sorted.push_back(std::move(as[i]));
  as = std::move(sorted);
}
}  // namespace detail

/// Sorts attachments recursively by (site, operation, serialized child).
inline void normalize(DerivationNode& d) {
  for (auto& a : d.attachments) normalize(a.child);
  detail::sort_attachments(d.attachments);
}

namespace detail {
inline std::string serialize_body(const DerivationNode& d) {
  std::vector<std::string> parts;
  for (const auto& a : d.attachments) {
    parts.push_back("(" + std::string(operation_name(a.op)) + "@" + a.site.str() + " " + serialize_body(a.child) + ")");
  }
  std::vector<std::size_t> order(parts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto& ax = d.attachments[x];
    const auto& ay = d.attachments[y];
    if (ax.site != ay.site) return ax.site < ay.site;
    if (ax.op != ay.op) return ax.op < ay.op;
    return parts[x] < parts[y];
  });
  std::string out = d.tree;
  for (auto i : order) out += " " + parts[i];
  return out;
}
}  // namespace detail

/// One-line serialization; attachments are emitted in normalized order.
inline std::string serialize(const DerivationNode& d) { return "(" + detail::serialize_body(d) + ")"; }

inline bool operator==(const DerivationNode& a, const DerivationNode& b) { return serialize(a) == serialize(b); }

/// Parses the one-line serialization. Tree ids may contain any character
/// except whitespace and parentheses.
inline DerivationNode parse_derivation(std::string_view s, const std::string& origin = "<derivation>") {
  std::vector<std::string> toks;
  for (std::size_t i = 0; i < s.size();) {
    char c = s[i];
    if (text::is_space(c)) {
      ++i;
    } else if (c == '(' || c == ')') {
      toks.emplace_back(1, c);
      ++i;
    } else {
      std::size_t j = i;
      while (j < s.size() && !text::is_space(s[j]) && s[j] != '(' && s[j] != ')') ++j;
      toks.emplace_back(s.substr(i, j - i));
      i = j;
    }
  }
  std::size_t pos = 0;
  auto err = [&](const std::string& m) -> SyntaxError { return SyntaxError(origin, 1, m); };
  auto expect = [&](const char* t) {
    if (pos >= toks.size() || toks[pos] != t) throw err(std::string("expected '") + t + "'");
    ++pos;
  };
  auto word = [&](const char* what) {
    if (pos >= toks.size() || toks[pos] == "(" || toks[pos] == ")") throw err(std::string("expected ") + what);
    return toks[pos++];
  };
  // body := tree-id ('(' op@address body ')')*
  auto body = [&](auto&& self) -> DerivationNode {
    DerivationNode d;
    d.tree = word("tree id");
    while (pos < toks.size() && toks[pos] == "(") {
      ++pos;
      std::string head = word("operation@address");
      auto at = head.find('@');
      if (at == std::string::npos) throw err("expected operation@address, found '" + head + "'");
      Attachment a;
      std::string op = head.substr(0, at);
      if (op == "subst") a.op = Operation::Substitution;
      else if (op == "adj") a.op = Operation::Adjunction;
      else throw err("unknown operation '" + op + "'");
      try {
        a.site = GornAddress::parse(head.substr(at + 1));
      } catch (const std::invalid_argument& e) {
        throw err(e.what());
      }
      a.child = self(self);
      expect(")");
      d.attachments.push_back(std::move(a));
    }
    return d;
  };
  expect("(");
  DerivationNode d = body(body);
  expect(")");
  if (pos != toks.size()) throw err("trailing input after derivation");
  normalize(d);
  return d;
}

// ---------------------------------------------------------------------------
// Operations

struct DerivationError {
  enum class Kind {
    UnknownTree,
    BadSite,
    LabelMismatch,
    WrongKind,
    DuplicateSite,
    TopClash,
    FootClash,
    Cycle,
    FinalClash,
    Incomplete,
  };
  Kind kind = Kind::BadSite;
  std::string message;
  std::string step;  // offending attachment, when replaying

  std::string describe() const {
    static const char* names[] = {"unknown-tree", "bad-site",     "label-mismatch", "wrong-kind",  "duplicate-site",
                                  "top-clash",    "foot-clash",   "cycle",          "final-clash", "incomplete"};
    std::string out = std::string(names[static_cast<int>(kind)]) + ": " + message;
    if (!step.empty()) out += " [" + step + "]";
    return out;
  }
};

namespace detail {

inline void shift_features(TreeNode& n, FeatureId offset) {
  n.top += offset;
  n.bottom += offset;
  for (auto& c : n.children) shift_features(c, offset);
}

inline DerivationError feature_error(const UnifyError& e, DerivationError::Kind clash, const std::string& where) {
  if (e.kind == UnifyError::Kind::Cycle) return {DerivationError::Kind::Cycle, where + ": " + e.describe(), {}};
  return {clash, where + ": " + e.describe(), {}};
}

}  // namespace detail

/// Replaces the substitution node at `site` with a copy of `sub`. The new node's
/// top is site.top unified with sub's root top; its bottom is sub's root bottom.
inline Expected<Tree, DerivationError> substitute(const Tree& host, const GornAddress& site, const Tree& sub) {
  using K = DerivationError::Kind;
  const TreeNode* target = host.find(site);
  if (!target) return fail(DerivationError{K::BadSite, "no node at " + site.str(), {}});
  if (target->marker != Marker::Substitution) {
    return fail(DerivationError{K::BadSite, "node " + site.str() + " is not a substitution node", {}});
  }
  if (target->label != sub.root.label) {
    return fail(DerivationError{K::LabelMismatch, target->label + " vs " + sub.root.label, {}});
  }
  Tree out = host;
  FeatureId offset = out.features.append(sub.features);
  TreeNode incoming = sub.root;
  detail::shift_features(incoming, offset);
  TreeNode* slot = out.find(site);
  Unifier u(out.features);
  if (!u.unify(slot->top, incoming.top, "top")) {
    return fail(detail::feature_error(*u.error(), K::TopClash, "substitution at " + site.str()));
  }
  incoming.top = slot->top;
  *slot = std::move(incoming);
  if (!u.finish(out.feature_refs())) {
    return fail(detail::feature_error(*u.error(), K::TopClash, "substitution at " + site.str()));
  }
  return out;
}

/// Adjoins `aux` at the internal node `site`. The node splits: the upper half
/// takes site.top unified with the aux root top and keeps the aux root bottom;
/// the lower half replaces the foot with foot.top as top and site.bottom
/// unified with foot.bottom as bottom, keeping the site's children.
inline Expected<Tree, DerivationError> adjoin(const Tree& host, const GornAddress& site, const Tree& aux) {
  using K = DerivationError::Kind;
  const TreeNode* target = host.find(site);
  if (!target) return fail(DerivationError{K::BadSite, "no node at " + site.str(), {}});
  if (!target->adjoinable()) {
    return fail(DerivationError{K::BadSite, "cannot adjoin at " + std::string(marker_name(target->marker)) +
                                                " node " + site.str(), {}});
  }
  auto foot_at = aux.foot_address();
  if (!foot_at) return fail(DerivationError{K::WrongKind, "adjoined tree has no foot", {}});
  if (target->label != aux.root.label) {
    return fail(DerivationError{K::LabelMismatch, target->label + " vs " + aux.root.label, {}});
  }
  Tree out = host;
  FeatureId offset = out.features.append(aux.features);
  TreeNode upper = aux.root;
  detail::shift_features(upper, offset);
  TreeNode* lower_slot = &upper;
  for (int i : foot_at->path) lower_slot = &lower_slot->children[i - 1];
  TreeNode* node = out.find(site);
  Unifier u(out.features);
  std::string where = "adjunction at " + site.str();
  if (!u.unify(node->top, upper.top, "top")) return fail(detail::feature_error(*u.error(), K::TopClash, where));
  if (!u.unify(node->bottom, lower_slot->bottom, "bottom")) {
    return fail(detail::feature_error(*u.error(), K::FootClash, where));
  }
  TreeNode lower = std::move(*node);
  upper.top = lower.top;
  lower.top = lower_slot->top;
  *lower_slot = std::move(lower);
  *node = std::move(upper);
  if (!u.finish(out.feature_refs())) return fail(detail::feature_error(*u.error(), K::FootClash, where));
  return out;
}

/// True iff no substitution or foot nodes remain.
inline bool is_complete(const Tree& t) {
  bool open = false;
  t.preorder([&](const TreeNode& n, const GornAddress&) {
    open = open || n.marker == Marker::Substitution || n.marker == Marker::Foot;
  });
  return !open;
}

/// Unifies top and bottom at every node; afterwards both sides of each node
/// denote the same structure.
inline Expected<Tree, DerivationError> finalize(const Tree& t) {
  using K = DerivationError::Kind;
  if (!is_complete(t)) return fail(DerivationError{K::Incomplete, "open substitution or foot node remains", {}});
  Tree out = t;
  Unifier u(out.features);
  std::optional<DerivationError> err;
  out.preorder([&](const TreeNode& n, const GornAddress& a) {
    if (err) return;
    if (!u.unify(n.top, n.bottom)) err = detail::feature_error(*u.error(), K::FinalClash, "node " + a.str() + " " + n.label);
  });
  if (err) return fail(*err);
  if (!u.finish(out.feature_refs())) return fail(detail::feature_error(*u.error(), K::FinalClash, "finalize"));
  return out;
}

// ---------------------------------------------------------------------------
// Replay

using TreeLookup = std::function<const ElementaryTree*(std::string_view)>;

struct DerivedTree {
  Tree tree;
  std::vector<std::string> instances;  // tree id per instance, preorder over the derivation
  std::vector<int> parents;            // instance attached into; -1 for the root
};

namespace detail {

inline void mark_provenance(TreeNode& n, int instance, GornAddress& at) {
  n.instance = instance;
  n.origin = at;
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    at.path.push_back(static_cast<int>(i + 1));
    mark_provenance(n.children[i], instance, at);
    at.path.pop_back();
  }
}

inline Expected<Tree, DerivationError> build(const DerivationNode& d, const TreeLookup& lookup, DerivedTree& record,
                                             int parent, TreeKind expected, bool check_kind) {
  using K = DerivationError::Kind;
  const ElementaryTree* et = lookup(d.tree);
  if (!et) return fail(DerivationError{K::UnknownTree, "unknown tree '" + d.tree + "'", {}});
  if (check_kind && et->kind != expected) {
    return fail(DerivationError{K::WrongKind,
                                "tree '" + d.tree + "' is " + std::string(kind_name(et->kind)) + ", operation needs " +
                                    std::string(kind_name(expected)),
                                {}});
  }
  int instance = static_cast<int>(record.instances.size());
  record.instances.push_back(d.tree);
  record.parents.push_back(parent);
  Tree t = et->tree;
  GornAddress at;
  mark_provenance(t.root, instance, at);

  std::vector<const Attachment*> order;
  for (const auto& a : d.attachments) order.push_back(&a);
  std::stable_sort(order.begin(), order.end(), [](const Attachment* x, const Attachment* y) { return x->site < y->site; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (order[i]->site == order[i - 1]->site) {
      return fail(DerivationError{K::DuplicateSite, "two attachments at " + order[i]->site.str() + " of " + d.tree, {}});
    }
  }
  std::vector<Tree> children;
  for (const Attachment* a : order) {
    TreeKind want = a->op == Operation::Substitution ? TreeKind::Initial : TreeKind::Auxiliary;
    auto child = build(a->child, lookup, record, instance, want, true);
    if (!child) return fail(child.error());
    children.push_back(std::move(child).value());
  }
  // Deepest/rightmost sites first, so every elementary address stays valid.
  for (std::size_t k = order.size(); k-- > 0;) {
    const Attachment& a = *order[k];
    auto r = a.op == Operation::Substitution ? substitute(t, a.site, children[k]) : adjoin(t, a.site, children[k]);
    if (!r) {
      DerivationError e = r.error();
      if (e.step.empty()) e.step = d.tree + " " + std::string(operation_name(a.op)) + "@" + a.site.str() + " " + a.child.tree;
      return fail(e);
    }
    t = std::move(r).value();
  }
  return t;
}

}  // namespace detail

/// Builds the derived tree bottom-up. The root may be of either kind.
inline Expected<DerivedTree, DerivationError> replay(const DerivationNode& d, const TreeLookup& lookup) {
  DerivedTree out;
  auto t = detail::build(d, lookup, out, -1, TreeKind::Initial, false);
  if (!t) return fail(t.error());
  out.tree = std::move(t).value();
  return out;
}

inline Expected<DerivedTree, DerivationError> replay(const DerivationNode& d, const Grammar& g) {
  return replay(d, [&g](std::string_view id) { return g.supertag(id); });
}

}  // namespace ltag
