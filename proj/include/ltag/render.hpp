#pragma once

// Text and Graphviz renderings of trees and derivations.

#include <string>
#include <string_view>

#include "ltag/derivation.hpp"
#include "ltag/tree.hpp"

namespace ltag {

enum class RenderFormat { Text, Graph };

inline std::string_view format_name(RenderFormat f) { return f == RenderFormat::Text ? "text" : "graph"; }

/// Indented node syntax, one node per line; variables numbered canonically.
inline std::string render_text(const Tree& t) {
  return tree_syntax::write_tree_body(t, 0, FeaturePrinter::Naming::Canonical);
}

/// Indented derivation tree: each line is `op@site tree` under its host.
inline std::string render_text(const DerivationNode& d) {
  std::string out;
  auto walk = [&](auto&& self, const DerivationNode& n, int depth, const std::string& edge) -> void {
    out += std::string(static_cast<std::size_t>(depth) * 2, ' ');
    if (!edge.empty()) out += edge + " ";
    out += n.tree + "\n";
    for (const auto& a : n.attachments) {
      self(self, a.child, depth + 1, std::string(operation_name(a.op)) + "@" + a.site.str());
    }
  };
  DerivationNode sorted = d;
  normalize(sorted);
  walk(walk, sorted, 0, "");
  return out;
}

namespace detail {

inline std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace detail

inline std::string render_graph(const Tree& t, std::string_view name = "tree") {
  auto roots = t.feature_roots();
  FeaturePrinter p(t.features, roots, FeaturePrinter::Naming::Canonical);
  std::string out = "digraph \"" + detail::dot_escape(name) + "\" {\n  node [shape=plaintext];\n";
  int next = 0;
  auto walk = [&](auto&& self, const TreeNode& n) -> int {
    int id = next++;
    std::string label = n.label + std::string(marker_suffix(n.marker));
    if (n.is_empty_terminal()) label = "ε";
    if (!n.word.empty()) label += "\\n" + detail::dot_escape(n.word);
    const auto& g = t.features;
    if (!g.node(n.top).is_empty() || !g.node(n.top).var.empty()) label += "\\ntop " + detail::dot_escape(p.value(n.top));
    if (!g.node(n.bottom).is_empty() || !g.node(n.bottom).var.empty()) {
      label += "\\nbot " + detail::dot_escape(p.value(n.bottom));
    }
    out += "  n" + std::to_string(id) + " [label=\"" + label + "\"];\n";
    for (const auto& c : n.children) {
      int child = self(self, c);
      out += "  n" + std::to_string(id) + " -> n" + std::to_string(child) + ";\n";
    }
    return id;
  };
  walk(walk, t.root);
  return out + "}\n";
}

inline std::string render_graph(const DerivationNode& d, std::string_view name = "derivation") {
  DerivationNode sorted = d;
  normalize(sorted);
  std::string out = "digraph \"" + detail::dot_escape(name) + "\" {\n  node [shape=box];\n";
  int next = 0;
  auto walk = [&](auto&& self, const DerivationNode& n) -> int {
    int id = next++;
    out += "  d" + std::to_string(id) + " [label=\"" + detail::dot_escape(n.tree) + "\"];\n";
    for (const auto& a : n.attachments) {
      int child = self(self, a.child);
      out += "  d" + std::to_string(id) + " -> d" + std::to_string(child) + " [label=\"" +
             std::string(operation_name(a.op)) + "@" + a.site.str() + "\"" +
             (a.op == Operation::Adjunction ? ", style=dashed" : "") + "];\n";
    }
    return id;
  };
  walk(walk, sorted);
  return out + "}\n";
}

inline std::string render(const Tree& t, RenderFormat f) { return f == RenderFormat::Text ? render_text(t) : render_graph(t); }
inline std::string render(const DerivationNode& d, RenderFormat f) {
  return f == RenderFormat::Text ? render_text(d) : render_graph(d);
}

}  // namespace ltag
