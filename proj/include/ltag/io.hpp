#pragma once

// Grammar directories: trees.tag, lexicon.lex and an optional rules.mr.
// Further *.tag files are read in name order after trees.tag; a tree id
// repeated with an identical definition is skipped. With rules.mr present,
// every family is closed under the rules from its first member.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ltag/grammar.hpp"
#include "ltag/metarule.hpp"

namespace ltag {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

struct GrammarDirectory {
  Grammar grammar;
  std::vector<Metarule> rules;
  std::vector<Rejection> rejected;  // metarule outputs refused while closing families
};

/// Merges `extra` into `base`, skipping identical redefinitions.
inline void merge_tree_file(TreeFile& base, TreeFile extra) {
  for (auto& t : extra.trees) {
    auto it = std::find_if(base.trees.begin(), base.trees.end(), [&](const ElementaryTree& b) { return b.id == t.id; });
    if (it == base.trees.end()) {
      base.trees.push_back(std::move(t));
    } else if (!(it->kind == t.kind && it->family == t.family && it->same_structure(t))) {
      throw GrammarError({t.source + ":" + std::to_string(t.line) + ": tree '" + t.id + "' conflicts with " +
                          it->source + ":" + std::to_string(it->line)});
    }
  }
}

/// Closes every family of `trees` under `rules`; generated members are
/// appended after the declared trees, family by family in declaration order.
inline std::vector<Rejection> close_families(TreeFile& trees, const std::vector<Metarule>& rules,
                                             const LocalityPredicate& p) {
  std::vector<Rejection> rejected;
  std::vector<std::string> bases;
  std::set<std::string> families;
  for (const auto& t : trees.trees) {
    if (!t.family.empty() && families.insert(t.family).second) bases.push_back(t.id);
  }
  std::vector<ElementaryTree> added;
  for (const auto& id : bases) {
    auto base = std::find_if(trees.trees.begin(), trees.trees.end(), [&](const ElementaryTree& t) { return t.id == id; });
    auto closure = close_family(*base, rules, p);
    rejected.insert(rejected.end(), closure.rejected.begin(), closure.rejected.end());
    for (std::size_t i = 1; i < closure.members.size(); ++i) {
      auto& t = closure.members[i];
      bool present = std::any_of(trees.trees.begin(), trees.trees.end(), [&](const ElementaryTree& e) {
        return e.family == t.family && e.same_structure(t);
      });
      if (present) continue;
      t.line = base->line;
      added.push_back(std::move(t));
    }
  }
  for (auto& t : added) trees.trees.push_back(std::move(t));
  return rejected;
}

/// trees.tag followed by the directory's other *.tag files in name order.
inline TreeFile load_tree_files(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::runtime_error(dir.string() + " is not a directory");
  fs::path trees_path = dir / "trees.tag";
  TreeFile trees = parse_tree_file(read_file(trees_path), trees_path.string());
  std::vector<fs::path> extra;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".tag" && e.path().filename() != "trees.tag") extra.push_back(e.path());
  }
  std::sort(extra.begin(), extra.end());
  for (const auto& path : extra) merge_tree_file(trees, parse_tree_file(read_file(path), path.string()));
  return trees;
}

inline GrammarDirectory load_grammar_dir(const std::filesystem::path& dir, const LocalityPredicate& p = {}) {
  namespace fs = std::filesystem;
  GrammarDirectory out;
  TreeFile trees = load_tree_files(dir);
  fs::path rules_path = dir / "rules.mr";
  if (fs::exists(rules_path)) {
    out.rules = parse_metarules(read_file(rules_path), rules_path.string());
    out.rejected = close_families(trees, out.rules, p);
  }
  fs::path lex_path = dir / "lexicon.lex";
  out.grammar = build_grammar(std::move(trees), parse_lexicon(read_file(lex_path), lex_path.string()));
  return out;
}

}  // namespace ltag
