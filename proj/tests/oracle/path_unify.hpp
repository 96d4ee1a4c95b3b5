#pragma once

// Reference unification over path facts. A structure is described by its set
// of paths, the atom (if any) at each path, and which paths lead to the same
// value. Unifying two descriptions unions them and closes under
// "equal paths have equal extensions" until nothing changes.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ltag/featstruct.hpp"

namespace oracle {

using Path = std::vector<std::string>;

struct Facts {
  std::set<Path> paths;
  std::map<Path, std::string> atoms;
  std::map<Path, Path> rep;  // each path -> least path sharing its value

  bool operator==(const Facts&) const = default;
};

inline bool shorter(const Path& a, const Path& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

/// Facts of an acyclic structure, read directly off its graph.
inline Facts facts_of(const ltag::FeatureStructure& fs) {
  Facts f;
  std::map<ltag::FeatureId, Path> first;
  auto walk = [&](auto&& self, ltag::FeatureId id, Path& at) -> void {
    f.paths.insert(at);
    auto [it, fresh] = first.try_emplace(id, at);
    if (!fresh && shorter(at, it->second)) it->second = at;
    const auto& n = fs.graph().node(id);
    if (n.is_atom()) f.atoms[at] = n.atom;
    for (const auto& [feature, target] : n.arcs) {
      at.push_back(feature);
      self(self, target, at);
      at.pop_back();
    }
  };
  Path root;
  walk(walk, fs.root(), root);
  std::map<Path, ltag::FeatureId> owner;
  auto find_id = [&](auto&& self, ltag::FeatureId id, const Path& p, std::size_t k) -> ltag::FeatureId {
    if (k == p.size()) return id;
    return self(self, *fs.graph().node(id).arc(p[k]), p, k + 1);
  };
  for (const auto& p : f.paths) f.rep[p] = first.at(find_id(find_id, fs.root(), p, 0));
  return f;
}

enum class Outcome { Ok, Fail };

struct Result {
  Outcome outcome = Outcome::Fail;
  Facts facts;
};

class PathUnifier {
 public:
  explicit PathUnifier(std::size_t depth_bound) : bound_(depth_bound) {}

  Result unify(const Facts& a, const Facts& b) {
    parent_.clear();
    std::set<Path> paths = a.paths;
    paths.insert(b.paths.begin(), b.paths.end());
    for (const auto& p : paths) parent_[p] = p;
    for (const auto* f : {&a, &b}) {
      for (const auto& [p, r] : f->rep) join(p, r);
    }
    for (;;) {
      if (cyclic(paths)) return {};
      bool changed = false;
      std::map<Path, std::vector<Path>> classes;
      for (const auto& p : paths) classes[find(p)].push_back(p);
      for (const auto& [root, members] : classes) {
        std::map<std::string, Path> ext;
        for (const auto& p : members) {
          for (const auto& q : paths) {
            if (q.size() == p.size() + 1 && std::equal(p.begin(), p.end(), q.begin())) ext.try_emplace(q.back(), q);
          }
        }
        for (const auto& p : members) {
          for (const auto& [feature, target] : ext) {
            Path q = p;
            q.push_back(feature);
            if (q.size() > bound_) return {};
            if (paths.insert(q).second) {
              parent_[q] = q;
              changed = true;
            }
            if (find(q) != find(target)) {
              join(q, target);
              changed = true;
            }
          }
        }
        if (changed) break;
      }
      if (!changed) break;
    }
    Result r;
    std::map<Path, std::string> atoms;
    std::map<Path, Path> least;
    for (const auto& p : paths) {
      auto root = find(p);
      auto it = least.find(root);
      if (it == least.end() || shorter(p, it->second)) least[root] = p;
    }
    for (const auto* f : {&a, &b}) {
      for (const auto& [p, atom] : f->atoms) {
        auto [it, fresh] = atoms.try_emplace(find(p), atom);
        if (!fresh && it->second != atom) return {};
      }
    }
    for (const auto& p : paths) {
      if (p.empty()) continue;
      Path parent(p.begin(), p.end() - 1);
      if (atoms.count(find(parent))) return {};
    }
    r.outcome = Outcome::Ok;
    r.facts.paths = paths;
    for (const auto& p : paths) {
      r.facts.rep[p] = least.at(find(p));
      if (auto it = atoms.find(find(p)); it != atoms.end()) r.facts.atoms[p] = it->second;
    }
    return r;
  }

 private:
  // A value reachable from itself: some path shares its value with a proper
  // prefix.
  bool cyclic(const std::set<Path>& paths) {
    for (const auto& p : paths) {
      auto root = find(p);
      for (std::size_t k = 0; k < p.size(); ++k) {
        if (find(Path(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(k))) == root) return true;
      }
    }
    return false;
  }

  Path find(const Path& p) {
    Path cur = p;
    while (parent_.at(cur) != cur) cur = parent_.at(cur);
    Path root = cur;
    cur = p;
    while (parent_.at(cur) != root) {
      Path next = parent_.at(cur);
      parent_[cur] = root;
      cur = next;
    }
    return root;
  }
  void join(const Path& x, const Path& y) {
    Path a = find(x), b = find(y);
    if (a != b) parent_[a] = b;
  }

  std::size_t bound_;
  std::map<Path, Path> parent_;
};

}  // namespace oracle
