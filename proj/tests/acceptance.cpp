// Acceptance gate: one PASS/FAIL line per criterion; exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ltag/ltag.hpp"
#include "support/common.hpp"
#include "support/fs_universe.hpp"
#include "support/longdist.hpp"
#include "support/operation_cases.hpp"
#include "support/pipeline.hpp"
#include "support/sweep.hpp"

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (ok) return;
    if (!detail.empty()) detail += "; ";
    detail += what;
    pass = false;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int digits = 2) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(digits);
  ss << v;
  return ss.str();
}

// Unification result as a comparable key: canonical text or "⊥".
std::string key(const ltag::Expected<ltag::FeatureStructure, ltag::UnifyError>& r) {
  return r ? r->canonical() : std::string("⊥");
}

Verdict unification_algebra() {
  Verdict v;
  auto t0 = Clock::now();
  auto u = support::universe();
  const std::size_t n = u.size();
  const ltag::FeatureStructure top;
  std::vector<std::string> canon(n);
  for (std::size_t i = 0; i < n; ++i) canon[i] = u[i].canonical();
  std::vector<std::vector<ltag::Expected<ltag::FeatureStructure, ltag::UnifyError>>> pair;
  std::size_t failures = 0, violations = 0;
  pair.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    pair.emplace_back();
    pair[i].reserve(n);
    for (std::size_t j = 0; j < n; ++j) pair[i].push_back(ltag::unify(u[i], u[j]));
  }
  std::vector<std::vector<std::string>> pk(n, std::vector<std::string>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) pk[i][j] = key(pair[i][j]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (pk[i][i] != canon[i]) ++violations;                  // idempotence
    if (key(ltag::unify(u[i], top)) != canon[i]) ++violations;  // identity
    for (std::size_t j = 0; j < n; ++j) {
      if (pk[i][j] != pk[j][i]) ++violations;  // commutativity
      if (!pair[i][j]) {
        ++failures;
        continue;
      }
      if (!ltag::subsumes(u[i], *pair[i][j]) || !ltag::subsumes(u[j], *pair[i][j])) ++violations;  // monotonicity
    }
  }
  std::size_t triples = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        ++triples;
        std::string left = pair[i][j] ? key(ltag::unify(*pair[i][j], u[k])) : "⊥";
        std::string right = pair[j][k] ? key(ltag::unify(u[i], *pair[j][k])) : "⊥";
        if (left != right) ++violations;
      }
    }
  }
  support::RandomStructures rs(20240601);
  const int random_pairs = 100000;
  for (int r = 0; r < random_pairs; ++r) {
    auto a = rs.next(), b = rs.next(), c = rs.next();
    auto ab = ltag::unify(a, b), ba = ltag::unify(b, a);
    if (key(ab) != key(ba)) ++violations;
    if (key(ltag::unify(a, a)) != a.canonical()) ++violations;
    if (key(ltag::unify(a, top)) != a.canonical()) ++violations;
    if (ab && (!ltag::subsumes(a, *ab) || !ltag::subsumes(b, *ab))) ++violations;
    auto bc = ltag::unify(b, c);
    std::string left = ab ? key(ltag::unify(*ab, c)) : "⊥";
    std::string right = bc ? key(ltag::unify(a, *bc)) : "⊥";
    if (left != right) ++violations;
  }
  double secs = seconds_since(t0);
  v.detail = std::to_string(n) + " structures, " + std::to_string(n * n) + " pairs (" + std::to_string(failures) +
             " failing), " + std::to_string(triples) + " triples, " + std::to_string(random_pairs) +
             " random pairs/triples, " + fmt(secs, 1) + " s";
  v.require(n * n >= 10000, "universe has fewer than 10^4 pairs");
  v.require(violations == 0, std::to_string(violations) + " law violations");
  v.require(secs < 30.0, "took " + fmt(secs, 1) + " s");
  return v;
}

Verdict operation_semantics() {
  Verdict v;
  std::size_t subst = 0, adj = 0, passed = 0;
  bool subst_clash = false, foot_clash = false;
  for (const auto& c : support::operation_cases()) {
    (c.op == ltag::Operation::Substitution ? subst : adj)++;
    auto why = support::check_case(c);
    v.require(why.empty(), c.name + ": " + why);
    if (!why.empty()) continue;
    ++passed;
    subst_clash = subst_clash || (c.error == ltag::DerivationError::Kind::TopClash && c.op == ltag::Operation::Substitution);
    foot_clash = foot_clash || c.error == ltag::DerivationError::Kind::FootClash;
  }
  if (v.pass) {
    v.detail = std::to_string(subst) + " substitution and " + std::to_string(adj) + " adjunction cases, " +
               std::to_string(passed) + " as computed by hand";
  }
  v.require(subst >= 5 && adj >= 5, "fewer than 5 cases per operation");
  v.require(subst_clash, "no passing substitution top clash case");
  v.require(foot_clash, "no passing adjunction foot clash case");
  return v;
}

Verdict auxiliary_ordering() {
  Verdict v;
  auto t0 = Clock::now();
  const auto& g = support::grammar("aux").grammar;
  std::vector<std::string> aux = {"should", "have", "been", "being"};
  std::sort(aux.begin(), aux.end());
  const std::vector<std::string> expected = {"should", "have", "been", "being"};
  std::size_t orders = 0, accepted = 0;
  bool right = false;
  do {
    ++orders;
    std::vector<std::string> tokens = {"the", "music"};
    tokens.insert(tokens.end(), aux.begin(), aux.end());
    tokens.push_back("played");
    auto r = ltag::parse(tokens, g);
    bool ok = r && !r->derivations.empty();
    if (ok) {
      // accepted end to end: replay and finalize the derivation independently
      auto d = ltag::replay(r->derivations.front(), g);
      ok = d && ltag::finalize(d->tree).ok();
    }
    if (ok) {
      ++accepted;
      right = right || aux == expected;
    }
  } while (std::next_permutation(aux.begin(), aux.end()));
  double secs = seconds_since(t0);
  v.detail = std::to_string(accepted) + " of " + std::to_string(orders) + " orders accepted (should have been being), " +
             fmt(secs) + " s";
  v.require(orders == 24, "expected 24 orders");
  v.require(accepted == 1 && right, std::to_string(accepted) + " orders accepted");
  v.require(secs < 5.0, "took " + fmt(secs) + " s");
  return v;
}

Verdict metarule_family() {
  Verdict v;
  auto path = support::grammar_dir("toy") / "rules.mr";
  auto rules = ltag::parse_metarules(ltag::read_file(path), path.string());
  auto trees = ltag::load_tree_files(support::grammar_dir("toy"));
  std::vector<std::string> sizes;
  for (const auto* base_id : {"αnx0Vnx1", "αnx0V"}) {
    auto base = std::find_if(trees.trees.begin(), trees.trees.end(), [&](const auto& t) { return t.id == base_id; });
    auto fam = ltag::close_family(*base, rules, {});
    sizes.push_back(std::to_string(fam.members.size()));
    v.require(fam.members.size() == 2, std::string(base_id) + " family has " + std::to_string(fam.members.size()) + " members");
    for (std::size_t i = 1; i < fam.members.size(); ++i) {
      const auto& root = fam.members[i].tree.root;
      const auto& old_root = base->tree.root;
      bool new_root = root.label == "S" && root.children.size() == 2 && root.children[1].label == "S" &&
                      root.children[1].children.size() == old_root.children.size();
      v.require(new_root, fam.members[i].id + " lacks a new S root over the old clause");
      bool wh = !root.children.empty() && root.children[0].label == "NP" &&
                ltag::FeatureStructure::extract(fam.members[i].tree.features, root.children[0].top).atom_at("wh") == "+";
      v.require(wh, fam.members[i].id + " lacks a left NP with [wh=+]");
    }
  }
  const auto& g = support::grammar("toy").grammar;
  std::vector<std::string> counts;
  for (const auto* s : {"Who eats the cake?", "John eats the cake"}) {
    auto r = ltag::parse(ltag::tokenize(s, g), g);
    std::size_t count = r ? r->derivations.size() : 0;
    counts.push_back(std::string("\"") + s + "\" " + std::to_string(count));
    v.require(count == 1, std::string(s) + " has " + std::to_string(count) + " derivations");
  }
  if (v.pass) v.detail = "family sizes " + sizes[0] + "," + sizes[1] + "; " + counts[0] + ", " + counts[1];
  return v;
}

Verdict metarule_termination() {
  Verdict v;
  auto rules = ltag::parse_metarules(ltag::read_file(support::fixture("recursive.mr")), "recursive.mr");
  auto trees = ltag::load_tree_files(support::grammar_dir("toy"));
  std::vector<std::string> parts;
  for (const auto& base : trees.trees) {
    if (base.family.empty()) continue;
    auto t0 = Clock::now();
    auto fam = ltag::close_family(base, rules, {});
    double secs = seconds_since(t0);
    bool bounded = fam.members.size() <= 2;
    bool rejected = !fam.rejected.empty();
    v.require(bounded, base.id + " family grew to " + std::to_string(fam.members.size()));
    v.require(rejected, base.id + ": nothing reported as rejected");
    v.require(secs < 5.0, base.id + " closure took " + fmt(secs) + " s");
    parts.push_back(base.id + " " + std::to_string(fam.members.size()) + " members/" +
                    std::to_string(fam.rejected.size()) + " rejected" +
                    (rejected ? " (" + fam.rejected.front().reason + ")" : ""));
  }
  if (v.pass) {
    for (std::size_t i = 0; i < parts.size(); ++i) v.detail += (i ? "; " : "") + parts[i];
  }
  return v;
}

Verdict oracle_equivalence() {
  Verdict v;
  auto t0 = Clock::now();
  const auto& g = support::grammar("toy").grammar;
  auto st = support::oracle_sweep(g, 5);
  double secs = seconds_since(t0);
  v.detail = std::to_string(st.sentences) + " sentences of length <= 5 over " +
             std::to_string(support::vocabulary(g).size()) + " words, " + std::to_string(st.parsed) + " parsed, " +
             std::to_string(st.derivations) + " derivations, " + std::to_string(st.mismatches.size()) +
             " mismatches, " + fmt(secs, 1) + " s";
  v.require(st.sentences >= 200, "fewer than 200 inputs");
  v.require(st.mismatches.empty(), "first mismatch: " + (st.mismatches.empty() ? "" : st.mismatches.front()));
  v.require(secs < 300.0, "took " + fmt(secs, 1) + " s");
  return v;
}

Verdict pp_ambiguity() {
  Verdict v;
  const auto& g = support::grammar("telescope").grammar;
  auto tokens = support::words("John saw a man through the telescope");
  auto r = ltag::parse(tokens, g);
  std::size_t count = r ? r->derivations.size() : 0;
  v.require(count == 2, std::to_string(count) + " derivations");
  const std::vector<std::vector<std::string>> gold = {
      {"αNXN[John]", "αnx0Vnx1[saw]", "αDXD[a]", "αNXdxN[man]", "βvxPnx[through]", "αDXD[the]", "αNXdxN[telescope]"},
      {"αNXN[John]", "αnx0Vnx1[saw]", "αDXD[a]", "αNXdxN[man]", "βnxPnx[through]", "αDXD[the]", "αNXdxN[telescope]"},
  };
  std::vector<std::string> each;
  for (const auto& assignment : gold) {
    auto one = ltag::parse_with_supertags(tokens, assignment, g);
    std::size_t n = one ? one->derivations.size() : 0;
    each.push_back(std::to_string(n));
    v.require(n == 1, assignment[4] + " assignment gives " + std::to_string(n) + " derivations");
  }
  if (v.pass) v.detail = std::to_string(count) + " derivations; VP-attachment tags " + each[0] + ", NP-attachment tags " + each[1];
  return v;
}

// Highest-scoring tag sequence by enumeration, ties to the lexicographically
// smallest sequence.
std::vector<std::string> exhaustive(const ltag::NGramModel& m, const std::vector<std::string>& words,
                                    const std::vector<std::vector<std::string>>& cands) {
  std::vector<std::string> cur(words.size()), best;
  double best_score = 0.0;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == words.size()) {
      double s = ltag::score_sequence(m, words, cur);
      if (best.empty() || s > best_score || (s == best_score && cur < best)) {
        best = cur;
        best_score = s;
      }
      return;
    }
    for (const auto& t : cands[i]) {
      cur[i] = t;
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  return best;
}

Verdict supertagger_models() {
  Verdict v;
  // Trigram decoding against enumeration on every fixture sentence of up to 5 tokens.
  std::size_t checked = 0, disagreements = 0;
  for (const auto& [name, sentences] : {std::pair<std::string, std::string>{"toy", "toy-train.txt"},
                                        std::pair<std::string, std::string>{"telescope", "telescope-train.txt"}}) {
    const auto& g = support::grammar(name).grammar;
    std::vector<std::pair<std::vector<std::string>, ltag::DerivationNode>> parsed;
    std::vector<std::vector<std::string>> all;
    for (const auto& line : support::lines(ltag::read_file(support::fixture(sentences)))) {
      auto tokens = ltag::tokenize(line, g);
      all.push_back(tokens);
      auto r = ltag::parse(tokens, g);
      if (r && !r->derivations.empty()) parsed.emplace_back(tokens, r->derivations.front());
    }
    auto corpus = ltag::extract_corpus(parsed, g);
    if (!corpus) {
      v.require(false, corpus.error());
      continue;
    }
    auto model = ltag::train_trigram(corpus.value());
    for (const auto& tokens : all) {
      if (tokens.size() > 5) continue;
      auto cands = ltag::candidate_supertags(tokens, g);
      if (!cands) continue;
      ++checked;
      if (ltag::tag(tokens, cands.value(), model) != exhaustive(model, tokens, cands.value())) ++disagreements;
    }
  }
  v.require(checked > 0, "no fixture sentences checked");
  v.require(disagreements == 0, std::to_string(disagreements) + " trigram/enumeration disagreements");

  const auto& g = support::grammar("longdist").grammar;
  auto train = support::longdist_corpus(400, 11);
  auto held_out = support::longdist_corpus(200, 12);
  double tri = ltag::evaluate(ltag::train_trigram(train), held_out, g);
  double dep = ltag::evaluate(ltag::train_dependency(train), held_out, g);
  double gap = (dep - tri) * 100.0;
  v.require(gap >= 10.0, "dependency exceeds trigram by only " + fmt(gap, 1) + " points");
  if (v.pass) {
    v.detail = std::to_string(checked) + " sentences decode to the enumerated maximum; long-distance held-out accuracy " +
               "trigram " + fmt(tri * 100, 1) + "%, dependency " + fmt(dep * 100, 1) + "% (gap " + fmt(gap, 1) + " points)";
  }
  return v;
}

Verdict determinism() {
  Verdict v;
  auto inputs_before = support::snapshot(support::source_dir() / "grammars");
  auto fixtures_before = support::snapshot(support::source_dir() / "tests" / "fixtures");
  auto base = support::scratch("determinism");
  auto first = support::run_pipeline(base / "run1");
  auto second = support::run_pipeline(base / "run2");
  auto a = support::snapshot(base / "run1");
  auto b = support::snapshot(base / "run2");
  std::size_t differing = 0;
  for (const auto& [file, content] : a) {
    auto it = b.find(file);
    if (it == b.end() || it->second != content) {
      ++differing;
      v.require(false, file + " differs");
    }
  }
  v.require(a.size() == b.size(), "runs produced different file sets");
  v.require(first.codes == second.codes, "exit codes differ between runs");
  std::size_t nonzero = 0;
  for (const auto& [step, code] : first.codes) {
    if (code != 0) {
      ++nonzero;
      v.require(false, step + " exited " + std::to_string(code));
    }
  }
  v.require(support::snapshot(support::source_dir() / "grammars") == inputs_before, "grammar files were modified");
  v.require(support::snapshot(support::source_dir() / "tests" / "fixtures") == fixtures_before, "fixtures were modified");
  if (v.pass) {
    v.detail = std::to_string(first.codes.size()) + " subcommand runs, " + std::to_string(a.size()) +
               " output files byte-identical across two runs, inputs unchanged";
  }
  std::filesystem::remove_all(base);
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"unification algebra", unification_algebra},
      {"substitution/adjunction feature outcomes", operation_semantics},
      {"auxiliary ordering", auxiliary_ordering},
      {"subject-wh metarule family", metarule_family},
      {"metarule termination", metarule_termination},
      {"parser/oracle equivalence", oracle_equivalence},
      {"PP-attachment ambiguity", pp_ambiguity},
      {"supertagging models", supertagger_models},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    if (!v.pass) ++failed;
    std::cout << "criterion " << (i + 1) << " " << (v.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << ": "
              << v.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
