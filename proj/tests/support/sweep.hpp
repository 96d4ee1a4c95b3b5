#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "ltag/grammar.hpp"
#include "ltag/parser.hpp"
#include "oracle/brute_force.hpp"

namespace support {

/// Every word some supertag of `g` is anchored by, sorted.
inline std::vector<std::string> vocabulary(const ltag::Grammar& g) {
  std::set<std::string> words;
  for (const auto& [id, t] : g.supertags()) words.insert(t.words.begin(), t.words.end());
  return {words.begin(), words.end()};
}

/// Calls visit(tokens) for every word sequence of length 1..max_length.
template <class F>
void for_each_sentence(const std::vector<std::string>& vocab, std::size_t max_length, F&& visit) {
  std::vector<std::string> s;
  auto rec = [&](auto&& self, std::size_t length) -> void {
    if (s.size() == length) {
      visit(static_cast<const std::vector<std::string>&>(s));
      return;
    }
    for (const auto& w : vocab) {
      s.push_back(w);
      self(self, length);
      s.pop_back();
    }
  };
  for (std::size_t n = 1; n <= max_length; ++n) rec(rec, n);
}

inline std::set<std::string> parser_set(const ltag::Grammar& g, const std::vector<std::string>& tokens) {
  ltag::ParseOptions options;
  options.max_derivations = 1u << 20;
  options.max_candidates = 1u << 22;
  auto r = ltag::parse(tokens, g, options);
  std::set<std::string> out;
  if (!r) return out;
  for (const auto& d : r->derivations) out.insert(ltag::serialize(d));
  return out;
}

struct SweepStats {
  std::size_t sentences = 0;
  std::size_t parsed = 0;
  std::size_t derivations = 0;
  std::vector<std::string> mismatches;
};

/// Compares parser and oracle derivation sets on every sentence up to
/// `max_length` (or every `stride`-th sentence of the maximal length).
inline SweepStats oracle_sweep(const ltag::Grammar& g, std::size_t max_length, std::size_t stride = 1) {
  SweepStats st;
  auto vocab = vocabulary(g);
  std::size_t index = 0;
  for_each_sentence(vocab, max_length, [&](const std::vector<std::string>& s) {
    if (s.size() == max_length && (index++ % stride) != 0) return;
    ++st.sentences;
    auto got = parser_set(g, s);
    auto want = oracle::derivations(g, s);
    if (!got.empty()) ++st.parsed;
    st.derivations += got.size();
    if (got != want) {
      std::string line;
      for (const auto& w : s) line += (line.empty() ? "" : " ") + w;
      st.mismatches.push_back(line + ": parser " + std::to_string(got.size()) + ", oracle " + std::to_string(want.size()));
    }
  });
  return st;
}

}  // namespace support
