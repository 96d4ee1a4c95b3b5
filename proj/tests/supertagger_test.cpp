#include <gtest/gtest.h>

#include <cmath>

#include "ltag/io.hpp"
#include "ltag/parser.hpp"
#include "ltag/supertagger.hpp"
#include "support/common.hpp"
#include "support/longdist.hpp"

using namespace ltag;

namespace {

// a/A b/B and a/A a/B, each B headed by the A before it.
TaggedCorpus tiny() {
  return {{
      {{"a", "A", 0}, {"b", "B", 1}},
      {{"a", "A", 0}, {"a", "B", 1}},
  }};
}

// Best sequence by trying every assignment; ties go to the smaller sequence.
template <class Model>
std::vector<std::string> brute_force(const Model& m, const std::vector<std::string>& words,
                                     const std::vector<std::vector<std::string>>& cands) {
  std::vector<std::string> cur(words.size()), best;
  double best_score = 0.0;
  auto rec = [&](auto&& self, std::size_t i) -> void {
    if (i == words.size()) {
      double s = score_sequence(m, words, cur);
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

TaggedCorpus fixture_corpus(const std::string& grammar, const std::string& file,
                            std::vector<std::vector<std::string>>* sentences = nullptr) {
  const auto& g = support::grammar(grammar).grammar;
  std::vector<std::pair<std::vector<std::string>, DerivationNode>> parsed;
  for (const auto& line : support::lines(read_file(support::fixture(file)))) {
    auto tokens = tokenize(line, g);
    if (sentences) sentences->push_back(tokens);
    auto r = parse(tokens, g);
    if (r && !r->derivations.empty()) parsed.emplace_back(tokens, r->derivations.front());
  }
  return extract_corpus(parsed, g).value();
}

}  // namespace

TEST(Corpus, RoundTrip) {
  auto c = tiny();
  auto text = write_corpus(c);
  EXPECT_EQ(text, "a\tA\t0\nb\tB\t1\n\na\tA\t0\na\tB\t1\n");
  EXPECT_EQ(parse_corpus(text), c);
  EXPECT_EQ(c.tokens(), 4u);
}

TEST(Corpus, CommentsAndBlankRuns) {
  auto c = parse_corpus("% header\n\n\na\tA\t0\n\n\n\nb\tB\t0\n");
  EXPECT_EQ(c.sentences.size(), 2u);
}

TEST(Corpus, Errors) {
  EXPECT_THROW(parse_corpus("a A 0\n"), SyntaxError);
  EXPECT_THROW(parse_corpus("a\tA\tx\n"), SyntaxError);
  EXPECT_THROW(parse_corpus("a\tA\t3\n"), SyntaxError);
  EXPECT_THROW(parse_corpus("a\tA\t2\nb\tB\t1\n"), SyntaxError);
  try {
    parse_corpus("a\tA\t0\n\nb\tB\t0\nc\tC\t9\n", "gold.txt");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST(Corpus, HeadsMustFormOneTree) {
  EXPECT_EQ(check_heads({{"a", "A", 0}, {"b", "B", 1}}), "");
  EXPECT_NE(check_heads({{"a", "A", 1}}), "");
  EXPECT_NE(check_heads({{"a", "A", 2}, {"b", "B", 1}}), "");
}

TEST(Corpus, ExtractedFromDerivation) {
  const auto& g = support::grammar("toy").grammar;
  auto tokens = support::words("John eats the cake");
  auto d = parse(tokens, g).value().derivations.at(0);
  auto c = extract_corpus({{tokens, d}}, g);
  ASSERT_TRUE(c) << c.error();
  TaggedSentence want = {{"John", "αNXN[John]", 2}, {"eats", "αnx0Vnx1[eats]", 0}, {"the", "αDXD[the]", 4},
                         {"cake", "αNXdxN[cake]", 2}};
  EXPECT_EQ(c->sentences.at(0), want);
}

TEST(Corpus, ExtractRejectsMismatchedYield) {
  const auto& g = support::grammar("toy").grammar;
  auto d = parse(support::words("John sleeps"), g).value().derivations.at(0);
  EXPECT_FALSE(extract_corpus({{support::words("Mary sleeps"), d}}, g));
}

TEST(NGram, HandComputedUnigram) {
  auto m = train_unigram(tiny());
  EXPECT_DOUBLE_EQ(m.tag_given_word("A", "a"), 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(m.tag_given_word("B", "a"), 2.0 / 5.0);
  EXPECT_DOUBLE_EQ(m.tag_given_word("A", "b"), 1.0 / 3.0);
  EXPECT_DOUBLE_EQ(m.tag_given_word("A", "zzz"), 1.0 / 2.0);
  EXPECT_EQ(tag({"a", "b"}, {{"A", "B"}, {"A", "B"}}, m), (std::vector<std::string>{"A", "B"}));
}

TEST(NGram, HandComputedBigram) {
  auto m = train_ngram(tiny(), 2);
  EXPECT_DOUBLE_EQ(m.word_given_tag("a", "A"), 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(m.word_given_tag("b", "B"), 2.0 / 5.0);
  EXPECT_DOUBLE_EQ(m.transition({"<s>"}, "A"), 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(m.transition({"A"}, "A"), 1.0 / 5.0);
  EXPECT_DOUBLE_EQ(m.transition({"B"}, "</s>"), 3.0 / 5.0);
  EXPECT_NEAR(score_sequence(m, {"a", "b"}, {"A", "B"}), std::log(162.0 / 3125.0), 1e-12);
}

TEST(NGram, HandComputedTrigramContext) {
  auto m = train_trigram(tiny());
  EXPECT_DOUBLE_EQ(m.transition({"<s>", "<s>"}, "A"), 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(m.transition({"<s>", "A"}, "B"), 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(m.transition({"A", "B"}, "</s>"), 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(m.transition({"B", "A"}, "B"), 1.0 / 3.0);
}

TEST(Dependency, HandComputed) {
  auto m = train_dependency(tiny());
  EXPECT_EQ(m.max_distance, 1);
  EXPECT_DOUBLE_EQ(m.dependent("A", "B", 1), 3.0 / 6.0);
  EXPECT_DOUBLE_EQ(m.dependent("A", "B", -1), 1.0 / 6.0);
  EXPECT_DOUBLE_EQ(m.dependent("B", "A", 1), 1.0 / 4.0);
  EXPECT_DOUBLE_EQ(m.root("A"), 3.0 / 4.0);
  EXPECT_DOUBLE_EQ(m.root("B"), 1.0 / 4.0);
  EXPECT_NEAR(score_sequence(m, {"a", "b"}, {"A", "B"}), std::log(0.6 * 0.75 * (2.0 / 3.0) * 0.5), 1e-12);
}

TEST(Training, Errors) {
  EXPECT_THROW(train_trigram({}), SupertagError);
  EXPECT_THROW(train_dependency({}), SupertagError);
  EXPECT_THROW(train_ngram(tiny(), 4), SupertagError);
  EXPECT_THROW(train_ngram({{{}}}, 2), SupertagError);
}

TEST(Model, RoundTripPreservesEveryModel) {
  auto c = fixture_corpus("toy", "toy-train.txt");
  std::vector<SupertagModel> models = {train_unigram(c), train_ngram(c, 2), train_trigram(c), train_dependency(c)};
  for (const auto& m : models) {
    auto text = write_model(m);
    auto back = read_model(text);
    EXPECT_EQ(model_kind(back), model_kind(m));
    EXPECT_EQ(write_model(back), text) << model_kind(m);
    EXPECT_EQ(text.rfind("model " + model_kind(m) + " v1\n", 0), 0u);
  }
}

TEST(Model, ReadErrors) {
  EXPECT_THROW(read_model("model quadgram v1\n"), SyntaxError);
  EXPECT_THROW(read_model(""), SyntaxError);
  EXPECT_THROW(read_model("model bigram v1\nbogus\trow\n"), SyntaxError);
}

TEST(Decoding, TrigramMatchesExhaustiveSearchOnFixtures) {
  for (const auto& [grammar, file] : {std::pair<std::string, std::string>{"toy", "toy-train.txt"},
                                      std::pair<std::string, std::string>{"telescope", "telescope-train.txt"}}) {
    const auto& g = support::grammar(grammar).grammar;
    std::vector<std::vector<std::string>> sentences;
    auto c = fixture_corpus(grammar, file, &sentences);
    auto tri = train_trigram(c);
    auto bi = train_ngram(c, 2);
    std::size_t checked = 0;
    for (const auto& s : sentences) {
      if (s.size() > 6) continue;
      auto cands = candidate_supertags(s, g).value();
      EXPECT_EQ(tag(s, cands, tri), brute_force(tri, s, cands));
      EXPECT_EQ(tag(s, cands, bi), brute_force(bi, s, cands));
      ++checked;
    }
    EXPECT_GT(checked, 0u);
  }
}

TEST(Decoding, DependencyBeamFindsExhaustiveBestOnShortSentences) {
  auto c = fixture_corpus("toy", "toy-train.txt");
  const auto& g = support::grammar("toy").grammar;
  auto m = train_dependency(c);
  for (const auto* s : {"John sleeps", "John eats the cake", "Mary thinks that John sleeps"}) {
    auto words = support::words(s);
    auto cands = candidate_supertags(words, g).value();
    EXPECT_EQ(tag(words, cands, m), brute_force(m, words, cands)) << s;
  }
}

TEST(Decoding, CandidatesComeFromGrammar) {
  const auto& g = support::grammar("toy").grammar;
  auto c = candidate_supertags(support::words("thinks"), g).value();
  EXPECT_TRUE(std::is_sorted(c[0].begin(), c[0].end()));
  EXPECT_GE(c[0].size(), 3u);
  EXPECT_FALSE(candidate_supertags(support::words("John eats pie"), g));
  auto m = train_trigram(fixture_corpus("toy", "toy-train.txt"));
  EXPECT_FALSE(tag(support::words("John eats pie"), m, g));
}

TEST(Evaluation, UntaggableSentencesCountAsWrong) {
  const auto& g = support::grammar("toy").grammar;
  auto c = fixture_corpus("toy", "toy-train.txt");
  auto m = train_unigram(c);
  TaggedCorpus gold = {{c.sentences.at(0), {{"pie", "αNXN[pie]", 0}}}};
  double acc = evaluate(m, gold, g);
  double own = evaluate(m, TaggedCorpus{{c.sentences.at(0)}}, g);
  EXPECT_DOUBLE_EQ(acc, own * 4.0 / 5.0);
}

TEST(Evaluation, DependencyModelWinsOnLongDistanceCorpus) {
  const auto& g = support::grammar("longdist").grammar;
  auto train = support::longdist_corpus(300, 21);
  auto held_out = support::longdist_corpus(100, 22);
  double tri = evaluate(train_trigram(train), held_out, g);
  double dep = evaluate(train_dependency(train), held_out, g);
  EXPECT_GE(dep - tri, 0.10) << "trigram " << tri << ", dependency " << dep;
  EXPECT_GT(dep, 0.95);
}
