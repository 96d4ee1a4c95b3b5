#pragma once

// Command-line front end. run() never writes to std::cout/std::cerr directly;
// machine output goes to `out`, diagnostics to `err`.
//
// Exit codes: 0 success or parse found, 1 no parse, 2 usage or data error.

#include <CLI11.hpp>

#include <algorithm>
#include <exception>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ltag/derivation.hpp"
#include "ltag/grammar.hpp"
#include "ltag/io.hpp"
#include "ltag/metarule.hpp"
#include "ltag/parser.hpp"
#include "ltag/render.hpp"
#include "ltag/supertagger.hpp"

namespace ltag::cli {

inline constexpr int kOk = 0;
inline constexpr int kNoParse = 1;
inline constexpr int kError = 2;

namespace detail {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::vector<std::string> read_sentences(const std::string& sentence, const std::string& input) {
  if (input.empty()) return {sentence};
  std::vector<std::string> out;
  std::istringstream in(read_file(input));
  for (std::string line; std::getline(in, line);) {
    line = text::trim(line);
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

inline DerivedTree finished(const DerivationNode& d, const Grammar& g) {
  auto derived = replay(d, g);
  if (!derived) throw std::runtime_error(derived.error().describe());
  auto final = finalize(derived->tree);
  if (!final) throw std::runtime_error(final.error().describe());
  DerivedTree out = std::move(derived).value();
  out.tree = std::move(final).value();
  return out;
}

struct ParseArgs {
  std::string grammar, sentence, input, supertags, format = "deriv";
  std::size_t max_derivations = 64;
};

inline int do_parse(const ParseArgs& a, std::ostream& out, std::ostream& err) {
  auto dir = load_grammar_dir(a.grammar);
  const Grammar& g = dir.grammar;
  auto sentences = read_sentences(a.sentence, a.input);
  std::vector<std::vector<std::string>> assignments;
  if (!a.supertags.empty()) {
    std::istringstream in(read_file(a.supertags));
    for (std::string line; std::getline(in, line);) {
      auto ids = text::split_ws(line);
      if (!ids.empty()) assignments.push_back(std::move(ids));
    }
    if (assignments.size() != sentences.size()) {
      throw UsageError("--supertags needs one line of supertag ids per sentence");
    }
  }
  ParseOptions options;
  options.max_derivations = a.max_derivations;
  bool all_parsed = true;
  std::vector<std::pair<std::vector<std::string>, DerivationNode>> corpus;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    auto tokens = tokenize(sentences[s], g);
    auto result = assignments.empty() ? parse(tokens, g, options)
                                      : parse_with_supertags(tokens, assignments[s], g, options);
    if (!result) {
      err << "error: " << result.error().describe() << "\n";
      return kError;
    }
    const auto& ds = result->derivations;
    if (result->statistics.cap_exceeded) err << "warning: derivation enumeration was truncated\n";
    if (ds.empty()) {
      err << "no parse: " << sentences[s] << "\n";
      all_parsed = false;
      continue;
    }
    if (a.format == "deriv") {
      for (const auto& d : ds) out << serialize(d) << "\n";
    } else if (a.format == "tree") {
      for (std::size_t i = 0; i < ds.size(); ++i) {
        if (i) out << "\n";
        out << render_text(finished(ds[i], g).tree);
      }
    } else if (a.format == "graph") {
      for (std::size_t i = 0; i < ds.size(); ++i) out << render_graph(finished(ds[i], g).tree, "parse" + std::to_string(i + 1));
    } else {
      corpus.emplace_back(tokens, ds.front());
    }
  }
  if (a.format == "corpus") {
    auto extracted = extract_corpus(corpus, g);
    if (!extracted) throw std::runtime_error(extracted.error());
    out << write_corpus(extracted.value());
  }
  return all_parsed ? kOk : kNoParse;
}

struct ExpandArgs {
  std::string grammar, rules, base, out;
  int max_apps = LocalityPredicate{}.max_applications_per_rule;
  int depth_slack = LocalityPredicate{}.depth_slack;
};

inline int do_expand(const ExpandArgs& a, std::ostream& out, std::ostream& err) {
  TreeFile trees = load_tree_files(a.grammar);
  auto rules = parse_metarules(read_file(a.rules), a.rules);
  auto base = std::find_if(trees.trees.begin(), trees.trees.end(), [&](const ElementaryTree& t) { return t.id == a.base; });
  if (base == trees.trees.end()) throw UsageError("unknown tree '" + a.base + "'");
  LocalityPredicate p;
  p.max_applications_per_rule = a.max_apps;
  p.depth_slack = a.depth_slack;
  auto closure = close_family(*base, rules, p);
  for (const auto& r : closure.rejected) err << "rejected " << r.str() << "\n";
  std::vector<const ElementaryTree*> members;
  for (const auto& t : closure.members) members.push_back(&t);
  std::string text = write_tree_file(trees.start_symbol, members);
  if (a.out.empty()) {
    out << text;
  } else {
    write_file(a.out, text);
  }
  return kOk;
}

inline int do_validate(const std::string& grammar, std::ostream& out, std::ostream& err) {
  auto dir = load_grammar_dir(grammar);
  const Grammar& g = dir.grammar;
  for (const auto& r : dir.rejected) err << "rejected " << r.str() << "\n";
  for (const auto& d : g.anchoring_diagnostics()) err << "warning: " << d << "\n";
  out << "trees " << g.trees().size() << "\n";
  out << "families " << g.families().size() << "\n";
  out << "entries " << g.entries().size() << "\n";
  out << "supertags " << g.supertags().size() << "\n";
  out << "rules " << dir.rules.size() << "\n";
  out << "rejected " << dir.rejected.size() << "\n";
  return kOk;
}

inline int do_train(const std::string& kind, const std::string& corpus_path, const std::string& out_path,
                    std::ostream& out) {
  auto corpus = parse_corpus(read_file(corpus_path), corpus_path);
  SupertagModel model;
  if (kind == "unigram") {
    model = train_ngram(corpus, 1);
  } else if (kind == "bigram") {
    model = train_ngram(corpus, 2);
  } else if (kind == "trigram") {
    model = train_ngram(corpus, 3);
  } else {
    model = train_dependency(corpus);
  }
  std::string text = write_model(model);
  if (out_path.empty()) {
    out << text;
  } else {
    write_file(out_path, text);
  }
  return kOk;
}

inline int do_supertag(const std::string& model_path, const std::string& grammar, const std::string& sentence,
                       const std::string& input, std::ostream& out, std::ostream& err) {
  auto model = read_model(read_file(model_path), model_path);
  auto dir = load_grammar_dir(grammar);
  auto sentences = read_sentences(sentence, input);
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    auto tokens = tokenize(sentences[s], dir.grammar);
    if (tokens.empty()) throw UsageError("empty sentence");
    auto tags = tag(tokens, model, dir.grammar);
    if (!tags) {
      err << "error: " << tags.error() << "\n";
      return kError;
    }
    if (s) out << "\n";
    for (std::size_t i = 0; i < tokens.size(); ++i) out << tokens[i] << "\t" << tags.value()[i] << "\n";
  }
  return kOk;
}

inline int do_eval(const std::string& model_path, const std::string& gold_path, const std::string& grammar,
                   std::ostream& out) {
  auto model = read_model(read_file(model_path), model_path);
  auto gold = parse_corpus(read_file(gold_path), gold_path);
  auto dir = load_grammar_dir(grammar);
  double acc = evaluate(model, gold, dir.grammar);
  std::size_t n = gold.tokens();
  auto correct = static_cast<std::size_t>(acc * static_cast<double>(n) + 0.5);
  std::ostringstream line;
  line << "accuracy " << std::fixed << std::setprecision(4) << acc << " (" << correct << "/" << n << ")\n";
  out << line.str();
  return kOk;
}

struct RenderArgs {
  std::string grammar, tree, derivation, sentence, target = "derived", format = "text";
};

inline int do_render(const RenderArgs& a, std::ostream& out, std::ostream& err) {
  int given = !a.tree.empty() + !a.derivation.empty() + !a.sentence.empty();
  if (given != 1) throw UsageError("render needs exactly one of --tree, --derivation, --sentence");
  auto dir = load_grammar_dir(a.grammar);
  const Grammar& g = dir.grammar;
  RenderFormat f = a.format == "text" ? RenderFormat::Text : RenderFormat::Graph;
  if (!a.tree.empty()) {
    const ElementaryTree* t = g.supertag(a.tree);
    if (!t) t = g.tree(a.tree);
    if (!t) throw UsageError("unknown tree id '" + a.tree + "'");
    out << (f == RenderFormat::Text ? render_text(t->tree) : render_graph(t->tree, t->id));
    return kOk;
  }
  DerivationNode d;
  if (!a.derivation.empty()) {
    d = parse_derivation(a.derivation);
  } else {
    auto result = parse(tokenize(a.sentence, g), g);
    if (!result) {
      err << "error: " << result.error().describe() << "\n";
      return kError;
    }
    if (result->derivations.empty()) {
      err << "no parse: " << a.sentence << "\n";
      return kNoParse;
    }
    d = result->derivations.front();
  }
  if (a.target == "derivation") {
    out << render(d, f);
  } else {
    out << render(finished(d, g).tree, f);
  }
  return kOk;
}

}  // namespace detail

inline int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feature-based lexicalized TAG toolkit", "ltag"};
  app.require_subcommand(1);

  auto* validate = app.add_subcommand("validate", "Load a grammar directory and report its size");
  std::string validate_grammar;
  validate->add_option("--grammar", validate_grammar, "Grammar directory")->required()->check(CLI::ExistingDirectory);

  auto* parse_cmd = app.add_subcommand("parse", "Parse sentences");
  detail::ParseArgs pa;
  parse_cmd->add_option("--grammar", pa.grammar, "Grammar directory")->required()->check(CLI::ExistingDirectory);
  auto* sent = parse_cmd->add_option("--sentence", pa.sentence, "Sentence to parse");
  auto* input = parse_cmd->add_option("--input", pa.input, "File with one sentence per line")->check(CLI::ExistingFile);
  sent->excludes(input);
  parse_cmd->add_option("--max-derivations", pa.max_derivations, "Upper bound on derivations printed")
      ->check(CLI::PositiveNumber);
  parse_cmd->add_option("--supertags", pa.supertags, "File with one line of supertag ids per sentence")
      ->check(CLI::ExistingFile);
  parse_cmd->add_option("--format", pa.format, "Output format")
      ->check(CLI::IsMember({"deriv", "tree", "graph", "corpus"}));

  auto* expand = app.add_subcommand("expand", "Close a tree family under metarules");
  detail::ExpandArgs ea;
  expand->add_option("--grammar", ea.grammar, "Grammar directory")->required()->check(CLI::ExistingDirectory);
  expand->add_option("--rules", ea.rules, "Metarule file")->required()->check(CLI::ExistingFile);
  expand->add_option("--base", ea.base, "Base tree id")->required();
  expand->add_option("--max-apps", ea.max_apps, "Applications of one rule per derivation chain")
      ->check(CLI::NonNegativeNumber);
  expand->add_option("--depth-slack", ea.depth_slack, "Extra depth allowed over the base tree")
      ->check(CLI::NonNegativeNumber);
  expand->add_option("--out", ea.out, "Output tree file (default: standard output)");

  auto* train = app.add_subcommand("train", "Train a supertagging model");
  std::string train_model, train_corpus, train_out;
  train->add_option("--model", train_model, "Model kind")
      ->required()
      ->check(CLI::IsMember({"unigram", "bigram", "trigram", "dependency"}));
  train->add_option("--corpus", train_corpus, "Training corpus")->required()->check(CLI::ExistingFile);
  train->add_option("--out", train_out, "Model file (default: standard output)");

  auto* supertag = app.add_subcommand("supertag", "Assign one supertag per token");
  std::string st_model, st_grammar, st_sentence, st_input;
  supertag->add_option("--model", st_model, "Model file")->required()->check(CLI::ExistingFile);
  supertag->add_option("--grammar", st_grammar, "Grammar directory")->required()->check(CLI::ExistingDirectory);
  auto* st_sent = supertag->add_option("--sentence", st_sentence, "Sentence to tag");
  auto* st_in = supertag->add_option("--input", st_input, "File with one sentence per line")->check(CLI::ExistingFile);
  st_sent->excludes(st_in);

  auto* eval = app.add_subcommand("eval", "Supertag accuracy against a gold corpus");
  std::string ev_model, ev_gold, ev_grammar;
  eval->add_option("--model", ev_model, "Model file")->required()->check(CLI::ExistingFile);
  eval->add_option("--gold", ev_gold, "Gold corpus")->required()->check(CLI::ExistingFile);
  eval->add_option("--grammar", ev_grammar, "Grammar directory supplying candidate supertags")
      ->required()
      ->check(CLI::ExistingDirectory);

  auto* render_cmd = app.add_subcommand("render", "Render an elementary tree, derivation or derived tree");
  detail::RenderArgs ra;
  render_cmd->add_option("--grammar", ra.grammar, "Grammar directory")->required()->check(CLI::ExistingDirectory);
  render_cmd->add_option("--tree", ra.tree, "Elementary or anchored tree id");
  render_cmd->add_option("--derivation", ra.derivation, "Serialized derivation");
  render_cmd->add_option("--sentence", ra.sentence, "Sentence; its first derivation is rendered");
  render_cmd->add_option("--target", ra.target, "What to draw for a derivation")
      ->check(CLI::IsMember({"derived", "derivation"}));
  render_cmd->add_option("--format", ra.format, "Output format")->check(CLI::IsMember({"text", "graph"}));

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kError;
  }

  try {
    if (*validate) return detail::do_validate(validate_grammar, out, err);
    if (*parse_cmd) {
      if (!*sent && !*input) throw detail::UsageError("parse needs --sentence or --input");
      return detail::do_parse(pa, out, err);
    }
    if (*expand) return detail::do_expand(ea, out, err);
    if (*train) return detail::do_train(train_model, train_corpus, train_out, out);
    if (*supertag) {
      if (!*st_sent && !*st_in) throw detail::UsageError("supertag needs --sentence or --input");
      return detail::do_supertag(st_model, st_grammar, st_sentence, st_input, out, err);
    }
    if (*eval) return detail::do_eval(ev_model, ev_gold, ev_grammar, out);
    if (*render_cmd) return detail::do_render(ra, out, err);
  } catch (const GrammarError& e) {
    for (const auto& m : e.errors()) err << "error: " << m << "\n";
    return kError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(std::move(args), out, err);
}

}  // namespace ltag::cli
