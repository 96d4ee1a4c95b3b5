#pragma once

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ltag/cli.hpp"
#include "ltag/io.hpp"

namespace support {

inline std::filesystem::path source_dir() { return LTAG_SOURCE_DIR; }
inline std::filesystem::path grammar_dir(const std::string& name) { return source_dir() / "grammars" / name; }
inline std::filesystem::path fixture(const std::string& name) { return source_dir() / "tests" / "fixtures" / name; }
inline std::string binary() { return LTAG_BINARY; }

/// Grammar directories are loaded once per process.
inline const ltag::GrammarDirectory& grammar(const std::string& name) {
  static std::map<std::string, ltag::GrammarDirectory> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, ltag::load_grammar_dir(grammar_dir(name))).first;
  return it->second;
}

inline std::vector<std::string> words(const std::string& s) { return ltag::text::split_ws(s); }

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

inline CliResult cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = ltag::cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

inline std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) {
    if (!l.empty()) out.push_back(l);
  }
  return out;
}

/// Fresh empty directory under the system temp directory.
inline std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("ltag-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace support
