#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "saddle/errors.hpp"

namespace saddle::cli {

// Flat "key = value" text with [section] headers. '#' starts a comment.
// Every key must appear in the schema; missing keys take the schema default.
struct Config {
  std::map<std::string, std::map<std::string, std::string>> values;  // resolved, including defaults
  std::map<std::string, std::map<std::string, int>> lines;           // source line of explicit keys

  std::string str(const std::string& section, const std::string& key) const;
  double real(const std::string& section, const std::string& key) const;
  int integer(const std::string& section, const std::string& key) const;
  std::vector<double> reals(const std::string& section, const std::string& key) const;
  std::vector<std::string> words(const std::string& section, const std::string& key) const;
};

struct SchemaEntry {
  std::string section, key, type, default_value, doc;
};
const std::vector<SchemaEntry>& schema();

// Throws ValidationError with "<origin>:<line>: ..." on malformed input.
Config parse_config(const std::string& text, const std::string& origin = "config");
Config load_config(const std::string& path);

struct RunOptions {
  int threads = 0;          // 0 keeps the config value
  std::uint64_t seed = 0;
  bool seed_set = false;
};

const std::vector<std::string>& subcommands();

// Runs a pipeline and writes its outputs plus summary.json under out_dir.
// Returns 0 on success, 2 on validation errors, 3 on convergence failures.
int run(const std::string& subcommand, const std::string& config_path, const std::string& out_dir,
        const RunOptions& opt = {});

}  // namespace saddle::cli
