#pragma once

#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "searchr/generator.hpp"
#include "searchr/informativeness.hpp"
#include "searchr/jsonl.hpp"
#include "searchr/orchestrator.hpp"

namespace searchr::cli {

/// Resolved settings shared by all subcommands.
///
/// Each field has a config-file key (the field name), an environment
/// variable (SEARCHR_ + upper-cased key) and a flag (--key with '_'
/// replaced by '-'). Precedence is flag > environment > file > default.
/// The API key is read from SEARCHR_API_KEY only.
struct Config {
  std::size_t k_info = 15;
  std::size_t k_sim = 10;
  std::size_t chunk_window = 3;
  std::size_t chunk_stride = 2;
  std::size_t max_steps = 6;
  std::string generator = "stub";  // "stub" or "live"
  std::string stub_script;
  std::string prompts;  // empty: built-in templates
  std::string endpoint;
  std::string model;
  std::string decomposer_model;
  std::string embedding_endpoint;
  std::string embedding_model;
  double temperature = 0.0;
  std::size_t workers = 1;
  std::string granularity = "chunk";  // "chunk" or "document"
  std::optional<std::size_t> context_char_budget;
  int timeout_seconds = 60;
  std::string api_key;

  Granularity table_granularity() const;
  OrchestratorConfig orchestrator() const;
};

/// Keys accepted in the config file, the environment and as flags.
const std::vector<std::string>& config_keys();

using StringMap = std::map<std::string, std::string>;

/// flags: key -> raw value for flags given on the command line.
/// env:   the process environment (only SEARCHR_* entries are read).
/// file:  parsed config file, or nullptr. Unknown keys are rejected.
Config resolve_config(const StringMap& flags, const StringMap& env, const Json* file);

std::unique_ptr<Generator> make_generator(const Config& config);

/// Entry point behind the `searchr` binary. Returns the process exit code:
/// 0 on success, 1 on a user error, 2 on an internal error.
int run(const std::vector<std::string>& args, const StringMap& env, std::ostream& out,
        std::ostream& err);

/// Snapshot of the current process environment.
StringMap process_environment();

}  // namespace searchr::cli
