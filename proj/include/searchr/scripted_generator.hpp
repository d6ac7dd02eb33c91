#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "searchr/generator.hpp"

namespace searchr {

/// One scripted reply. A rule fires when its role matches and every
/// matcher it sets holds:
///   question          exact match on the request subject
///   contains          substring of the filled prompt
///   context_contains  substring of one of the context passages
struct ScriptRule {
  Role role = Role::kAnswer;
  std::optional<std::string> question;
  std::optional<std::string> contains;
  std::optional<std::string> context_contains;
  std::string reply;
};

/// Script file:
/// {
///   "unknown_reply": "unknown",
///   "rules": [{"template": "answer", "question": "...", "reply": "..."}],
///   "embeddings": {"<text>": [0.1, ...]}
/// }
struct Script {
  std::vector<ScriptRule> rules;
  std::string unknown_reply = "unknown";
  std::map<std::string, std::vector<double>> embeddings;

  static Script from_json(const Json& doc);
  static Script load(const std::string& path);
};

/// Deterministic offline backend. The first matching rule wins; without
/// one, each role falls back to a fixed rule:
///   decompose         the question itself as the only sub-question
///   rewrite_decision  yes iff history is non-empty and has_anaphor()
///   rewrite           substitute_anaphors() with the latest answer
///   answer            the script's unknown_reply
///   integrate         the latest step's answer
///   extract_entities  no entities
class ScriptedGenerator final : public Generator {
 public:
  explicit ScriptedGenerator(Script script, PromptSet prompts = PromptSet::builtin());

  std::optional<std::vector<double>> embed(std::string_view text) const override;

  const Script& script() const noexcept { return script_; }

 protected:
  std::string complete(const GeneratorRequest& request) const override;

 private:
  Script script_;
};

}  // namespace searchr
