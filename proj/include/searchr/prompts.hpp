#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "searchr/jsonl.hpp"

namespace searchr {

/// The generator calls the engine makes; each has its own prompt template
/// and reply parse rule.
enum class Role {
  kDecompose,
  kRewriteDecision,
  kRewrite,
  kAnswer,
  kIntegrate,
  kExtractEntities,
};

std::string_view role_name(Role role);
std::optional<Role> role_from_name(std::string_view name);

/// A versioned set of prompt templates. Placeholders are `{name}` with a
/// lower-case identifier; render() requires every placeholder to be bound.
class PromptSet {
 public:
  /// The templates shipped in prompts/prompts.v1.json, compiled in.
  static const PromptSet& builtin();

  /// `{"version": "...", "templates": {"<role>": "<template>", ...}}`.
  /// Roles missing from the document fall back to the built-in template.
  static PromptSet from_json(const Json& doc);
  static PromptSet load(const std::string& path);

  const std::string& version() const noexcept { return version_; }
  const std::string& template_for(Role role) const;

  std::string render(Role role, const std::map<std::string, std::string>& vars) const;

 private:
  std::string version_;
  std::map<Role, std::string> templates_;
};

/// Substitutes `{name}` placeholders in one template string. Throws
/// ContractViolation for an unbound placeholder; unused bindings are fine.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars);

}  // namespace searchr
