#include "searchr/prompts.hpp"

#include <array>
#include <utility>

#include "searchr/prompts_builtin.hpp"
#include "searchr/error.hpp"

namespace searchr {
namespace {

constexpr std::array<std::pair<Role, std::string_view>, 6> kRoleNames{{
    {Role::kDecompose, "decompose"},
    {Role::kRewriteDecision, "rewrite_decision"},
    {Role::kRewrite, "rewrite"},
    {Role::kAnswer, "answer"},
    {Role::kIntegrate, "integrate"},
    {Role::kExtractEntities, "extract_entities"},
}};

bool is_ident_char(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }

}  // namespace

std::string_view role_name(Role role) {
  for (const auto& [r, name] : kRoleNames) {
    if (r == role) return name;
  }
  return "unknown";
}

std::optional<Role> role_from_name(std::string_view name) {
  for (const auto& [r, n] : kRoleNames) {
    if (n == name) return r;
  }
  return std::nullopt;
}

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      std::size_t j = i + 1;
      while (j < tmpl.size() && is_ident_char(tmpl[j])) ++j;
      if (j > i + 1 && j < tmpl.size() && tmpl[j] == '}') {
        const std::string name(tmpl.substr(i + 1, j - i - 1));
        const auto it = vars.find(name);
        if (it == vars.end()) {
          throw ContractViolation("prompt placeholder {" + name + "} is not bound");
        }
        out += it->second;
        i = j + 1;
        continue;
      }
    }
    out += tmpl[i++];
  }
  return out;
}

const PromptSet& PromptSet::builtin() {
  static const PromptSet set = from_json(Json::parse(detail::kBuiltinPromptsJson));
  return set;
}

PromptSet PromptSet::from_json(const Json& doc) {
  if (!doc.is_object() || !doc.contains("templates") || !doc["templates"].is_object()) {
    throw ConfigError("prompt file must be an object with a \"templates\" object");
  }
  PromptSet set;
  set.version_ = doc.value("version", std::string("unversioned"));
  for (const auto& [key, value] : doc["templates"].items()) {
    const auto role = role_from_name(key);
    if (!role) {
      throw ConfigError("prompt file names unknown template '" + key + "'");
    }
    if (!value.is_string() || value.get<std::string>().empty()) {
      throw ConfigError("prompt template '" + key + "' must be a non-empty string");
    }
    set.templates_[*role] = value.get<std::string>();
  }
  return set;
}

PromptSet PromptSet::load(const std::string& path) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError("prompt file '" + path + "': " + e.what());
  }
  return from_json(doc);
}

const std::string& PromptSet::template_for(Role role) const {
  const auto it = templates_.find(role);
  if (it != templates_.end()) {
    return it->second;
  }
  if (this != &builtin()) {
    return builtin().template_for(role);
  }
  throw ConfigError("no prompt template for role '" + std::string(role_name(role)) + "'");
}

std::string PromptSet::render(Role role, const std::map<std::string, std::string>& vars) const {
  return render_template(template_for(role), vars);
}

}  // namespace searchr
