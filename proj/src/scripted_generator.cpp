#include "searchr/scripted_generator.hpp"

#include "searchr/error.hpp"

namespace searchr {

Script Script::from_json(const Json& doc) {
  if (!doc.is_object()) {
    throw ConfigError("stub script must be a JSON object");
  }
  Script script;
  if (doc.contains("unknown_reply")) {
    if (!doc["unknown_reply"].is_string()) {
      throw ConfigError("stub script: unknown_reply must be a string");
    }
    script.unknown_reply = doc["unknown_reply"].get<std::string>();
  }
  if (doc.contains("rules")) {
    const Json& rules = doc["rules"];
    if (!rules.is_array()) {
      throw ConfigError("stub script: rules must be an array");
    }
    for (std::size_t i = 0; i < rules.size(); ++i) {
      const Json& r = rules[i];
      const std::string where = "stub script rule " + std::to_string(i);
      if (!r.is_object() || !r.contains("template") || !r["template"].is_string() ||
          !r.contains("reply") || !r["reply"].is_string()) {
        throw ConfigError(where + ": needs string fields 'template' and 'reply'");
      }
      const auto role = role_from_name(r["template"].get<std::string>());
      if (!role) {
        throw ConfigError(where + ": unknown template '" + r["template"].get<std::string>() + "'");
      }
      ScriptRule rule;
      rule.role = *role;
      rule.reply = r["reply"].get<std::string>();
      for (const char* key : {"question", "contains", "context_contains"}) {
        if (!r.contains(key)) continue;
        if (!r[key].is_string()) {
          throw ConfigError(where + ": '" + key + "' must be a string");
        }
        std::string v = r[key].get<std::string>();
        if (std::string_view(key) == "question") rule.question = std::move(v);
        else if (std::string_view(key) == "contains") rule.contains = std::move(v);
        else rule.context_contains = std::move(v);
      }
      script.rules.push_back(std::move(rule));
    }
  }
  if (doc.contains("embeddings")) {
    const Json& emb = doc["embeddings"];
    if (!emb.is_object()) {
      throw ConfigError("stub script: embeddings must be an object");
    }
    for (const auto& [text, vec] : emb.items()) {
      if (!vec.is_array() || vec.empty()) {
        throw ConfigError("stub script: embedding for '" + text + "' must be a non-empty array");
      }
      std::vector<double> v;
      for (const Json& x : vec) {
        if (!x.is_number()) {
          throw ConfigError("stub script: embedding for '" + text + "' must hold numbers");
        }
        v.push_back(x.get<double>());
      }
      script.embeddings.emplace(text, std::move(v));
    }
  }
  return script;
}

Script Script::load(const std::string& path) {
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw ConfigError("stub script '" + path + "': " + e.what());
  }
  return from_json(doc);
}

ScriptedGenerator::ScriptedGenerator(Script script, PromptSet prompts)
    : Generator(std::move(prompts), 0.0), script_(std::move(script)) {}

std::optional<std::vector<double>> ScriptedGenerator::embed(std::string_view text) const {
  const auto it = script_.embeddings.find(std::string(text));
  if (it == script_.embeddings.end()) {
    return std::nullopt;
  }
  return it->second;
}

namespace {

bool rule_matches(const ScriptRule& rule, const GeneratorRequest& req) {
  if (rule.role != req.role) return false;
  if (rule.question && *rule.question != req.subject) return false;
  if (rule.contains && req.filled_prompt.find(*rule.contains) == std::string::npos) return false;
  if (rule.context_contains) {
    bool found = false;
    for (const std::string& passage : req.context) {
      if (passage.find(*rule.context_contains) != std::string::npos) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

std::string ScriptedGenerator::complete(const GeneratorRequest& req) const {
  for (const ScriptRule& rule : script_.rules) {
    if (rule_matches(rule, req)) {
      return rule.reply;
    }
  }
  switch (req.role) {
    case Role::kDecompose:
      return Json::array({req.subject}).dump();
    case Role::kRewriteDecision:
      return (!req.history.empty() && has_anaphor(req.subject)) ? "Yes" : "No";
    case Role::kRewrite:
      if (req.history.empty()) {
        return req.subject;
      }
      return substitute_anaphors(req.subject, req.history.back().answer);
    case Role::kAnswer:
      return script_.unknown_reply;
    case Role::kIntegrate:
      return req.history.empty() ? script_.unknown_reply : req.history.back().answer;
    case Role::kExtractEntities:
      return "[]";
  }
  return script_.unknown_reply;
}

}  // namespace searchr
