#pragma once

#include <optional>
#include <string>

#include "searchr/generator.hpp"

namespace searchr {

struct HttpGeneratorOptions {
  /// Full chat-completions URL, e.g. http://localhost:8000/v1/chat/completions.
  std::string endpoint;
  std::string model;
  /// Model used for decomposition requests; `model` when empty.
  std::string decomposer_model;
  /// Full embeddings URL; embed() returns nothing when empty.
  std::string embedding_endpoint;
  std::string embedding_model;
  /// Sent as a bearer token when non-empty.
  std::string api_key;
  double temperature = 0.0;
  int timeout_seconds = 60;
};

struct ParsedUrl {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string path;

  /// "scheme://host:port", the form the HTTP client takes.
  std::string origin() const;
};

/// Splits http(s)://host[:port]/path. Throws ConfigError otherwise.
ParsedUrl parse_url(const std::string& url);

/// Live backend speaking the chat-completions wire protocol:
///   request  {"model", "messages": [{"role": "user", "content"}], "temperature"}
///   response {"choices": [{"message": {"content"}}]}
/// Each call opens its own connection, so concurrent use is safe.
class HttpGenerator final : public Generator {
 public:
  explicit HttpGenerator(HttpGeneratorOptions options, PromptSet prompts = PromptSet::builtin());

  std::optional<std::vector<double>> embed(std::string_view text) const override;

  const HttpGeneratorOptions& options() const noexcept { return options_; }

 protected:
  std::string complete(const GeneratorRequest& request) const override;

 private:
  Json post(const ParsedUrl& url, const Json& body) const;

  HttpGeneratorOptions options_;
  ParsedUrl chat_url_;
  std::optional<ParsedUrl> embedding_url_;
};

}  // namespace searchr
