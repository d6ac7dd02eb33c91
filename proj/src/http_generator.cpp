#include "searchr/http_generator.hpp"

#include "httplib.h"
#include "searchr/error.hpp"

namespace searchr {

std::string ParsedUrl::origin() const {
  return scheme + "://" + host + ":" + std::to_string(port);
}

ParsedUrl parse_url(const std::string& url) {
  ParsedUrl out;
  const std::size_t sep = url.find("://");
  if (sep == std::string::npos) {
    throw ConfigError("URL '" + url + "' has no scheme");
  }
  out.scheme = url.substr(0, sep);
  if (out.scheme != "http" && out.scheme != "https") {
    throw ConfigError("URL '" + url + "' must use http or https");
  }
  const std::string rest = url.substr(sep + 3);
  const std::size_t slash = rest.find('/');
  const std::string authority = rest.substr(0, slash);
  out.path = slash == std::string::npos ? "/" : rest.substr(slash);
  const std::size_t colon = authority.rfind(':');
  if (colon != std::string::npos && authority.find(']') == std::string::npos) {
    out.host = authority.substr(0, colon);
    try {
      std::size_t used = 0;
      out.port = std::stoi(authority.substr(colon + 1), &used);
      if (used != authority.size() - colon - 1 || out.port <= 0 || out.port > 65535) {
        throw std::invalid_argument("port");
      }
    } catch (const std::logic_error&) {
      throw ConfigError("URL '" + url + "' has an invalid port");
    }
  } else {
    out.host = authority;
    out.port = out.scheme == "https" ? 443 : 80;
  }
  if (out.host.empty()) {
    throw ConfigError("URL '" + url + "' has no host");
  }
  return out;
}

HttpGenerator::HttpGenerator(HttpGeneratorOptions options, PromptSet prompts)
    : Generator(std::move(prompts), options.temperature), options_(std::move(options)) {
  if (options_.endpoint.empty()) {
    throw ConfigError("live generator needs an endpoint URL");
  }
  if (options_.model.empty()) {
    throw ConfigError("live generator needs a model name");
  }
  chat_url_ = parse_url(options_.endpoint);
  if (!options_.embedding_endpoint.empty()) {
    embedding_url_ = parse_url(options_.embedding_endpoint);
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (chat_url_.scheme == "https" || (embedding_url_ && embedding_url_->scheme == "https")) {
    throw ConfigError("this build has no TLS support; use an http:// endpoint");
  }
#endif
}

Json HttpGenerator::post(const ParsedUrl& url, const Json& body) const {
  httplib::Client client(url.origin());
  client.set_connection_timeout(options_.timeout_seconds, 0);
  client.set_read_timeout(options_.timeout_seconds, 0);
  client.set_write_timeout(options_.timeout_seconds, 0);
  httplib::Headers headers;
  if (!options_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + options_.api_key);
  }
  const auto res = client.Post(url.path, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError("request to " + url.origin() + url.path +
                         " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw TransportError("request to " + url.origin() + url.path + " returned HTTP " +
                         std::to_string(res->status));
  }
  Json reply = Json::parse(res->body, nullptr, false);
  if (reply.is_discarded()) {
    throw ProtocolError("backend returned a non-JSON body", res->body);
  }
  return reply;
}

std::string HttpGenerator::complete(const GeneratorRequest& request) const {
  const std::string& model = (request.role == Role::kDecompose && !options_.decomposer_model.empty())
                                 ? options_.decomposer_model
                                 : options_.model;
  const Json body{{"model", model},
                  {"messages", Json::array({{{"role", "user"}, {"content", request.filled_prompt}}})},
                  {"temperature", request.temperature}};
  const Json reply = post(chat_url_, body);
  const Json* content = nullptr;
  if (reply.contains("choices") && reply["choices"].is_array() && !reply["choices"].empty()) {
    const Json& choice = reply["choices"][0];
    if (choice.contains("message") && choice["message"].contains("content") &&
        choice["message"]["content"].is_string()) {
      content = &choice["message"]["content"];
    }
  }
  if (content == nullptr) {
    throw ProtocolError("backend reply has no choices[0].message.content", reply.dump());
  }
  return content->get<std::string>();
}

std::optional<std::vector<double>> HttpGenerator::embed(std::string_view text) const {
  if (!embedding_url_) {
    return std::nullopt;
  }
  const Json body{{"model", options_.embedding_model.empty() ? options_.model
                                                             : options_.embedding_model},
                  {"input", std::string(text)}};
  const Json reply = post(*embedding_url_, body);
  if (!reply.contains("data") || !reply["data"].is_array() || reply["data"].empty() ||
      !reply["data"][0].contains("embedding") || !reply["data"][0]["embedding"].is_array()) {
    throw ProtocolError("embedding reply has no data[0].embedding", reply.dump());
  }
  std::vector<double> v;
  for (const Json& x : reply["data"][0]["embedding"]) {
    if (!x.is_number()) {
      throw ProtocolError("embedding reply holds a non-number", reply.dump());
    }
    v.push_back(x.get<double>());
  }
  return v;
}

}  // namespace searchr
