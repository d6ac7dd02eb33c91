#pragma once

#include <atomic>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "searchr/jsonl.hpp"
#include "searchr/prompts.hpp"

namespace searchr {

/// One answered (sub-question, answer) pair of a reasoning chain.
struct HistoryEntry {
  std::string sub_question;
  std::string answer;

  friend bool operator==(const HistoryEntry&, const HistoryEntry&) = default;
};

/// A filled prompt plus the structured inputs it was filled from. Backends
/// only need `filled_prompt`; the scripted stub also matches on `subject`.
struct GeneratorRequest {
  Role role = Role::kAnswer;
  std::string filled_prompt;
  double temperature = 0.0;
  /// The question or sub-question the request is about.
  std::string subject;
  std::vector<HistoryEntry> history;
  std::vector<std::string> context;
};

/// Text-generation backend for every reasoning step. The typed calls render
/// the prompt, send it through complete(), and parse the reply with the
/// role's rule. A reply that fails to parse, or a transport failure, is
/// retried once; the second failure is thrown (ProtocolError carrying the
/// raw text, or TransportError).
///
/// Implementations must make complete() safe to call concurrently.
class Generator {
 public:
  virtual ~Generator() = default;

  /// 1 or more sub-questions, parsed from a JSON array of strings.
  std::vector<std::string> decompose(std::string_view question) const;

  /// Short answer, whitespace trimmed. `context` may be empty.
  std::string answer(std::string_view sub_question, const std::vector<std::string>& context) const;

  bool rewrite_decision(std::string_view sub_question,
                        const std::vector<HistoryEntry>& history) const;

  std::string rewrite(std::string_view sub_question, const std::vector<HistoryEntry>& history) const;

  std::string integrate(std::string_view question, const std::vector<HistoryEntry>& steps) const;

  /// Surface forms of the entities named in `question` (possibly none).
  std::vector<std::string> extract_entities(std::string_view question) const;

  /// Embedding of `text`, when the backend offers one.
  virtual std::optional<std::vector<double>> embed(std::string_view text) const;

  /// Completed calls to complete(), including retries.
  std::size_t request_count() const noexcept { return requests_.load(); }

  const PromptSet& prompts() const noexcept { return prompts_; }
  double temperature() const noexcept { return temperature_; }

 protected:
  explicit Generator(PromptSet prompts = PromptSet::builtin(), double temperature = 0.0);

  virtual std::string complete(const GeneratorRequest& request) const = 0;

 private:
  template <typename Parse>
  auto call(GeneratorRequest request, Parse parse) const;

  PromptSet prompts_;
  double temperature_;
  mutable std::atomic<std::size_t> requests_{0};
};

/// Prompt fragments shared by every backend.
std::string format_history(const std::vector<HistoryEntry>& history);
std::string format_context(const std::vector<std::string>& context);

/// Reply parse rules. Each returns nullopt when the text does not conform.
std::optional<std::vector<std::string>> parse_string_array(std::string_view reply,
                                                           bool allow_empty);
std::optional<bool> parse_yes_no(std::string_view reply);
std::optional<std::string> parse_short_text(std::string_view reply);

/// True when `question` contains a standalone "this", "that", "these", "it",
/// "he", "she" or "they" (case-insensitive).
bool has_anaphor(std::string_view question);

/// Replaces each anaphor phrase ("this <noun>", "that <noun>",
/// "these <noun>" or a bare pronoun) with `answer`, scanning left to right
/// over the original text only.
std::string substitute_anaphors(std::string_view question, std::string_view answer);

}  // namespace searchr
