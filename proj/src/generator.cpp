#include "searchr/generator.hpp"

#include <cctype>

#include "searchr/error.hpp"
#include "searchr/text.hpp"

namespace searchr {

Generator::Generator(PromptSet prompts, double temperature)
    : prompts_(std::move(prompts)), temperature_(temperature) {
  if (temperature < 0.0) {
    throw ConfigError("temperature must be >= 0");
  }
}

std::optional<std::vector<double>> Generator::embed(std::string_view) const {
  return std::nullopt;
}

template <typename Parse>
auto Generator::call(GeneratorRequest request, Parse parse) const {
  request.temperature = temperature_;
  std::string last_reply;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string reply;
    try {
      reply = complete(request);
      ++requests_;
    } catch (const TransportError&) {
      ++requests_;
      if (attempt == 1) throw;
      continue;
    } catch (const ProtocolError&) {
      ++requests_;
      if (attempt == 1) throw;
      continue;
    }
    if (auto parsed = parse(reply)) {
      return *std::move(parsed);
    }
    last_reply = std::move(reply);
  }
  throw ProtocolError("generator reply for '" + std::string(role_name(request.role)) +
                          "' did not parse after a retry: " + last_reply.substr(0, 200),
                      last_reply);
}

std::vector<std::string> Generator::decompose(std::string_view question) const {
  if (text::trim(question).empty()) {
    throw ContractViolation("decompose requires a non-empty question");
  }
  GeneratorRequest req;
  req.role = Role::kDecompose;
  req.subject = std::string(question);
  req.filled_prompt = prompts_.render(req.role, {{"question", req.subject}});
  return call(std::move(req), [](std::string_view r) { return parse_string_array(r, false); });
}

std::string Generator::answer(std::string_view sub_question,
                              const std::vector<std::string>& context) const {
  GeneratorRequest req;
  req.role = Role::kAnswer;
  req.subject = std::string(sub_question);
  req.context = context;
  req.filled_prompt = prompts_.render(
      req.role, {{"sub_question", req.subject}, {"context", format_context(context)}});
  return call(std::move(req), parse_short_text);
}

bool Generator::rewrite_decision(std::string_view sub_question,
                                 const std::vector<HistoryEntry>& history) const {
  GeneratorRequest req;
  req.role = Role::kRewriteDecision;
  req.subject = std::string(sub_question);
  req.history = history;
  req.filled_prompt = prompts_.render(
      req.role, {{"sub_question", req.subject}, {"history", format_history(history)}});
  return call(std::move(req), parse_yes_no);
}

std::string Generator::rewrite(std::string_view sub_question,
                               const std::vector<HistoryEntry>& history) const {
  GeneratorRequest req;
  req.role = Role::kRewrite;
  req.subject = std::string(sub_question);
  req.history = history;
  req.filled_prompt = prompts_.render(
      req.role, {{"sub_question", req.subject}, {"history", format_history(history)}});
  return call(std::move(req), parse_short_text);
}

std::string Generator::integrate(std::string_view question,
                                 const std::vector<HistoryEntry>& steps) const {
  GeneratorRequest req;
  req.role = Role::kIntegrate;
  req.subject = std::string(question);
  req.history = steps;
  req.filled_prompt = prompts_.render(
      req.role, {{"question", req.subject}, {"history", format_history(steps)}});
  return call(std::move(req), parse_short_text);
}

std::vector<std::string> Generator::extract_entities(std::string_view question) const {
  GeneratorRequest req;
  req.role = Role::kExtractEntities;
  req.subject = std::string(question);
  req.filled_prompt = prompts_.render(req.role, {{"question", req.subject}});
  return call(std::move(req), [](std::string_view r) { return parse_string_array(r, true); });
}

std::string format_history(const std::vector<HistoryEntry>& history) {
  if (history.empty()) {
    return "(none)";
  }
  std::string out;
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (i > 0) out += '\n';
    out += std::to_string(i + 1) + ". Q: " + history[i].sub_question + "\n   A: " +
           history[i].answer;
  }
  return out;
}

std::string format_context(const std::vector<std::string>& context) {
  if (context.empty()) {
    return "(none)";
  }
  std::string out;
  for (std::size_t i = 0; i < context.size(); ++i) {
    if (i > 0) out += "\n\n";
    out += "[" + std::to_string(i + 1) + "] " + context[i];
  }
  return out;
}

std::optional<std::vector<std::string>> parse_string_array(std::string_view reply,
                                                           bool allow_empty) {
  const std::size_t open = reply.find('[');
  const std::size_t close = reply.rfind(']');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    return std::nullopt;
  }
  const Json arr = Json::parse(reply.substr(open, close - open + 1), nullptr, false);
  if (arr.is_discarded() || !arr.is_array()) {
    return std::nullopt;
  }
  std::vector<std::string> out;
  for (const Json& item : arr) {
    if (!item.is_string()) {
      return std::nullopt;
    }
    std::string s = text::trim(item.get<std::string>());
    if (s.empty()) {
      return std::nullopt;
    }
    out.push_back(std::move(s));
  }
  if (out.empty() && !allow_empty) {
    return std::nullopt;
  }
  return out;
}

std::optional<bool> parse_yes_no(std::string_view reply) {
  std::string word;
  for (char c : reply) {
    const auto uc = static_cast<unsigned char>(c);
    if (std::isalpha(uc)) {
      word += static_cast<char>(std::tolower(uc));
    } else if (!word.empty()) {
      break;
    }
  }
  if (word == "yes") return true;
  if (word == "no") return false;
  return std::nullopt;
}

std::optional<std::string> parse_short_text(std::string_view reply) {
  std::string s = text::trim(reply);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    s = text::trim(std::string_view(s).substr(1, s.size() - 2));
  }
  if (s.empty()) {
    return std::nullopt;
  }
  return s;
}

namespace {

struct WordSpan {
  std::size_t begin;
  std::size_t end;
  std::string lower;
};

bool is_word_byte(char c) {
  const auto uc = static_cast<unsigned char>(c);
  return std::isalnum(uc) || uc >= 0x80;
}

std::vector<WordSpan> words_of(std::string_view s) {
  std::vector<WordSpan> words;
  std::size_t i = 0;
  while (i < s.size()) {
    if (!is_word_byte(s[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    std::string lower;
    while (j < s.size() && is_word_byte(s[j])) {
      lower += static_cast<char>(std::tolower(static_cast<unsigned char>(s[j])));
      ++j;
    }
    words.push_back({i, j, std::move(lower)});
    i = j;
  }
  return words;
}

bool is_determiner_anaphor(std::string_view w) {
  return w == "this" || w == "that" || w == "these";
}

bool is_pronoun_anaphor(std::string_view w) {
  return w == "it" || w == "he" || w == "she" || w == "they";
}

}  // namespace

bool has_anaphor(std::string_view question) {
  for (const WordSpan& w : words_of(question)) {
    if (is_determiner_anaphor(w.lower) || is_pronoun_anaphor(w.lower)) {
      return true;
    }
  }
  return false;
}

std::string substitute_anaphors(std::string_view question, std::string_view answer) {
  const auto words = words_of(question);
  std::string out;
  std::size_t copied = 0;
  for (std::size_t k = 0; k < words.size(); ++k) {
    const WordSpan& w = words[k];
    std::size_t end = 0;
    if (is_determiner_anaphor(w.lower)) {
      end = w.end;
      // "this producer": the determiner takes the following word with it
      // when only spaces separate them.
      if (k + 1 < words.size()) {
        const WordSpan& next = words[k + 1];
        const std::string_view gap = question.substr(w.end, next.begin - w.end);
        if (!gap.empty() && gap.find_first_not_of(' ') == std::string_view::npos) {
          end = next.end;
          ++k;
        }
      }
    } else if (is_pronoun_anaphor(w.lower)) {
      end = w.end;
    } else {
      continue;
    }
    out.append(question.substr(copied, w.begin - copied));
    out.append(answer);
    copied = end;
  }
  out.append(question.substr(copied));
  return out;
}

}  // namespace searchr
