#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace searchr {

struct AnswerScore {
  double f1 = 0.0;
  double em = 0.0;
  double precision = 0.0;
  double recall = 0.0;

  friend bool operator==(const AnswerScore&, const AnswerScore&) = default;
};

/// Case fold, drop punctuation, drop the articles a/an/the, collapse
/// whitespace.
std::string normalize_answer(std::string_view s);

std::vector<std::string> answer_tokens(std::string_view s);

/// Size of the multiset intersection of the two normalized token bags.
std::size_t token_overlap(std::string_view a, std::string_view b);

/// Token-bag precision/recall/F1 and normalized exact match. Two empty
/// answers score 1 on every field; one empty answer scores 0.
AnswerScore answer_score(std::string_view prediction, std::string_view gold);

struct AggregateScore {
  std::size_t count = 0;
  /// False when there was nothing to average; the means are then 0.
  bool defined = false;
  AnswerScore mean;
};

AggregateScore aggregate(std::span<const AnswerScore> scores);

}  // namespace searchr
