#include "searchr/metrics.hpp"

#include <algorithm>
#include <map>

#include "searchr/text.hpp"

namespace searchr {

std::string normalize_answer(std::string_view s) {
  std::string no_punct;
  for (char32_t cp : text::decode_utf8(text::case_fold(s))) {
    if (!text::is_punct(cp)) {
      text::append_utf8(no_punct, cp);
    }
  }
  std::string out;
  for (const std::string& tok : text::split_whitespace(no_punct)) {
    if (tok == "a" || tok == "an" || tok == "the") {
      continue;
    }
    if (!out.empty()) {
      out += ' ';
    }
    out += tok;
  }
  return out;
}

std::vector<std::string> answer_tokens(std::string_view s) {
  return text::split_whitespace(normalize_answer(s));
}

namespace {

std::size_t overlap_of(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::map<std::string_view, std::size_t> counts;
  for (const std::string& t : a) ++counts[t];
  std::size_t common = 0;
  for (const std::string& t : b) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  return common;
}

}  // namespace

std::size_t token_overlap(std::string_view a, std::string_view b) {
  return overlap_of(answer_tokens(a), answer_tokens(b));
}

AnswerScore answer_score(std::string_view prediction, std::string_view gold) {
  const auto pred = answer_tokens(prediction);
  const auto ref = answer_tokens(gold);
  AnswerScore score;
  score.em = (normalize_answer(prediction) == normalize_answer(gold)) ? 1.0 : 0.0;
  if (pred.empty() || ref.empty()) {
    const double v = (pred.empty() && ref.empty()) ? 1.0 : 0.0;
    score.f1 = score.precision = score.recall = v;
    score.em = v;
    return score;
  }
  const std::size_t common = overlap_of(pred, ref);
  if (common == 0) {
    return score;
  }
  score.precision = static_cast<double>(common) / static_cast<double>(pred.size());
  score.recall = static_cast<double>(common) / static_cast<double>(ref.size());
  score.f1 = 2.0 * score.precision * score.recall / (score.precision + score.recall);
  return score;
}

AggregateScore aggregate(std::span<const AnswerScore> scores) {
  AggregateScore agg;
  agg.count = scores.size();
  if (scores.empty()) {
    return agg;
  }
  agg.defined = true;
  for (const AnswerScore& s : scores) {
    agg.mean.f1 += s.f1;
    agg.mean.em += s.em;
    agg.mean.precision += s.precision;
    agg.mean.recall += s.recall;
  }
  const auto n = static_cast<double>(scores.size());
  agg.mean.f1 /= n;
  agg.mean.em /= n;
  agg.mean.precision /= n;
  agg.mean.recall /= n;
  return agg;
}

}  // namespace searchr
