#include "searchr/informativeness.hpp"

#include <algorithm>

#include "searchr/error.hpp"
#include "searchr/text.hpp"

namespace searchr {

InformativenessTable::InformativenessTable(std::string unit_id, std::vector<RankedEntity> ranked)
    : unit_id_(std::move(unit_id)), ranked_(std::move(ranked)) {
  for (const RankedEntity& e : ranked_) {
    rank_by_entity_.emplace(e.entity, e.rank);
  }
}

int InformativenessTable::rank_of(std::string_view entity) const {
  const auto it = rank_by_entity_.find(entity);
  return it == rank_by_entity_.end() ? 0 : it->second;
}

QuestionEntities QuestionEntities::from_surfaces(const std::vector<std::string>& surfaces) {
  QuestionEntities q;
  for (const std::string& s : surfaces) {
    std::string n = text::normalize_entity(s);
    if (!n.empty()) {
      q.entities.insert(std::move(n));
    }
  }
  return q;
}

namespace {

// Per-entity importance over a sentence range: for each sentence keep the
// maximum descendant count over all mention tokens, then sum the maxima.
std::map<std::string, long long> importances_in(const Document& doc, SentenceRange range) {
  std::map<std::pair<std::string, std::size_t>, int> per_sentence;
  for (const EntityOccurrence& occ : doc.entity_occurrences) {
    if (!range.contains(occ.sentence)) {
      continue;
    }
    const DependencyTree& tree = doc.sentences[occ.sentence];
    int best = 0;
    for (std::size_t t = occ.start; t < occ.end; ++t) {
      best = std::max(best, tree.descendant_count(static_cast<int>(t + 1)));
    }
    auto [it, inserted] = per_sentence.try_emplace({occ.normalized, occ.sentence}, best);
    if (!inserted) {
      it->second = std::max(it->second, best);
    }
  }
  std::map<std::string, long long> totals;
  for (const auto& [key, best] : per_sentence) {
    totals[key.first] += best;
  }
  return totals;
}

}  // namespace

long long entity_importance(const Document& doc, SentenceRange range, std::string_view entity) {
  long long total = 0;
  std::map<std::size_t, int> best_by_sentence;
  for (const EntityOccurrence& occ : doc.entity_occurrences) {
    if (occ.normalized != entity || !range.contains(occ.sentence)) {
      continue;
    }
    const DependencyTree& tree = doc.sentences[occ.sentence];
    int& best = best_by_sentence[occ.sentence];
    for (std::size_t t = occ.start; t < occ.end; ++t) {
      best = std::max(best, tree.descendant_count(static_cast<int>(t + 1)));
    }
  }
  for (const auto& [sentence, best] : best_by_sentence) {
    total += best;
  }
  return total;
}

InformativenessTable rank_entities(std::string unit_id,
                                   std::vector<std::pair<std::string, long long>> importances) {
  std::sort(importances.begin(), importances.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) {
      return a.second > b.second;
    }
    return a.first < b.first;
  });
  std::vector<RankedEntity> ranked;
  ranked.reserve(importances.size());
  for (std::size_t i = 0; i < importances.size(); ++i) {
    if (i > 0 && importances[i].first == importances[i - 1].first) {
      throw ContractViolation("duplicate entity '" + importances[i].first + "' in table '" +
                              unit_id + "'");
    }
    ranked.push_back({std::move(importances[i].first), importances[i].second,
                      static_cast<int>(i + 1)});
  }
  return InformativenessTable(std::move(unit_id), std::move(ranked));
}

InformativenessTable build_table(const Chunk& chunk, const Corpus& corpus,
                                 Granularity granularity) {
  const Document* doc = corpus.find_document(chunk.doc_id);
  if (doc == nullptr) {
    throw ContractViolation("chunk '" + chunk.chunk_id + "' does not belong to the corpus");
  }
  const SentenceRange range = granularity == Granularity::kChunk
                                  ? chunk.sentences
                                  : SentenceRange{0, doc->sentences.size()};
  auto totals = importances_in(*doc, range);
  std::vector<std::pair<std::string, long long>> pairs(totals.begin(), totals.end());
  return rank_entities(chunk.chunk_id, std::move(pairs));
}

double chunk_score(const InformativenessTable& table, const QuestionEntities& question) {
  double score = 0.0;
  for (const std::string& e : question.entities) {
    if (const int rank = table.rank_of(e); rank > 0) {
      score += 1.0 / rank;
    }
  }
  return score;
}

std::vector<ScoredChunk> select_top_k(std::vector<ScoredChunk> scored, std::size_t k,
                                      bool drop_non_positive) {
  if (drop_non_positive) {
    std::erase_if(scored, [](const ScoredChunk& s) { return !(s.score > 0.0); });
  }
  const auto better = [](const ScoredChunk& a, const ScoredChunk& b) {
    if (a.score != b.score) {
      return a.score > b.score;
    }
    return a.chunk_id < b.chunk_id;
  };
  const std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep),
                    scored.end(), better);
  scored.resize(keep);
  return scored;
}

InformativenessIndex::InformativenessIndex(const Corpus& corpus, Granularity granularity) {
  tables_.reserve(corpus.chunks().size());
  for (const Chunk& chunk : corpus.chunks()) {
    pos_.emplace(chunk.chunk_id, tables_.size());
    tables_.push_back(build_table(chunk, corpus, granularity));
  }
}

const InformativenessTable& InformativenessIndex::table(std::string_view chunk_id) const {
  const auto it = pos_.find(chunk_id);
  if (it == pos_.end()) {
    throw ContractViolation("unknown chunk '" + std::string(chunk_id) + "'");
  }
  return tables_[it->second];
}

std::vector<ScoredChunk> InformativenessIndex::top_k(const QuestionEntities& question,
                                                     std::size_t k) const {
  if (k < 1) {
    throw ContractViolation("top_k requires k >= 1");
  }
  std::vector<ScoredChunk> scored;
  if (question.empty()) {
    return scored;
  }
  for (const InformativenessTable& t : tables_) {
    const double s = chunk_score(t, question);
    if (s > 0.0) {
      scored.push_back({t.unit_id(), s});
    }
  }
  return select_top_k(std::move(scored), k, true);
}

std::vector<ScoredChunk> top_k_by_informativeness(const Corpus& corpus,
                                                  const QuestionEntities& question,
                                                  std::size_t k) {
  if (k < 1) {
    throw ContractViolation("top_k requires k >= 1");
  }
  std::vector<ScoredChunk> scored;
  for (const Chunk& chunk : corpus.chunks()) {
    const double s = chunk_score(build_table(chunk, corpus), question);
    if (s > 0.0) {
      scored.push_back({chunk.chunk_id, s});
    }
  }
  return select_top_k(std::move(scored), k, true);
}

}  // namespace searchr
