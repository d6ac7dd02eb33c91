#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "searchr/corpus.hpp"

namespace searchr {

/// Which sentences an entity table is computed over. Tables are per chunk by
/// default; kDocument ranks entities over the chunk's whole document.
enum class Granularity { kChunk, kDocument };

struct RankedEntity {
  std::string entity;
  long long importance = 0;
  int rank = 0;

  friend bool operator==(const RankedEntity&, const RankedEntity&) = default;
};

/// Entities of one unit ordered by importance (descending), ties broken by
/// ascending normalized string, with ordinal ranks 1..m.
class InformativenessTable {
 public:
  InformativenessTable() = default;
  InformativenessTable(std::string unit_id, std::vector<RankedEntity> ranked);

  const std::string& unit_id() const noexcept { return unit_id_; }
  const std::vector<RankedEntity>& ranked() const noexcept { return ranked_; }
  bool empty() const noexcept { return ranked_.empty(); }

  /// 1-based rank of `entity`, or 0 when it is not in the table.
  int rank_of(std::string_view entity) const;

  friend bool operator==(const InformativenessTable& a, const InformativenessTable& b) {
    return a.unit_id_ == b.unit_id_ && a.ranked_ == b.ranked_;
  }

 private:
  std::string unit_id_;
  std::vector<RankedEntity> ranked_;
  std::map<std::string, int, std::less<>> rank_by_entity_;
};

/// Normalized entity strings mentioned by a question or sub-question.
struct QuestionEntities {
  std::set<std::string> entities;

  /// Normalizes every surface form; empty results are dropped.
  static QuestionEntities from_surfaces(const std::vector<std::string>& surfaces);

  bool empty() const noexcept { return entities.empty(); }
};

/// Sum over the sentences of `range` that mention `entity` of the largest
/// descendant count among the entity's tokens in that sentence. Several
/// mentions in one sentence count once.
long long entity_importance(const Document& doc, SentenceRange range, std::string_view entity);

/// Orders (entity, importance) pairs into a table. Entities are normalized
/// keys and must be unique.
InformativenessTable rank_entities(std::string unit_id,
                                   std::vector<std::pair<std::string, long long>> importances);

/// Table of every entity mentioned in the chunk's sentences.
InformativenessTable build_table(const Chunk& chunk, const Corpus& corpus,
                                 Granularity granularity = Granularity::kChunk);

/// Sum of 1/rank over the question entities present in the table.
double chunk_score(const InformativenessTable& table, const QuestionEntities& question);

struct ScoredChunk {
  std::string chunk_id;
  double score = 0.0;

  friend bool operator==(const ScoredChunk&, const ScoredChunk&) = default;
};

/// Sorts by score descending then chunk id ascending, drops zero scores and
/// keeps at most k. Shared by both retrieval paths.
std::vector<ScoredChunk> select_top_k(std::vector<ScoredChunk> scored, std::size_t k,
                                      bool drop_non_positive);

/// Every chunk's table, computed once at construction.
class InformativenessIndex {
 public:
  explicit InformativenessIndex(const Corpus& corpus,
                                Granularity granularity = Granularity::kChunk);

  const InformativenessTable& table(std::string_view chunk_id) const;
  const std::vector<InformativenessTable>& tables() const noexcept { return tables_; }

  /// Chunks with a positive score, best first, at most k. Requires k >= 1.
  std::vector<ScoredChunk> top_k(const QuestionEntities& question, std::size_t k) const;

 private:
  std::vector<InformativenessTable> tables_;
  std::map<std::string, std::size_t, std::less<>> pos_;
};

/// One-shot variant that builds the tables it needs on the fly.
std::vector<ScoredChunk> top_k_by_informativeness(const Corpus& corpus,
                                                  const QuestionEntities& question,
                                                  std::size_t k);

}  // namespace searchr
