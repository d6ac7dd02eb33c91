#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "searchr/corpus.hpp"
#include "searchr/dense_index.hpp"
#include "searchr/informativeness.hpp"
#include "searchr/jsonl.hpp"

namespace searchr {

struct RetrievalOptions {
  std::size_t k_info = 15;
  std::size_t k_sim = 10;
};

struct RetrievalResult {
  std::string query_id;
  std::vector<ScoredChunk> informativeness_hits;
  std::vector<ScoredChunk> similarity_hits;
  std::vector<std::string> fused;

  friend bool operator==(const RetrievalResult&, const RetrievalResult&) = default;
};

Json to_json(const RetrievalResult& result);

/// Ordered union: informativeness hits in score order, then similarity hits
/// whose ids are not already present.
std::vector<std::string> fuse_hits(const std::vector<ScoredChunk>& informativeness_hits,
                                   const std::vector<ScoredChunk>& similarity_hits);

/// Dual-path retriever over an immutable corpus. Holds the per-chunk entity
/// tables and the vector index; safe for concurrent queries.
class Retriever {
 public:
  explicit Retriever(const Corpus& corpus, Granularity granularity = Granularity::kChunk);

  /// Requires k_info + k_sim > 0. Without a query vector, or with an index
  /// that holds no embeddings, the similarity path contributes nothing.
  RetrievalResult retrieve(const QuestionEntities& entities,
                           std::optional<std::span<const double>> query_vector,
                           const RetrievalOptions& options = {},
                           std::string query_id = {}) const;

  /// Chunk texts for the fused list, in order. With a budget, whole chunks
  /// are kept while their total length stays within it.
  std::vector<std::string> context(const RetrievalResult& result,
                                   std::optional<std::size_t> char_budget = std::nullopt) const;

  const Corpus& corpus() const noexcept { return *corpus_; }
  const InformativenessIndex& informativeness() const noexcept { return info_; }
  const VectorIndex& vectors() const noexcept { return vectors_; }

 private:
  const Corpus* corpus_;
  InformativenessIndex info_;
  VectorIndex vectors_;
};

}  // namespace searchr
