#include "searchr/retrieval.hpp"

#include <set>

#include "searchr/error.hpp"

namespace searchr {

namespace {

Json hits_json(const std::vector<ScoredChunk>& hits) {
  Json arr = Json::array();
  for (const ScoredChunk& h : hits) {
    arr.push_back({{"chunk_id", h.chunk_id}, {"score", h.score}});
  }
  return arr;
}

}  // namespace

Json to_json(const RetrievalResult& result) {
  return Json{{"query_id", result.query_id},
              {"informativeness_hits", hits_json(result.informativeness_hits)},
              {"similarity_hits", hits_json(result.similarity_hits)},
              {"fused", result.fused}};
}

std::vector<std::string> fuse_hits(const std::vector<ScoredChunk>& informativeness_hits,
                                   const std::vector<ScoredChunk>& similarity_hits) {
  std::vector<std::string> fused;
  std::set<std::string> seen;
  for (const auto* hits : {&informativeness_hits, &similarity_hits}) {
    for (const ScoredChunk& h : *hits) {
      if (seen.insert(h.chunk_id).second) {
        fused.push_back(h.chunk_id);
      }
    }
  }
  return fused;
}

Retriever::Retriever(const Corpus& corpus, Granularity granularity)
    : corpus_(&corpus),
      info_(corpus, granularity),
      vectors_(VectorIndex::from_corpus(corpus)) {}

RetrievalResult Retriever::retrieve(const QuestionEntities& entities,
                                    std::optional<std::span<const double>> query_vector,
                                    const RetrievalOptions& options,
                                    std::string query_id) const {
  if (options.k_info == 0 && options.k_sim == 0) {
    throw ContractViolation("retrieve requires k_info or k_sim to be positive");
  }
  RetrievalResult result;
  result.query_id = std::move(query_id);
  if (options.k_info > 0) {
    result.informativeness_hits = info_.top_k(entities, options.k_info);
  }
  if (options.k_sim > 0 && query_vector && !vectors_.empty()) {
    result.similarity_hits = vectors_.top_k(*query_vector, options.k_sim);
  }
  result.fused = fuse_hits(result.informativeness_hits, result.similarity_hits);
  return result;
}

std::vector<std::string> Retriever::context(const RetrievalResult& result,
                                            std::optional<std::size_t> char_budget) const {
  std::vector<std::string> texts;
  std::size_t used = 0;
  for (const std::string& id : result.fused) {
    const Chunk* chunk = corpus_->find_chunk(id);
    if (chunk == nullptr) {
      throw ContractViolation("retrieval result names unknown chunk '" + id + "'");
    }
    if (char_budget && used + chunk->text.size() > *char_budget) {
      break;
    }
    used += chunk->text.size();
    texts.push_back(chunk->text);
  }
  return texts;
}

}  // namespace searchr
