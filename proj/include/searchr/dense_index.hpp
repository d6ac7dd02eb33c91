#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "searchr/corpus.hpp"
#include "searchr/informativeness.hpp"

namespace searchr {

/// dot(u, v) / (|u| |v|). Throws ContractViolation on a dimension mismatch
/// or an all-zero vector.
double cosine(std::span<const double> u, std::span<const double> v);

/// Exact cosine top-k over chunk embeddings.
class VectorIndex {
 public:
  VectorIndex() = default;
  explicit VectorIndex(std::size_t dimension);

  /// Index of every embedded chunk in the corpus.
  static VectorIndex from_corpus(const Corpus& corpus);

  void add(std::string chunk_id, std::vector<double> vector);

  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  /// Descending similarity, ties by ascending chunk id, at most k entries.
  std::vector<ScoredChunk> top_k(std::span<const double> query, std::size_t k) const;

 private:
  struct Entry {
    std::vector<double> vector;
    double norm = 0.0;
  };

  std::size_t dimension_ = 0;
  std::map<std::string, Entry> entries_;
};

inline std::vector<ScoredChunk> top_k_by_similarity(const VectorIndex& index,
                                                    std::span<const double> query,
                                                    std::size_t k) {
  return index.top_k(query, k);
}

}  // namespace searchr
