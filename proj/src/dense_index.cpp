#include "searchr/dense_index.hpp"

#include <algorithm>
#include <cmath>

#include "searchr/error.hpp"

namespace searchr {
namespace {

double norm_of(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

double dot(std::span<const double> u, std::span<const double> v) {
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) sum += u[i] * v[i];
  return sum;
}

double clamp_unit(double c) { return std::clamp(c, -1.0, 1.0); }

}  // namespace

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw ContractViolation("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                            std::to_string(v.size()) + ")");
  }
  const double nu = norm_of(u);
  const double nv = norm_of(v);
  if (nu == 0.0 || nv == 0.0) {
    throw ContractViolation("cosine: zero vector");
  }
  return clamp_unit(dot(u, v) / (nu * nv));
}

VectorIndex::VectorIndex(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) {
    throw ContractViolation("vector index dimension must be positive");
  }
}

VectorIndex VectorIndex::from_corpus(const Corpus& corpus) {
  VectorIndex index;
  if (corpus.embedding_dimension() == 0) {
    return index;
  }
  index.dimension_ = corpus.embedding_dimension();
  for (const Chunk& chunk : corpus.chunks()) {
    if (chunk.embedding) {
      index.add(chunk.chunk_id, *chunk.embedding);
    }
  }
  return index;
}

void VectorIndex::add(std::string chunk_id, std::vector<double> vector) {
  if (dimension_ == 0) {
    throw ContractViolation("vector index has no dimension");
  }
  if (vector.size() != dimension_) {
    throw ContractViolation("vector for '" + chunk_id + "' has dimension " +
                            std::to_string(vector.size()) + ", index uses " +
                            std::to_string(dimension_));
  }
  const double n = norm_of(vector);
  if (n == 0.0) {
    throw ContractViolation("vector for '" + chunk_id + "' is all zero");
  }
  entries_[std::move(chunk_id)] = Entry{std::move(vector), n};
}

std::vector<ScoredChunk> VectorIndex::top_k(std::span<const double> query, std::size_t k) const {
  if (k < 1) {
    throw ContractViolation("top_k requires k >= 1");
  }
  if (entries_.empty()) {
    return {};
  }
  if (query.size() != dimension_) {
    throw ContractViolation("query vector has dimension " + std::to_string(query.size()) +
                            ", index uses " + std::to_string(dimension_));
  }
  const double qn = norm_of(query);
  if (qn == 0.0) {
    throw ContractViolation("query vector is all zero");
  }
  std::vector<ScoredChunk> scored;
  scored.reserve(entries_.size());
  for (const auto& [id, entry] : entries_) {
    scored.push_back({id, clamp_unit(dot(query, entry.vector) / (qn * entry.norm))});
  }
  return select_top_k(std::move(scored), k, false);
}

}  // namespace searchr
