#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "searchr/treebank.hpp"

namespace searchr {

/// Half-open interval [begin, end) of sentence indices inside one document.
struct SentenceRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  bool contains(std::size_t s) const noexcept { return s >= begin && s < end; }
  friend bool operator==(const SentenceRange&, const SentenceRange&) = default;
};

/// An entity mention inside a document: 0-based token span [start, end) in
/// sentence `sentence`.
struct EntityOccurrence {
  std::string normalized;
  std::string surface;
  std::string label;
  std::size_t sentence = 0;
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const EntityOccurrence&, const EntityOccurrence&) = default;
};

struct Document {
  std::string doc_id;
  std::string title;
  std::string text;
  std::vector<DependencyTree> sentences;
  std::vector<EntityOccurrence> entity_occurrences;

  /// The sentence's `# text` comment, or its forms joined by spaces.
  std::string sentence_text(std::size_t s) const;

  friend bool operator==(const Document&, const Document&) = default;
};

struct Chunk {
  std::string chunk_id;
  std::string doc_id;
  SentenceRange sentences;
  std::string text;
  std::optional<std::vector<double>> embedding;

  friend bool operator==(const Chunk&, const Chunk&) = default;
};

struct EntityMention {
  std::string doc_id;
  std::size_t sentence = 0;
  std::size_t start = 0;
  std::size_t end = 0;

  friend bool operator==(const EntityMention&, const EntityMention&) = default;
};

/// All mentions of one normalized entity across the corpus.
struct EntityRecord {
  std::string normalized;
  std::set<std::string> surface_forms;
  std::set<std::string> labels;
  std::vector<EntityMention> occurrences;

  friend bool operator==(const EntityRecord&, const EntityRecord&) = default;
};

struct ChunkingOptions {
  std::size_t window = 3;
  std::size_t stride = 2;

  friend bool operator==(const ChunkingOptions&, const ChunkingOptions&) = default;
};

/// Sentence-window chunker. Chunks start at 0, stride, 2*stride, ... and
/// the sequence ends with the first chunk that reaches the document end.
/// Requires window >= 1 and 1 <= stride <= window.
std::vector<Chunk> chunk_document(const Document& doc, std::size_t window, std::size_t stride);

/// Immutable collection of documents, their chunks and the entity table.
/// Build one with load_corpus (or load_index) and share it by const
/// reference.
class Corpus {
 public:
  Corpus() = default;

  /// Assembles a corpus from parts, rebuilding lookups and entity records.
  /// Throws IngestionError on duplicate ids or dangling references.
  Corpus(std::vector<Document> documents, std::vector<Chunk> chunks, ChunkingOptions chunking);

  const std::vector<Document>& documents() const noexcept { return documents_; }
  const std::vector<Chunk>& chunks() const noexcept { return chunks_; }
  const std::map<std::string, EntityRecord>& entities() const noexcept { return entities_; }
  const ChunkingOptions& chunking() const noexcept { return chunking_; }

  /// Dimension shared by every chunk embedding; 0 when no chunk has one.
  std::size_t embedding_dimension() const noexcept { return embedding_dimension_; }

  const Document* find_document(std::string_view doc_id) const;
  const Chunk* find_chunk(std::string_view chunk_id) const;
  const EntityRecord* find_entity(std::string_view normalized) const;

  /// Attaches (or replaces) a chunk embedding. Every embedding in a corpus
  /// must share one dimension. Only valid while the corpus is being built.
  void set_embedding(std::string_view chunk_id, std::vector<double> vector);

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.documents_ == b.documents_ && a.chunks_ == b.chunks_ &&
           a.chunking_ == b.chunking_ && a.entities_ == b.entities_;
  }

 private:
  void rebuild();

  std::vector<Document> documents_;
  std::vector<Chunk> chunks_;
  ChunkingOptions chunking_;
  std::map<std::string, EntityRecord> entities_;
  std::unordered_map<std::string, std::size_t> doc_pos_;
  std::unordered_map<std::string, std::size_t> chunk_pos_;
  std::size_t embedding_dimension_ = 0;
  std::size_t embedded_chunks_ = 0;
};

/// Reads documents.jsonl, trees.conllu and entities.jsonl and builds a fully
/// cross-linked corpus. Trees carry `# sent_id = <doc_id>#<ordinal>`.
Corpus load_corpus(std::istream& documents, std::istream& trees, std::istream& entities,
                   ChunkingOptions chunking = {});

/// Reads embeddings.jsonl (`{"chunk_id": ..., "vector": [...]}`) into the
/// corpus. Returns the number of vectors attached.
std::size_t attach_embeddings(Corpus& corpus, std::istream& embeddings);

}  // namespace searchr
