#include "searchr/corpus.hpp"

#include <algorithm>
#include <istream>
#include <iterator>

#include "searchr/error.hpp"
#include "searchr/jsonl.hpp"
#include "searchr/text.hpp"

namespace searchr {

std::string Document::sentence_text(std::size_t s) const {
  const DependencyTree& tree = sentences.at(s);
  return tree.text().empty() ? tree.joined_forms() : tree.text();
}

std::vector<Chunk> chunk_document(const Document& doc, std::size_t window, std::size_t stride) {
  if (window < 1 || stride < 1 || stride > window) {
    throw ContractViolation("chunking requires window >= 1 and 1 <= stride <= window (got window=" +
                            std::to_string(window) + ", stride=" + std::to_string(stride) + ")");
  }
  std::vector<Chunk> chunks;
  const std::size_t n = doc.sentences.size();
  for (std::size_t start = 0; start < n; start += stride) {
    Chunk chunk;
    chunk.doc_id = doc.doc_id;
    chunk.chunk_id = doc.doc_id + "/" + std::to_string(start);
    chunk.sentences = {start, std::min(start + window, n)};
    for (std::size_t s = chunk.sentences.begin; s < chunk.sentences.end; ++s) {
      if (!chunk.text.empty()) {
        chunk.text += ' ';
      }
      chunk.text += doc.sentence_text(s);
    }
    const bool last = chunk.sentences.end == n;
    chunks.push_back(std::move(chunk));
    if (last) {
      break;
    }
  }
  return chunks;
}

Corpus::Corpus(std::vector<Document> documents, std::vector<Chunk> chunks,
               ChunkingOptions chunking)
    : documents_(std::move(documents)), chunks_(std::move(chunks)), chunking_(chunking) {
  rebuild();
}

void Corpus::rebuild() {
  doc_pos_.clear();
  chunk_pos_.clear();
  entities_.clear();
  embedding_dimension_ = 0;
  embedded_chunks_ = 0;

  for (std::size_t i = 0; i < documents_.size(); ++i) {
    const Document& doc = documents_[i];
    if (!doc_pos_.emplace(doc.doc_id, i).second) {
      throw IngestionError("duplicate doc_id '" + doc.doc_id + "'");
    }
    for (const EntityOccurrence& occ : doc.entity_occurrences) {
      if (occ.sentence >= doc.sentences.size()) {
        throw IngestionError("entity '" + occ.surface + "' in doc '" + doc.doc_id +
                             "' references sentence " + std::to_string(occ.sentence) +
                             " but the document has " + std::to_string(doc.sentences.size()) +
                             " sentences");
      }
      const std::size_t n_tokens = doc.sentences[occ.sentence].size();
      if (occ.start >= occ.end || occ.end > n_tokens) {
        throw IngestionError("entity '" + occ.surface + "' in doc '" + doc.doc_id +
                             "' sentence " + std::to_string(occ.sentence) + " has span [" +
                             std::to_string(occ.start) + "," + std::to_string(occ.end) +
                             ") outside the sentence's " + std::to_string(n_tokens) + " tokens");
      }
      if (occ.normalized.empty()) {
        throw IngestionError("entity '" + occ.surface + "' in doc '" + doc.doc_id +
                             "' normalizes to the empty string");
      }
      EntityRecord& rec = entities_[occ.normalized];
      rec.normalized = occ.normalized;
      rec.surface_forms.insert(occ.surface);
      if (!occ.label.empty()) {
        rec.labels.insert(occ.label);
      }
      rec.occurrences.push_back({doc.doc_id, occ.sentence, occ.start, occ.end});
    }
  }

  for (std::size_t i = 0; i < chunks_.size(); ++i) {
    const Chunk& chunk = chunks_[i];
    if (!chunk_pos_.emplace(chunk.chunk_id, i).second) {
      throw IngestionError("duplicate chunk_id '" + chunk.chunk_id + "'");
    }
    const Document* doc = find_document(chunk.doc_id);
    if (doc == nullptr) {
      throw IngestionError("chunk '" + chunk.chunk_id + "' references unknown doc '" +
                           chunk.doc_id + "'");
    }
    if (chunk.sentences.begin >= chunk.sentences.end ||
        chunk.sentences.end > doc->sentences.size()) {
      throw IngestionError("chunk '" + chunk.chunk_id + "' has an invalid sentence range");
    }
    if (chunk.embedding) {
      ++embedded_chunks_;
      if (embedding_dimension_ == 0) {
        embedding_dimension_ = chunk.embedding->size();
      } else if (chunk.embedding->size() != embedding_dimension_) {
        throw IngestionError("chunk '" + chunk.chunk_id + "' embedding has dimension " +
                             std::to_string(chunk.embedding->size()) + ", corpus uses " +
                             std::to_string(embedding_dimension_));
      }
    }
  }
}

const Document* Corpus::find_document(std::string_view doc_id) const {
  const auto it = doc_pos_.find(std::string(doc_id));
  return it == doc_pos_.end() ? nullptr : &documents_[it->second];
}

const Chunk* Corpus::find_chunk(std::string_view chunk_id) const {
  const auto it = chunk_pos_.find(std::string(chunk_id));
  return it == chunk_pos_.end() ? nullptr : &chunks_[it->second];
}

const EntityRecord* Corpus::find_entity(std::string_view normalized) const {
  const auto it = entities_.find(std::string(normalized));
  return it == entities_.end() ? nullptr : &it->second;
}

void Corpus::set_embedding(std::string_view chunk_id, std::vector<double> vector) {
  const auto it = chunk_pos_.find(std::string(chunk_id));
  if (it == chunk_pos_.end()) {
    throw IngestionError("embedding for unknown chunk '" + std::string(chunk_id) + "'");
  }
  if (vector.empty()) {
    throw IngestionError("embedding for chunk '" + std::string(chunk_id) + "' is empty");
  }
  Chunk& chunk = chunks_[it->second];
  // The first vector fixes the dimension unless it is replacing the only one.
  const std::size_t others = embedded_chunks_ - (chunk.embedding ? 1 : 0);
  if (others > 0 && vector.size() != embedding_dimension_) {
    throw IngestionError("embedding for chunk '" + chunk.chunk_id + "' has dimension " +
                         std::to_string(vector.size()) + ", corpus uses " +
                         std::to_string(embedding_dimension_));
  }
  if (!chunk.embedding) {
    ++embedded_chunks_;
  }
  embedding_dimension_ = vector.size();
  chunk.embedding = std::move(vector);
}

Corpus load_corpus(std::istream& documents, std::istream& trees, std::istream& entities,
                   ChunkingOptions chunking) {
  if (chunking.window < 1 || chunking.stride < 1 || chunking.stride > chunking.window) {
    throw ContractViolation("chunking requires window >= 1 and 1 <= stride <= window");
  }
  std::vector<Document> docs;
  std::unordered_map<std::string, std::size_t> pos;
  for_each_jsonl(documents, [&](const Json& obj, std::size_t line) {
    Document doc;
    doc.doc_id = obj.contains("id") ? require_string(obj, "id", line)
                                    : require_string(obj, "doc_id", line);
    doc.title = obj.contains("title") ? require_string(obj, "title", line) : std::string();
    doc.text = obj.contains("text") ? require_string(obj, "text", line) : std::string();
    if (!pos.emplace(doc.doc_id, docs.size()).second) {
      throw IngestionError("duplicate doc_id '" + doc.doc_id + "' (documents line " +
                           std::to_string(line) + ")");
    }
    docs.push_back(std::move(doc));
  });

  // Trees are keyed "<doc_id>#<ordinal>" and must cover ordinals 0..n-1.
  std::vector<std::map<std::size_t, DependencyTree>> by_doc(docs.size());
  for (DependencyTree& tree : parse_conllu(trees, "trees")) {
    const std::string& sid = tree.sentence_id();
    const std::size_t hash = sid.rfind('#');
    if (hash == std::string::npos || hash + 1 == sid.size()) {
      throw IngestionError("tree sentence id '" + sid + "' is not of the form <doc_id>#<ordinal>");
    }
    const std::string doc_id = sid.substr(0, hash);
    std::size_t ordinal = 0;
    try {
      std::size_t used = 0;
      ordinal = std::stoul(sid.substr(hash + 1), &used);
      if (used != sid.size() - hash - 1) {
        throw std::invalid_argument("trailing characters");
      }
    } catch (const std::logic_error&) {
      throw IngestionError("tree sentence id '" + sid + "' has a non-integer ordinal");
    }
    const auto it = pos.find(doc_id);
    if (it == pos.end()) {
      throw IngestionError("tree '" + sid + "' references unknown doc '" + doc_id + "'");
    }
    if (!by_doc[it->second].emplace(ordinal, std::move(tree)).second) {
      throw IngestionError("duplicate tree '" + sid + "'");
    }
  }
  for (std::size_t d = 0; d < docs.size(); ++d) {
    std::size_t expected = 0;
    for (auto& [ordinal, tree] : by_doc[d]) {
      if (ordinal != expected) {
        throw IngestionError("doc '" + docs[d].doc_id + "' is missing the tree for sentence " +
                             std::to_string(expected));
      }
      docs[d].sentences.push_back(std::move(tree));
      ++expected;
    }
  }

  for_each_jsonl(entities, [&](const Json& obj, std::size_t line) {
    const std::string doc_id = require_string(obj, "doc_id", line);
    const auto it = pos.find(doc_id);
    if (it == pos.end()) {
      throw IngestionError("entity on line " + std::to_string(line) +
                           " references unknown doc '" + doc_id + "'");
    }
    const long long sent = require_int(obj, "sent", line);
    const long long start = require_int(obj, "start", line);
    const long long end = require_int(obj, "end", line);
    if (sent < 0 || start < 0 || end < 0) {
      throw IngestionError("entity on line " + std::to_string(line) + " in doc '" + doc_id +
                           "' has a negative index");
    }
    EntityOccurrence occ;
    occ.surface = require_string(obj, "surface", line);
    occ.label = obj.contains("label") ? require_string(obj, "label", line) : std::string();
    occ.normalized = text::normalize_entity(occ.surface);
    occ.sentence = static_cast<std::size_t>(sent);
    occ.start = static_cast<std::size_t>(start);
    occ.end = static_cast<std::size_t>(end);
    docs[it->second].entity_occurrences.push_back(std::move(occ));
  });

  std::vector<Chunk> chunks;
  for (const Document& doc : docs) {
    auto doc_chunks = chunk_document(doc, chunking.window, chunking.stride);
    std::move(doc_chunks.begin(), doc_chunks.end(), std::back_inserter(chunks));
  }
  return Corpus(std::move(docs), std::move(chunks), chunking);
}

std::size_t attach_embeddings(Corpus& corpus, std::istream& embeddings) {
  std::size_t count = 0;
  for_each_jsonl(embeddings, [&](const Json& obj, std::size_t line) {
    const std::string chunk_id = require_string(obj, "chunk_id", line);
    corpus.set_embedding(chunk_id, require_vector(obj, "vector", line));
    ++count;
  });
  return count;
}

}  // namespace searchr
