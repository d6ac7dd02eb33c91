#include "searchr/index_io.hpp"

#include <bit>
#include <fstream>

#include "searchr/error.hpp"
#include "searchr/jsonl.hpp"

namespace searchr {
namespace {

enum class Section : std::uint32_t {
  kMeta = 1,
  kDocuments = 2,
  kTrees = 3,
  kEntities = 4,
  kChunks = 5,
  kEmbeddings = 6,
};

class ByteWriter {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_ += static_cast<char>((v >> (8 * i)) & 0xFF);
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_ += static_cast<char>((v >> (8 * i)) & 0xFF);
  }
  void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u64(s.size());
    out_.append(s);
  }
  void raw(std::string_view s) { out_.append(s); }

  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::size_t count() {
    const std::uint64_t n = u64();
    // Every counted element occupies at least one byte.
    if (n > data_.size() - pos_) {
      throw FormatError("index is corrupt: element count exceeds remaining data");
    }
    return static_cast<std::size_t>(n);
  }
  std::string str() {
    const std::size_t n = count();
    std::string s(data_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  std::string_view bytes(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const noexcept { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (data_.size() - pos_ < n) {
      throw FormatError("index is truncated");
    }
  }

  std::string_view data_;
  std::size_t pos_ = 0;
};

void write_section(ByteWriter& out, Section tag, std::string payload) {
  out.u32(static_cast<std::uint32_t>(tag));
  out.u64(payload.size());
  out.raw(payload);
}

std::string_view read_section(ByteReader& in, Section expected) {
  const std::uint32_t tag = in.u32();
  if (tag != static_cast<std::uint32_t>(expected)) {
    throw FormatError("index is corrupt: expected section " +
                      std::to_string(static_cast<std::uint32_t>(expected)) + ", found " +
                      std::to_string(tag));
  }
  const std::uint64_t len = in.u64();
  return in.bytes(static_cast<std::size_t>(len));
}

}  // namespace

std::string serialize_index(const Corpus& corpus) {
  ByteWriter out;
  out.raw(kIndexMagic);
  out.u32(kIndexFormatVersion);

  {
    ByteWriter s;
    s.u64(corpus.chunking().window);
    s.u64(corpus.chunking().stride);
    s.u64(corpus.embedding_dimension());
    write_section(out, Section::kMeta, s.take());
  }
  {
    ByteWriter s;
    s.u64(corpus.documents().size());
    for (const Document& doc : corpus.documents()) {
      s.str(doc.doc_id);
      s.str(doc.title);
      s.str(doc.text);
    }
    write_section(out, Section::kDocuments, s.take());
  }
  {
    ByteWriter s;
    s.u64(corpus.documents().size());
    for (const Document& doc : corpus.documents()) {
      s.u64(doc.sentences.size());
      for (const DependencyTree& tree : doc.sentences) {
        s.str(tree.sentence_id());
        s.str(tree.text());
        s.u64(tree.size());
        for (const Token& tok : tree.tokens()) {
          s.str(tok.form);
          s.i64(tok.head);
          s.str(tok.deprel);
          s.i64(tree.descendant_count(tok.index));
        }
      }
    }
    write_section(out, Section::kTrees, s.take());
  }
  {
    ByteWriter s;
    s.u64(corpus.documents().size());
    for (const Document& doc : corpus.documents()) {
      s.u64(doc.entity_occurrences.size());
      for (const EntityOccurrence& occ : doc.entity_occurrences) {
        s.str(occ.normalized);
        s.str(occ.surface);
        s.str(occ.label);
        s.u64(occ.sentence);
        s.u64(occ.start);
        s.u64(occ.end);
      }
    }
    write_section(out, Section::kEntities, s.take());
  }
  {
    ByteWriter s;
    s.u64(corpus.chunks().size());
    for (const Chunk& chunk : corpus.chunks()) {
      s.str(chunk.chunk_id);
      s.str(chunk.doc_id);
      s.u64(chunk.sentences.begin);
      s.u64(chunk.sentences.end);
      s.str(chunk.text);
    }
    write_section(out, Section::kChunks, s.take());
  }
  {
    ByteWriter s;
    std::uint64_t n = 0;
    for (const Chunk& chunk : corpus.chunks()) n += chunk.embedding.has_value();
    s.u64(n);
    for (std::size_t i = 0; i < corpus.chunks().size(); ++i) {
      const Chunk& chunk = corpus.chunks()[i];
      if (!chunk.embedding) continue;
      s.u64(i);
      s.u64(chunk.embedding->size());
      for (double v : *chunk.embedding) s.f64(v);
    }
    write_section(out, Section::kEmbeddings, s.take());
  }
  return out.take();
}

Corpus deserialize_index(std::string_view bytes) {
  ByteReader in(bytes);
  if (bytes.size() < kIndexMagic.size() || in.bytes(kIndexMagic.size()) != kIndexMagic) {
    throw FormatError("not a searchr index (bad magic bytes)");
  }
  const std::uint32_t version = in.u32();
  if (version != kIndexFormatVersion) {
    throw FormatError("unsupported index format version " + std::to_string(version) +
                      " (this build reads version " + std::to_string(kIndexFormatVersion) + ")");
  }

  ChunkingOptions chunking;
  std::size_t dimension = 0;
  {
    ByteReader s(read_section(in, Section::kMeta));
    chunking.window = s.u64();
    chunking.stride = s.u64();
    dimension = s.u64();
  }

  std::vector<Document> docs;
  {
    ByteReader s(read_section(in, Section::kDocuments));
    docs.resize(s.count());
    for (Document& doc : docs) {
      doc.doc_id = s.str();
      doc.title = s.str();
      doc.text = s.str();
    }
  }
  {
    ByteReader s(read_section(in, Section::kTrees));
    if (s.count() != docs.size()) {
      throw FormatError("index is corrupt: tree section does not match documents");
    }
    for (Document& doc : docs) {
      const std::size_t n_sent = s.count();
      for (std::size_t k = 0; k < n_sent; ++k) {
        std::string id = s.str();
        std::string text = s.str();
        const std::size_t n_tok = s.count();
        std::vector<Token> tokens(n_tok);
        std::vector<int> cached(n_tok);
        for (std::size_t t = 0; t < n_tok; ++t) {
          tokens[t].index = static_cast<int>(t + 1);
          tokens[t].form = s.str();
          tokens[t].head = static_cast<int>(s.i64());
          tokens[t].deprel = s.str();
          cached[t] = static_cast<int>(s.i64());
        }
        DependencyTree tree;
        try {
          tree = DependencyTree(std::move(id), std::move(tokens), std::move(text));
        } catch (const UserError& e) {
          throw FormatError(std::string("index is corrupt: ") + e.what());
        }
        if (tree.descendant_counts() != cached) {
          throw FormatError("index is corrupt: cached descendant counts of '" +
                            tree.sentence_id() + "' disagree with its tree");
        }
        doc.sentences.push_back(std::move(tree));
      }
    }
  }
  {
    ByteReader s(read_section(in, Section::kEntities));
    if (s.count() != docs.size()) {
      throw FormatError("index is corrupt: entity section does not match documents");
    }
    for (Document& doc : docs) {
      doc.entity_occurrences.resize(s.count());
      for (EntityOccurrence& occ : doc.entity_occurrences) {
        occ.normalized = s.str();
        occ.surface = s.str();
        occ.label = s.str();
        occ.sentence = s.u64();
        occ.start = s.u64();
        occ.end = s.u64();
      }
    }
  }
  std::vector<Chunk> chunks;
  {
    ByteReader s(read_section(in, Section::kChunks));
    chunks.resize(s.count());
    for (Chunk& chunk : chunks) {
      chunk.chunk_id = s.str();
      chunk.doc_id = s.str();
      chunk.sentences.begin = s.u64();
      chunk.sentences.end = s.u64();
      chunk.text = s.str();
    }
  }
  {
    ByteReader s(read_section(in, Section::kEmbeddings));
    const std::size_t n = s.count();
    for (std::size_t k = 0; k < n; ++k) {
      const std::uint64_t i = s.u64();
      if (i >= chunks.size()) {
        throw FormatError("index is corrupt: embedding for chunk #" + std::to_string(i));
      }
      std::vector<double> v(s.count());
      for (double& x : v) x = s.f64();
      chunks[i].embedding = std::move(v);
    }
  }
  if (!in.done()) {
    throw FormatError("index has trailing bytes");
  }

  Corpus corpus(std::move(docs), std::move(chunks), chunking);
  if (corpus.embedding_dimension() != dimension) {
    throw FormatError("index is corrupt: embedding dimension mismatch");
  }
  return corpus;
}

void save_index(const Corpus& corpus, const std::filesystem::path& path) {
  const std::string bytes = serialize_index(corpus);
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw UserError("cannot write index '" + path.string() + "'");
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      throw UserError("failed writing index '" + path.string() + "'");
    }
  }
  std::filesystem::rename(tmp, path);
}

Corpus load_index(const std::filesystem::path& path) {
  return deserialize_index(read_file(path.string()));
}

}  // namespace searchr
