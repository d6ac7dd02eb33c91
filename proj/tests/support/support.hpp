#pragma once

// Test-only helpers: fixture loading and brute-force oracles that recompute
// results without going through the engine's own algorithms.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "searchr/corpus.hpp"
#include "searchr/scripted_generator.hpp"
#include "searchr/treebank.hpp"

namespace support {

inline std::filesystem::path fixture_dir() { return SEARCHR_FIXTURE_DIR; }

inline std::filesystem::path film(const std::string& name) {
  return fixture_dir() / "film" / name;
}

inline std::ifstream open(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + p.string());
  return in;
}

inline searchr::Corpus load_film_corpus(bool with_embeddings = true) {
  auto docs = open(film("documents.jsonl"));
  auto trees = open(film("trees.conllu"));
  auto ents = open(film("entities.jsonl"));
  searchr::Corpus corpus = searchr::load_corpus(docs, trees, ents);
  if (with_embeddings) {
    auto emb = open(film("embeddings.jsonl"));
    searchr::attach_embeddings(corpus, emb);
  }
  return corpus;
}

inline searchr::ScriptedGenerator film_stub() {
  return searchr::ScriptedGenerator(searchr::Script::load(film("stub_script.json").string()));
}

/// A fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& tag) {
  static int counter = 0;
  std::random_device rd;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("searchr-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  auto in = open(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// ---------------------------------------------------------------------------
// Trees

/// heads[i] is the head of token i+1 (0 = root). Node i (i >= 2) attaches to
/// a uniformly chosen earlier node, so token 1 is the root.
inline std::vector<int> random_heads(std::mt19937& rng, int n) {
  std::vector<int> heads(n, 0);
  for (int i = 2; i <= n; ++i) {
    heads[i - 1] = std::uniform_int_distribution<int>(1, i - 1)(rng);
  }
  return heads;
}

/// Same shape distribution, with token labels shuffled so the root and the
/// attachment order are arbitrary.
inline std::vector<int> random_shuffled_heads(std::mt19937& rng, int n) {
  const std::vector<int> base = random_heads(rng, n);
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i + 1;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<int> heads(n, 0);
  for (int i = 1; i <= n; ++i) {
    heads[perm[i - 1] - 1] = base[i - 1] == 0 ? 0 : perm[base[i - 1] - 1];
  }
  return heads;
}

inline std::vector<searchr::Token> tokens_from_heads(const std::vector<int>& heads) {
  std::vector<searchr::Token> tokens;
  for (std::size_t i = 0; i < heads.size(); ++i) {
    tokens.push_back({static_cast<int>(i + 1), "w" + std::to_string(i + 1), heads[i],
                      heads[i] == 0 ? "root" : "dep"});
  }
  return tokens;
}

/// Counts descendants by enumerating every (ancestor, node) pair: walk up
/// from each node and credit every ancestor on the way.
inline std::vector<int> brute_force_descendants(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  std::vector<int> count(n, 0);
  for (int v = 1; v <= n; ++v) {
    int a = heads[v - 1];
    int guard = 0;
    while (a != 0 && guard++ <= n) {
      ++count[a - 1];
      a = heads[a - 1];
    }
  }
  return count;
}

inline std::vector<int> depths(const std::vector<int>& heads) {
  std::vector<int> d(heads.size(), 0);
  for (std::size_t v = 0; v < heads.size(); ++v) {
    for (int a = heads[v]; a != 0; a = heads[a - 1]) ++d[v];
  }
  return d;
}

/// Descendant count of one node by explicit DFS over child lists.
inline int dfs_descendants(const std::vector<int>& heads, int node) {
  std::vector<std::vector<int>> children(heads.size() + 1);
  for (std::size_t v = 0; v < heads.size(); ++v) children[heads[v]].push_back(static_cast<int>(v + 1));
  int total = 0;
  std::vector<int> stack = children[node];
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    ++total;
    stack.insert(stack.end(), children[v].begin(), children[v].end());
  }
  return total;
}

// ---------------------------------------------------------------------------
// Informativeness

inline std::string ascii_norm(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!out.empty() && out.back() != ' ') {
      out += ' ';
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

struct NaiveEntity {
  std::string name;
  long long imp = 0;
};

/// Entities of one chunk, ranked by (importance desc, name asc). Recomputes
/// every importance from the raw head arrays.
inline std::vector<NaiveEntity> naive_table(const searchr::Document& doc, std::size_t begin,
                                            std::size_t end) {
  std::map<std::string, std::map<std::size_t, int>> per_sentence_max;
  for (const auto& occ : doc.entity_occurrences) {
    if (occ.sentence < begin || occ.sentence >= end) continue;
    std::vector<int> heads;
    for (const auto& t : doc.sentences[occ.sentence].tokens()) heads.push_back(t.head);
    int best = 0;
    for (std::size_t tok = occ.start; tok < occ.end; ++tok) {
      best = std::max(best, dfs_descendants(heads, static_cast<int>(tok + 1)));
    }
    const std::string name = ascii_norm(occ.surface);
    auto& slot = per_sentence_max[name][occ.sentence];
    slot = std::max(slot, best);
  }
  std::vector<NaiveEntity> table;
  for (const auto& [name, sentences] : per_sentence_max) {
    long long imp = 0;
    for (const auto& [_, m] : sentences) imp += m;
    table.push_back({name, imp});
  }
  std::sort(table.begin(), table.end(), [](const NaiveEntity& a, const NaiveEntity& b) {
    return a.imp != b.imp ? a.imp > b.imp : a.name < b.name;
  });
  return table;
}

inline double naive_score(const std::vector<NaiveEntity>& table, const std::set<std::string>& q) {
  double s = 0.0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (q.count(table[i].name)) s += 1.0 / static_cast<double>(i + 1);
  }
  return s;
}

/// Random corpus of up to 5 documents x 6 sentences drawing from an entity
/// pool of up to 8 names, with case and spacing variation in the surfaces.
inline searchr::Corpus random_mini_corpus(std::mt19937& rng, std::vector<std::string>& pool) {
  static const std::vector<std::string> names = {"Alpha", "Beta Ray", "Gamma", "Delta Force",
                                                 "Epsilon", "Zeta", "Eta Carinae", "Theta"};
  const int pool_size = std::uniform_int_distribution<int>(1, 8)(rng);
  pool.assign(names.begin(), names.begin() + pool_size);
  const int n_docs = std::uniform_int_distribution<int>(1, 5)(rng);
  std::vector<searchr::Document> docs;
  std::vector<searchr::Chunk> chunks;
  for (int d = 0; d < n_docs; ++d) {
    searchr::Document doc;
    doc.doc_id = "d" + std::to_string(d);
    const int n_sent = std::uniform_int_distribution<int>(0, 6)(rng);
    for (int s = 0; s < n_sent; ++s) {
      const int n_tok = std::uniform_int_distribution<int>(1, 12)(rng);
      const auto heads = random_shuffled_heads(rng, n_tok);
      doc.sentences.emplace_back(doc.doc_id + "#" + std::to_string(s), tokens_from_heads(heads));
      const int n_ent = std::uniform_int_distribution<int>(0, 4)(rng);
      for (int e = 0; e < n_ent; ++e) {
        const std::string& name = pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
        std::string surface = name;
        if (rng() % 2) {
          std::transform(surface.begin(), surface.end(), surface.begin(),
                         [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        }
        if (rng() % 3 == 0) surface = " " + surface + " ";
        const std::size_t start = std::uniform_int_distribution<int>(0, n_tok - 1)(rng);
        const std::size_t len = std::uniform_int_distribution<int>(1, 3)(rng);
        doc.entity_occurrences.push_back({"", surface, "X", static_cast<std::size_t>(s), start,
                                          std::min<std::size_t>(start + len, n_tok)});
      }
    }
    for (auto& occ : doc.entity_occurrences) occ.normalized = ascii_norm(occ.surface);
    auto doc_chunks = searchr::chunk_document(doc, 3, 2);
    chunks.insert(chunks.end(), doc_chunks.begin(), doc_chunks.end());
    docs.push_back(std::move(doc));
  }
  return searchr::Corpus(std::move(docs), std::move(chunks), {});
}

// ---------------------------------------------------------------------------
// Similarity

inline double naive_cosine(const std::vector<double>& a, const std::vector<double>& b) {
  long double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<long double>(a[i]) * b[i];
    na += static_cast<long double>(a[i]) * a[i];
    nb += static_cast<long double>(b[i]) * b[i];
  }
  return static_cast<double>(dot / std::sqrt(na * nb));
}

// ---------------------------------------------------------------------------
// Answer metrics

/// Lowercase, drop ASCII punctuation, drop a/an/the, split on spaces.
inline std::vector<std::string> naive_answer_tokens(const std::string& s) {
  std::string cleaned;
  for (char c : s) {
    if (std::ispunct(static_cast<unsigned char>(c))) continue;
    cleaned += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  std::istringstream in(cleaned);
  std::vector<std::string> out;
  for (std::string w; in >> w;) {
    if (w != "a" && w != "an" && w != "the") out.push_back(w);
  }
  return out;
}

struct NaiveScore {
  double f1, em, p, r;
};

inline NaiveScore naive_answer_score(const std::string& pred, const std::string& gold) {
  const auto pt = naive_answer_tokens(pred);
  const auto gt = naive_answer_tokens(gold);
  if (pt.empty() && gt.empty()) return {1, 1, 1, 1};
  if (pt.empty() || gt.empty()) return {0, 0, 0, 0};
  std::multiset<std::string> remaining(gt.begin(), gt.end());
  int common = 0;
  for (const auto& w : pt) {
    const auto it = remaining.find(w);
    if (it != remaining.end()) {
      remaining.erase(it);
      ++common;
    }
  }
  const double em = pt == gt ? 1.0 : 0.0;
  if (common == 0) return {0, em, 0, 0};
  const double p = static_cast<double>(common) / pt.size();
  const double r = static_cast<double>(common) / gt.size();
  return {2 * p * r / (p + r), em, p, r};
}

}  // namespace support
