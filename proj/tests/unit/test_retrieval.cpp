#include <cmath>
#include <random>

#include "doctest.h"
#include "searchr/dense_index.hpp"
#include "searchr/error.hpp"
#include "searchr/retrieval.hpp"
#include "support/support.hpp"

using namespace searchr;

namespace {

std::vector<double> v(std::initializer_list<double> xs) { return xs; }

std::vector<double> random_vector(std::mt19937& rng, std::size_t dim) {
  std::normal_distribution<double> g;
  std::vector<double> out(dim);
  for (double& x : out) x = g(rng);
  return out;
}

std::vector<ScoredChunk> hits(const std::string& prefix, int n) {
  std::vector<ScoredChunk> out;
  for (int i = 0; i < n; ++i) out.push_back({prefix + std::to_string(i), 1.0 / (i + 1)});
  return out;
}

}  // namespace

TEST_CASE("cosine examples") {
  const auto a = v({0.3, -1.2, 4.0});
  CHECK(cosine(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine(v({1, 0}), v({0, 1})) == 0.0);
  CHECK(cosine(v({1, 0}), v({1, 1})) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(cosine(v({1, 0}), v({1, 0, 0})), ContractViolation);
  CHECK_THROWS_AS(cosine(v({0, 0}), v({1, 0})), ContractViolation);
}

TEST_CASE("cosine is symmetric and scale invariant") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> alpha(1e-3, 1e3);
  for (int i = 0; i < 500; ++i) {
    const auto a = random_vector(rng, 8);
    const auto b = random_vector(rng, 8);
    auto scaled = a;
    const double s = alpha(rng);
    for (double& x : scaled) x *= s;
    CHECK(cosine(a, b) == cosine(b, a));
    CHECK(std::abs(cosine(scaled, b) - cosine(a, b)) <= 1e-12);
    CHECK(std::abs(cosine(a, b) - support::naive_cosine(a, b)) <= 1e-12);
    CHECK(std::abs(cosine(a, b)) <= 1.0);
  }
}

TEST_CASE("vector index top-k") {
  SUBCASE("single entry") {
    VectorIndex idx(2);
    idx.add("only", v({1, 2}));
    for (std::size_t k : {1u, 2u, 10u}) {
      const auto top = idx.top_k(v({-1, 0.5}), k);
      REQUIRE(top.size() == 1);
      CHECK(top[0].chunk_id == "only");
    }
  }
  SUBCASE("k larger than the index returns everything sorted") {
    VectorIndex idx(2);
    idx.add("a", v({1, 0}));
    idx.add("b", v({0, 1}));
    idx.add("c", v({1, 1}));
    const auto top = idx.top_k(v({1, 0.1}), 10);
    REQUIRE(top.size() == 3);
    CHECK(top[0].chunk_id == "a");
    CHECK(top[1].chunk_id == "c");
    CHECK(top[2].chunk_id == "b");
  }
  SUBCASE("ties break by chunk id") {
    VectorIndex idx(2);
    idx.add("z", v({2, 0}));
    idx.add("m", v({1, 0}));
    idx.add("a", v({0, 1}));
    const auto top = idx.top_k(v({1, 0}), 2);
    CHECK(top[0].chunk_id == "m");
    CHECK(top[1].chunk_id == "z");
  }
  SUBCASE("contract violations") {
    VectorIndex idx(2);
    CHECK_THROWS_AS(idx.add("zero", v({0, 0})), ContractViolation);
    CHECK_THROWS_AS(idx.add("wide", v({1, 0, 0})), ContractViolation);
    idx.add("a", v({1, 0}));
    CHECK_THROWS_AS(idx.top_k(v({1, 0, 0}), 1), ContractViolation);
    CHECK_THROWS_AS(idx.top_k(v({1, 0}), 0), ContractViolation);
  }
}

TEST_CASE("top-k matches an exhaustive sort and is a prefix of it") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    VectorIndex idx(16);
    std::vector<std::pair<double, std::string>> all;
    const auto query = random_vector(rng, 16);
    for (int i = 0; i < 100; ++i) {
      const auto x = random_vector(rng, 16);
      const std::string id = "c" + std::to_string(1000 + i);
      idx.add(id, x);
      all.emplace_back(-support::naive_cosine(query, x), id);
    }
    std::sort(all.begin(), all.end());
    const auto full = idx.top_k(query, 100);
    const auto ten = idx.top_k(query, 10);
    REQUIRE(ten.size() == 10);
    for (std::size_t i = 0; i < full.size(); ++i) {
      CHECK(full[i].chunk_id == all[i].second);
      CHECK(std::abs(full[i].score + all[i].first) <= 1e-12);
    }
    CHECK(std::equal(ten.begin(), ten.end(), full.begin()));
    CHECK(top_k_by_similarity(idx, query, 10) == ten);
  }
}

TEST_CASE("fusion examples") {
  CHECK(fuse_hits(hits("i", 15), hits("s", 10)).size() == 25);
  CHECK(fuse_hits(hits("x", 15), hits("x", 15)).size() == 15);
  const auto fused = fuse_hits({{"a", 1}, {"b", 1}}, {{"b", 0.9}, {"c", 0.5}});
  CHECK(fused == std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("retrieval on the film corpus") {
  const Corpus corpus = support::load_film_corpus();
  const Retriever r(corpus);
  const auto q = QuestionEntities::from_surfaces({"Kevin James", "Grown Ups"});
  const std::vector<double> vec = corpus.find_chunk("film01/2")->embedding.value();
  const std::span<const double> qv(vec);

  SUBCASE("defaults give 15 + 10 hits and a fused list within bounds") {
    const auto res = r.retrieve(q, qv, {}, "q");
    CHECK(res.query_id == "q");
    CHECK(res.informativeness_hits.size() == 15);
    CHECK(res.similarity_hits.size() == 10);
    CHECK(res.fused.size() >= 15);
    CHECK(res.fused.size() <= 25);
    std::set<std::string> seen(res.fused.begin(), res.fused.end());
    CHECK(seen.size() == res.fused.size());
    for (const auto& id : res.fused) {
      const bool in_info = std::any_of(res.informativeness_hits.begin(), res.informativeness_hits.end(),
                                       [&](const ScoredChunk& h) { return h.chunk_id == id; });
      const bool in_sim = std::any_of(res.similarity_hits.begin(), res.similarity_hits.end(),
                                      [&](const ScoredChunk& h) { return h.chunk_id == id; });
      CHECK((in_info || in_sim));
    }
  }
  SUBCASE("ablation arms") {
    const auto dense = r.retrieve(q, qv, {0, 10});
    std::vector<std::string> ids;
    for (const auto& h : r.vectors().top_k(qv, 10)) ids.push_back(h.chunk_id);
    CHECK(dense.fused == ids);
    CHECK(dense.informativeness_hits.empty());

    const auto sparse = r.retrieve(q, qv, {15, 0});
    ids.clear();
    for (const auto& h : top_k_by_informativeness(corpus, q, 15)) ids.push_back(h.chunk_id);
    CHECK(sparse.fused == ids);
    CHECK(sparse.similarity_hits.empty());
    CHECK_THROWS_AS(r.retrieve(q, qv, {0, 0}), ContractViolation);
  }
  SUBCASE("no question entities leaves only similarity hits") {
    const auto res = r.retrieve(QuestionEntities{}, qv);
    CHECK(res.informativeness_hits.empty());
    CHECK(res.fused.size() == 10);
  }
  SUBCASE("no query vector leaves only informativeness hits") {
    const auto res = r.retrieve(q, std::nullopt);
    CHECK(res.similarity_hits.empty());
    CHECK(res.fused.size() == 15);
  }
  SUBCASE("storage order does not change the result") {
    std::vector<Document> docs(corpus.documents().rbegin(), corpus.documents().rend());
    std::vector<Chunk> chunks(corpus.chunks().rbegin(), corpus.chunks().rend());
    const Corpus reversed(std::move(docs), std::move(chunks), corpus.chunking());
    const Retriever rr(reversed);
    CHECK(to_json(rr.retrieve(q, qv, {}, "q")).dump() == to_json(r.retrieve(q, qv, {}, "q")).dump());
  }
  SUBCASE("context keeps fused order and honours the character budget") {
    const auto res = r.retrieve(q, qv);
    const auto all = r.context(res);
    REQUIRE(all.size() == res.fused.size());
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == corpus.find_chunk(res.fused[i])->text);
    const auto some = r.context(res, all[0].size() + all[1].size());
    CHECK(some.size() == 2);
    CHECK(r.context(res, 1).empty());
  }
}
