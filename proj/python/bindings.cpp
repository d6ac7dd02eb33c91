// Python bindings for the engine. Structured results cross the boundary as
// plain dicts and lists, converted through the json module.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <memory>
#include <sstream>

#include "searchr/cli.hpp"
#include "searchr/corpus.hpp"
#include "searchr/error.hpp"
#include "searchr/index_io.hpp"
#include "searchr/informativeness.hpp"
#include "searchr/metrics.hpp"
#include "searchr/orchestrator.hpp"
#include "searchr/retrieval.hpp"
#include "searchr/scripted_generator.hpp"
#include "searchr/text.hpp"
#include "searchr/training_math.hpp"
#include "searchr/treebank.hpp"

namespace py = pybind11;
using namespace searchr;

namespace {

py::object to_python(const Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestionError("cannot open " + path);
  return in;
}

/// A loaded corpus together with the retriever built over it.
class Index {
 public:
  explicit Index(Corpus corpus, Granularity granularity)
      : corpus_(std::make_unique<Corpus>(std::move(corpus))),
        retriever_(std::make_unique<Retriever>(*corpus_, granularity)) {}

  static Index ingest(const std::string& documents, const std::string& trees, const std::string& entities,
                      const std::optional<std::string>& embeddings, std::size_t window, std::size_t stride,
                      const std::string& granularity) {
    auto docs = open_input(documents);
    auto tree_in = open_input(trees);
    auto ents = open_input(entities);
    Corpus corpus = load_corpus(docs, tree_in, ents, {window, stride});
    if (embeddings) {
      auto emb = open_input(*embeddings);
      attach_embeddings(corpus, emb);
    }
    return Index(std::move(corpus), parse_granularity(granularity));
  }

  static Index load(const std::string& path, const std::string& granularity) {
    return Index(load_index(path), parse_granularity(granularity));
  }

  void save(const std::string& path) const { save_index(*corpus_, path); }

  py::dict stats() const {
    std::size_t sentences = 0, embedded = 0;
    for (const auto& d : corpus_->documents()) sentences += d.sentences.size();
    for (const auto& c : corpus_->chunks()) embedded += c.embedding.has_value();
    py::dict out;
    out["documents"] = corpus_->documents().size();
    out["sentences"] = sentences;
    out["chunks"] = corpus_->chunks().size();
    out["entities"] = corpus_->entities().size();
    out["embedded_chunks"] = embedded;
    out["embedding_dimension"] = corpus_->embedding_dimension();
    return out;
  }

  std::vector<std::string> chunk_ids() const {
    std::vector<std::string> ids;
    for (const auto& c : corpus_->chunks()) ids.push_back(c.chunk_id);
    return ids;
  }

  py::list table(const std::string& chunk_id) const {
    py::list rows;
    for (const auto& r : retriever_->informativeness().table(chunk_id).ranked()) {
      rows.append(py::make_tuple(r.entity, r.importance, r.rank));
    }
    return rows;
  }

  py::object retrieve(const std::vector<std::string>& entities, const std::optional<std::vector<double>>& vector,
                      std::size_t k_info, std::size_t k_sim, const std::string& query_id) const {
    RetrievalResult result;
    {
      py::gil_scoped_release release;
      std::optional<std::span<const double>> qv;
      if (vector) qv = std::span<const double>(*vector);
      result = retriever_->retrieve(QuestionEntities::from_surfaces(entities), qv, {k_info, k_sim}, query_id);
    }
    return to_python(to_json(result));
  }

  py::object answer(const std::string& question, const std::string& stub_script, std::size_t k_info,
                    std::size_t k_sim, std::size_t max_steps) const {
    const ScriptedGenerator stub(Script::load(stub_script));
    OrchestratorConfig config;
    config.retrieval = {k_info, k_sim};
    config.max_steps = max_steps;
    ReasoningTrace trace;
    {
      py::gil_scoped_release release;
      trace = run_question(question, *retriever_, stub, config);
    }
    return to_python(to_json(trace));
  }

 private:
  static Granularity parse_granularity(const std::string& g) {
    if (g == "chunk") return Granularity::kChunk;
    if (g == "document") return Granularity::kDocument;
    throw ConfigError("granularity must be \"chunk\" or \"document\", got \"" + g + "\"");
  }

  // Held by pointer so the retriever's reference to the corpus survives moves.
  std::unique_ptr<Corpus> corpus_;
  std::unique_ptr<Retriever> retriever_;
};

py::list descendant_counts(const std::string& conllu) {
  py::list out;
  for (const auto& tree : parse_conllu_string(conllu)) {
    out.append(py::make_tuple(tree.sentence_id(), tree.descendant_counts()));
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> chunk_spans(std::size_t sentences, std::size_t window,
                                                             std::size_t stride) {
  Document doc;
  doc.doc_id = "d";
  for (std::size_t i = 0; i < sentences; ++i) {
    doc.sentences.emplace_back("d#" + std::to_string(i), std::vector<Token>{{1, "x", 0, "root"}});
  }
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  for (const auto& c : chunk_document(doc, window, stride)) spans.emplace_back(c.sentences.begin, c.sentences.end);
  return spans;
}

double score_table(const std::vector<std::pair<std::string, long long>>& importances,
                   const std::vector<std::string>& question_entities) {
  std::vector<std::pair<std::string, long long>> normalized;
  for (const auto& [name, imp] : importances) normalized.emplace_back(text::normalize_entity(name), imp);
  return chunk_score(rank_entities("table", std::move(normalized)),
                     QuestionEntities::from_surfaces(question_entities));
}

py::tuple run_cli(const std::vector<std::string>& args, const std::optional<cli::StringMap>& env) {
  std::ostringstream out, err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = cli::run(args, env ? *env : cli::process_environment(), out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Entity-informativeness retrieval and multi-hop question answering engine";

  auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto user_error = py::register_exception<UserError>(m, "UserError", error.ptr());
  py::register_exception<ContractViolation>(m, "ContractViolation", user_error.ptr());
  py::register_exception<ParseError>(m, "ParseError", user_error.ptr());
  py::register_exception<StructuralError>(m, "StructuralError", user_error.ptr());
  py::register_exception<IngestionError>(m, "IngestionError", user_error.ptr());
  py::register_exception<FormatError>(m, "FormatError", user_error.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", user_error.ptr());

  m.def("normalize_entity", [](const std::string& s) { return text::normalize_entity(s); },
        "Entity key used by the index: case folded, whitespace collapsed, edge punctuation stripped.");
  m.def("normalize_answer", [](const std::string& s) { return normalize_answer(s); });
  m.def(
      "answer_score",
      [](const std::string& prediction, const std::string& gold) {
        const AnswerScore s = answer_score(prediction, gold);
        py::dict d;
        d["f1"] = s.f1;
        d["em"] = s.em;
        d["precision"] = s.precision;
        d["recall"] = s.recall;
        return d;
      },
      py::arg("prediction"), py::arg("gold"));
  m.def("descendant_counts", &descendant_counts, py::arg("conllu"),
        "Parses CoNLL-U text into (sent_id, [descendant count per token]) pairs.");
  m.def("chunk_spans", &chunk_spans, py::arg("sentences"), py::arg("window") = 3, py::arg("stride") = 2,
        "Half-open sentence ranges the chunker produces for a document of this length.");
  m.def("chunk_score", &score_table, py::arg("importances"), py::arg("question_entities"));
  m.def("reward_model_loss", [](const std::vector<double>& predicted, const std::vector<double>& target) {
    return training::reward_model_loss({predicted, target});
  });
  m.def("clip_ratio", &training::clip_ratio, py::arg("ratio"), py::arg("epsilon") = training::kDefaultClipEpsilon);
  m.def(
      "ppo_objective",
      [](double ratio, double advantage, double epsilon) {
        return training::ppo_sample_objective({ratio, advantage, epsilon});
      },
      py::arg("ratio"), py::arg("advantage"), py::arg("epsilon") = training::kDefaultClipEpsilon);
  m.def("run_cli", &run_cli, py::arg("args"), py::arg("env") = py::none(),
        "Runs the command-line tool in process. Returns (exit_code, stdout, stderr).");

  py::class_<Index>(m, "Index")
      .def_static("ingest", &Index::ingest, py::arg("documents"), py::arg("trees"), py::arg("entities"),
                  py::arg("embeddings") = py::none(), py::arg("window") = 3, py::arg("stride") = 2,
                  py::arg("granularity") = "chunk")
      .def_static("load", &Index::load, py::arg("path"), py::arg("granularity") = "chunk")
      .def("save", &Index::save, py::arg("path"))
      .def("stats", &Index::stats)
      .def("chunk_ids", &Index::chunk_ids)
      .def("table", &Index::table, py::arg("chunk_id"))
      .def("retrieve", &Index::retrieve, py::arg("entities"), py::arg("vector") = py::none(),
           py::arg("k_info") = 15, py::arg("k_sim") = 10, py::arg("query_id") = "")
      .def("answer", &Index::answer, py::arg("question"), py::arg("stub_script"), py::arg("k_info") = 15,
           py::arg("k_sim") = 10, py::arg("max_steps") = 6);
}
