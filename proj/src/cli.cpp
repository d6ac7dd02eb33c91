#include "searchr/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "searchr/corpus.hpp"
#include "searchr/error.hpp"
#include "searchr/http_generator.hpp"
#include "searchr/index_io.hpp"
#include "searchr/metrics.hpp"
#include "searchr/retrieval.hpp"
#include "searchr/scripted_generator.hpp"

extern char** environ;

namespace searchr::cli {
namespace {

namespace fs = std::filesystem;

std::size_t parse_count(const std::string& key, const std::string& raw, std::size_t min) {
  std::size_t v = 0;
  const char* end = raw.data() + raw.size();
  const auto [ptr, ec] = std::from_chars(raw.data(), end, v);
  if (raw.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + raw + "'");
  }
  if (v < min) {
    throw ConfigError(key + ": must be at least " + std::to_string(min));
  }
  return v;
}

double parse_real(const std::string& key, const std::string& raw) {
  try {
    std::size_t used = 0;
    const double v = std::stod(raw, &used);
    if (used == raw.size() && std::isfinite(v)) return v;
  } catch (const std::logic_error&) {
  }
  throw ConfigError(key + ": expected a number, got '" + raw + "'");
}

std::string parse_choice(const std::string& key, const std::string& raw,
                         std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (raw == a) return raw;
  }
  std::string msg = key + ": expected one of";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw ConfigError(msg + ", got '" + raw + "'");
}

using Setter = std::function<void(Config&, const std::string&)>;

const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      {"k_info", [](Config& c, const std::string& v) { c.k_info = parse_count("k_info", v, 0); }},
      {"k_sim", [](Config& c, const std::string& v) { c.k_sim = parse_count("k_sim", v, 0); }},
      {"chunk_window",
       [](Config& c, const std::string& v) { c.chunk_window = parse_count("chunk_window", v, 1); }},
      {"chunk_stride",
       [](Config& c, const std::string& v) { c.chunk_stride = parse_count("chunk_stride", v, 1); }},
      {"max_steps",
       [](Config& c, const std::string& v) { c.max_steps = parse_count("max_steps", v, 1); }},
      {"generator",
       [](Config& c, const std::string& v) { c.generator = parse_choice("generator", v, {"stub", "live"}); }},
      {"stub_script", [](Config& c, const std::string& v) { c.stub_script = v; }},
      {"prompts", [](Config& c, const std::string& v) { c.prompts = v; }},
      {"endpoint", [](Config& c, const std::string& v) { c.endpoint = v; }},
      {"model", [](Config& c, const std::string& v) { c.model = v; }},
      {"decomposer_model", [](Config& c, const std::string& v) { c.decomposer_model = v; }},
      {"embedding_endpoint", [](Config& c, const std::string& v) { c.embedding_endpoint = v; }},
      {"embedding_model", [](Config& c, const std::string& v) { c.embedding_model = v; }},
      {"temperature",
       [](Config& c, const std::string& v) {
         c.temperature = parse_real("temperature", v);
         if (c.temperature < 0.0) throw ConfigError("temperature: must not be negative");
       }},
      {"workers", [](Config& c, const std::string& v) { c.workers = parse_count("workers", v, 1); }},
      {"granularity",
       [](Config& c, const std::string& v) {
         c.granularity = parse_choice("granularity", v, {"chunk", "document"});
       }},
      {"context_char_budget",
       [](Config& c, const std::string& v) {
         if (v.empty() || v == "none") {
           c.context_char_budget.reset();
         } else {
           c.context_char_budget = parse_count("context_char_budget", v, 1);
         }
       }},
      {"timeout_seconds",
       [](Config& c, const std::string& v) {
         c.timeout_seconds = static_cast<int>(parse_count("timeout_seconds", v, 1));
       }},
  };
  return table;
}

std::string env_name(const std::string& key) {
  std::string out = "SEARCHR_";
  for (char ch : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return out;
}

std::string flag_name(const std::string& key) {
  std::string out = "--";
  for (char ch : key) out += ch == '_' ? '-' : ch;
  return out;
}

std::string file_value(const std::string& key, const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_unsigned() || v.is_number_integer()) return v.dump();
  if (v.is_number_float()) {
    std::ostringstream s;
    s.precision(17);
    s << v.get<double>();
    return s.str();
  }
  if (v.is_null()) return "";
  throw ConfigError("config file: '" + key + "' must be a string or a number");
}

fs::path index_file(const std::string& path) {
  const fs::path p(path);
  return fs::is_directory(p) ? p / "corpus.idx" : p;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw UserError("cannot open '" + path + "'");
  }
  return in;
}

void write_output(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path());
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw UserError("cannot write '" + path.string() + "'");
    }
    out << content;
    if (!out.flush()) {
      throw UserError("cannot write '" + path.string() + "'");
    }
  }
  fs::rename(tmp, path);
}

std::string records_jsonl(const std::vector<CandidateOutcome>& outcomes) {
  std::string out;
  for (const CandidateOutcome& o : outcomes) {
    Json line = to_json(o.candidate);
    line["prediction"] = o.prediction ? Json(*o.prediction) : Json(nullptr);
    if (o.error) line["error"] = *o.error;
    out += line.dump() + "\n";
  }
  return out;
}

Json score_json(const AnswerScore& s) {
  return Json{{"f1", s.f1}, {"em", s.em}, {"precision", s.precision}, {"recall", s.recall}};
}

std::map<std::string, std::string> read_answers(const std::string& path) {
  std::ifstream in = open_input(path);
  std::map<std::string, std::string> out;
  for_each_jsonl(in, [&](const Json& obj, std::size_t line) {
    const std::string qid = require_string(obj, "qid", line);
    std::string answer;
    if (obj.contains("prediction")) {
      answer = require_string(obj, "prediction", line);
    } else {
      answer = require_string(obj, "answer", line);
    }
    if (!out.emplace(qid, std::move(answer)).second) {
      throw ParseError(line, "duplicate qid '" + qid + "' in " + path);
    }
  });
  return out;
}

struct QueryRecord {
  std::string qid;
  std::string text;
  std::vector<std::string> entities;
  std::optional<std::vector<double>> vector;
};

std::vector<QueryRecord> read_queries(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<QueryRecord> out;
  for_each_jsonl(in, [&](const Json& obj, std::size_t line) {
    QueryRecord q;
    q.qid = require_string(obj, "qid", line);
    if (obj.contains("text")) q.text = require_string(obj, "text", line);
    if (obj.contains("vector") && !obj["vector"].is_null()) {
      q.vector = require_vector(obj, "vector", line);
    }
    if (obj.contains("entities")) {
      if (!obj["entities"].is_array()) {
        throw ParseError(line, "field 'entities' must be an array of strings");
      }
      for (const Json& e : obj["entities"]) {
        if (!e.is_string()) {
          throw ParseError(line, "field 'entities' must be an array of strings");
        }
        q.entities.push_back(e.get<std::string>());
      }
    }
    out.push_back(std::move(q));
  });
  return out;
}

}  // namespace

Granularity Config::table_granularity() const {
  return granularity == "document" ? Granularity::kDocument : Granularity::kChunk;
}

OrchestratorConfig Config::orchestrator() const {
  OrchestratorConfig oc;
  oc.retrieval.k_info = k_info;
  oc.retrieval.k_sim = k_sim;
  oc.max_steps = max_steps;
  oc.context_char_budget = context_char_budget;
  oc.workers = workers;
  return oc;
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [key, _] : setters()) k.push_back(key);
    return k;
  }();
  return keys;
}

Config resolve_config(const StringMap& flags, const StringMap& env, const Json* file) {
  Config config;
  if (file != nullptr) {
    if (!file->is_object()) {
      throw ConfigError("config file must hold a single JSON object");
    }
    for (const auto& [key, value] : file->items()) {
      const auto& table = setters();
      const auto it = std::find_if(table.begin(), table.end(),
                                   [&](const auto& entry) { return entry.first == key; });
      if (it == table.end()) {
        throw ConfigError("config file: unknown key '" + key + "'");
      }
      it->second(config, file_value(key, value));
    }
  }
  for (const auto& [key, set] : setters()) {
    if (const auto it = env.find(env_name(key)); it != env.end()) {
      set(config, it->second);
    }
  }
  for (const auto& [key, set] : setters()) {
    if (const auto it = flags.find(key); it != flags.end()) {
      set(config, it->second);
    }
  }
  if (const auto it = env.find("SEARCHR_API_KEY"); it != env.end()) {
    config.api_key = it->second;
  }
  return config;
}

std::unique_ptr<Generator> make_generator(const Config& config) {
  PromptSet prompts = config.prompts.empty() ? PromptSet::builtin() : PromptSet::load(config.prompts);
  if (config.generator == "live") {
    HttpGeneratorOptions opts;
    opts.endpoint = config.endpoint;
    opts.model = config.model;
    opts.decomposer_model = config.decomposer_model;
    opts.embedding_endpoint = config.embedding_endpoint;
    opts.embedding_model = config.embedding_model;
    opts.api_key = config.api_key;
    opts.temperature = config.temperature;
    opts.timeout_seconds = config.timeout_seconds;
    return std::make_unique<HttpGenerator>(std::move(opts), std::move(prompts));
  }
  Script script = config.stub_script.empty() ? Script{} : Script::load(config.stub_script);
  return std::make_unique<ScriptedGenerator>(std::move(script), std::move(prompts));
}

StringMap process_environment() {
  StringMap env;
  for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
    const std::string entry(*e);
    const std::size_t eq = entry.find('=');
    if (eq != std::string::npos) {
      env.emplace(entry.substr(0, eq), entry.substr(eq + 1));
    }
  }
  return env;
}

int run(const std::vector<std::string>& args, const StringMap& env, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Multi-hop question answering over an entity-informativeness index", "searchr"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file (also SEARCHR_CONFIG)");
  StringMap flag_values;
  std::vector<std::pair<std::string, CLI::Option*>> config_options;
  for (const std::string& key : config_keys()) {
    auto* opt = app.add_option(flag_name(key), flag_values[key],
                               "config '" + key + "' (env " + env_name(key) + ")");
    config_options.emplace_back(key, opt);
  }

  std::string index_path;
  auto add_index = [&](CLI::App* sub) {
    sub->add_option("--index", index_path, "index directory or file")->required();
  };

  auto* ingest = app.add_subcommand("ingest", "build an index from annotated documents");
  std::string docs_path, trees_path, entities_path, embeddings_path, out_path;
  ingest->add_option("--docs", docs_path, "documents.jsonl")->required();
  ingest->add_option("--trees", trees_path, "trees.conllu")->required();
  ingest->add_option("--entities", entities_path, "entities.jsonl")->required();
  ingest->add_option("--embeddings", embeddings_path, "embeddings.jsonl");
  ingest->add_option("--out", out_path, "output directory")->required();

  auto* index = app.add_subcommand("index", "attach chunk embeddings to an index");
  add_index(index);
  index->add_option("--embeddings", embeddings_path, "embeddings.jsonl")->required();
  index->add_option("--out", out_path, "output directory (default: rewrite in place)");

  auto* score = app.add_subcommand("score", "emit informativeness tables as JSONL");
  add_index(score);
  score->add_option("--out", out_path, "output file (default: standard output)");

  auto* retrieve = app.add_subcommand("retrieve", "run dual-path retrieval for stored queries");
  add_index(retrieve);
  std::string queries_path, qid;
  retrieve->add_option("--queries", queries_path, "queries.jsonl")->required();
  retrieve->add_option("--qid", qid, "query id (default: every query, one JSON line each)");

  auto* answer = app.add_subcommand("answer", "answer one question and print its trace");
  add_index(answer);
  std::string question;
  bool as_json = false;
  answer->add_option("--question", question, "question text")->required();
  answer->add_flag("--json", as_json, "print the trace as JSON");

  auto* eval = app.add_subcommand("eval", "answer a question set and write a report");
  add_index(eval);
  std::string questions_path;
  eval->add_option("--questions", questions_path, "questions.jsonl")->required();
  eval->add_option("--out", out_path, "report.json")->required();

  auto* score_answers = app.add_subcommand("score-answers", "score predictions against gold answers");
  std::string pred_path, gold_path;
  score_answers->add_option("--pred", pred_path, "predictions JSONL {qid, prediction|answer}")
      ->required();
  score_answers->add_option("--gold", gold_path, "gold JSONL {qid, answer}")->required();

  auto* filter = app.add_subcommand("filter-data", "split candidates by final-answer consistency");
  add_index(filter);
  std::string candidates_path, consistent_path, inconsistent_path;
  filter->add_option("--candidates", candidates_path, "candidate questions.jsonl")->required();
  filter->add_option("--consistent-out", consistent_path, "JSONL for consistent candidates")
      ->required();
  filter->add_option("--inconsistent-out", inconsistent_path, "JSONL for inconsistent candidates")
      ->required();

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    StringMap flags;
    for (const auto& [key, opt] : config_options) {
      if (opt->count() > 0) flags.emplace(key, flag_values[key]);
    }
    if (config_path.empty()) {
      if (const auto it = env.find("SEARCHR_CONFIG"); it != env.end()) config_path = it->second;
    }
    std::optional<Json> file;
    if (!config_path.empty()) {
      try {
        file = Json::parse(read_file(config_path));
      } catch (const Json::parse_error& e) {
        throw ConfigError("config file '" + config_path + "': " + e.what());
      }
    }
    const Config config = resolve_config(flags, env, file ? &*file : nullptr);

    if (ingest->parsed()) {
      std::ifstream docs = open_input(docs_path);
      std::ifstream trees = open_input(trees_path);
      std::ifstream ents = open_input(entities_path);
      Corpus corpus = load_corpus(docs, trees, ents, {config.chunk_window, config.chunk_stride});
      std::size_t embedded = 0;
      if (!embeddings_path.empty()) {
        std::ifstream emb = open_input(embeddings_path);
        embedded = attach_embeddings(corpus, emb);
      }
      const fs::path target = fs::path(out_path) / "corpus.idx";
      fs::create_directories(out_path);
      save_index(corpus, target);
      std::size_t sentences = 0;
      for (const Document& d : corpus.documents()) sentences += d.sentences.size();
      out << Json{{"index", target.string()},
                  {"documents", corpus.documents().size()},
                  {"sentences", sentences},
                  {"chunks", corpus.chunks().size()},
                  {"entities", corpus.entities().size()},
                  {"embedded_chunks", embedded}}
                 .dump()
          << '\n';
      return 0;
    }

    if (score_answers->parsed()) {
      const auto preds = read_answers(pred_path);
      const auto gold = read_answers(gold_path);
      Json rows = Json::array();
      std::vector<AnswerScore> scores;
      std::size_t missing = 0;
      for (const auto& [id, g] : gold) {
        const auto it = preds.find(id);
        if (it == preds.end()) ++missing;
        const std::string p = it == preds.end() ? std::string() : it->second;
        const AnswerScore s = answer_score(p, g);
        scores.push_back(s);
        rows.push_back({{"qid", id}, {"prediction", p}, {"gold", g}, {"score", score_json(s)}});
      }
      const AggregateScore agg = aggregate(scores);
      Json aggj{{"count", agg.count}, {"defined", agg.defined}};
      aggj.update(agg.defined ? score_json(agg.mean)
                              : Json{{"f1", nullptr}, {"em", nullptr}, {"precision", nullptr},
                                     {"recall", nullptr}});
      out << Json{{"aggregate", aggj}, {"missing_predictions", missing}, {"questions", rows}}.dump(2)
          << '\n';
      return 0;
    }

    Corpus corpus = load_index(index_file(index_path));

    if (index->parsed()) {
      std::ifstream emb = open_input(embeddings_path);
      const std::size_t embedded = attach_embeddings(corpus, emb);
      const fs::path target =
          out_path.empty() ? index_file(index_path) : fs::path(out_path) / "corpus.idx";
      if (!out_path.empty()) fs::create_directories(out_path);
      save_index(corpus, target);
      out << Json{{"index", target.string()},
                  {"embedded_chunks", embedded},
                  {"dimension", corpus.embedding_dimension()}}
                 .dump()
          << '\n';
      return 0;
    }

    if (score->parsed()) {
      const InformativenessIndex info(corpus, config.table_granularity());
      std::string lines;
      for (const InformativenessTable& t : info.tables()) {
        Json ents = Json::array();
        for (const RankedEntity& r : t.ranked()) {
          ents.push_back({{"e", r.entity}, {"imp", r.importance}, {"rank", r.rank}});
        }
        lines += Json{{"chunk_id", t.unit_id()}, {"entities", std::move(ents)}}.dump() + '\n';
      }
      if (out_path.empty()) {
        out << lines;
      } else {
        write_output(out_path, lines);
      }
      return 0;
    }

    const Retriever retriever(corpus, config.table_granularity());

    if (retrieve->parsed()) {
      const auto queries = read_queries(queries_path);
      bool found = false;
      for (const QueryRecord& q : queries) {
        if (!qid.empty() && q.qid != qid) continue;
        found = true;
        std::optional<std::span<const double>> vec;
        if (q.vector) vec = std::span<const double>(*q.vector);
        const RetrievalResult r =
            retriever.retrieve(QuestionEntities::from_surfaces(q.entities), vec,
                               config.orchestrator().retrieval, q.qid);
        out << (qid.empty() ? to_json(r).dump() : to_json(r).dump(2)) << '\n';
      }
      if (!qid.empty() && !found) {
        throw UserError("no query with qid '" + qid + "' in " + queries_path);
      }
      return 0;
    }

    const std::unique_ptr<Generator> generator = make_generator(config);

    if (answer->parsed()) {
      try {
        const ReasoningTrace trace =
            run_question(question, retriever, *generator, config.orchestrator());
        out << (as_json ? to_json(trace).dump(2) + "\n" : format_trace(trace));
      } catch (const PartialTraceError& e) {
        err << (as_json ? to_json(e.trace()).dump(2) + "\n" : format_trace(e.trace()));
        throw;
      }
      return 0;
    }

    if (eval->parsed()) {
      std::ifstream qin = open_input(questions_path);
      const auto questions = read_questions(qin);
      const EvalReport report = run_eval(questions, retriever, *generator, config.orchestrator());
      write_output(out_path, to_json(report).dump(2) + "\n");
      Json summary = to_json(report);
      summary.erase("questions");
      out << summary.dump() << '\n';
      return 0;
    }

    if (filter->parsed()) {
      std::ifstream cin = open_input(candidates_path);
      const auto candidates = read_questions(cin);
      const ConsistencySplit split =
          filter_by_answer_consistency(candidates, retriever, *generator, config.orchestrator());
      write_output(consistent_path, records_jsonl(split.consistent));
      write_output(inconsistent_path, records_jsonl(split.inconsistent));
      out << Json{{"candidates", candidates.size()},
                  {"consistent", split.consistent.size()},
                  {"inconsistent", split.inconsistent.size()}}
                 .dump()
          << '\n';
      return 0;
    }
    throw ContractViolation("no subcommand handled");
  } catch (const UserError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace searchr::cli
