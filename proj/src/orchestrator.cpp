#include "searchr/orchestrator.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace searchr {
namespace {

Json optional_json(const std::optional<std::string>& v) {
  return v ? Json(*v) : Json(nullptr);
}

Json score_json(const AnswerScore& s) {
  return Json{{"f1", s.f1}, {"em", s.em}, {"precision", s.precision}, {"recall", s.recall}};
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. The first
// exception escaping fn is rethrown after every thread has joined.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::map<std::size_t, Json> indexed_object(const Json& obj, std::string_view field,
                                           std::size_t line) {
  std::map<std::size_t, Json> out;
  const Json& v = obj[std::string(field)];
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) out.emplace(i, v[i]);
    return out;
  }
  if (!v.is_object()) {
    throw ParseError(line, "field '" + std::string(field) + "' must be an object keyed by sub-question index");
  }
  for (const auto& [key, value] : v.items()) {
    std::size_t idx = 0;
    try {
      std::size_t used = 0;
      const long long parsed = std::stoll(key, &used);
      if (used != key.size() || parsed < 0) throw std::invalid_argument("key");
      idx = static_cast<std::size_t>(parsed);
    } catch (const std::logic_error&) {
      throw ParseError(line, "field '" + std::string(field) + "' has non-index key '" + key + "'");
    }
    out.emplace(idx, value);
  }
  return out;
}

}  // namespace

Json to_json(const ReasoningTrace& trace) {
  Json steps = Json::array();
  for (const Step& s : trace.steps) {
    steps.push_back({{"original_sub_question", s.original_sub_question},
                     {"rewritten", optional_json(s.rewritten)},
                     {"effective_question", s.effective_question},
                     {"question_entities", s.question_entities},
                     {"retrieval", to_json(s.retrieval)},
                     {"answer", optional_json(s.answer)}});
  }
  return Json{{"question", trace.question},
              {"gold_answer", optional_json(trace.gold_answer)},
              {"decomposition", trace.decomposition},
              {"steps", std::move(steps)},
              {"final_answer", optional_json(trace.final_answer)},
              {"truncated", trace.truncated}};
}

std::string format_trace(const ReasoningTrace& trace) {
  std::ostringstream out;
  out << "Question: " << trace.question << '\n';
  if (trace.gold_answer) {
    out << "Ground truth: " << *trace.gold_answer << '\n';
  }
  out << "Step 1: sub-question decomposition\n";
  for (std::size_t i = 0; i < trace.decomposition.size(); ++i) {
    out << "  Sub-question " << i + 1 << ": " << trace.decomposition[i] << '\n';
  }
  if (trace.truncated) {
    out << "  (decomposition truncated to " << trace.steps.size() << " steps)\n";
  }
  out << "Step 2: retrieval and answer\n";
  for (std::size_t i = 0; i < trace.steps.size(); ++i) {
    const Step& s = trace.steps[i];
    out << "  Sub-question " << i + 1 << ": " << s.original_sub_question << '\n';
    if (i > 0) {
      out << "    rewrite needed: " << (s.rewritten ? "yes" : "no") << '\n';
    }
    if (s.rewritten) {
      out << "    rewritten: " << *s.rewritten << '\n';
    }
    out << "    retrieved:";
    for (const std::string& id : s.retrieval.fused) out << ' ' << id;
    out << '\n';
    out << "    answer: " << s.answer.value_or("(none)") << '\n';
  }
  out << "Step 3: integration\n";
  out << "  Final answer: " << trace.final_answer.value_or("(none)") << '\n';
  return out.str();
}

ReasoningTrace run_question(const std::string& question, const Retriever& retriever,
                            const Generator& generator, const OrchestratorConfig& config,
                            const QuestionFixture& fixture,
                            std::optional<std::string> gold_answer) {
  if (config.max_steps < 1) {
    throw ContractViolation("max_steps must be at least 1");
  }
  ReasoningTrace trace;
  trace.question = question;
  trace.gold_answer = std::move(gold_answer);

  try {
    trace.decomposition = fixture.decomposition ? *fixture.decomposition
                                                : generator.decompose(question);
  } catch (const UserError& e) {
    throw PartialTraceError(std::string("decomposition failed: ") + e.what(), trace);
  }
  if (trace.decomposition.empty()) {
    throw PartialTraceError("decomposition is empty", trace);
  }
  if (trace.decomposition.size() > config.max_steps) {
    trace.decomposition.resize(config.max_steps);
    trace.truncated = true;
  }

  std::vector<HistoryEntry> history;
  for (std::size_t i = 0; i < trace.decomposition.size(); ++i) {
    Step step;
    step.original_sub_question = trace.decomposition[i];
    try {
      // The first step has no earlier answer to substitute.
      if (!history.empty() && generator.rewrite_decision(step.original_sub_question, history)) {
        step.rewritten = generator.rewrite(step.original_sub_question, history);
      }
      step.effective_question = step.rewritten.value_or(step.original_sub_question);

      const auto ent_it = fixture.entities.find(i);
      const QuestionEntities entities = QuestionEntities::from_surfaces(
          ent_it != fixture.entities.end() ? ent_it->second
                                           : generator.extract_entities(step.effective_question));
      step.question_entities.assign(entities.entities.begin(), entities.entities.end());

      std::optional<std::vector<double>> vector;
      if (const auto vec_it = fixture.vectors.find(i); vec_it != fixture.vectors.end()) {
        vector = vec_it->second;
      } else {
        vector = generator.embed(step.effective_question);
      }
      std::optional<std::span<const double>> query;
      if (vector) query = std::span<const double>(*vector);

      step.retrieval = retriever.retrieve(entities, query, config.retrieval,
                                          "step-" + std::to_string(i));
      const auto context = retriever.context(step.retrieval, config.context_char_budget);
      step.answer = generator.answer(step.effective_question, context);
    } catch (const UserError& e) {
      throw PartialTraceError("step " + std::to_string(i + 1) + " failed: " + e.what(), trace);
    }
    history.push_back({step.effective_question, *step.answer});
    trace.steps.push_back(std::move(step));
  }

  try {
    trace.final_answer = generator.integrate(question, history);
  } catch (const UserError& e) {
    throw PartialTraceError(std::string("integration failed: ") + e.what(), trace);
  }
  return trace;
}

QuestionRecord parse_question_record(const Json& obj, std::size_t line) {
  QuestionRecord rec;
  rec.qid = require_string(obj, "qid", line);
  rec.question = require_string(obj, "question", line);
  rec.answer = require_string(obj, "answer", line);
  if (obj.contains("decomposition") && !obj["decomposition"].is_null()) {
    const Json& d = obj["decomposition"];
    if (!d.is_array()) {
      throw ParseError(line, "field 'decomposition' must be an array of strings");
    }
    std::vector<std::string> subs;
    for (const Json& s : d) {
      if (!s.is_string()) {
        throw ParseError(line, "field 'decomposition' must be an array of strings");
      }
      subs.push_back(s.get<std::string>());
    }
    rec.fixture.decomposition = std::move(subs);
  }
  if (obj.contains("q_entities") && !obj["q_entities"].is_null()) {
    for (auto& [idx, value] : indexed_object(obj, "q_entities", line)) {
      if (!value.is_array()) {
        throw ParseError(line, "q_entities entries must be arrays of strings");
      }
      std::vector<std::string> ents;
      for (const Json& e : value) {
        if (!e.is_string()) {
          throw ParseError(line, "q_entities entries must be arrays of strings");
        }
        ents.push_back(e.get<std::string>());
      }
      rec.fixture.entities.emplace(idx, std::move(ents));
    }
  }
  if (obj.contains("q_vectors") && !obj["q_vectors"].is_null()) {
    for (auto& [idx, value] : indexed_object(obj, "q_vectors", line)) {
      Json wrapper{{"v", value}};
      rec.fixture.vectors.emplace(idx, require_vector(wrapper, "v", line));
    }
  }
  return rec;
}

std::vector<QuestionRecord> read_questions(std::istream& in) {
  std::vector<QuestionRecord> out;
  for_each_jsonl(in, [&](const Json& obj, std::size_t line) {
    out.push_back(parse_question_record(obj, line));
  });
  return out;
}

Json to_json(const QuestionRecord& record) {
  Json obj{{"qid", record.qid}, {"question", record.question}, {"answer", record.answer}};
  if (record.fixture.decomposition) {
    obj["decomposition"] = *record.fixture.decomposition;
  }
  if (!record.fixture.entities.empty()) {
    Json ents = Json::object();
    for (const auto& [i, e] : record.fixture.entities) ents[std::to_string(i)] = e;
    obj["q_entities"] = std::move(ents);
  }
  if (!record.fixture.vectors.empty()) {
    Json vecs = Json::object();
    for (const auto& [i, v] : record.fixture.vectors) vecs[std::to_string(i)] = v;
    obj["q_vectors"] = std::move(vecs);
  }
  return obj;
}

ConsistencySplit filter_by_answer_consistency(const std::vector<QuestionRecord>& candidates,
                                              const Retriever& retriever,
                                              const Generator& generator,
                                              const OrchestratorConfig& config) {
  std::vector<CandidateOutcome> outcomes(candidates.size());
  std::vector<bool> consistent(candidates.size(), false);
  parallel_for(candidates.size(), config.workers, [&](std::size_t i) {
    CandidateOutcome& out = outcomes[i];
    out.candidate = candidates[i];
    if (!out.candidate.fixture.decomposition) {
      out.error = "candidate has no decomposition";
      return;
    }
    try {
      ReasoningTrace trace = run_question(out.candidate.question, retriever, generator, config,
                                          out.candidate.fixture, out.candidate.answer);
      out.prediction = trace.final_answer;
      out.trace = std::move(trace);
      consistent[i] = answer_score(*out.prediction, out.candidate.answer).em == 1.0;
    } catch (const PartialTraceError& e) {
      out.error = e.what();
      out.trace = e.trace();
    } catch (const UserError& e) {
      out.error = e.what();
    }
  });
  ConsistencySplit split;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    (consistent[i] ? split.consistent : split.inconsistent).push_back(std::move(outcomes[i]));
  }
  return split;
}

EvalReport run_eval(const std::vector<QuestionRecord>& questions, const Retriever& retriever,
                    const Generator& generator, const OrchestratorConfig& config) {
  std::vector<QuestionRecord> ordered = questions;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const QuestionRecord& a, const QuestionRecord& b) { return a.qid < b.qid; });

  EvalReport report;
  report.questions.resize(ordered.size());
  parallel_for(ordered.size(), config.workers, [&](std::size_t i) {
    const QuestionRecord& rec = ordered[i];
    QuestionOutcome& out = report.questions[i];
    out.qid = rec.qid;
    out.question = rec.question;
    out.gold = rec.answer;
    try {
      ReasoningTrace trace =
          run_question(rec.question, retriever, generator, config, rec.fixture, rec.answer);
      out.prediction = trace.final_answer;
      out.score = answer_score(*out.prediction, rec.answer);
      out.trace = std::move(trace);
    } catch (const PartialTraceError& e) {
      out.error = e.what();
      out.trace = e.trace();
    } catch (const UserError& e) {
      out.error = e.what();
    }
  });

  std::vector<AnswerScore> scores;
  for (const QuestionOutcome& q : report.questions) {
    if (q.error) {
      ++report.failures;
    } else {
      scores.push_back(*q.score);
    }
  }
  report.aggregate = aggregate(scores);
  return report;
}

Json to_json(const EvalReport& report) {
  Json questions = Json::array();
  for (const QuestionOutcome& q : report.questions) {
    questions.push_back({{"qid", q.qid},
                         {"question", q.question},
                         {"gold", q.gold},
                         {"prediction", optional_json(q.prediction)},
                         {"score", q.score ? score_json(*q.score) : Json(nullptr)},
                         {"error", optional_json(q.error)},
                         {"trace", q.trace ? to_json(*q.trace) : Json(nullptr)}});
  }
  Json agg{{"count", report.aggregate.count}, {"defined", report.aggregate.defined}};
  if (report.aggregate.defined) {
    agg.update(score_json(report.aggregate.mean));
  } else {
    agg.update(Json{{"f1", nullptr}, {"em", nullptr}, {"precision", nullptr}, {"recall", nullptr}});
  }
  return Json{{"total", report.questions.size()},
              {"failures", report.failures},
              {"aggregate", std::move(agg)},
              {"questions", std::move(questions)}};
}

}  // namespace searchr
