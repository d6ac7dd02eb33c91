#pragma once

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "searchr/error.hpp"
#include "searchr/generator.hpp"
#include "searchr/jsonl.hpp"
#include "searchr/metrics.hpp"
#include "searchr/retrieval.hpp"

namespace searchr {

struct OrchestratorConfig {
  RetrievalOptions retrieval;
  /// Sub-questions beyond this many are dropped and the trace is marked
  /// truncated.
  std::size_t max_steps = 6;
  std::optional<std::size_t> context_char_budget;
  /// Questions evaluated in parallel by run_eval / the consistency filter.
  std::size_t workers = 1;
};

/// Offline inputs for one question, keyed by 0-based sub-question index.
/// A present decomposition bypasses the decompose call; present entities
/// and vectors bypass entity extraction and embedding for that step.
struct QuestionFixture {
  std::optional<std::vector<std::string>> decomposition;
  std::map<std::size_t, std::vector<std::string>> entities;
  std::map<std::size_t, std::vector<double>> vectors;
};

struct Step {
  std::string original_sub_question;
  std::optional<std::string> rewritten;
  std::string effective_question;
  std::vector<std::string> question_entities;
  RetrievalResult retrieval;
  std::optional<std::string> answer;
};

struct ReasoningTrace {
  std::string question;
  std::optional<std::string> gold_answer;
  std::vector<std::string> decomposition;
  std::vector<Step> steps;
  std::optional<std::string> final_answer;
  bool truncated = false;
};

Json to_json(const ReasoningTrace& trace);

/// Human-readable rendering for the `answer` subcommand.
std::string format_trace(const ReasoningTrace& trace);

/// A generator or retrieval failure part-way through a question. The trace
/// holds the steps completed before the failure.
class PartialTraceError : public UserError {
 public:
  PartialTraceError(const std::string& what, ReasoningTrace trace)
      : UserError(what), trace_(std::move(trace)) {}

  const ReasoningTrace& trace() const noexcept { return trace_; }

 private:
  ReasoningTrace trace_;
};

/// decompose -> for each sub-question: (rewrite?) -> retrieve -> answer ->
/// integrate. Steps run strictly in order; each sees only its own
/// retrieval and the (sub-question, answer) history.
ReasoningTrace run_question(const std::string& question, const Retriever& retriever,
                            const Generator& generator, const OrchestratorConfig& config,
                            const QuestionFixture& fixture = {},
                            std::optional<std::string> gold_answer = std::nullopt);

/// One line of questions.jsonl:
/// {"qid", "question", "answer", "decomposition"?, "q_entities"?, "q_vectors"?}
struct QuestionRecord {
  std::string qid;
  std::string question;
  std::string answer;
  QuestionFixture fixture;
};

QuestionRecord parse_question_record(const Json& obj, std::size_t line);
std::vector<QuestionRecord> read_questions(std::istream& in);
Json to_json(const QuestionRecord& record);

struct CandidateOutcome {
  QuestionRecord candidate;
  std::optional<std::string> prediction;
  std::optional<ReasoningTrace> trace;
  std::optional<std::string> error;
};

/// `consistent` holds candidates whose final answer exactly matches gold after
/// normalization; `inconsistent` holds the rest, including candidates that failed.
struct ConsistencySplit {
  std::vector<CandidateOutcome> consistent;
  std::vector<CandidateOutcome> inconsistent;
};

/// Every candidate must carry a decomposition; it is injected in place of
/// the decompose call.
ConsistencySplit filter_by_answer_consistency(const std::vector<QuestionRecord>& candidates,
                                              const Retriever& retriever,
                                              const Generator& generator,
                                              const OrchestratorConfig& config);

struct QuestionOutcome {
  std::string qid;
  std::string question;
  std::string gold;
  std::optional<std::string> prediction;
  std::optional<AnswerScore> score;
  std::optional<ReasoningTrace> trace;
  std::optional<std::string> error;
};

struct EvalReport {
  std::vector<QuestionOutcome> questions;  // sorted by qid
  AggregateScore aggregate;                // over questions without error
  std::size_t failures = 0;
};

Json to_json(const EvalReport& report);

EvalReport run_eval(const std::vector<QuestionRecord>& questions, const Retriever& retriever,
                    const Generator& generator, const OrchestratorConfig& config);

}  // namespace searchr
