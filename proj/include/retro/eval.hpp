#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "retro/decoder.hpp"
#include "retro/detail/parallel.hpp"

namespace retro {

/// Eval input line: {query, answers[], gold_doc_ids?[]}.
struct EvalRecord {
  std::string query;
  std::vector<std::string> answers;
  std::vector<std::string> gold_doc_ids;
};

/// Training line for the n-gram provider: {query, clues[], evidences[], answer}.
struct ExampleRecord {
  std::string query;
  std::vector<std::string> clues;
  std::vector<std::string> evidences;
  std::string answer;
};

/// Both readers skip blank lines and raise InputError naming source:line.
std::vector<EvalRecord> read_eval_jsonl(std::istream& in, const std::string& source);
std::vector<ExampleRecord> read_examples_jsonl(std::istream& in, const std::string& source);
void write_eval_jsonl(std::ostream& out, const std::vector<EvalRecord>& records);
void write_examples_jsonl(std::ostream& out, const std::vector<ExampleRecord>& records);
void write_corpus_jsonl(std::ostream& out, const std::vector<RawDocument>& docs);

/// Tokenizes an example into query + target stream. Empty clue or evidence
/// strings are rejected.
TrainingExample to_training_example(const ExampleRecord& ex, const Tokenizer& tok, const SpecialTokens& sp);

/// Fits an n-gram provider on every document body plus the examples.
NGramModel fit_provider(const CorpusIndex& corpus, const std::vector<ExampleRecord>& examples, unsigned order = 3);

/// True when some gold answer, normalized, occurs in the normalized text as a
/// whole-word span.
bool contains_answer(const std::string& text, const std::vector<std::string>& answers);

struct EvalReport {
  std::size_t queries = 0;
  double recall_at_1 = 0.0;
  double recall_at_5 = 0.0;
  double mean_evidences = 0.0;  // "Num"
  double answer_accuracy = 0.0;
  double doc_recall_at_5 = 0.0;  // only meaningful when gold doc ids exist
  std::size_t queries_with_gold_docs = 0;
  std::size_t incomplete = 0;
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;
  std::vector<StructuredOutput> outputs;

  /// Metrics plus per-query outputs when `with_outputs`.
  nlohmann::json to_json(bool with_outputs = false) const;
};

/// Decodes every record (in parallel across `threads` workers; results are
/// kept in input order) and scores the top beam. Throws InputError for an
/// empty record list.
EvalReport evaluate(const Engine& engine, const LogitProvider& provider, const DecoderConfig& config,
                    const std::vector<EvalRecord>& records, unsigned threads = 1);

struct StudyOptions {
  std::vector<std::size_t> beam_sizes = {1, 3, 5};
  std::size_t curve_length = 20;
  unsigned threads = 1;
};

struct StudyRow {
  ConstraintMode mode = ConstraintMode::Candidates;
  std::size_t beams = 1;
  double hit_rate = 0.0;  // any evidence of any returned beam holds a gold answer
  double mean_evidences = 0.0;
  std::vector<double> prefix_relevance;  // position k (1-based) at index k-1
};

struct StudyReport {
  std::size_t queries = 0;
  std::vector<StudyRow> rows;

  const StudyRow& row(ConstraintMode mode, std::size_t beams) const;
  nlohmann::json to_json() const;
};

/// Runs both constraint modes at every beam size over the same provider.
/// Prefix relevance is the scorer's value for the first k tokens of the top
/// beam's first evidence; it is carried forward past the evidence end and is
/// 0 when no evidence was emitted.
StudyReport false_pruning_study(const Engine& engine, const LogitProvider& provider, const DecoderConfig& base,
                                const std::vector<EvalRecord>& records, const StudyOptions& options);

}  // namespace retro
