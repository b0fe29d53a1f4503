#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "retro/corpus.hpp"
#include "retro/ngram.hpp"
#include "retro/protocol.hpp"
#include "retro/ranking.hpp"

namespace retro {

enum class Stage { Clue, Evidence, Answer, Finished };
enum class ConstraintMode {
  Candidates,  // evidence constrained by the fused candidate documents
  Corpus,      // evidence constrained by the whole corpus, no future windows
};

std::string to_string(Stage s);
std::string to_string(ConstraintMode m);
ConstraintMode parse_constraint_mode(const std::string& s);

struct DecoderConfig {
  std::size_t lw = 32;    // context tokens on each side of a clue occurrence
  std::size_t lmax = 96;  // merged window cap
  double lambda = 100.0;
  double w1 = 1.0;
  double w2 = 2.0;
  std::size_t k_gen = 20;
  std::size_t k_lex = 20;
  std::size_t k_aux = 8;
  std::size_t candidates = 10;
  std::size_t max_clues = 5;
  std::size_t max_clue_tokens = 8;
  std::size_t max_evidence = 5;
  std::size_t min_evidence_tokens = 4;
  std::size_t max_evidence_tokens = 96;
  std::size_t answer_budget = 64;
  std::size_t token_budget = 1024;
  ConstraintMode constraints = ConstraintMode::Candidates;
  std::size_t num_beams = 1;
  double diversity_penalty = 1.0;

  /// Throws InputError on out-of-range values.
  void validate() const;
  nlohmann::json to_json() const;
  /// Overlays the keys present in `j` on `base`; unknown keys are rejected.
  static DecoderConfig from_json(const nlohmann::json& j, DecoderConfig base);
  static DecoderConfig from_json(const nlohmann::json& j);
};

struct FutureWindow {
  DocId doc_id = 0;
  std::uint64_t start = 0;  // local offset in the document
  TokenSeq tokens;
  double score = 0.0;
};

/// Half-open token span [begin, end) inside one document.
using Span = std::pair<std::uint64_t, std::uint64_t>;

/// [p - lw, p + clue_len + lw) for each occurrence p, clipped to [0, doc_len).
std::vector<Span> raw_window_spans(std::uint64_t doc_len, const std::vector<std::uint64_t>& positions,
                                   std::uint64_t clue_len, std::uint64_t lw);

/// Sorts spans, truncates any span longer than lmax, and merges spans that
/// share at least one token as long as the merged span stays within lmax.
/// Overlapping spans whose union would exceed lmax stay separate.
std::vector<Span> merge_spans(std::vector<Span> spans, std::uint64_t lmax);

/// (query, window) -> relevance in [0, 1]. Must be deterministic.
class RelevanceScorer {
 public:
  virtual ~RelevanceScorer() = default;
  virtual double score(TokenView query, TokenView window) const = 0;
};

/// |distinct query terms in window| / |distinct query terms|, counting content
/// ids only (unknown words and markers are ignored). 0 for an empty query.
class TermOverlapScorer final : public RelevanceScorer {
 public:
  double score(TokenView query, TokenView window) const override;
};

/// Shared, immutable pieces every session reads from.
struct Engine {
  std::shared_ptr<const CorpusIndex> corpus;
  std::shared_ptr<const DocIndexManager> manager;
  std::shared_ptr<const LexicalWeigher> weigher;
  std::shared_ptr<const RelevanceScorer> scorer;

  /// Lazy manager, DocFrequencyWeigher and TermOverlapScorer.
  static Engine with_defaults(std::shared_ptr<const CorpusIndex> corpus);
  SpecialTokens specials() const { return SpecialTokens::after(corpus->vocab_size()); }
};

/// Windows around every occurrence of every clue in each candidate document,
/// in candidate order then start offset. Scores are left at 0.
std::vector<FutureWindow> locate_windows(const DocIndexManager& manager, const std::vector<DocId>& candidates,
                                         const std::vector<TokenSeq>& clues, std::size_t lw, std::size_t lmax);

void score_windows(std::vector<FutureWindow>& windows, TokenView query, const RelevanceScorer& scorer);

struct EvidenceRecord {
  DocId doc_id = 0;
  std::uint64_t start = 0;
  TokenSeq tokens;
};

struct StructuredOutput {
  std::string query;
  std::vector<std::string> clues;
  std::vector<TokenSeq> clue_tokens;
  struct Evidence {
    DocId doc_id = 0;
    std::string source_id;
    std::uint64_t start = 0;
    std::string text;
    TokenSeq tokens;
  };
  std::vector<Evidence> evidences;
  std::string answer;
  TokenSeq answer_tokens;
  bool complete = true;
  nlohmann::json diagnostics = nlohmann::json::object();

  nlohmann::json to_json() const;
  std::string render_pretty() const;
};

/// Per-query stage machine: clue stage (corpus constraint), evidence stage
/// (candidate or corpus constraint plus window bonuses), answer stage (free).
/// Copyable, so beam search can fork it.
class DecodeSession {
 public:
  /// Throws InputError for an empty query or an invalid config.
  DecodeSession(const Engine& engine, std::string query, DecoderConfig config);

  Stage stage() const;
  bool finished() const { return phase_ == Phase::Finished; }
  const SpecialTokens& specials() const { return specials_; }
  std::uint32_t vocab_size() const { return specials_.extended_vocab(); }
  const DecoderConfig& config() const { return config_; }
  const Engine& engine() const { return engine_; }

  const TokenSeq& query_tokens() const { return query_tokens_; }
  const TokenSeq& emitted() const { return emitted_; }
  /// Query tokens followed by everything emitted: what the provider sees.
  TokenSeq context() const;

  /// Sorted allowed ids for the next step. Finished sessions return {}.
  std::vector<TokenId> mask() const;
  /// Window bonus lambda * max score over aligned windows, per token id.
  std::vector<double> bonuses() const;
  /// Mask and bonuses applied to `raw`; outside the mask entries are
  /// numeric_limits<float>::lowest(). Throws InputError for a wrong size or a
  /// non-finite entry, StateError once finished.
  LogitVector adjust_logits(const LogitVector& raw) const;
  /// Emits `t`, which must be in mask(). Throws StateError once finished.
  void advance(TokenId t);

  const std::vector<TokenSeq>& clues() const { return clues_; }
  const TokenSeq& current_clue() const { return current_clue_; }
  const std::vector<Clue>& auxiliary() const { return aux_; }
  const CandidateSet& candidates() const { return candidates_; }
  const std::vector<FutureWindow>& windows() const { return *windows_; }
  const std::vector<EvidenceRecord>& evidences() const { return evidences_; }
  const TokenSeq& current_evidence() const { return current_evidence_; }
  const TokenSeq& answer() const { return answer_; }
  const std::vector<std::string>& notes() const { return notes_; }

  StructuredOutput output(bool complete = true) const;

 private:
  enum class Phase { ClueOpen, ClueBody, EvidenceOpen, EvidenceBody, Answer, Finished };

  std::vector<TokenId> compute_mask(bool* forced) const;
  std::vector<TokenId> content_continuations() const;
  void finish_clue();
  void enter_evidence_stage();
  void reset_evidence_cursors();
  void finish_evidence();

  Engine engine_;
  DecoderConfig config_;
  SpecialTokens specials_;
  std::string query_;
  TokenSeq query_tokens_;
  Phase phase_ = Phase::ClueOpen;
  TokenSeq emitted_;

  std::vector<TokenSeq> clues_;
  TokenSeq current_clue_;
  SearchInterval clue_iv_ = SearchInterval::none(0);
  bool after_sep_ = false;
  std::vector<Clue> aux_;

  RankedList r1_, r2_;
  CandidateSet candidates_;
  std::vector<std::shared_ptr<const DocIndex>> doc_indexes_;  // parallel to candidates_.doc_ids
  std::vector<SearchInterval> doc_iv_;
  SearchInterval corpus_iv_ = SearchInterval::none(0);
  std::shared_ptr<const std::vector<FutureWindow>> windows_;
  std::vector<std::vector<std::uint32_t>> alive_;  // per window: aligned next positions

  std::vector<EvidenceRecord> evidences_;
  TokenSeq current_evidence_;
  TokenSeq answer_;
  std::vector<std::string> notes_;
};

/// Argmax with ties going to the lowest id.
TokenId select_greedy(const LogitVector& adjusted);

/// Called after each emission with the session state that produced it.
using StepObserver =
    std::function<void(const DecodeSession& before, const LogitVector& adjusted, TokenId chosen, std::size_t beam)>;

/// One greedy step: provider logits, adjustment, argmax, advance.
TokenId step(DecodeSession& session, const LogitProvider& provider, const StepObserver& observer = {});

struct BeamResult {
  DecodeSession session;
  double score = 0.0;  // cumulative log-softmax of adjusted logits, no penalty
  bool complete = true;
};

/// The clue stage is decoded greedily; from the evidence stage on, num_beams
/// groups of one beam each run with a Hamming diversity penalty against
/// tokens chosen by earlier groups at the same step. Results are ordered by
/// score (desc), then group index.
std::vector<BeamResult> decode(const Engine& engine, const std::string& query, const LogitProvider& provider,
                               const DecoderConfig& config, const StepObserver& observer = {});

/// Top beam as StructuredOutput; other beams are summarized in diagnostics.
StructuredOutput run_query(const Engine& engine, const std::string& query, const LogitProvider& provider,
                           const DecoderConfig& config, const StepObserver& observer = {});

}  // namespace retro
