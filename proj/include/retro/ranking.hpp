#pragma once

#include <cstddef>
#include <memory>
#include <string_view>
#include <vector>

#include "retro/corpus.hpp"
#include "retro/types.hpp"

namespace retro {

enum class ClueSource { Generated, Auxiliary };

struct Clue {
  TokenSeq tokens;
  ClueSource source = ClueSource::Generated;
  double weight = 0.0;
};

struct ScoredDoc {
  DocId doc_id = 0;
  double score = 0.0;
  friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

/// Descending score, ties broken by ascending doc_id.
using RankedList = std::vector<ScoredDoc>;

struct CandidateSet {
  std::vector<DocId> doc_ids;
  std::vector<double> fused_scores;  // parallel to doc_ids
};

/// ln(N/CF) + ln(N/DF). Throws InputError when the clue is absent (cf == 0).
double clue_weight(const ClueStats& stats, std::uint64_t n_docs);

/// ln(1 + TF(clue, doc)); 0 when the clue does not occur in doc.
double clue_doc_score(const ClueStats& stats, DocId doc);

/// Re-checks each generated clue against the corpus (cf >= 1, else
/// InputError) and attaches its clue_weight.
std::vector<Clue> weigh_generated_clues(const CorpusIndex& corpus, const std::vector<TokenSeq>& clues);

/// S_gen(d) = sum_i w_i * ln(1 + TF(c_i, d)) over documents holding at least
/// one clue; top k_gen.
RankedList score_documents(const CorpusIndex& corpus, const std::vector<Clue>& clues, std::size_t k_gen);

struct WeightedTerm {
  TokenSeq term;
  double weight = 0.0;
};

/// Query-side term importance. Must be deterministic; a learned sparse
/// encoder can sit behind this interface.
class LexicalWeigher {
 public:
  virtual ~LexicalWeigher() = default;
  virtual std::vector<WeightedTerm> weigh(std::string_view query, const CorpusIndex& corpus) const = 0;
};

/// weight(v) = (occurrences of v in the query) * ln(N / DF(v)). Terms absent
/// from the corpus or carrying zero weight are dropped.
class DocFrequencyWeigher final : public LexicalWeigher {
 public:
  std::vector<WeightedTerm> weigh(std::string_view query, const CorpusIndex& corpus) const override;
};

/// Top k_aux weighted terms as auxiliary clues (weight desc, then token order).
std::vector<Clue> auxiliary_clues(std::string_view query, const CorpusIndex& corpus, const LexicalWeigher& weigher,
                                  std::size_t k_aux);

/// Sum over weighted terms of weight * ln(1 + TF(term, d)); top k_lex.
RankedList lexical_rank(std::string_view query, const CorpusIndex& corpus, const LexicalWeigher& weigher,
                        std::size_t k_lex);

/// Weighted reciprocal rank fusion, S(d) = w1/rank_1(d) + w2/rank_2(d) with
/// 1-based ranks and absence contributing 0. Throws InputError for k == 0.
CandidateSet fuse(const RankedList& r1, const RankedList& r2, double w1, double w2, std::size_t k);

/// Sort by (score desc, doc_id asc) and keep the first k entries.
RankedList top_k(RankedList list, std::size_t k);

}  // namespace retro
