#include "retro/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "retro/errors.hpp"

namespace retro {

double clue_weight(const ClueStats& stats, std::uint64_t n_docs) {
  if (stats.cf == 0 || stats.df == 0) throw InputError("clue weight is undefined for an absent clue");
  const auto n = static_cast<double>(n_docs);
  return std::log(n / static_cast<double>(stats.cf)) + std::log(n / static_cast<double>(stats.df));
}

double clue_doc_score(const ClueStats& stats, DocId doc) {
  const auto it = stats.tf.find(doc);
  if (it == stats.tf.end()) return 0.0;
  return std::log1p(static_cast<double>(it->second));
}

namespace {

// Fused scores are sums of reciprocals, so mathematically equal values can
// differ in the last bits depending on the weights. Treat those as ties.
constexpr double kFuseTieTolerance = 1e-12;

RankedList sorted_top_k(RankedList list, std::size_t k, double tie_tolerance) {
  std::sort(list.begin(), list.end(), [tie_tolerance](const ScoredDoc& a, const ScoredDoc& b) {
    const double scale = std::max(std::fabs(a.score), std::fabs(b.score));
    if (std::fabs(a.score - b.score) > tie_tolerance * scale) return a.score > b.score;
    return a.doc_id < b.doc_id;
  });
  if (list.size() > k) list.resize(k);
  return list;
}

}  // namespace

RankedList top_k(RankedList list, std::size_t k) { return sorted_top_k(std::move(list), k, 0.0); }

std::vector<Clue> weigh_generated_clues(const CorpusIndex& corpus, const std::vector<TokenSeq>& clues) {
  std::vector<Clue> out;
  for (const auto& c : clues) {
    const auto stats = clue_stats(corpus, c);
    if (stats.cf == 0) throw InputError("generated clue does not occur in the corpus");
    out.push_back({c, ClueSource::Generated, clue_weight(stats, corpus.num_documents())});
  }
  return out;
}

RankedList score_documents(const CorpusIndex& corpus, const std::vector<Clue>& clues, std::size_t k_gen) {
  std::map<DocId, double> scores;
  for (const auto& c : clues) {
    const auto stats = clue_stats(corpus, c.tokens);
    if (stats.cf == 0) throw InputError("generated clue does not occur in the corpus");
    for (const auto& [doc, tf] : stats.tf) scores[doc] += c.weight * std::log1p(static_cast<double>(tf));
  }
  RankedList out;
  for (const auto& [doc, s] : scores) out.push_back({doc, s});
  return top_k(std::move(out), k_gen);
}

std::vector<WeightedTerm> DocFrequencyWeigher::weigh(std::string_view query, const CorpusIndex& corpus) const {
  std::map<TokenId, std::uint64_t> counts;
  for (auto t : corpus.tokenizer().encode(query)) {
    if (!is_reserved(t)) ++counts[t];
  }
  const auto n = static_cast<double>(corpus.num_documents());
  std::vector<WeightedTerm> out;
  for (const auto& [t, count] : counts) {
    const auto stats = clue_stats(corpus, TokenSeq{t});
    if (stats.df == 0) continue;
    const double w = static_cast<double>(count) * std::log(n / static_cast<double>(stats.df));
    if (w > 0.0) out.push_back({TokenSeq{t}, w});
  }
  return out;
}

std::vector<Clue> auxiliary_clues(std::string_view query, const CorpusIndex& corpus, const LexicalWeigher& weigher,
                                  std::size_t k_aux) {
  auto terms = weigher.weigh(query, corpus);
  std::stable_sort(terms.begin(), terms.end(), [](const WeightedTerm& a, const WeightedTerm& b) {
    if (a.weight != b.weight) return a.weight > b.weight;
    return a.term < b.term;
  });
  std::vector<Clue> out;
  for (auto& t : terms) {
    if (out.size() == k_aux) break;
    if (t.term.empty()) continue;
    out.push_back({std::move(t.term), ClueSource::Auxiliary, t.weight});
  }
  return out;
}

RankedList lexical_rank(std::string_view query, const CorpusIndex& corpus, const LexicalWeigher& weigher,
                        std::size_t k_lex) {
  std::map<DocId, double> scores;
  for (const auto& t : weigher.weigh(query, corpus)) {
    if (t.term.empty()) continue;
    const auto stats = clue_stats(corpus, t.term);
    for (const auto& [doc, tf] : stats.tf) scores[doc] += t.weight * std::log1p(static_cast<double>(tf));
  }
  RankedList out;
  for (const auto& [doc, s] : scores) out.push_back({doc, s});
  return top_k(std::move(out), k_lex);
}

CandidateSet fuse(const RankedList& r1, const RankedList& r2, double w1, double w2, std::size_t k) {
  if (k == 0) throw InputError("candidate set size must be positive");
  std::map<DocId, double> fused;
  for (std::size_t i = 0; i < r1.size(); ++i) fused[r1[i].doc_id] += w1 / static_cast<double>(i + 1);
  for (std::size_t i = 0; i < r2.size(); ++i) fused[r2[i].doc_id] += w2 / static_cast<double>(i + 1);
  RankedList all;
  for (const auto& [doc, s] : fused) all.push_back({doc, s});
  CandidateSet out;
  for (const auto& d : sorted_top_k(std::move(all), k, kFuseTieTolerance)) {
    out.doc_ids.push_back(d.doc_id);
    out.fused_scores.push_back(d.score);
  }
  return out;
}

}  // namespace retro
