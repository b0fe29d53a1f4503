#pragma once

// Helpers shared by the decoder-level suites: deterministic logit providers,
// small corpora, and a brute-force model of the decoding mask that reads only
// the emitted stream and plain document token vectors.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "retro/corpus.hpp"
#include "retro/decoder.hpp"
#include "retro/eval.hpp"

namespace retro::testing {

inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Pseudo-random logits in [-4, 4] that depend on (seed, last two context
/// tokens, candidate id). Deterministic and cheap.
class HashProvider final : public LogitProvider {
 public:
  HashProvider(std::uint32_t vocab, std::uint64_t seed) : vocab_(vocab), seed_(seed) {}
  std::uint32_t vocab_size() const override { return vocab_; }
  LogitVector logits(TokenView context) const override {
    std::uint64_t h = mix(seed_);
    const auto n = context.size();
    h = mix(h ^ (n > 0 ? context[n - 1] : 0xffffU));
    h = mix(h ^ (n > 1 ? context[n - 2] : 0xfffeU) ^ (n << 20));
    LogitVector out(vocab_);
    for (std::uint32_t t = 0; t < vocab_; ++t) {
      out[t] = static_cast<float>(static_cast<double>(mix(h ^ t) >> 11) / 9007199254740992.0 * 8.0 - 4.0);
    }
    return out;
  }

 private:
  std::uint32_t vocab_;
  std::uint64_t seed_;
};

/// Same value for every id, except the listed ids which get `high`.
class PreferenceProvider final : public LogitProvider {
 public:
  PreferenceProvider(std::uint32_t vocab, std::map<TokenId, float> high) : vocab_(vocab), high_(std::move(high)) {}
  std::uint32_t vocab_size() const override { return vocab_; }
  LogitVector logits(TokenView) const override {
    LogitVector out(vocab_, 0.0F);
    for (const auto& [t, v] : high_) out[t] = v;
    return out;
  }

 private:
  std::uint32_t vocab_;
  std::map<TokenId, float> high_;
};

/// Returns `value` for every query/window pair.
class ConstantScorer final : public RelevanceScorer {
 public:
  explicit ConstantScorer(double value) : value_(value) {}
  double score(TokenView, TokenView) const override { return value_; }

 private:
  double value_;
};

inline std::vector<RawDocument> raw_docs(const std::vector<std::string>& texts) {
  std::vector<RawDocument> out;
  for (std::size_t i = 0; i < texts.size(); ++i) out.push_back({"d" + std::to_string(i), "", texts[i]});
  return out;
}

inline std::shared_ptr<const CorpusIndex> make_corpus(const std::vector<RawDocument>& docs) {
  return std::make_shared<const CorpusIndex>(CorpusIndex::ingest(docs));
}

inline Engine make_engine(const std::vector<std::string>& texts) {
  return Engine::with_defaults(make_corpus(raw_docs(texts)));
}

/// Random word documents over a small vocabulary so that prefixes are shared
/// across documents and constraint cursors branch often.
inline std::vector<std::string> random_word_docs(std::mt19937_64& rng, std::size_t docs, std::size_t vocab,
                                                 std::size_t min_len, std::size_t max_len) {
  std::vector<std::string> out;
  for (std::size_t d = 0; d < docs; ++d) {
    const auto len = min_len + rng() % (max_len - min_len + 1);
    std::string text;
    for (std::size_t i = 0; i < len; ++i) text += (i ? " w" : "w") + std::to_string(rng() % vocab);
    out.push_back(text);
  }
  return out;
}

inline std::string data_path(const std::string& rel) { return std::string(RETRO_TEST_DATA) + "/" + rel; }

struct CapitalsFixture {
  std::vector<RawDocument> corpus;
  std::vector<ExampleRecord> examples;
  std::vector<EvalRecord> eval;
};

inline CapitalsFixture load_capitals() {
  CapitalsFixture fx;
  std::ifstream c(data_path("capitals/corpus.jsonl"));
  fx.corpus = read_corpus_jsonl(c, "corpus.jsonl");
  std::ifstream x(data_path("capitals/examples.jsonl"));
  fx.examples = read_examples_jsonl(x, "examples.jsonl");
  std::ifstream e(data_path("capitals/eval.jsonl"));
  fx.eval = read_eval_jsonl(e, "eval.jsonl");
  return fx;
}

// ---------------------------------------------------------------------------
// Brute-force mask model

/// What the stream emitted so far says about the decoder state.
struct StreamState {
  enum Phase { ClueOpen, ClueBody, EvidenceOpen, EvidenceBody, Answer, Finished } phase = ClueOpen;
  std::size_t clues = 0;
  TokenSeq clue;
  std::size_t evidences = 0;
  TokenSeq evidence;
  bool after_sep = false;
  std::size_t answer = 0;
};

inline StreamState replay(TokenView emitted, const SpecialTokens& sp, const DecoderConfig& cfg) {
  StreamState s;
  for (auto t : emitted) {
    switch (s.phase) {
      case StreamState::ClueOpen: s.phase = StreamState::ClueBody; break;
      case StreamState::ClueBody:
        if (t == sp.clue_close || t == sp.sep) {
          if (!s.clue.empty()) ++s.clues;
          s.clue.clear();
          s.after_sep = t == sp.sep;
          if (t == sp.clue_close) s.phase = StreamState::EvidenceOpen;
        } else {
          s.clue.push_back(t);
          s.after_sep = false;
        }
        break;
      case StreamState::EvidenceOpen:
        s.phase = StreamState::EvidenceBody;
        s.after_sep = false;
        break;
      case StreamState::EvidenceBody:
        if (t == sp.evidence_close || t == sp.sep) {
          if (!s.evidence.empty()) ++s.evidences;
          s.evidence.clear();
          s.after_sep = t == sp.sep;
          if (t == sp.evidence_close) s.phase = cfg.answer_budget == 0 ? StreamState::Finished : StreamState::Answer;
        } else {
          s.evidence.push_back(t);
          s.after_sep = false;
        }
        break;
      case StreamState::Answer:
        if (t == sp.eos || ++s.answer >= cfg.answer_budget) s.phase = StreamState::Finished;
        break;
      case StreamState::Finished: break;
    }
  }
  return s;
}

/// {t : prefix . t occurs in some listed document}, scanning token vectors.
inline std::set<TokenId> scan_continuations(const std::vector<TokenSeq>& docs, TokenView prefix) {
  std::set<TokenId> out;
  for (const auto& d : docs) {
    const auto c = oracle::naive_continuations(d, prefix);
    out.insert(c.begin(), c.end());
  }
  return out;
}

/// Recomputes the allowed set for `session` from its emitted stream, its
/// config and the plain token vectors of the documents it may copy from.
inline std::vector<TokenId> oracle_mask(const DecodeSession& session, const CorpusIndex& corpus) {
  const auto& sp = session.specials();
  const auto& cfg = session.config();
  const auto s = replay(session.emitted(), sp, cfg);
  std::vector<TokenSeq> all_docs, evidence_docs;
  for (DocId d = 0; d < corpus.num_documents(); ++d) all_docs.push_back(corpus.document_tokens(d));
  if (cfg.constraints == ConstraintMode::Corpus) {
    evidence_docs = all_docs;
  } else {
    for (auto d : session.candidates().doc_ids) evidence_docs.push_back(corpus.document_tokens(d));
  }

  std::set<TokenId> m;
  switch (s.phase) {
    case StreamState::ClueOpen: return {sp.clue_open};
    case StreamState::EvidenceOpen: return {sp.evidence_open};
    case StreamState::Finished: return {};
    case StreamState::Answer: {
      std::vector<TokenId> all(sp.extended_vocab());
      for (TokenId t = 0; t < all.size(); ++t) all[t] = t;
      return all;
    }
    case StreamState::ClueBody:
      if (s.clues >= cfg.max_clues) return {sp.clue_close};
      if (s.clue.size() < cfg.max_clue_tokens) m = scan_continuations(all_docs, s.clue);
      if (s.clue.empty()) {
        if (!s.after_sep && s.clues == 0) m.insert(sp.clue_close);
      } else {
        m.insert(sp.clue_close);
        if (s.clues + 1 < cfg.max_clues) m.insert(sp.sep);
      }
      break;
    case StreamState::EvidenceBody: {
      if (s.evidences >= cfg.max_evidence) return {sp.evidence_close};
      if (s.evidence.size() < cfg.max_evidence_tokens) m = scan_continuations(evidence_docs, s.evidence);
      const bool extendable = !m.empty();
      if (s.evidence.empty()) {
        if (!s.after_sep) m.insert(sp.evidence_close);
      } else if (s.evidence.size() >= cfg.min_evidence_tokens || !extendable) {
        m.insert(sp.evidence_close);
        if (s.evidences + 1 < cfg.max_evidence) m.insert(sp.sep);
      }
      if (m.empty()) return {sp.evidence_close};
      break;
    }
  }
  return {m.begin(), m.end()};
}

/// lambda * max window score over windows in which the current evidence ends
/// at some offset j and the window has token t at j.
inline std::vector<double> oracle_bonuses(const DecodeSession& session) {
  std::vector<double> b(session.vocab_size(), 0.0);
  if (session.stage() != Stage::Evidence || session.emitted().empty() ||
      session.emitted().back() == session.specials().clue_close) {
    return b;
  }
  const auto& e = session.current_evidence();
  for (const auto& w : session.windows()) {
    for (std::size_t j = e.size(); j < w.tokens.size(); ++j) {
      if (std::equal(e.begin(), e.end(), w.tokens.begin() + static_cast<std::ptrdiff_t>(j - e.size()))) {
        b[w.tokens[j]] = std::max(b[w.tokens[j]], session.config().lambda * w.score);
      }
    }
  }
  return b;
}

/// Lowest id among the maxima, by linear scan.
inline TokenId oracle_argmax(const LogitVector& v) {
  TokenId best = 0;
  for (TokenId t = 1; t < v.size(); ++t) {
    if (v[t] > v[best]) best = t;
  }
  return best;
}

}  // namespace retro::testing
