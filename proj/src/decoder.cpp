#include "retro/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "retro/errors.hpp"

namespace retro {

namespace {

constexpr float kMaskedLogit = std::numeric_limits<float>::lowest();

template <typename T>
std::vector<T> dedupe(const std::vector<T>& items) {
  std::vector<T> out;
  std::set<T> seen;
  for (const auto& x : items) {
    if (seen.insert(x).second) out.push_back(x);
  }
  return out;
}

}  // namespace

std::string to_string(Stage s) {
  switch (s) {
    case Stage::Clue: return "clue";
    case Stage::Evidence: return "evidence";
    case Stage::Answer: return "answer";
    case Stage::Finished: return "finished";
  }
  return "?";
}

std::string to_string(ConstraintMode m) { return m == ConstraintMode::Candidates ? "candidates" : "corpus"; }

ConstraintMode parse_constraint_mode(const std::string& s) {
  if (s == "candidates") return ConstraintMode::Candidates;
  if (s == "corpus") return ConstraintMode::Corpus;
  throw InputError("constraint mode must be 'candidates' or 'corpus', got '" + s + "'");
}

// ---------------------------------------------------------------------------
// Config

void DecoderConfig::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw InputError(std::string("invalid decoder config: ") + what);
  };
  require(lmax >= 1, "lmax must be at least 1");
  require(std::isfinite(lambda) && lambda >= 0.0, "lambda must be finite and non-negative");
  require(std::isfinite(w1) && w1 >= 0.0 && std::isfinite(w2) && w2 >= 0.0, "fusion weights must be non-negative");
  require(candidates >= 1, "candidates must be at least 1");
  require(max_clue_tokens >= 1, "max_clue_tokens must be at least 1");
  require(min_evidence_tokens >= 1, "min_evidence_tokens must be at least 1");
  require(max_evidence_tokens >= min_evidence_tokens, "max_evidence_tokens must be >= min_evidence_tokens");
  require(token_budget >= 1, "token_budget must be at least 1");
  require(num_beams >= 1, "beams must be at least 1");
  require(std::isfinite(diversity_penalty) && diversity_penalty >= 0.0, "diversity_penalty must be non-negative");
}

nlohmann::json DecoderConfig::to_json() const {
  return {
      {"lw", lw},
      {"lmax", lmax},
      {"lambda", lambda},
      {"w1", w1},
      {"w2", w2},
      {"k_gen", k_gen},
      {"k_lex", k_lex},
      {"k_aux", k_aux},
      {"candidates", candidates},
      {"max_clues", max_clues},
      {"max_clue_tokens", max_clue_tokens},
      {"max_evidence", max_evidence},
      {"min_evidence_tokens", min_evidence_tokens},
      {"max_evidence_tokens", max_evidence_tokens},
      {"answer_budget", answer_budget},
      {"token_budget", token_budget},
      {"constraints", to_string(constraints)},
      {"beams", num_beams},
      {"diversity_penalty", diversity_penalty},
  };
}

DecoderConfig DecoderConfig::from_json(const nlohmann::json& j) { return from_json(j, DecoderConfig{}); }

DecoderConfig DecoderConfig::from_json(const nlohmann::json& j, DecoderConfig c) {
  if (!j.is_object()) throw InputError("decoder config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    auto count = [&](std::size_t& field) {
      if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw InputError("config key '" + key + "' must be a non-negative integer");
      }
      field = v.get<std::size_t>();
    };
    auto real = [&](double& field) {
      if (!v.is_number()) throw InputError("config key '" + key + "' must be a number");
      field = v.get<double>();
    };
    if (key == "lw") count(c.lw);
    else if (key == "lmax") count(c.lmax);
    else if (key == "lambda") real(c.lambda);
    else if (key == "w1") real(c.w1);
    else if (key == "w2") real(c.w2);
    else if (key == "k_gen") count(c.k_gen);
    else if (key == "k_lex") count(c.k_lex);
    else if (key == "k_aux") count(c.k_aux);
    else if (key == "candidates") count(c.candidates);
    else if (key == "max_clues") count(c.max_clues);
    else if (key == "max_clue_tokens") count(c.max_clue_tokens);
    else if (key == "max_evidence") count(c.max_evidence);
    else if (key == "min_evidence_tokens") count(c.min_evidence_tokens);
    else if (key == "max_evidence_tokens") count(c.max_evidence_tokens);
    else if (key == "answer_budget") count(c.answer_budget);
    else if (key == "token_budget") count(c.token_budget);
    else if (key == "beams") count(c.num_beams);
    else if (key == "diversity_penalty") real(c.diversity_penalty);
    else if (key == "constraints") {
      if (!v.is_string()) throw InputError("config key 'constraints' must be a string");
      c.constraints = parse_constraint_mode(v.get<std::string>());
    } else {
      throw InputError("unknown config key '" + key + "'");
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Windows

std::vector<Span> raw_window_spans(std::uint64_t doc_len, const std::vector<std::uint64_t>& positions,
                                   std::uint64_t clue_len, std::uint64_t lw) {
  std::vector<Span> out;
  for (auto p : positions) {
    const auto begin = p > lw ? p - lw : 0;
    const auto end = std::min(doc_len, p + clue_len + lw);
    if (begin < end) out.emplace_back(begin, end);
  }
  return out;
}

std::vector<Span> merge_spans(std::vector<Span> spans, std::uint64_t lmax) {
  for (auto& s : spans) s.second = std::min(s.second, s.first + lmax);
  std::sort(spans.begin(), spans.end());
  spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
  std::vector<Span> out;
  for (const auto& s : spans) {
    if (!out.empty()) {
      auto& cur = out.back();
      const auto merged_end = std::max(cur.second, s.second);
      if (s.first < cur.second && merged_end - cur.first <= lmax) {
        cur.second = merged_end;
        continue;
      }
    }
    out.push_back(s);
  }
  return out;
}

double TermOverlapScorer::score(TokenView query, TokenView window) const {
  // Markers sit above every corpus id, so the window tells us nothing about
  // them; only ids a tokenizer can emit for content count.
  std::set<TokenId> q;
  for (auto t : query) {
    if (!is_reserved(t)) q.insert(t);
  }
  if (q.empty()) return 0.0;
  const std::set<TokenId> w(window.begin(), window.end());
  std::size_t hit = 0;
  for (auto t : q) hit += w.count(t);
  return static_cast<double>(hit) / static_cast<double>(q.size());
}

Engine Engine::with_defaults(std::shared_ptr<const CorpusIndex> corpus) {
  Engine e;
  e.manager = std::make_shared<const DocIndexManager>(corpus);
  e.corpus = std::move(corpus);
  e.weigher = std::make_shared<const DocFrequencyWeigher>();
  e.scorer = std::make_shared<const TermOverlapScorer>();
  return e;
}

std::vector<FutureWindow> locate_windows(const DocIndexManager& manager, const std::vector<DocId>& candidates,
                                         const std::vector<TokenSeq>& clues, std::size_t lw, std::size_t lmax) {
  std::vector<FutureWindow> out;
  for (auto d : candidates) {
    const auto idx = manager.get(d);
    const auto doc_len = static_cast<std::uint64_t>(idx->forward.length() - 1);
    std::vector<Span> spans;
    for (const auto& c : clues) {
      if (c.empty()) continue;
      const auto found = raw_window_spans(doc_len, idx->forward.locate(c), c.size(), lw);
      spans.insert(spans.end(), found.begin(), found.end());
    }
    for (const auto& [b, e] : merge_spans(std::move(spans), lmax)) {
      out.push_back({d, b, idx->forward.extract(b, e - b), 0.0});
    }
  }
  return out;
}

void score_windows(std::vector<FutureWindow>& windows, TokenView query, const RelevanceScorer& scorer) {
  for (auto& w : windows) {
    const double s = scorer.score(query, w.tokens);
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) throw InputError("relevance scorer returned a value outside [0, 1]");
    w.score = s;
  }
}

// ---------------------------------------------------------------------------
// Output

nlohmann::json StructuredOutput::to_json() const {
  auto evs = nlohmann::json::array();
  for (const auto& e : evidences) {
    evs.push_back({{"doc_id", e.doc_id}, {"source_id", e.source_id}, {"start", e.start}, {"text", e.text}});
  }
  return {{"query", query},         {"clues", clues},       {"evidences", evs},
          {"answer", answer},       {"complete", complete}, {"diagnostics", diagnostics}};
}

std::string StructuredOutput::render_pretty() const {
  std::ostringstream os;
  os << "query:    " << query << "\n";
  os << "clues:    ";
  for (std::size_t i = 0; i < clues.size(); ++i) os << (i ? " | " : "") << clues[i];
  os << "\n";
  if (evidences.empty()) os << "evidence: (none)\n";
  for (std::size_t i = 0; i < evidences.size(); ++i) {
    const auto& e = evidences[i];
    os << "evidence " << i + 1 << " [doc " << e.doc_id << " \"" << e.source_id << "\" @" << e.start << "]: " << e.text
       << "\n";
  }
  os << "answer:   " << answer << "\n";
  if (!complete) os << "(incomplete: token budget exhausted)\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Session

DecodeSession::DecodeSession(const Engine& engine, std::string query, DecoderConfig config)
    : engine_(engine), config_(config), specials_(engine.specials()), query_(std::move(query)) {
  if (!engine_.corpus || !engine_.manager || !engine_.weigher || !engine_.scorer) {
    throw InputError("engine is missing a component");
  }
  config_.validate();
  query_tokens_ = engine_.corpus->tokenizer().encode(query_);
  if (query_tokens_.empty()) throw InputError("query is empty");
  aux_ = auxiliary_clues(query_, *engine_.corpus, *engine_.weigher, config_.k_aux);
  windows_ = std::make_shared<const std::vector<FutureWindow>>();
}

Stage DecodeSession::stage() const {
  switch (phase_) {
    case Phase::ClueOpen:
    case Phase::ClueBody: return Stage::Clue;
    case Phase::EvidenceOpen:
    case Phase::EvidenceBody: return Stage::Evidence;
    case Phase::Answer: return Stage::Answer;
    case Phase::Finished: return Stage::Finished;
  }
  return Stage::Finished;
}

TokenSeq DecodeSession::context() const {
  TokenSeq ctx = query_tokens_;
  ctx.insert(ctx.end(), emitted_.begin(), emitted_.end());
  return ctx;
}

std::vector<TokenId> DecodeSession::content_continuations() const {
  std::set<TokenId> out;
  auto collect = [&](const FMIndex& idx, const SearchInterval& iv) {
    if (iv.empty()) return;
    for (const auto& [t, next] : idx.allowed_next(iv)) {
      if (specials_.is_content(t)) out.insert(t);
    }
  };
  if (phase_ == Phase::ClueBody) {
    collect(engine_.corpus->reversed(), clue_iv_);
  } else if (config_.constraints == ConstraintMode::Corpus) {
    collect(engine_.corpus->reversed(), corpus_iv_);
  } else {
    for (std::size_t i = 0; i < doc_indexes_.size(); ++i) collect(doc_indexes_[i]->reversed, doc_iv_[i]);
  }
  return {out.begin(), out.end()};
}

std::vector<TokenId> DecodeSession::compute_mask(bool* forced) const {
  if (forced) *forced = false;
  std::vector<TokenId> m;
  switch (phase_) {
    case Phase::ClueOpen: return {specials_.clue_open};
    case Phase::EvidenceOpen: return {specials_.evidence_open};
    case Phase::Finished: return {};
    case Phase::Answer:
      m.resize(vocab_size());
      for (TokenId t = 0; t < vocab_size(); ++t) m[t] = t;
      return m;
    case Phase::ClueBody: {
      if (clues_.size() >= config_.max_clues) return {specials_.clue_close};
      if (current_clue_.size() < config_.max_clue_tokens) m = content_continuations();
      if (current_clue_.empty()) {
        if (!after_sep_ && clues_.empty()) m.push_back(specials_.clue_close);
      } else {
        m.push_back(specials_.clue_close);
        if (clues_.size() + 1 < config_.max_clues) m.push_back(specials_.sep);
      }
      break;
    }
    case Phase::EvidenceBody: {
      if (evidences_.size() >= config_.max_evidence) return {specials_.evidence_close};
      if (current_evidence_.size() < config_.max_evidence_tokens) m = content_continuations();
      if (current_evidence_.empty()) {
        if (!after_sep_) m.push_back(specials_.evidence_close);
      } else if (current_evidence_.size() >= config_.min_evidence_tokens || m.empty()) {
        // the minimum length is waived when the evidence cannot be extended
        m.push_back(specials_.evidence_close);
        if (evidences_.size() + 1 < config_.max_evidence) m.push_back(specials_.sep);
      }
      if (m.empty()) {
        if (forced) *forced = true;
        return {specials_.evidence_close};
      }
      break;
    }
  }
  std::sort(m.begin(), m.end());
  return m;
}

std::vector<TokenId> DecodeSession::mask() const { return compute_mask(nullptr); }

std::vector<double> DecodeSession::bonuses() const {
  std::vector<double> b(vocab_size(), 0.0);
  if (phase_ != Phase::EvidenceBody) return b;
  const auto& windows = *windows_;
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const double bonus = config_.lambda * windows[w].score;
    const auto& toks = windows[w].tokens;
    for (auto j : alive_[w]) {
      if (j < toks.size()) b[toks[j]] = std::max(b[toks[j]], bonus);
    }
  }
  return b;
}

LogitVector DecodeSession::adjust_logits(const LogitVector& raw) const {
  if (finished()) throw StateError("session is finished");
  if (raw.size() != vocab_size()) {
    throw InputError("logit vector has " + std::to_string(raw.size()) + " entries, expected " +
                     std::to_string(vocab_size()));
  }
  for (float x : raw) {
    if (!std::isfinite(x)) throw InputError("logit provider returned a non-finite value");
  }
  const auto b = bonuses();
  LogitVector out(raw.size(), kMaskedLogit);
  for (auto t : mask()) out[t] = static_cast<float>(static_cast<double>(raw[t]) + b[t]);
  return out;
}

void DecodeSession::finish_clue() {
  if (!current_clue_.empty()) clues_.push_back(current_clue_);
  current_clue_.clear();
  clue_iv_ = engine_.corpus->reversed().full_interval();
}

void DecodeSession::enter_evidence_stage() {
  const auto& corpus = *engine_.corpus;
  const auto generated = weigh_generated_clues(corpus, dedupe(clues_));
  r1_ = score_documents(corpus, generated, config_.k_gen);
  r2_ = lexical_rank(query_, corpus, *engine_.weigher, config_.k_lex);
  candidates_ = fuse(r1_, r2_, config_.w1, config_.w2, config_.candidates);

  auto windows = std::make_shared<std::vector<FutureWindow>>();
  if (config_.constraints == ConstraintMode::Candidates) {
    for (auto d : candidates_.doc_ids) doc_indexes_.push_back(engine_.manager->get(d));
    std::vector<TokenSeq> all;
    for (const auto& c : generated) all.push_back(c.tokens);
    for (const auto& c : aux_) all.push_back(c.tokens);
    *windows = locate_windows(*engine_.manager, candidates_.doc_ids, dedupe(all), config_.lw, config_.lmax);
    score_windows(*windows, query_tokens_, *engine_.scorer);
  }
  windows_ = std::move(windows);
  phase_ = Phase::EvidenceOpen;
}

void DecodeSession::reset_evidence_cursors() {
  current_evidence_.clear();
  doc_iv_.clear();
  for (const auto& idx : doc_indexes_) doc_iv_.push_back(idx->reversed.full_interval());
  corpus_iv_ = engine_.corpus->reversed().full_interval();
  const auto& windows = *windows_;
  alive_.assign(windows.size(), {});
  for (std::size_t w = 0; w < windows.size(); ++w) {
    alive_[w].resize(windows[w].tokens.size());
    for (std::uint32_t j = 0; j < alive_[w].size(); ++j) alive_[w][j] = j;
  }
}

void DecodeSession::finish_evidence() {
  if (current_evidence_.empty()) return;
  EvidenceRecord rec;
  rec.tokens = current_evidence_;
  bool placed = false;
  if (config_.constraints == ConstraintMode::Candidates) {
    for (std::size_t i = 0; i < doc_indexes_.size() && !placed; ++i) {
      if (doc_iv_[i].empty()) continue;
      const auto pos = doc_indexes_[i]->forward.locate(current_evidence_);
      if (pos.empty()) continue;
      rec.doc_id = candidates_.doc_ids[i];
      rec.start = pos.front();
      placed = true;
    }
  } else {
    for (auto p : engine_.corpus->forward().locate(current_evidence_)) {
      if (const auto where = engine_.corpus->position_to_doc(p)) {
        rec.doc_id = where->doc_id;
        rec.start = where->offset;
        placed = true;
        break;
      }
    }
  }
  if (!placed) throw StateError("completed evidence has no source document");
  evidences_.push_back(std::move(rec));
  current_evidence_.clear();
}

void DecodeSession::advance(TokenId t) {
  if (finished()) throw StateError("session is finished");
  bool forced = false;
  const auto m = compute_mask(&forced);
  if (!std::binary_search(m.begin(), m.end(), t)) {
    throw InputError("token " + std::to_string(t) + " is not allowed in the " + to_string(stage()) + " stage");
  }
  if (forced) notes_.push_back("evidence_close forced after " + std::to_string(emitted_.size()) + " tokens: no legal continuation");
  emitted_.push_back(t);

  switch (phase_) {
    case Phase::ClueOpen:
      phase_ = Phase::ClueBody;
      clue_iv_ = engine_.corpus->reversed().full_interval();
      after_sep_ = false;
      break;
    case Phase::ClueBody:
      if (t == specials_.clue_close) {
        finish_clue();
        enter_evidence_stage();
      } else if (t == specials_.sep) {
        finish_clue();
        after_sep_ = true;
      } else {
        current_clue_.push_back(t);
        clue_iv_ = engine_.corpus->reversed().backward_step(clue_iv_, t);
        after_sep_ = false;
      }
      break;
    case Phase::EvidenceOpen:
      phase_ = Phase::EvidenceBody;
      after_sep_ = false;
      reset_evidence_cursors();
      break;
    case Phase::EvidenceBody:
      if (t == specials_.evidence_close) {
        finish_evidence();
        phase_ = config_.answer_budget == 0 ? Phase::Finished : Phase::Answer;
      } else if (t == specials_.sep) {
        finish_evidence();
        reset_evidence_cursors();
        after_sep_ = true;
      } else {
        current_evidence_.push_back(t);
        after_sep_ = false;
        for (std::size_t i = 0; i < doc_indexes_.size(); ++i) {
          if (!doc_iv_[i].empty()) doc_iv_[i] = doc_indexes_[i]->reversed.backward_step(doc_iv_[i], t);
        }
        corpus_iv_ = engine_.corpus->reversed().backward_step(corpus_iv_, t);
        const auto& windows = *windows_;
        for (std::size_t w = 0; w < windows.size(); ++w) {
          std::vector<std::uint32_t> next;
          for (auto j : alive_[w]) {
            if (j < windows[w].tokens.size() && windows[w].tokens[j] == t) next.push_back(j + 1);
          }
          alive_[w] = std::move(next);
        }
      }
      break;
    case Phase::Answer:
      if (t == specials_.eos) {
        phase_ = Phase::Finished;
      } else {
        answer_.push_back(t);
        if (answer_.size() >= config_.answer_budget) phase_ = Phase::Finished;
      }
      break;
    case Phase::Finished: break;
  }
}

StructuredOutput DecodeSession::output(bool complete) const {
  const auto& corpus = *engine_.corpus;
  const auto& tok = corpus.tokenizer();
  StructuredOutput out;
  out.query = query_;
  out.complete = complete;
  for (const auto& c : clues_) {
    out.clues.push_back(tok.decode(c));
    out.clue_tokens.push_back(c);
  }
  for (const auto& e : evidences_) {
    out.evidences.push_back({e.doc_id, corpus.document(e.doc_id).external_id, e.start, tok.decode(e.tokens), e.tokens});
  }
  out.answer_tokens = answer_;
  out.answer = render_tokens(tok, specials_, answer_);

  auto cands = nlohmann::json::array();
  for (std::size_t i = 0; i < candidates_.doc_ids.size(); ++i) {
    cands.push_back({{"doc_id", candidates_.doc_ids[i]}, {"score", candidates_.fused_scores[i]}});
  }
  auto aux = nlohmann::json::array();
  for (const auto& c : aux_) aux.push_back(tok.decode(c.tokens));
  auto& d = out.diagnostics;
  d["stage"] = to_string(stage());
  d["constraints"] = to_string(config_.constraints);
  d["auxiliary_clues"] = aux;
  d["candidates"] = cands;
  d["windows"] = windows_->size();
  d["notes"] = notes_;
  d["stream"] = render_tokens(tok, specials_, emitted_);
  d["tokens"] = {{"input", query_tokens_.size()},
                 {"output", emitted_.size()},
                 {"total", query_tokens_.size() + emitted_.size()}};
  return out;
}

// ---------------------------------------------------------------------------
// Drivers

TokenId select_greedy(const LogitVector& adjusted) {
  if (adjusted.empty()) throw InputError("empty logit vector");
  return static_cast<TokenId>(std::max_element(adjusted.begin(), adjusted.end()) - adjusted.begin());
}

TokenId step(DecodeSession& session, const LogitProvider& provider, const StepObserver& observer) {
  if (session.finished()) throw StateError("session is finished");
  const auto adjusted = session.adjust_logits(provider.logits(session.context()));
  const auto t = select_greedy(adjusted);
  if (observer) observer(session, adjusted, t, 0);
  session.advance(t);
  return t;
}

std::vector<BeamResult> decode(const Engine& engine, const std::string& query, const LogitProvider& provider,
                               const DecoderConfig& config, const StepObserver& observer) {
  DecodeSession root(engine, query, config);
  if (provider.vocab_size() != root.vocab_size()) {
    throw InputError("provider vocabulary (" + std::to_string(provider.vocab_size()) +
                     ") does not match the index plus stage markers (" + std::to_string(root.vocab_size()) + ")");
  }
  while (!root.finished() && root.stage() == Stage::Clue) {
    if (root.emitted().size() >= config.token_budget) return {{root, 0.0, false}};
    step(root, provider, observer);
  }

  std::vector<BeamResult> beams(config.num_beams, BeamResult{root, 0.0, true});
  std::vector<std::uint32_t> used(root.vocab_size());
  for (;;) {
    bool active = false;
    std::fill(used.begin(), used.end(), 0);
    for (std::size_t g = 0; g < beams.size(); ++g) {
      auto& b = beams[g];
      if (b.session.finished() || !b.complete) continue;
      if (b.session.emitted().size() >= config.token_budget) {
        b.complete = false;
        continue;
      }
      active = true;
      const auto adjusted = b.session.adjust_logits(provider.logits(b.session.context()));
      const auto m = b.session.mask();
      double hi = -std::numeric_limits<double>::infinity();
      for (auto t : m) hi = std::max(hi, static_cast<double>(adjusted[t]));
      double sum = 0.0;
      for (auto t : m) sum += std::exp(static_cast<double>(adjusted[t]) - hi);
      const double lse = hi + std::log(sum);

      TokenId best = m.front();
      double best_sel = -std::numeric_limits<double>::infinity();
      for (auto t : m) {
        const double sel = static_cast<double>(adjusted[t]) - lse - config.diversity_penalty * used[t];
        if (sel > best_sel) {
          best_sel = sel;
          best = t;
        }
      }
      if (observer) observer(b.session, adjusted, best, g);
      b.score += static_cast<double>(adjusted[best]) - lse;
      ++used[best];
      b.session.advance(best);
    }
    if (!active) break;
  }
  std::stable_sort(beams.begin(), beams.end(),
                   [](const BeamResult& a, const BeamResult& b) { return a.score > b.score; });
  return beams;
}

StructuredOutput run_query(const Engine& engine, const std::string& query, const LogitProvider& provider,
                           const DecoderConfig& config, const StepObserver& observer) {
  const auto beams = decode(engine, query, provider, config, observer);
  auto out = beams.front().session.output(beams.front().complete);
  if (beams.size() > 1) {
    auto list = nlohmann::json::array();
    for (const auto& b : beams) {
      const auto o = b.session.output(b.complete);
      list.push_back({{"score", b.score}, {"evidences", o.to_json()["evidences"]}, {"answer", o.answer}});
    }
    out.diagnostics["beams"] = list;
  }
  return out;
}

}  // namespace retro
