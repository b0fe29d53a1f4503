#include "retro/c_api.h"

#include <cstring>
#include <filesystem>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "retro/corpus.hpp"
#include "retro/decoder.hpp"
#include "retro/errors.hpp"

using namespace retro;

namespace {

thread_local std::string g_last_error;

struct Entry {
  std::mutex busy;  // guards against accidental concurrent use of one handle
  bool started = false;
  DecodeSession session;
  explicit Entry(DecodeSession s) : session(std::move(s)) {}
};

class Registry {
 public:
  /// Engines are shared between handles opened on the same directory while
  /// any of them is alive.
  Engine engine_for(const std::string& dir) {
    const auto key = std::filesystem::weakly_canonical(dir).string();
    std::lock_guard lock(mutex_);
    if (auto it = engines_.find(key); it != engines_.end()) {
      if (auto corpus = it->second.lock()) return Engine::with_defaults(std::move(corpus));
    }
    auto corpus = std::make_shared<const CorpusIndex>(CorpusIndex::load(dir));
    engines_[key] = corpus;
    return Engine::with_defaults(std::move(corpus));
  }

  retro_handle add(std::shared_ptr<Entry> e) {
    std::lock_guard lock(mutex_);
    const auto id = next_++;
    handles_[id] = std::move(e);
    return id;
  }

  std::shared_ptr<Entry> get(retro_handle h) {
    std::lock_guard lock(mutex_);
    const auto it = handles_.find(h);
    if (it == handles_.end()) throw StateError("handle " + std::to_string(h) + " is not open");
    return it->second;
  }

  std::shared_ptr<Entry> take(retro_handle h) {
    std::lock_guard lock(mutex_);
    const auto it = handles_.find(h);
    if (it == handles_.end()) throw StateError("handle " + std::to_string(h) + " is not open");
    auto e = std::move(it->second);
    handles_.erase(it);
    return e;
  }

 private:
  std::mutex mutex_;
  retro_handle next_ = 1;
  std::map<retro_handle, std::shared_ptr<Entry>> handles_;
  std::map<std::string, std::weak_ptr<const CorpusIndex>> engines_;
};

Registry& registry() {
  static Registry r;
  return r;
}

template <typename F>
int guarded(F&& fn) {
  try {
    fn();
    g_last_error.clear();
    return RETRO_OK;
  } catch (const InputError& e) {
    g_last_error = e.what();
    return RETRO_INPUT_ERROR;
  } catch (const StateError& e) {
    g_last_error = e.what();
    return RETRO_STATE_ERROR;
  } catch (const FormatError& e) {
    g_last_error = e.what();
    return RETRO_FORMAT_ERROR;
  } catch (const nlohmann::json::exception& e) {
    g_last_error = std::string("invalid JSON: ") + e.what();
    return RETRO_INPUT_ERROR;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RETRO_INTERNAL_ERROR;
  } catch (...) {
    g_last_error = "unknown error";
    return RETRO_INTERNAL_ERROR;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw InputError(std::string(what) + " must not be NULL");
}

char* copy_string(const std::string& s) {
  auto* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

int retro_open(const char* index_dir, const char* query, const char* config_json, retro_handle* out) {
  return guarded([&] {
    require(index_dir, "index_dir");
    require(query, "query");
    require(out, "out");
    DecoderConfig cfg;
    if (config_json != nullptr && *config_json != '\0') cfg = DecoderConfig::from_json(nlohmann::json::parse(config_json));
    auto engine = registry().engine_for(index_dir);
    *out = registry().add(std::make_shared<Entry>(DecodeSession(engine, query, cfg)));
  });
}

int retro_vocab_size(retro_handle h, uint32_t* out) {
  return guarded([&] {
    require(out, "out");
    *out = registry().get(h)->session.vocab_size();
  });
}

int retro_vocab_json(retro_handle h, char** out) {
  return guarded([&] {
    require(out, "out");
    const auto entry = registry().get(h);
    const auto& s = entry->session;
    const auto& sp = s.specials();
    const auto& tok = s.engine().corpus->tokenizer();
    auto tokens = nlohmann::json::array();
    for (TokenId t = 0; t < sp.corpus_vocab(); ++t) tokens.push_back(tok.token_text(t));
    for (TokenId t = sp.clue_open; t < sp.extended_vocab(); ++t) tokens.push_back(sp.name(t));
    const nlohmann::json j = {{"corpus_vocab", sp.corpus_vocab()},
                              {"extended_vocab", sp.extended_vocab()},
                              {"tokens", tokens},
                              {"specials",
                               {{"clue_open", sp.clue_open},
                                {"clue_close", sp.clue_close},
                                {"sep", sp.sep},
                                {"evidence_open", sp.evidence_open},
                                {"evidence_close", sp.evidence_close},
                                {"eos", sp.eos}}}};
    *out = copy_string(j.dump());
  });
}

int retro_process(retro_handle h, const float* raw, size_t n, int64_t last_token, float* out) {
  return guarded([&] {
    require(raw, "raw");
    require(out, "out");
    const auto entry = registry().get(h);
    std::unique_lock lock(entry->busy, std::try_to_lock);
    if (!lock.owns_lock()) throw StateError("handle is in use by another thread");
    auto& s = entry->session;
    if (s.finished()) throw StateError("session is finished");
    if (n != s.vocab_size()) {
      throw InputError("logit array has " + std::to_string(n) + " entries, expected " + std::to_string(s.vocab_size()));
    }
    // validate before advancing so a rejected call leaves the session untouched
    const LogitVector in(raw, raw + n);
    if (last_token >= 0) {
      if (last_token >= static_cast<int64_t>(s.vocab_size())) throw InputError("token id out of range");
      auto next = s;
      entry->started = true;
      next.advance(static_cast<TokenId>(last_token));
      if (next.finished()) {
        s = std::move(next);
        std::fill(out, out + n, std::numeric_limits<float>::lowest());
        return;
      }
      const auto adjusted = next.adjust_logits(in);
      s = std::move(next);
      std::copy(adjusted.begin(), adjusted.end(), out);
    } else {
      if (entry->started) throw InputError("last_token is required after the first step");
      const auto adjusted = s.adjust_logits(in);
      std::copy(adjusted.begin(), adjusted.end(), out);
      entry->started = true;
    }
  });
}

int retro_stage(retro_handle h, const char** out) {
  return guarded([&] {
    require(out, "out");
    switch (registry().get(h)->session.stage()) {
      case Stage::Clue: *out = "clue"; break;
      case Stage::Evidence: *out = "evidence"; break;
      case Stage::Answer: *out = "answer"; break;
      case Stage::Finished: *out = "finished"; break;
    }
  });
}

int retro_close(retro_handle h, char** out_json) {
  return guarded([&] {
    const auto entry = registry().take(h);
    if (out_json != nullptr) *out_json = copy_string(entry->session.output(entry->session.finished()).to_json().dump());
  });
}

void retro_free_string(char* s) { delete[] s; }

const char* retro_last_error(void) { return g_last_error.c_str(); }

}  // extern "C"
