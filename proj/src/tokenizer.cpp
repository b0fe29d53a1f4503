#include "retro/tokenizer.hpp"

#include "retro/errors.hpp"

namespace retro {

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

const char* const kReservedNames[] = {"<|term|>", "<|doc|>", "<|unk|>"};

}  // namespace

std::string Tokenizer::decode(TokenView tokens) const {
  std::string out;
  for (auto t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += token_text(t);
  }
  return out;
}

WordTokenizer::WordTokenizer(Options options) : options_(options) {
  for (const char* name : kReservedNames) {
    ids_.emplace(name, static_cast<TokenId>(words_.size()));
    words_.emplace_back(name);
  }
}

std::vector<std::string> WordTokenizer::split(std::string_view text, const Options& options) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      if (options.lowercase && c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
      cur.push_back(static_cast<char>(c));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

void WordTokenizer::observe(std::string_view text) {
  for (auto& w : split(text, options_)) {
    if (ids_.find(w) == ids_.end()) {
      ids_.emplace(w, static_cast<TokenId>(words_.size()));
      words_.push_back(std::move(w));
    }
  }
}

TokenId WordTokenizer::id_of(std::string_view word) const {
  const auto it = ids_.find(std::string(word));
  if (it == ids_.end() || is_reserved(it->second)) return kUnknown;
  return it->second;
}

TokenSeq WordTokenizer::encode(std::string_view text) const {
  TokenSeq out;
  for (const auto& w : split(text, options_)) out.push_back(id_of(w));
  return out;
}

std::string WordTokenizer::token_text(TokenId id) const {
  if (id >= words_.size()) throw InputError("token id " + std::to_string(id) + " outside vocabulary");
  return words_[id];
}

nlohmann::json WordTokenizer::to_json() const {
  return {{"kind", "word"}, {"lowercase", options_.lowercase}, {"tokens", words_}};
}

std::shared_ptr<WordTokenizer> WordTokenizer::from_json(const nlohmann::json& j) {
  if (j.value("kind", "") != "word") throw FormatError("unsupported tokenizer kind");
  Options opts;
  opts.lowercase = j.at("lowercase").get<bool>();
  auto tok = std::make_shared<WordTokenizer>(opts);
  const auto tokens = j.at("tokens").get<std::vector<std::string>>();
  if (tokens.size() < kFirstContentId) throw FormatError("vocabulary lacks reserved entries");
  for (std::size_t i = 0; i < kFirstContentId; ++i) {
    if (tokens[i] != kReservedNames[i]) throw FormatError("reserved vocabulary entry mismatch");
  }
  for (std::size_t i = kFirstContentId; i < tokens.size(); ++i) {
    if (!tok->ids_.emplace(tokens[i], static_cast<TokenId>(i)).second) {
      throw FormatError("duplicate vocabulary entry '" + tokens[i] + "'");
    }
    tok->words_.push_back(tokens[i]);
  }
  return tok;
}

std::string normalize_text(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      if (c >= 'A' && c <= 'Z') c = static_cast<unsigned char>(c - 'A' + 'a');
      out.push_back(static_cast<char>(c));
    } else {
      pending_space = true;
    }
  }
  return out;
}

}  // namespace retro
