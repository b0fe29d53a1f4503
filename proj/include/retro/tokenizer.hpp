#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "retro/types.hpp"

namespace retro {

/// Maps text to TokenIds over a frozen vocabulary. Ids below kFirstContentId
/// are reserved; encode() never emits kTerminator or kSeparator, and emits
/// kUnknown only for words outside the vocabulary.
///
/// Implementations must be deterministic. A subword tokenizer from a real
/// model can be dropped in behind this interface.
class Tokenizer {
 public:
  virtual ~Tokenizer() = default;

  virtual TokenSeq encode(std::string_view text) const = 0;
  /// Surface form of a single id (reserved ids render as <|...|> markers).
  virtual std::string token_text(TokenId id) const = 0;
  /// Size of the content vocabulary, reserved ids included.
  virtual std::uint32_t vocab_size() const = 0;
  virtual std::string decode(TokenView tokens) const;
  /// Persisted next to the index as vocab.json.
  virtual nlohmann::json to_json() const = 0;
};

/// Default tokenizer: optional ASCII lowercasing, words are maximal runs of
/// ASCII alphanumerics or non-ASCII bytes; whitespace and punctuation split.
class WordTokenizer final : public Tokenizer {
 public:
  struct Options {
    bool lowercase = true;
  };

  WordTokenizer() : WordTokenizer(Options{}) {}
  explicit WordTokenizer(Options options);

  /// Words of `text` after normalization, in order.
  static std::vector<std::string> split(std::string_view text, const Options& options);

  /// Add every word of `text` to the vocabulary (first appearance order).
  void observe(std::string_view text);
  TokenId id_of(std::string_view word) const;

  TokenSeq encode(std::string_view text) const override;
  std::string token_text(TokenId id) const override;
  std::uint32_t vocab_size() const override { return static_cast<std::uint32_t>(words_.size()); }
  nlohmann::json to_json() const override;
  static std::shared_ptr<WordTokenizer> from_json(const nlohmann::json& j);

  const Options& options() const { return options_; }

 private:
  Options options_;
  std::vector<std::string> words_;
  std::unordered_map<std::string, TokenId> ids_;
};

/// Lowercase, map every non-alphanumeric ASCII byte to a space and collapse
/// runs of spaces. Used for answer-string containment checks.
std::string normalize_text(std::string_view text);

}  // namespace retro
