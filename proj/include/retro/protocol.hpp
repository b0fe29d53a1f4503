#pragma once

#include <optional>
#include <string>
#include <vector>

#include "retro/tokenizer.hpp"
#include "retro/types.hpp"

namespace retro {

/// Stage markers appended after the corpus vocabulary of size V:
/// V..V+5 = <|clue|> <|/clue|> <|sep|> <|evidence|> <|/evidence|> <|eos|>.
/// They never occur in a corpus index.
struct SpecialTokens {
  TokenId clue_open = 0;
  TokenId clue_close = 0;
  TokenId sep = 0;
  TokenId evidence_open = 0;
  TokenId evidence_close = 0;
  TokenId eos = 0;

  static constexpr std::uint32_t kCount = 6;
  static SpecialTokens after(std::uint32_t corpus_vocab);

  std::uint32_t corpus_vocab() const { return clue_open; }
  std::uint32_t extended_vocab() const { return clue_open + kCount; }
  bool is_special(TokenId t) const { return t >= clue_open && t < extended_vocab(); }
  /// Corpus content: not reserved, not special.
  bool is_content(TokenId t) const { return !is_reserved(t) && t < clue_open; }
  std::string name(TokenId t) const;
};

/// Renders tokens as text, special ids as their <|...|> markers.
std::string render_tokens(const Tokenizer& tok, const SpecialTokens& sp, TokenView tokens);

/// Builds the target stream
///   <|clue|> c1 <|sep|> c2 <|/clue|> <|evidence|> e1 <|sep|> e2 <|/evidence|> answer <|eos|>
TokenSeq format_target(const std::vector<TokenSeq>& clues, const std::vector<TokenSeq>& evidences,
                       TokenView answer, const SpecialTokens& sp, bool with_eos = true);

/// Checks the stage grammar
///   clue_open (C (sep C)*)? clue_close evidence_open (E (sep E)*)? evidence_close A* eos?
/// where C and E are non-empty runs of content tokens and A is any token
/// other than eos. A prefix of a valid stream is accepted when `allow_prefix`.
/// Returns a description of the first violation, or nullopt.
std::optional<std::string> protocol_violation(TokenView stream, const SpecialTokens& sp, bool allow_prefix = false);

}  // namespace retro
