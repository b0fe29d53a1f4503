#include "retro/protocol.hpp"

#include "retro/errors.hpp"

namespace retro {

SpecialTokens SpecialTokens::after(std::uint32_t corpus_vocab) {
  SpecialTokens sp;
  sp.clue_open = corpus_vocab;
  sp.clue_close = corpus_vocab + 1;
  sp.sep = corpus_vocab + 2;
  sp.evidence_open = corpus_vocab + 3;
  sp.evidence_close = corpus_vocab + 4;
  sp.eos = corpus_vocab + 5;
  return sp;
}

std::string SpecialTokens::name(TokenId t) const {
  static const char* const names[kCount] = {"<|clue|>",     "<|/clue|>",     "<|sep|>",
                                            "<|evidence|>", "<|/evidence|>", "<|eos|>"};
  if (!is_special(t)) throw InputError("token " + std::to_string(t) + " is not a stage marker");
  return names[t - clue_open];
}

std::string render_tokens(const Tokenizer& tok, const SpecialTokens& sp, TokenView tokens) {
  std::string out;
  for (auto t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += sp.is_special(t) ? sp.name(t) : tok.token_text(t);
  }
  return out;
}

TokenSeq format_target(const std::vector<TokenSeq>& clues, const std::vector<TokenSeq>& evidences,
                       TokenView answer, const SpecialTokens& sp, bool with_eos) {
  TokenSeq out;
  auto group = [&](const std::vector<TokenSeq>& items) {
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i > 0) out.push_back(sp.sep);
      out.insert(out.end(), items[i].begin(), items[i].end());
    }
  };
  out.push_back(sp.clue_open);
  group(clues);
  out.push_back(sp.clue_close);
  out.push_back(sp.evidence_open);
  group(evidences);
  out.push_back(sp.evidence_close);
  out.insert(out.end(), answer.begin(), answer.end());
  if (with_eos) out.push_back(sp.eos);
  return out;
}

std::optional<std::string> protocol_violation(TokenView stream, const SpecialTokens& sp, bool allow_prefix) {
  // States of the stage automaton.
  enum State { Start, ClueEmpty, ClueBody, ClueAfterSep, EvOpen, EvEmpty, EvBody, EvAfterSep, Answer, Done };
  State s = Start;
  auto bad = [&](std::size_t i, const char* what) {
    return std::optional<std::string>("token " + std::to_string(i) + ": " + what);
  };
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const TokenId t = stream[i];
    if (t >= sp.extended_vocab()) return bad(i, "id outside the extended vocabulary");
    const bool content = sp.is_content(t);
    switch (s) {
      case Start:
        if (t != sp.clue_open) return bad(i, "stream must start with <|clue|>");
        s = ClueEmpty;
        break;
      case ClueEmpty:
      case ClueAfterSep:
        if (content) {
          s = ClueBody;
        } else if (t == sp.clue_close && s == ClueEmpty) {
          s = EvOpen;
        } else {
          return bad(i, "expected clue content");
        }
        break;
      case ClueBody:
        if (content) break;
        if (t == sp.sep) {
          s = ClueAfterSep;
        } else if (t == sp.clue_close) {
          s = EvOpen;
        } else {
          return bad(i, "unexpected token inside a clue");
        }
        break;
      case EvOpen:
        if (t != sp.evidence_open) return bad(i, "expected <|evidence|> after <|/clue|>");
        s = EvEmpty;
        break;
      case EvEmpty:
      case EvAfterSep:
        if (content) {
          s = EvBody;
        } else if (t == sp.evidence_close && s == EvEmpty) {
          s = Answer;
        } else {
          return bad(i, "expected evidence content");
        }
        break;
      case EvBody:
        if (content) break;
        if (t == sp.sep) {
          s = EvAfterSep;
        } else if (t == sp.evidence_close) {
          s = Answer;
        } else {
          return bad(i, "unexpected token inside an evidence");
        }
        break;
      case Answer:
        if (t == sp.eos) s = Done;
        break;
      case Done:
        return bad(i, "tokens after <|eos|>");
    }
  }
  if (!allow_prefix && s != Answer && s != Done) return std::optional<std::string>("stream ends before <|/evidence|>");
  return std::nullopt;
}

}  // namespace retro
