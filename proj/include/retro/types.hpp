#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace retro {

/// Symbol of the indexed alphabet. Content ids come from the tokenizer;
/// the values below are reserved and never produced for document text.
using TokenId = std::uint32_t;
using DocId = std::uint32_t;

inline constexpr TokenId kTerminator = 0;  // global end marker, lexicographically smallest
inline constexpr TokenId kSeparator = 1;   // document boundary in the corpus concatenation
inline constexpr TokenId kUnknown = 2;     // out-of-vocabulary words at query time
inline constexpr TokenId kFirstContentId = 3;

using TokenSeq = std::vector<TokenId>;
using TokenView = std::span<const TokenId>;

inline bool is_reserved(TokenId t) { return t < kFirstContentId; }

}  // namespace retro
