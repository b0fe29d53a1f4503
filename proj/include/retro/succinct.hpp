#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "retro/types.hpp"

namespace retro {

/// Plain bitvector with constant-time rank. One cumulative count per
/// 64-bit word; no select support (nothing here needs it).
class RankBitVector {
 public:
  RankBitVector() = default;
  explicit RankBitVector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }

  /// Must be called after the last set() and before any rank query.
  void finalize();

  /// Number of set bits in [0, i).
  std::size_t rank1(std::size_t i) const;
  std::size_t rank0(std::size_t i) const { return i - rank1(i); }
  std::size_t size() const { return size_; }

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
  std::vector<std::uint64_t> cumulative_;
};

/// Wavelet matrix over an integer sequence: one bitvector per bit of the
/// alphabet, so access and rank cost O(log sigma).
class WaveletMatrix {
 public:
  WaveletMatrix() = default;
  WaveletMatrix(std::span<const TokenId> values, std::uint32_t alphabet_size);

  std::size_t size() const { return size_; }
  std::uint32_t alphabet_size() const { return alphabet_size_; }

  TokenId access(std::size_t i) const;
  /// Occurrences of `symbol` in [0, i).
  std::size_t rank(TokenId symbol, std::size_t i) const;

  struct AccessRank {
    TokenId symbol;
    std::size_t rank;  // occurrences of symbol in [0, i)
  };
  /// access(i) and rank(access(i), i) in one descent (the LF-mapping primitive).
  AccessRank access_rank(std::size_t i) const;

  struct RangeSymbol {
    TokenId symbol;
    std::size_t rank_begin;  // rank(symbol, begin)
    std::size_t rank_end;    // rank(symbol, end)
  };
  /// Every distinct symbol in [begin, end), ascending, with its boundary ranks.
  std::vector<RangeSymbol> distinct_in_range(std::size_t begin, std::size_t end) const;

 private:
  void collect(std::size_t level, std::size_t begin, std::size_t end, std::size_t zero_pos,
               TokenId prefix, std::vector<RangeSymbol>& out) const;

  std::size_t size_ = 0;
  std::uint32_t alphabet_size_ = 0;
  std::vector<RankBitVector> levels_;
  std::vector<std::size_t> zeros_;
};

}  // namespace retro
