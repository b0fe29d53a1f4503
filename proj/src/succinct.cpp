#include "retro/succinct.hpp"

#include <bit>

namespace retro {

void RankBitVector::finalize() {
  cumulative_.assign(words_.size() + 1, 0);
  for (std::size_t w = 0; w < words_.size(); ++w) {
    cumulative_[w + 1] = cumulative_[w] + static_cast<std::uint64_t>(std::popcount(words_[w]));
  }
}

std::size_t RankBitVector::rank1(std::size_t i) const {
  const auto word = i / 64;
  const auto bit = i % 64;
  std::size_t r = cumulative_[word];
  if (bit != 0) r += static_cast<std::size_t>(std::popcount(words_[word] & ((std::uint64_t{1} << bit) - 1)));
  return r;
}

namespace {

std::size_t bits_for(std::uint32_t alphabet_size) {
  if (alphabet_size <= 1) return 1;
  return static_cast<std::size_t>(std::bit_width(alphabet_size - 1));
}

}  // namespace

WaveletMatrix::WaveletMatrix(std::span<const TokenId> values, std::uint32_t alphabet_size)
    : size_(values.size()), alphabet_size_(alphabet_size) {
  const auto depth = bits_for(alphabet_size);
  levels_.resize(depth);
  zeros_.resize(depth);
  std::vector<TokenId> cur(values.begin(), values.end());
  std::vector<TokenId> next(cur.size());
  for (std::size_t level = 0; level < depth; ++level) {
    const auto shift = depth - 1 - level;
    RankBitVector bv(size_);
    std::size_t zeros = 0;
    for (std::size_t i = 0; i < size_; ++i) {
      if ((cur[i] >> shift) & 1U) {
        bv.set(i);
      } else {
        ++zeros;
      }
    }
    bv.finalize();
    // stable partition: zeros first, then ones
    std::size_t z = 0;
    std::size_t o = zeros;
    for (std::size_t i = 0; i < size_; ++i) {
      if ((cur[i] >> shift) & 1U) {
        next[o++] = cur[i];
      } else {
        next[z++] = cur[i];
      }
    }
    levels_[level] = std::move(bv);
    zeros_[level] = zeros;
    cur.swap(next);
  }
}

TokenId WaveletMatrix::access(std::size_t i) const { return access_rank(i).symbol; }

WaveletMatrix::AccessRank WaveletMatrix::access_rank(std::size_t i) const {
  TokenId symbol = 0;
  std::size_t pos = i;
  std::size_t zero_pos = 0;  // image of position 0 along the same path
  for (std::size_t level = 0; level < levels_.size(); ++level) {
    const auto& bv = levels_[level];
    const bool bit = bv.get(pos);
    symbol = (symbol << 1) | static_cast<TokenId>(bit);
    if (bit) {
      pos = zeros_[level] + bv.rank1(pos);
      zero_pos = zeros_[level] + bv.rank1(zero_pos);
    } else {
      pos = bv.rank0(pos);
      zero_pos = bv.rank0(zero_pos);
    }
  }
  return {symbol, pos - zero_pos};
}

std::size_t WaveletMatrix::rank(TokenId symbol, std::size_t i) const {
  std::size_t begin = 0;
  std::size_t end = i;
  const auto depth = levels_.size();
  for (std::size_t level = 0; level < depth; ++level) {
    const auto& bv = levels_[level];
    if ((symbol >> (depth - 1 - level)) & 1U) {
      begin = zeros_[level] + bv.rank1(begin);
      end = zeros_[level] + bv.rank1(end);
    } else {
      begin = bv.rank0(begin);
      end = bv.rank0(end);
    }
  }
  return end - begin;
}

std::vector<WaveletMatrix::RangeSymbol> WaveletMatrix::distinct_in_range(std::size_t begin,
                                                                        std::size_t end) const {
  std::vector<RangeSymbol> out;
  if (begin < end) collect(0, begin, end, 0, 0, out);
  return out;
}

void WaveletMatrix::collect(std::size_t level, std::size_t begin, std::size_t end,
                            std::size_t zero_pos, TokenId prefix,
                            std::vector<RangeSymbol>& out) const {
  if (level == levels_.size()) {
    out.push_back({prefix, begin - zero_pos, end - zero_pos});
    return;
  }
  const auto& bv = levels_[level];
  const auto b0 = bv.rank0(begin);
  const auto e0 = bv.rank0(end);
  if (b0 < e0) collect(level + 1, b0, e0, bv.rank0(zero_pos), prefix << 1, out);
  const auto b1 = zeros_[level] + (begin - b0);
  const auto e1 = zeros_[level] + (end - e0);
  if (b1 < e1) {
    collect(level + 1, b1, e1, zeros_[level] + bv.rank1(zero_pos), (prefix << 1) | 1U, out);
  }
}

}  // namespace retro
