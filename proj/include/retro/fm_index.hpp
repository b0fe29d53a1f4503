#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "retro/succinct.hpp"
#include "retro/types.hpp"

namespace retro {

/// Inclusive row range [lo, hi] of the sorted-rotation matrix that shares a
/// matched pattern as prefix. The empty interval is its own state rather than
/// lo > hi, so callers never do arithmetic on a dead range.
class SearchInterval {
 public:
  static SearchInterval rows(std::size_t lo, std::size_t hi, std::size_t matched_len) {
    return SearchInterval(lo, hi, matched_len, false);
  }
  static SearchInterval none(std::size_t matched_len) { return SearchInterval(0, 0, matched_len, true); }

  bool empty() const { return empty_; }
  std::size_t lo() const { return lo_; }
  std::size_t hi() const { return hi_; }
  std::size_t matched_len() const { return matched_len_; }
  /// Number of occurrences of the matched pattern.
  std::size_t size() const { return empty_ ? 0 : hi_ - lo_ + 1; }

  friend bool operator==(const SearchInterval&, const SearchInterval&) = default;

 private:
  SearchInterval(std::size_t lo, std::size_t hi, std::size_t len, bool empty)
      : lo_(lo), hi_(hi), matched_len_(len), empty_(empty) {}
  std::size_t lo_;
  std::size_t hi_;
  std::size_t matched_len_;
  bool empty_;
};

/// Suffix array by prefix doubling with radix sort, O(n log n).
/// Requires the final symbol to be a unique minimum (the terminator).
std::vector<std::uint32_t> build_suffix_array(TokenView text, std::uint32_t alphabet_size);

/// FM-Index over a token sequence terminated by kTerminator.
///
/// The BWT is held in a wavelet matrix; every 32nd text position (by default)
/// is sampled for locate, and the inverse samples at the same positions make
/// extract cost O(len + sample_rate) LF steps.
class FMIndex {
 public:
  static constexpr std::uint32_t kDefaultSampleRate = 32;
  static constexpr std::uint32_t kFormatVersion = 1;

  FMIndex() = default;

  /// Throws InputError unless `tokens` is non-empty, ends with the only
  /// terminator, and every symbol is below `vocab_size`.
  static FMIndex build(TokenView tokens, std::uint32_t vocab_size,
                       std::uint32_t sample_rate = kDefaultSampleRate);

  /// Token count including the terminator.
  std::size_t length() const { return length_; }
  std::uint32_t vocab_size() const { return vocab_size_; }
  std::uint32_t sample_rate() const { return sample_rate_; }

  /// Interval of the empty pattern: every row.
  SearchInterval full_interval() const { return SearchInterval::rows(0, length_ - 1, 0); }
  /// Interval of symbol·pattern given the interval of pattern.
  SearchInterval backward_step(const SearchInterval& interval, TokenId symbol) const;
  /// Right-to-left fold of backward_step over `pattern`.
  SearchInterval search(TokenView pattern) const;

  std::size_t count(TokenView pattern) const;
  /// Ascending 0-based start positions of `pattern` in the indexed sequence.
  std::vector<std::uint64_t> locate(TokenView pattern) const;
  /// Text positions of every row in `interval`, ascending.
  std::vector<std::uint64_t> locate(const SearchInterval& interval) const;
  /// Original tokens in [start, start + len). Throws std::out_of_range.
  TokenSeq extract(std::uint64_t start, std::uint64_t len) const;

  /// Every symbol t whose row range is non-empty after backward_step(interval, t),
  /// ascending, paired with that successor interval. On an index built over
  /// reversed text this is the set of tokens that may follow the matched prefix.
  std::vector<std::pair<TokenId, SearchInterval>> allowed_next(const SearchInterval& interval) const;

  /// Last column of the sorted-rotation matrix.
  TokenSeq bwt() const;
  /// First column, i.e. the sorted text.
  TokenSeq first_column() const;
  /// C[c] = number of symbols smaller than c; size vocab_size + 1.
  const std::vector<std::uint64_t>& cumulative_counts() const { return counts_; }

  void save(std::ostream& out) const;
  static FMIndex load(std::istream& in, const std::string& source);
  void save_file(const std::string& path) const;
  static FMIndex load_file(const std::string& path);

 private:
  /// LF mapping: row of the rotation starting one position earlier.
  std::size_t lf(std::size_t row) const;
  std::uint64_t row_position(std::size_t row) const;
  void check_symbol(TokenId symbol) const;
  void rebuild_sample_marks(const std::vector<std::uint64_t>& sample_rows);

  std::size_t length_ = 0;
  std::uint32_t vocab_size_ = 0;
  std::uint32_t sample_rate_ = kDefaultSampleRate;
  WaveletMatrix bwt_;
  std::vector<std::uint64_t> counts_;
  RankBitVector sampled_rows_;
  std::vector<std::uint64_t> sa_samples_;   // text position per sampled row, in row order
  std::vector<std::uint64_t> isa_samples_;  // row of text position k * sample_rate
};

}  // namespace retro
