#include "retro/fm_index.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "retro/binary_io.hpp"
#include "retro/errors.hpp"

namespace retro {

std::vector<std::uint32_t> build_suffix_array(TokenView text, std::uint32_t alphabet_size) {
  const std::size_t n = text.size();
  std::vector<std::uint32_t> sa(n);
  if (n == 0) return sa;
  std::vector<std::uint32_t> rank(n);
  std::vector<std::uint32_t> tmp(n);
  std::vector<std::uint32_t> bucket(std::max<std::size_t>(alphabet_size, n) + 1, 0);

  // Pass 0: counting sort on the symbol itself.
  for (std::size_t i = 0; i < n; ++i) ++bucket[text[i]];
  for (std::size_t c = 1; c < bucket.size(); ++c) bucket[c] += bucket[c - 1];
  for (std::size_t i = n; i-- > 0;) sa[--bucket[text[i]]] = static_cast<std::uint32_t>(i);
  std::uint32_t classes = 1;
  rank[sa[0]] = 0;
  for (std::size_t j = 1; j < n; ++j) {
    if (text[sa[j]] != text[sa[j - 1]]) ++classes;
    rank[sa[j]] = classes - 1;
  }

  for (std::size_t k = 1; classes < n; k <<= 1) {
    // Order by second key: suffixes whose second half runs off the end come first.
    std::size_t p = 0;
    for (std::size_t i = n - std::min(k, n); i < n; ++i) tmp[p++] = static_cast<std::uint32_t>(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (sa[j] >= k) tmp[p++] = static_cast<std::uint32_t>(sa[j] - k);
    }
    // Stable counting sort by first key.
    std::fill(bucket.begin(), bucket.begin() + classes + 1, 0);
    for (std::size_t i = 0; i < n; ++i) ++bucket[rank[i]];
    for (std::size_t c = 1; c <= classes; ++c) bucket[c] += bucket[c - 1];
    for (std::size_t j = n; j-- > 0;) sa[--bucket[rank[tmp[j]]]] = tmp[j];

    auto second = [&](std::uint32_t pos) -> std::int64_t {
      return pos + k < n ? static_cast<std::int64_t>(rank[pos + k]) : -1;
    };
    tmp[sa[0]] = 0;
    std::uint32_t next_classes = 1;
    for (std::size_t j = 1; j < n; ++j) {
      const auto a = sa[j - 1];
      const auto b = sa[j];
      if (rank[a] != rank[b] || second(a) != second(b)) ++next_classes;
      tmp[b] = next_classes - 1;
    }
    rank.swap(tmp);
    classes = next_classes;
  }
  return sa;
}

FMIndex FMIndex::build(TokenView tokens, std::uint32_t vocab_size, std::uint32_t sample_rate) {
  if (tokens.empty()) throw InputError("cannot index an empty sequence");
  if (vocab_size == 0) throw InputError("vocabulary size must be positive");
  if (sample_rate == 0) throw InputError("sample rate must be positive");
  if (tokens.size() >= std::numeric_limits<std::uint32_t>::max()) {
    throw InputError("sequence too long for 32-bit suffix array");
  }
  if (tokens.back() != kTerminator) throw InputError("sequence must end with the terminator");
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i] >= vocab_size) {
      throw InputError("symbol " + std::to_string(tokens[i]) + " at position " + std::to_string(i) +
                       " exceeds vocabulary size " + std::to_string(vocab_size));
    }
    if (tokens[i] == kTerminator && i + 1 != tokens.size()) {
      throw InputError("terminator occurs before the end at position " + std::to_string(i));
    }
  }

  FMIndex idx;
  idx.length_ = tokens.size();
  idx.vocab_size_ = vocab_size;
  idx.sample_rate_ = sample_rate;

  const auto sa = build_suffix_array(tokens, vocab_size);
  const std::size_t n = tokens.size();
  TokenSeq last(n);
  for (std::size_t i = 0; i < n; ++i) last[i] = tokens[(sa[i] + n - 1) % n];
  idx.bwt_ = WaveletMatrix(last, vocab_size);

  idx.counts_.assign(static_cast<std::size_t>(vocab_size) + 1, 0);
  for (auto t : tokens) ++idx.counts_[t + 1];
  for (std::size_t c = 1; c < idx.counts_.size(); ++c) idx.counts_[c] += idx.counts_[c - 1];

  std::vector<std::uint64_t> sample_rows;
  idx.isa_samples_.assign((n + sample_rate - 1) / sample_rate, 0);
  for (std::size_t row = 0; row < n; ++row) {
    if (sa[row] % sample_rate == 0) {
      sample_rows.push_back(row);
      idx.sa_samples_.push_back(sa[row]);
      idx.isa_samples_[sa[row] / sample_rate] = row;
    }
  }
  idx.rebuild_sample_marks(sample_rows);
  return idx;
}

void FMIndex::rebuild_sample_marks(const std::vector<std::uint64_t>& sample_rows) {
  sampled_rows_ = RankBitVector(length_);
  for (auto r : sample_rows) sampled_rows_.set(r);
  sampled_rows_.finalize();
}

void FMIndex::check_symbol(TokenId symbol) const {
  if (symbol >= vocab_size_) {
    throw InputError("symbol " + std::to_string(symbol) + " exceeds vocabulary size " +
                     std::to_string(vocab_size_));
  }
}

SearchInterval FMIndex::backward_step(const SearchInterval& interval, TokenId symbol) const {
  check_symbol(symbol);
  const auto next_len = interval.matched_len() + 1;
  if (interval.empty()) return SearchInterval::none(next_len);
  const auto base = counts_[symbol];
  const auto lo = base + bwt_.rank(symbol, interval.lo());
  const auto end = base + bwt_.rank(symbol, interval.hi() + 1);
  if (lo >= end) return SearchInterval::none(next_len);
  return SearchInterval::rows(lo, end - 1, next_len);
}

SearchInterval FMIndex::search(TokenView pattern) const {
  auto interval = full_interval();
  for (auto it = pattern.rbegin(); it != pattern.rend(); ++it) {
    interval = backward_step(interval, *it);
    if (interval.empty()) {
      // keep validating the remaining symbols so bad input is never silently accepted
      for (auto rest = std::next(it); rest != pattern.rend(); ++rest) check_symbol(*rest);
      return SearchInterval::none(pattern.size());
    }
  }
  return interval;
}

std::size_t FMIndex::count(TokenView pattern) const {
  if (pattern.empty()) throw InputError("count requires a non-empty pattern");
  return search(pattern).size();
}

std::size_t FMIndex::lf(std::size_t row) const {
  const auto [symbol, rank] = bwt_.access_rank(row);
  return counts_[symbol] + rank;
}

std::uint64_t FMIndex::row_position(std::size_t row) const {
  std::uint64_t steps = 0;
  while (!sampled_rows_.get(row)) {
    row = lf(row);
    ++steps;
  }
  return sa_samples_[sampled_rows_.rank1(row)] + steps;
}

std::vector<std::uint64_t> FMIndex::locate(const SearchInterval& interval) const {
  std::vector<std::uint64_t> out;
  if (interval.empty()) return out;
  out.reserve(interval.size());
  for (auto row = interval.lo(); row <= interval.hi(); ++row) out.push_back(row_position(row));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::uint64_t> FMIndex::locate(TokenView pattern) const {
  if (pattern.empty()) throw InputError("locate requires a non-empty pattern");
  return locate(search(pattern));
}

TokenSeq FMIndex::extract(std::uint64_t start, std::uint64_t len) const {
  if (start > length_ || len > length_ - start) {
    throw std::out_of_range("extract range [" + std::to_string(start) + ", " +
                            std::to_string(start + len) + ") exceeds length " +
                            std::to_string(length_));
  }
  TokenSeq out(len);
  if (len == 0) return out;
  const auto end = start + len;
  // Walk backwards from the nearest sampled position at or after `end`;
  // position length_ is position 0 cyclically.
  auto anchor = ((end + sample_rate_ - 1) / sample_rate_) * sample_rate_;
  std::size_t row = 0;
  if (anchor >= length_) {
    anchor = length_;
    row = isa_samples_[0];
  } else {
    row = isa_samples_[anchor / sample_rate_];
  }
  // row's rotation starts at `anchor`; its BWT symbol is the token at anchor - 1
  for (auto pos = anchor; pos > start; --pos) {
    const auto [symbol, rank] = bwt_.access_rank(row);
    if (pos <= end) out[pos - 1 - start] = symbol;
    row = counts_[symbol] + rank;
  }
  return out;
}

std::vector<std::pair<TokenId, SearchInterval>> FMIndex::allowed_next(
    const SearchInterval& interval) const {
  std::vector<std::pair<TokenId, SearchInterval>> out;
  if (interval.empty()) return out;
  const auto next_len = interval.matched_len() + 1;
  for (const auto& s : bwt_.distinct_in_range(interval.lo(), interval.hi() + 1)) {
    const auto base = counts_[s.symbol];
    out.emplace_back(s.symbol, SearchInterval::rows(base + s.rank_begin, base + s.rank_end - 1, next_len));
  }
  return out;
}

TokenSeq FMIndex::bwt() const {
  TokenSeq out(length_);
  for (std::size_t i = 0; i < length_; ++i) out[i] = bwt_.access(i);
  return out;
}

TokenSeq FMIndex::first_column() const {
  TokenSeq out;
  out.reserve(length_);
  for (std::size_t c = 0; c < vocab_size_; ++c) {
    out.insert(out.end(), counts_[c + 1] - counts_[c], static_cast<TokenId>(c));
  }
  return out;
}

void FMIndex::save(std::ostream& out) const {
  io::BinaryWriter w(out);
  w.header("RFMX", kFormatVersion);
  w.u32(vocab_size_);
  w.u64(length_);
  w.u32(sample_rate_);
  w.u32_array(bwt());
  w.u64_array(counts_);
  std::vector<std::uint64_t> rows;
  rows.reserve(sa_samples_.size());
  for (std::size_t r = 0; r < length_; ++r) {
    if (sampled_rows_.get(r)) rows.push_back(r);
  }
  w.u64_array(rows);
  w.u64_array(sa_samples_);
  w.u64_array(isa_samples_);
}

FMIndex FMIndex::load(std::istream& in, const std::string& source) {
  io::BinaryReader r(in, source);
  r.header("RFMX", kFormatVersion);
  FMIndex idx;
  idx.vocab_size_ = r.u32();
  idx.length_ = r.u64();
  idx.sample_rate_ = r.u32();
  if (idx.vocab_size_ == 0 || idx.length_ == 0 || idx.sample_rate_ == 0) r.fail("invalid header fields");
  const auto n = idx.length_;
  const auto bwt = r.u32_array(n);
  if (bwt.size() != n) r.fail("BWT length mismatch");
  for (auto t : bwt) {
    if (t >= idx.vocab_size_) r.fail("BWT symbol outside vocabulary");
  }
  idx.counts_ = r.u64_array(static_cast<std::uint64_t>(idx.vocab_size_) + 1);
  if (idx.counts_.size() != idx.vocab_size_ + 1ULL || idx.counts_.back() != n) {
    r.fail("cumulative counts inconsistent with length");
  }
  const auto rows = r.u64_array(n);
  idx.sa_samples_ = r.u64_array(n);
  idx.isa_samples_ = r.u64_array(n);
  if (rows.size() != idx.sa_samples_.size() ||
      idx.isa_samples_.size() != (n + idx.sample_rate_ - 1) / idx.sample_rate_) {
    r.fail("sample tables inconsistent with length");
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= n || idx.sa_samples_[i] >= n || (i > 0 && rows[i] <= rows[i - 1])) {
      r.fail("sample rows out of range");
    }
  }
  for (auto row : idx.isa_samples_) {
    if (row >= n) r.fail("inverse sample out of range");
  }
  r.expect_end();
  idx.bwt_ = WaveletMatrix(bwt, idx.vocab_size_);
  idx.rebuild_sample_marks(rows);
  return idx;
}

void FMIndex::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  save(out);
}

FMIndex FMIndex::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return load(in, path);
}

}  // namespace retro
