#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "retro/errors.hpp"
#include "retro/fm_index.hpp"

using namespace retro;
using oracle::char_string;
using oracle::char_tokens;

namespace {

constexpr std::uint32_t kAscii = 128;

FMIndex banana() { return FMIndex::build(char_tokens("banana$"), kAscii); }

/// Index over the reversed content with the terminator kept last.
FMIndex reversed_of(const TokenSeq& text, std::uint32_t vocab) {
  TokenSeq rev(text.begin(), text.end() - 1);
  std::reverse(rev.begin(), rev.end());
  rev.push_back(kTerminator);
  return FMIndex::build(rev, vocab);
}

SearchInterval step_forward(const FMIndex& reversed, TokenView prefix) {
  auto iv = reversed.full_interval();
  for (auto t : prefix) iv = reversed.backward_step(iv, t);
  return iv;
}

}  // namespace

TEST_CASE("banana: BWT and first column") {
  const auto idx = banana();
  CHECK(idx.length() == 7);
  CHECK(char_string(idx.bwt()) == "annb$aa");
  CHECK(char_string(idx.first_column()) == "$aaabnn");
  CHECK(idx.cumulative_counts()['a'] == 1);
  CHECK(idx.cumulative_counts()['n'] == 5);
}

TEST_CASE("banana: backward search trace for \"ana\"") {
  // The worked example numbers rows from 1; rows here are 0-based.
  const auto idx = banana();
  auto iv = idx.backward_step(idx.full_interval(), 'a');
  CHECK(iv == SearchInterval::rows(1, 3, 1));
  iv = idx.backward_step(iv, 'n');
  CHECK(iv == SearchInterval::rows(5, 6, 2));
  iv = idx.backward_step(iv, 'a');
  CHECK(iv == SearchInterval::rows(2, 3, 3));
  CHECK(iv.size() == 2);
  CHECK(idx.count(char_tokens("ana")) == 2);
}

TEST_CASE("banana: locate and extract") {
  const auto idx = banana();
  CHECK(idx.locate(char_tokens("ana")) == std::vector<std::uint64_t>{1, 3});
  CHECK(idx.locate(char_tokens("xyz")).empty());
  CHECK(idx.count(char_tokens("nab")) == 0);
  CHECK(char_string(idx.extract(0, 7)) == "banana$");
  CHECK(char_string(idx.extract(1, 3)) == "ana");
  CHECK(idx.extract(4, 0).empty());
  CHECK_THROWS_AS(idx.extract(5, 3), std::out_of_range);
}

TEST_CASE("banana: allowed next tokens") {
  const auto text = char_tokens("banana$");
  const auto rev = reversed_of(text, kAscii);

  auto symbols = [&](TokenView prefix) {
    std::string out;
    for (const auto& [t, iv] : rev.allowed_next(step_forward(rev, prefix))) {
      out.push_back(t == kTerminator ? '$' : static_cast<char>(t));
      CHECK(iv.size() == oracle::naive_count(text, [&] {
              TokenSeq ext(prefix.begin(), prefix.end());
              ext.push_back(t);
              return ext;
            }()));
    }
    return out;
  };
  CHECK(symbols(char_tokens("ana")) == "$n");
  CHECK(symbols(char_tokens("nan")) == "a");
  CHECK(symbols(TokenSeq{}) == "$abn");
  CHECK(rev.allowed_next(SearchInterval::none(2)).empty());
}

TEST_CASE("terminator-only sequence") {
  const auto idx = FMIndex::build(TokenSeq{kTerminator}, 4);
  CHECK(idx.length() == 1);
  CHECK(idx.count(TokenSeq{1}) == 0);
  CHECK(idx.count(TokenSeq{2, 3}) == 0);
  CHECK(idx.extract(0, 1) == TokenSeq{kTerminator});
}

TEST_CASE("build rejects malformed input") {
  CHECK_THROWS_AS(FMIndex::build(TokenSeq{}, 4), InputError);
  CHECK_THROWS_AS(FMIndex::build(TokenSeq{1, 2}, 4), InputError);
  CHECK_THROWS_AS(FMIndex::build(TokenSeq{1, 0, 2, 0}, 4), InputError);
  CHECK_THROWS_AS(FMIndex::build(TokenSeq{1, 5, 0}, 4), InputError);
  const auto idx = FMIndex::build(TokenSeq{1, 2, 0}, 4);
  CHECK_THROWS_AS(idx.backward_step(idx.full_interval(), 4), InputError);
  CHECK_THROWS_AS(idx.count(TokenSeq{9, 1}), InputError);
  CHECK_THROWS_AS(idx.count(TokenSeq{}), InputError);
}

TEST_CASE("suffix array matches naive suffix sort") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const auto vocab = static_cast<std::uint32_t>(2 + rng() % 6);
    const auto text = oracle::random_text(rng, rng() % 300, vocab);
    std::vector<std::uint32_t> naive(text.size());
    for (std::size_t i = 0; i < naive.size(); ++i) naive[i] = static_cast<std::uint32_t>(i);
    std::sort(naive.begin(), naive.end(), [&](auto a, auto b) {
      return std::lexicographical_compare(text.begin() + a, text.end(), text.begin() + b, text.end());
    });
    CHECK(build_suffix_array(text, vocab) == naive);
  }
}

TEST_CASE("property: count, locate, extract and allowed_next agree with naive scans") {
  std::mt19937_64 rng(20240601);
  const std::uint32_t vocabs[] = {2, 3, 4, 8, 17, 64, 256};
  for (int trial = 0; trial < 8; ++trial) {
    const auto vocab = vocabs[trial % 7];
    const auto text = oracle::random_text(rng, 200 + rng() % 2000, vocab);
    const auto rate = static_cast<std::uint32_t>(1 + rng() % 40);
    const auto idx = FMIndex::build(text, vocab, rate);
    const auto rev = reversed_of(text, vocab);
    REQUIRE(idx.extract(0, idx.length()) == text);

    for (int p = 0; p < 150; ++p) {
      TokenSeq pattern;
      const auto len = 1 + rng() % 6;
      if (rng() % 2 == 0) {
        const auto start = rng() % (text.size() - 1);
        for (std::size_t i = start; i < std::min(text.size() - 1, start + len); ++i) pattern.push_back(text[i]);
      } else {
        for (std::size_t i = 0; i < len; ++i) pattern.push_back(1 + static_cast<TokenId>(rng() % (vocab - 1)));
      }
      const auto expected = oracle::naive_locate(text, pattern);
      CHECK(idx.count(pattern) == expected.size());
      CHECK(idx.locate(pattern) == expected);
      CHECK(idx.search(pattern).size() == expected.size());

      const auto next = rev.allowed_next(step_forward(rev, pattern));
      std::set<TokenId> got;
      for (const auto& [t, iv] : next) {
        got.insert(t);
        TokenSeq ext = pattern;
        ext.push_back(t);
        CHECK(iv.size() == oracle::naive_count(text, ext));
      }
      CHECK(got == oracle::naive_continuations(text, pattern));

      const auto start = rng() % idx.length();
      const auto n = rng() % (idx.length() - start + 1);
      CHECK(idx.extract(start, n) == TokenSeq(text.begin() + static_cast<std::ptrdiff_t>(start),
                                                text.begin() + static_cast<std::ptrdiff_t>(start + n)));
    }
  }
}

TEST_CASE("property: backward_step never grows an interval") {
  std::mt19937_64 rng(5);
  const auto text = oracle::random_text(rng, 3000, 5);
  const auto idx = FMIndex::build(text, 5);
  for (int i = 0; i < 300; ++i) {
    auto iv = idx.full_interval();
    for (int d = 0; d < 8 && !iv.empty(); ++d) {
      const auto next = idx.backward_step(iv, static_cast<TokenId>(rng() % 5));
      CHECK(next.size() <= iv.size());
      CHECK(next.matched_len() == iv.matched_len() + 1);
      iv = next;
    }
  }
}

TEST_CASE("serialization round trip preserves query answers") {
  std::mt19937_64 rng(99);
  const auto text = oracle::random_text(rng, 1500, 30);
  const auto idx = FMIndex::build(text, 30, 16);
  std::stringstream buf;
  idx.save(buf);
  const auto loaded = FMIndex::load(buf, "memory");
  CHECK(loaded.length() == idx.length());
  CHECK(loaded.bwt() == idx.bwt());
  CHECK(loaded.extract(0, loaded.length()) == text);
  for (int i = 0; i < 100; ++i) {
    const auto start = rng() % (text.size() - 4);
    const TokenSeq pattern(text.begin() + static_cast<std::ptrdiff_t>(start),
                           text.begin() + static_cast<std::ptrdiff_t>(start + 1 + rng() % 3));
    CHECK(loaded.locate(pattern) == idx.locate(pattern));
  }

  SUBCASE("corrupt payloads are rejected") {
    std::stringstream out;
    idx.save(out);
    auto bytes = out.str();
    std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(FMIndex::load(truncated, "t"), FormatError);
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    std::stringstream bm(bad_magic);
    CHECK_THROWS_AS(FMIndex::load(bm, "m"), FormatError);
    auto bad_version = bytes;
    bad_version[4] = 7;
    std::stringstream bv(bad_version);
    CHECK_THROWS_AS(FMIndex::load(bv, "v"), FormatError);
  }
}
