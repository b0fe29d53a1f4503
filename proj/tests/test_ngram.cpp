#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "retro/errors.hpp"
#include "retro/ngram.hpp"
#include "retro/protocol.hpp"

using namespace retro;

namespace {

constexpr double kSumTol = 1e-9;

// Corpus vocabulary of 10 ids (3..9 content), markers at 10..15.
const SpecialTokens kSp = SpecialTokens::after(10);

double exp_sum(const std::vector<double>& lp) {
  double s = 0.0;
  for (double x : lp) s += std::exp(x);
  return s;
}

}  // namespace

TEST_CASE("special tokens sit after the corpus vocabulary") {
  CHECK(kSp.clue_open == 10);
  CHECK(kSp.eos == 15);
  CHECK(kSp.extended_vocab() == 16);
  CHECK(kSp.is_content(3));
  CHECK_FALSE(kSp.is_content(kSeparator));
  CHECK_FALSE(kSp.is_content(kSp.sep));
  CHECK(kSp.name(kSp.evidence_open) == "<|evidence|>");
  CHECK_THROWS_AS(kSp.name(4), InputError);
}

TEST_CASE("format_target and the stage grammar") {
  const auto t = format_target({{3, 4}, {5}}, {{6, 7, 8}}, TokenSeq{9}, kSp);
  CHECK(t == TokenSeq{10, 3, 4, 12, 5, 11, 13, 6, 7, 8, 14, 9, 15});
  CHECK_FALSE(protocol_violation(t, kSp).has_value());

  const auto empty = format_target({}, {}, TokenSeq{}, kSp, false);
  CHECK(empty == TokenSeq{10, 11, 13, 14});
  CHECK_FALSE(protocol_violation(empty, kSp).has_value());

  CHECK(protocol_violation(TokenSeq{11, 13, 14}, kSp).has_value());      // no clue_open
  CHECK(protocol_violation(TokenSeq{10, 12, 3, 11, 13, 14}, kSp).has_value());  // leading sep
  CHECK(protocol_violation(TokenSeq{10, 3, 12, 11, 13, 14}, kSp).has_value());  // trailing sep
  CHECK(protocol_violation(TokenSeq{10, 3, kSeparator, 11, 13, 14}, kSp).has_value());
  CHECK(protocol_violation(TokenSeq{10, 3, 11, 6, 14}, kSp).has_value());  // missing evidence_open
  CHECK(protocol_violation(TokenSeq{10, 3, 11, 13, 6}, kSp).has_value());  // unterminated
  CHECK_FALSE(protocol_violation(TokenSeq{10, 3, 11, 13, 6}, kSp, true).has_value());
  CHECK(protocol_violation(TokenSeq{10, 11, 13, 14, 15, 3}, kSp).has_value());  // after eos
  CHECK(protocol_violation(TokenSeq{10, 11, 13, 14, 16}, kSp).has_value());
}

TEST_CASE("fit rejects bad input") {
  CHECK_THROWS_AS(NGramModel::fit({}, {}, kSp, 0), InputError);
  CHECK_THROWS_AS(NGramModel::fit({}, {{TokenSeq{3}, TokenSeq{10, 3, 13, 14}}}, kSp), InputError);
  CHECK_THROWS_AS(NGramModel::fit({TokenSeq{3, 16}}, {}, kSp), InputError);
  const auto m = NGramModel::fit({TokenSeq{3}}, {}, kSp);
  CHECK_THROWS_AS(m.logits(TokenSeq{99}), InputError);
}

TEST_CASE("unigram model on uniform text is near uniform") {
  TokenSeq doc;
  for (int r = 0; r < 50; ++r) {
    for (TokenId t = 0; t < kSp.extended_vocab(); ++t) doc.push_back(t);
  }
  const auto m = NGramModel::fit({doc}, {}, kSp, 1);
  const auto lp = m.log_probs(TokenSeq{5, 6});
  const double uniform = -std::log(static_cast<double>(kSp.extended_vocab()));
  for (double x : lp) CHECK(x == doctest::Approx(uniform).epsilon(1e-12));
}

TEST_CASE("a context seen once predicts its observed successor") {
  const TokenSeq doc = {3, 4, 5, 6, 3, 4, 7, 8, 9};
  const auto m = NGramModel::fit({doc}, {}, kSp, 3);
  CHECK(m.count(TokenSeq{4, 5}, 6) == 1);
  CHECK(m.count(TokenSeq{3, 4}, 7) == 1);
  CHECK(m.count(TokenSeq{}, 3) == 2);
  for (std::size_t i = 2; i < doc.size(); ++i) {
    const TokenSeq ctx = {doc[i - 2], doc[i - 1]};
    if (ctx == TokenSeq{3, 4}) continue;  // seen twice, two successors
    const auto lp = m.log_probs(ctx);
    const auto best = static_cast<TokenId>(std::max_element(lp.begin(), lp.end()) - lp.begin());
    CHECK(best == doc[i]);
  }
}

TEST_CASE("normalization, determinism and backoff") {
  std::mt19937_64 rng(13);
  std::vector<TokenSeq> docs;
  for (int d = 0; d < 20; ++d) {
    TokenSeq s;
    for (int i = 0; i < 40; ++i) s.push_back(3 + static_cast<TokenId>(rng() % 7));
    docs.push_back(s);
  }
  std::vector<TrainingExample> ex = {{TokenSeq{3, 4}, format_target({{5}}, {{6, 7, 8, 9}}, TokenSeq{4}, kSp)}};
  const auto m = NGramModel::fit(docs, ex, kSp, 3);
  for (int i = 0; i < 100; ++i) {
    TokenSeq ctx;
    for (std::size_t k = 0, n = rng() % 5; k < n; ++k) ctx.push_back(static_cast<TokenId>(rng() % kSp.extended_vocab()));
    const auto p = m.probabilities(ctx);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) == doctest::Approx(1.0).epsilon(kSumTol));
    const auto lp = m.log_probs(ctx);
    CHECK(std::fabs(exp_sum(lp) - 1.0) <= kSumTol);
    const auto l1 = m.logits(ctx);
    const auto l2 = m.logits(ctx);
    CHECK(l1 == l2);
    for (float x : l1) CHECK(std::isfinite(x));
  }
  // unseen higher-order context still yields a finite distribution
  const auto lp = m.log_probs(TokenSeq{kSp.eos, kSp.eos});
  for (double x : lp) CHECK(std::isfinite(x));
  // markers in the example are learnable
  const auto after_close = m.log_probs(TokenSeq{5, kSp.clue_close});
  CHECK(std::max_element(after_close.begin(), after_close.end()) - after_close.begin() == kSp.evidence_open);
}

TEST_CASE("model round trip") {
  const auto m = NGramModel::fit({TokenSeq{3, 4, 5, 3, 4, 6}}, {}, kSp, 2);
  std::stringstream buf;
  m.save(buf);
  const auto bytes = buf.str();
  const auto l = NGramModel::load(buf, "mem");
  CHECK(l.order() == 2);
  CHECK(l.vocab_size() == m.vocab_size());
  CHECK(l.logits(TokenSeq{4}) == m.logits(TokenSeq{4}));
  std::stringstream again;
  l.save(again);
  CHECK(again.str() == bytes);

  std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(NGramModel::load(truncated, "t"), FormatError);
  auto wrong = bytes;
  wrong[0] = 'X';
  std::stringstream bad(wrong);
  CHECK_THROWS_AS(NGramModel::load(bad, "b"), FormatError);
}
