#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "retro/protocol.hpp"
#include "retro/types.hpp"

namespace retro {

/// One real per extended-vocabulary entry.
using LogitVector = std::vector<float>;

/// Source of raw next-token scores for the full context (query followed by
/// everything emitted so far). Must be deterministic.
class LogitProvider {
 public:
  virtual ~LogitProvider() = default;
  virtual std::uint32_t vocab_size() const = 0;
  virtual LogitVector logits(TokenView context) const = 0;
};

/// A query paired with its formatted target stream (see format_target).
struct TrainingExample {
  TokenSeq query;
  TokenSeq target;
};

/// Interpolated n-gram model with add-alpha smoothing per order.
///
///   P(t | h) = sum_k lambda_k * (c(h_k, t) + alpha) / (c(h_k) + alpha * V)
///
/// over orders k whose context h_k (last k-1 tokens) was seen in training;
/// lambda_k is proportional to 10^(k-1) and renormalized over those orders.
/// The unigram order is always included, so every context gets a proper
/// distribution.
class NGramModel final : public LogitProvider {
 public:
  static constexpr double kAlpha = 0.01;
  static constexpr std::uint32_t kFormatVersion = 1;

  /// Counts every document body and every query+target sequence. Targets must
  /// follow the stage protocol. Throws InputError for order < 1, protocol
  /// violations or ids outside the extended vocabulary.
  static NGramModel fit(const std::vector<TokenSeq>& documents, const std::vector<TrainingExample>& examples,
                        const SpecialTokens& specials, unsigned order = 3);

  std::uint32_t vocab_size() const override { return vocab_; }
  unsigned order() const { return order_; }

  std::vector<double> probabilities(TokenView context) const;
  /// Natural-log probabilities in double precision.
  std::vector<double> log_probs(TokenView context) const;
  /// log_probs rounded to float.
  LogitVector logits(TokenView context) const override;

  /// Raw count of `next` after the full `context` (context.size() < order).
  std::uint64_t count(TokenView context, TokenId next) const;

  void save(std::ostream& out) const;
  static NGramModel load(std::istream& in, const std::string& source);
  void save_file(const std::string& path) const;
  static NGramModel load_file(const std::string& path);

 private:
  struct Successors {
    std::uint64_t total = 0;
    std::map<TokenId, std::uint64_t> next;
  };
  void add_sequence(TokenView seq);

  unsigned order_ = 3;
  std::uint32_t vocab_ = 0;
  std::vector<std::map<TokenSeq, Successors>> tables_;  // tables_[k-1]: contexts of length k-1
};

}  // namespace retro
