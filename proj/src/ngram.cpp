#include "retro/ngram.hpp"

#include <cmath>
#include <fstream>

#include "retro/binary_io.hpp"
#include "retro/errors.hpp"

namespace retro {

NGramModel NGramModel::fit(const std::vector<TokenSeq>& documents, const std::vector<TrainingExample>& examples,
                           const SpecialTokens& specials, unsigned order) {
  if (order < 1) throw InputError("n-gram order must be at least 1");
  NGramModel m;
  m.order_ = order;
  m.vocab_ = specials.extended_vocab();
  m.tables_.resize(order);
  for (const auto& doc : documents) m.add_sequence(doc);
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    if (auto err = protocol_violation(ex.target, specials)) {
      throw InputError("training example " + std::to_string(i) + ": " + *err);
    }
    for (auto t : ex.query) {
      if (specials.is_special(t)) throw InputError("training example " + std::to_string(i) + ": query holds a marker");
    }
    TokenSeq seq = ex.query;
    seq.insert(seq.end(), ex.target.begin(), ex.target.end());
    m.add_sequence(seq);
  }
  return m;
}

void NGramModel::add_sequence(TokenView seq) {
  for (auto t : seq) {
    if (t >= vocab_) throw InputError("token id " + std::to_string(t) + " outside the extended vocabulary");
  }
  for (std::size_t i = 0; i < seq.size(); ++i) {
    for (unsigned k = 1; k <= order_; ++k) {
      if (i + 1 < k) break;
      const TokenSeq ctx(seq.begin() + static_cast<std::ptrdiff_t>(i + 1 - k),
                         seq.begin() + static_cast<std::ptrdiff_t>(i));
      auto& entry = tables_[k - 1][ctx];
      ++entry.total;
      ++entry.next[seq[i]];
    }
  }
}

std::vector<double> NGramModel::probabilities(TokenView context) const {
  for (auto t : context) {
    if (t >= vocab_) throw InputError("context token " + std::to_string(t) + " outside the extended vocabulary");
  }
  const double v = static_cast<double>(vocab_);
  std::vector<double> p(vocab_, 0.0);
  std::vector<std::pair<double, const Successors*>> active;
  double lambda_sum = 0.0;
  for (unsigned k = 1; k <= order_; ++k) {
    if (context.size() < k - 1) break;
    const TokenSeq ctx(context.end() - static_cast<std::ptrdiff_t>(k - 1), context.end());
    const auto it = tables_[k - 1].find(ctx);
    const Successors* s = it == tables_[k - 1].end() ? nullptr : &it->second;
    if (k > 1 && s == nullptr) continue;
    const double lambda = std::pow(10.0, static_cast<double>(k - 1));
    active.emplace_back(lambda, s);
    lambda_sum += lambda;
  }
  for (const auto& [lambda, s] : active) {
    const double weight = lambda / lambda_sum;
    const double total = s ? static_cast<double>(s->total) : 0.0;
    const double denom = total + kAlpha * v;
    const double base = weight * kAlpha / denom;
    for (auto& x : p) x += base;
    if (s) {
      for (const auto& [t, c] : s->next) p[t] += weight * static_cast<double>(c) / denom;
    }
  }
  return p;
}

std::vector<double> NGramModel::log_probs(TokenView context) const {
  auto p = probabilities(context);
  for (auto& x : p) x = std::log(x);
  return p;
}

LogitVector NGramModel::logits(TokenView context) const {
  const auto lp = log_probs(context);
  return LogitVector(lp.begin(), lp.end());
}

std::uint64_t NGramModel::count(TokenView context, TokenId next) const {
  if (context.size() >= order_) throw InputError("context longer than order - 1");
  const auto& table = tables_[context.size()];
  const auto it = table.find(TokenSeq(context.begin(), context.end()));
  if (it == table.end()) return 0;
  const auto n = it->second.next.find(next);
  return n == it->second.next.end() ? 0 : n->second;
}

void NGramModel::save(std::ostream& out) const {
  io::BinaryWriter w(out);
  w.header("RNGM", kFormatVersion);
  w.u32(order_);
  w.u32(vocab_);
  w.f64(kAlpha);
  for (const auto& table : tables_) {
    w.u64(table.size());
    for (const auto& [ctx, s] : table) {
      w.u32_array(ctx);
      w.u64(s.next.size());
      for (const auto& [t, c] : s.next) {
        w.u32(t);
        w.u64(c);
      }
    }
  }
  if (!out) throw FormatError("failed writing n-gram model");
}

NGramModel NGramModel::load(std::istream& in, const std::string& source) {
  io::BinaryReader r(in, source);
  r.header("RNGM", kFormatVersion);
  NGramModel m;
  m.order_ = r.u32();
  m.vocab_ = r.u32();
  if (m.order_ < 1 || m.order_ > 64) r.fail("implausible n-gram order");
  if (r.f64() != kAlpha) r.fail("smoothing constant mismatch");
  m.tables_.resize(m.order_);
  for (unsigned k = 0; k < m.order_; ++k) {
    const auto n_ctx = r.u64();
    for (std::uint64_t i = 0; i < n_ctx; ++i) {
      auto ctx = r.u32_array(k);
      if (ctx.size() != k) r.fail("context length does not match its order");
      Successors s;
      const auto n_next = r.u64();
      if (n_next > m.vocab_) r.fail("successor table larger than the vocabulary");
      for (std::uint64_t j = 0; j < n_next; ++j) {
        const auto t = r.u32();
        const auto c = r.u64();
        if (t >= m.vocab_) r.fail("successor id outside the vocabulary");
        s.next[t] = c;
        s.total += c;
      }
      m.tables_[k].emplace(std::move(ctx), std::move(s));
    }
  }
  r.expect_end();
  return m;
}

void NGramModel::save_file(const std::string& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  save(out);
}

NGramModel NGramModel::load_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  return load(in, path);
}

}  // namespace retro
