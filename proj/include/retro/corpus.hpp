#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "retro/fm_index.hpp"
#include "retro/tokenizer.hpp"
#include "retro/types.hpp"

namespace retro {

/// One input record before tokenization.
struct RawDocument {
  std::string external_id;
  std::string title;
  std::string text;
};

struct Document {
  DocId doc_id = 0;
  std::string title;
  TokenSeq body_tokens;
};

struct DocumentInfo {
  DocId doc_id = 0;
  std::string external_id;
  std::string title;
  std::uint64_t start = 0;   // global position of the first body token
  std::uint64_t length = 0;  // body tokens, separator excluded
};

struct DocPosition {
  DocId doc_id;
  std::uint64_t offset;
  friend bool operator==(const DocPosition&, const DocPosition&) = default;
};

/// CF/DF/TF of one clue. Invariants: cf == sum of tf, df == tf.size().
struct ClueStats {
  std::uint64_t cf = 0;
  std::uint64_t df = 0;
  std::map<DocId, std::uint64_t> tf;
};

/// Parse JSON Lines records {id, title, text}. Blank lines are skipped;
/// malformed lines raise InputError naming the 1-based line number.
std::vector<RawDocument> read_corpus_jsonl(std::istream& in, const std::string& source);

/// Corpus-level index pair. The forward index covers
///   doc_0 sep doc_1 sep ... doc_{N-1} sep terminator
/// and the reversed index covers the same content reversed, terminator last.
class CorpusIndex {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  /// Tokenize with a freshly fitted WordTokenizer. Throws InputError on an
  /// empty corpus or duplicate external ids.
  static CorpusIndex ingest(const std::vector<RawDocument>& records,
                            WordTokenizer::Options options = {},
                            std::uint32_t sample_rate = FMIndex::kDefaultSampleRate);
  /// Tokenize with a caller-supplied frozen tokenizer.
  static CorpusIndex ingest(const std::vector<RawDocument>& records,
                            std::shared_ptr<const Tokenizer> tokenizer,
                            std::uint32_t sample_rate = FMIndex::kDefaultSampleRate);

  const FMIndex& forward() const { return forward_; }
  const FMIndex& reversed() const { return reversed_; }
  const Tokenizer& tokenizer() const { return *tokenizer_; }
  std::shared_ptr<const Tokenizer> tokenizer_ptr() const { return tokenizer_; }
  std::uint32_t vocab_size() const { return tokenizer_->vocab_size(); }

  std::size_t num_documents() const { return docs_.size(); }
  const std::vector<DocumentInfo>& documents() const { return docs_; }
  const DocumentInfo& document(DocId id) const;
  /// Body content tokens (sum of document lengths).
  std::uint64_t content_tokens() const;
  /// Body tokens of one document, read back from the forward index.
  TokenSeq document_tokens(DocId id) const;
  std::optional<DocId> find_external(const std::string& external_id) const;

  /// Owning document and local offset of a global position; std::nullopt when
  /// the position holds a separator or the terminator. Throws std::out_of_range
  /// past the end.
  std::optional<DocPosition> position_to_doc(std::uint64_t global_pos) const;

  /// Writes manifest.json, forward.rfmx, reversed.rfmx, offsets.bin,
  /// vocab.json and documents.jsonl into `dir` (created if needed).
  void save(const std::filesystem::path& dir) const;
  static CorpusIndex load(const std::filesystem::path& dir);

 private:
  static CorpusIndex assemble(std::vector<Document> docs, std::vector<RawDocument> meta,
                              std::shared_ptr<const Tokenizer> tokenizer, std::uint32_t sample_rate);

  FMIndex forward_;
  FMIndex reversed_;
  std::vector<DocumentInfo> docs_;
  std::shared_ptr<const Tokenizer> tokenizer_;
};

/// CF from the forward index count; DF and TF by mapping locate() results
/// through position_to_doc. Throws InputError for an empty clue or one that
/// contains reserved ids.
ClueStats clue_stats(const CorpusIndex& corpus, TokenView clue);

/// Forward/reversed index pair over a single document.
struct DocIndex {
  FMIndex forward;
  FMIndex reversed;
};

/// Per-document indexes, built on first use and cached. Safe for concurrent
/// readers; construction of a missing entry happens under the lock.
class DocIndexManager {
 public:
  explicit DocIndexManager(std::shared_ptr<const CorpusIndex> corpus, bool build_on_demand = true);

  std::shared_ptr<const DocIndex> get(DocId id) const;
  std::size_t cached() const;
  const CorpusIndex& corpus() const { return *corpus_; }

 private:
  std::shared_ptr<const CorpusIndex> corpus_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<DocId, std::shared_ptr<const DocIndex>> cache_;
};

/// Index pair over `tokens` (content only; the terminator is appended).
DocIndex build_doc_index(TokenView tokens, std::uint32_t vocab_size,
                         std::uint32_t sample_rate = FMIndex::kDefaultSampleRate);

}  // namespace retro
