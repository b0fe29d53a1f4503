#include "retro/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <set>
#include <stdexcept>

#include "retro/binary_io.hpp"
#include "retro/errors.hpp"

namespace retro {

namespace fs = std::filesystem;

std::vector<RawDocument> read_corpus_jsonl(std::istream& in, const std::string& source) {
  std::vector<RawDocument> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = source + ":" + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw InputError(where + "invalid JSON (" + e.what() + ")");
    }
    if (!j.is_object()) throw InputError(where + "record must be a JSON object");
    RawDocument doc;
    const auto id = j.find("id");
    if (id == j.end()) throw InputError(where + "missing field 'id'");
    if (id->is_string()) {
      doc.external_id = id->get<std::string>();
    } else if (id->is_number_integer()) {
      doc.external_id = std::to_string(id->get<long long>());
    } else {
      throw InputError(where + "field 'id' must be a string or integer");
    }
    const auto text = j.find("text");
    if (text == j.end() || !text->is_string()) throw InputError(where + "field 'text' must be a string");
    doc.text = text->get<std::string>();
    if (const auto title = j.find("title"); title != j.end()) {
      if (!title->is_string()) throw InputError(where + "field 'title' must be a string");
      doc.title = title->get<std::string>();
    }
    out.push_back(std::move(doc));
  }
  return out;
}

CorpusIndex CorpusIndex::ingest(const std::vector<RawDocument>& records, WordTokenizer::Options options,
                                std::uint32_t sample_rate) {
  auto tok = std::make_shared<WordTokenizer>(options);
  for (const auto& r : records) tok->observe(r.text);
  return ingest(records, std::shared_ptr<const Tokenizer>(std::move(tok)), sample_rate);
}

CorpusIndex CorpusIndex::ingest(const std::vector<RawDocument>& records,
                                std::shared_ptr<const Tokenizer> tokenizer, std::uint32_t sample_rate) {
  if (records.empty()) throw InputError("corpus must contain at least one document");
  std::set<std::string> seen;
  std::vector<Document> docs;
  docs.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!seen.insert(records[i].external_id).second) {
      throw InputError("duplicate document id '" + records[i].external_id + "'");
    }
    Document d;
    d.doc_id = static_cast<DocId>(i);
    d.title = records[i].title;
    d.body_tokens = tokenizer->encode(records[i].text);
    for (auto t : d.body_tokens) {
      if (is_reserved(t)) {
        throw InputError("document '" + records[i].external_id +
                         "' contains a word outside the frozen vocabulary");
      }
    }
    docs.push_back(std::move(d));
  }
  return assemble(std::move(docs), records, std::move(tokenizer), sample_rate);
}

CorpusIndex CorpusIndex::assemble(std::vector<Document> docs, std::vector<RawDocument> meta,
                                  std::shared_ptr<const Tokenizer> tokenizer, std::uint32_t sample_rate) {
  CorpusIndex idx;
  idx.tokenizer_ = std::move(tokenizer);
  TokenSeq concat;
  for (const auto& d : docs) {
    DocumentInfo info;
    info.doc_id = d.doc_id;
    info.external_id = meta[d.doc_id].external_id;
    info.title = d.title;
    info.start = concat.size();
    info.length = d.body_tokens.size();
    concat.insert(concat.end(), d.body_tokens.begin(), d.body_tokens.end());
    concat.push_back(kSeparator);
    idx.docs_.push_back(std::move(info));
  }
  TokenSeq rev(concat.rbegin(), concat.rend());
  concat.push_back(kTerminator);
  rev.push_back(kTerminator);
  const auto vocab = idx.tokenizer_->vocab_size();
  idx.forward_ = FMIndex::build(concat, vocab, sample_rate);
  idx.reversed_ = FMIndex::build(rev, vocab, sample_rate);
  return idx;
}

const DocumentInfo& CorpusIndex::document(DocId id) const {
  if (id >= docs_.size()) throw std::out_of_range("document id " + std::to_string(id) + " out of range");
  return docs_[id];
}

std::uint64_t CorpusIndex::content_tokens() const {
  std::uint64_t total = 0;
  for (const auto& d : docs_) total += d.length;
  return total;
}

TokenSeq CorpusIndex::document_tokens(DocId id) const {
  const auto& d = document(id);
  return forward_.extract(d.start, d.length);
}

std::optional<DocId> CorpusIndex::find_external(const std::string& external_id) const {
  for (const auto& d : docs_) {
    if (d.external_id == external_id) return d.doc_id;
  }
  return std::nullopt;
}

std::optional<DocPosition> CorpusIndex::position_to_doc(std::uint64_t global_pos) const {
  if (global_pos >= forward_.length()) {
    throw std::out_of_range("global position " + std::to_string(global_pos) + " out of range");
  }
  // last document starting at or before global_pos
  auto it = std::upper_bound(docs_.begin(), docs_.end(), global_pos,
                             [](std::uint64_t pos, const DocumentInfo& d) { return pos < d.start; });
  if (it == docs_.begin()) return std::nullopt;
  --it;
  const auto offset = global_pos - it->start;
  if (offset >= it->length) return std::nullopt;  // separator or terminator
  return DocPosition{it->doc_id, offset};
}

ClueStats clue_stats(const CorpusIndex& corpus, TokenView clue) {
  if (clue.empty()) throw InputError("clue must be non-empty");
  for (auto t : clue) {
    if (is_reserved(t)) throw InputError("clue contains reserved token id " + std::to_string(t));
  }
  ClueStats stats;
  for (auto pos : corpus.forward().locate(clue)) {
    if (const auto where = corpus.position_to_doc(pos)) ++stats.tf[where->doc_id];
  }
  for (const auto& [doc, n] : stats.tf) stats.cf += n;
  stats.df = stats.tf.size();
  return stats;
}

// ---------------------------------------------------------------------------
// Persistence

namespace {

constexpr const char* kManifest = "manifest.json";
constexpr const char* kForward = "forward.rfmx";
constexpr const char* kReversed = "reversed.rfmx";
constexpr const char* kOffsets = "offsets.bin";
constexpr const char* kVocab = "vocab.json";
constexpr const char* kDocuments = "documents.jsonl";

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  out << text;
}

nlohmann::json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

}  // namespace

void CorpusIndex::save(const fs::path& dir) const {
  fs::create_directories(dir);
  forward_.save_file((dir / kForward).string());
  reversed_.save_file((dir / kReversed).string());
  {
    std::ofstream out(dir / kOffsets, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + (dir / kOffsets).string() + " for writing");
    io::BinaryWriter w(out);
    w.header("ROFF", kFormatVersion);
    w.u64(docs_.size());
    for (const auto& d : docs_) {
      w.u64(d.start);
      w.u64(d.length);
      w.u32(d.doc_id);
    }
  }
  write_text(dir / kVocab, tokenizer_->to_json().dump() + "\n");
  std::string docs;
  for (const auto& d : docs_) {
    docs += nlohmann::json{{"doc_id", d.doc_id}, {"id", d.external_id}, {"title", d.title}}.dump();
    docs += "\n";
  }
  write_text(dir / kDocuments, docs);
  const nlohmann::json manifest = {
      {"format", "retro-index"},
      {"version", kFormatVersion},
      {"documents", docs_.size()},
      {"tokens", content_tokens()},
      {"vocab_size", vocab_size()},
      {"sample_rate", forward_.sample_rate()},
  };
  write_text(dir / kManifest, manifest.dump(2) + "\n");
}

CorpusIndex CorpusIndex::load(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw FormatError("index directory not found: " + dir.string());
  const auto manifest = read_json(dir / kManifest);
  if (manifest.value("format", "") != "retro-index") {
    throw FormatError((dir / kManifest).string() + ": not a retro index manifest");
  }
  const auto version = manifest.value("version", 0U);
  if (version != kFormatVersion) {
    throw FormatError((dir / kManifest).string() + ": index format version " + std::to_string(version) +
                      " does not match supported version " + std::to_string(kFormatVersion));
  }

  CorpusIndex idx;
  idx.tokenizer_ = WordTokenizer::from_json(read_json(dir / kVocab));
  idx.forward_ = FMIndex::load_file((dir / kForward).string());
  idx.reversed_ = FMIndex::load_file((dir / kReversed).string());
  if (idx.forward_.length() != idx.reversed_.length() ||
      idx.forward_.vocab_size() != idx.tokenizer_->vocab_size()) {
    throw FormatError(dir.string() + ": index files disagree on length or vocabulary");
  }

  const auto offsets_path = dir / kOffsets;
  std::ifstream off(offsets_path, std::ios::binary);
  if (!off) throw FormatError("cannot open " + offsets_path.string());
  io::BinaryReader r(off, offsets_path.string());
  r.header("ROFF", kFormatVersion);
  const auto n = r.u64();
  if (n == 0 || n > idx.forward_.length()) r.fail("document count out of range");
  std::uint64_t expected_start = 0;
  for (std::uint64_t i = 0; i < n; ++i) {
    DocumentInfo d;
    d.start = r.u64();
    d.length = r.u64();
    d.doc_id = r.u32();
    if (d.doc_id != i || d.start != expected_start) r.fail("offsets table has gaps or overlaps");
    expected_start = d.start + d.length + 1;
    idx.docs_.push_back(std::move(d));
  }
  r.expect_end();
  if (expected_start + 1 != idx.forward_.length()) r.fail("offsets do not cover the index");

  std::ifstream meta(dir / kDocuments, std::ios::binary);
  if (!meta) throw FormatError("cannot open " + (dir / kDocuments).string());
  std::string line;
  std::size_t i = 0;
  while (std::getline(meta, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || i >= idx.docs_.size() || j.value("doc_id", -1) != static_cast<long long>(i)) {
      throw FormatError((dir / kDocuments).string() + ": malformed entry " + std::to_string(i));
    }
    idx.docs_[i].external_id = j.value("id", "");
    idx.docs_[i].title = j.value("title", "");
    ++i;
  }
  if (i != idx.docs_.size()) throw FormatError((dir / kDocuments).string() + ": document count mismatch");
  return idx;
}

// ---------------------------------------------------------------------------
// Document-level indexes

DocIndex build_doc_index(TokenView tokens, std::uint32_t vocab_size, std::uint32_t sample_rate) {
  TokenSeq fwd(tokens.begin(), tokens.end());
  TokenSeq rev(tokens.rbegin(), tokens.rend());
  fwd.push_back(kTerminator);
  rev.push_back(kTerminator);
  return DocIndex{FMIndex::build(fwd, vocab_size, sample_rate), FMIndex::build(rev, vocab_size, sample_rate)};
}

DocIndexManager::DocIndexManager(std::shared_ptr<const CorpusIndex> corpus, bool build_on_demand)
    : corpus_(std::move(corpus)) {
  if (!build_on_demand) {
    for (const auto& d : corpus_->documents()) get(d.doc_id);
  }
}

std::shared_ptr<const DocIndex> DocIndexManager::get(DocId id) const {
  std::lock_guard lock(mutex_);
  if (auto it = cache_.find(id); it != cache_.end()) return it->second;
  const auto tokens = corpus_->document_tokens(id);
  auto built = std::make_shared<const DocIndex>(
      build_doc_index(tokens, corpus_->vocab_size(), corpus_->forward().sample_rate()));
  cache_.emplace(id, built);
  return built;
}

std::size_t DocIndexManager::cached() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

}  // namespace retro
