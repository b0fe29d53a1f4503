#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "retro/corpus.hpp"
#include "retro/errors.hpp"

using namespace retro;

namespace {

std::vector<RawDocument> docs(std::initializer_list<const char*> texts) {
  std::vector<RawDocument> out;
  int i = 0;
  for (const char* t : texts) out.push_back({"d" + std::to_string(i++), "", t});
  return out;
}

/// Plain concatenation built independently of the index, for oracle scans.
TokenSeq naive_concat(const CorpusIndex& c, const std::vector<RawDocument>& raw) {
  TokenSeq out;
  for (const auto& r : raw) {
    const auto toks = c.tokenizer().encode(r.text);
    out.insert(out.end(), toks.begin(), toks.end());
    out.push_back(kSeparator);
  }
  out.push_back(kTerminator);
  return out;
}

std::vector<RawDocument> synthetic(std::mt19937_64& rng, std::size_t n, std::size_t words) {
  std::vector<RawDocument> out;
  for (std::size_t d = 0; d < n; ++d) {
    std::string text;
    const auto len = 1 + rng() % 30;
    for (std::size_t i = 0; i < len; ++i) text += "w" + std::to_string(rng() % words) + " ";
    out.push_back({std::to_string(d), "t" + std::to_string(d), text});
  }
  return out;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("retro_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("tokenizer splits, lowercases and freezes its vocabulary") {
  WordTokenizer tok;
  tok.observe("The capital, of FRANCE!");
  CHECK(tok.vocab_size() == kFirstContentId + 4);
  CHECK(tok.encode("france's capital") == TokenSeq{6, kUnknown, 4});
  CHECK(tok.decode(tok.encode("the Capital")) == "the capital");
  CHECK(WordTokenizer::split("a-b  c", {}) == std::vector<std::string>{"a", "b", "c"});
  const auto copy = WordTokenizer::from_json(tok.to_json());
  CHECK(copy->encode("of the") == tok.encode("of the"));
  CHECK(normalize_text("  Paris, FRANCE. ") == "paris france");
}

TEST_CASE("toy corpus: one separator per document") {
  const auto c = CorpusIndex::ingest(docs({"a b c", "b c d", "c d e"}));
  CHECK(c.num_documents() == 3);
  CHECK(c.forward().count(TokenSeq{kSeparator}) == 3);
  CHECK(c.reversed().count(TokenSeq{kSeparator}) == 3);
  CHECK(c.documents()[1].start == 4);
  CHECK(c.content_tokens() == 9);
  CHECK(c.document_tokens(2) == c.tokenizer().encode("c d e"));
}

TEST_CASE("ingest rejects degenerate input") {
  CHECK_THROWS_AS(CorpusIndex::ingest(std::vector<RawDocument>{}), InputError);
  std::vector<RawDocument> dup = {{"x", "", "a"}, {"x", "", "b"}};
  CHECK_THROWS_AS(CorpusIndex::ingest(dup), InputError);
}

TEST_CASE("read_corpus_jsonl names the offending line") {
  std::istringstream ok(R"({"id": 7, "title": "T", "text": "hello world"}

{"id": "b", "title": "U", "text": "more"})");
  const auto recs = read_corpus_jsonl(ok, "ok.jsonl");
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].external_id == "7");
  CHECK(recs[1].title == "U");

  std::istringstream bad(R"({"id": 1, "title": "T", "text": "x"}
{"id": 2, "title": "T", "text": )");
  try {
    read_corpus_jsonl(bad, "bad.jsonl");
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("bad.jsonl:2") != std::string::npos);
  }
  std::istringstream no_text(R"({"id": 1, "title": "T"})");
  CHECK_THROWS_AS(read_corpus_jsonl(no_text, "x"), InputError);
  std::istringstream bad_id(R"({"id": [1], "title": "T", "text": "x"})");
  CHECK_THROWS_AS(read_corpus_jsonl(bad_id, "x"), InputError);
}

TEST_CASE("position_to_doc agrees with a linear scan") {
  std::mt19937_64 rng(3);
  const auto raw = synthetic(rng, 60, 20);
  const auto c = CorpusIndex::ingest(raw);
  const auto& infos = c.documents();

  CHECK(c.position_to_doc(0) == DocPosition{0, 0});
  CHECK(c.position_to_doc(infos[5].start) == DocPosition{5, 0});
  CHECK_FALSE(c.position_to_doc(c.forward().length() - 1).has_value());
  CHECK_THROWS_AS(c.position_to_doc(c.forward().length()), std::out_of_range);

  for (std::uint64_t pos = 0; pos < c.forward().length(); ++pos) {
    std::optional<DocPosition> expected;
    for (const auto& d : infos) {
      if (pos >= d.start && pos < d.start + d.length) expected = DocPosition{d.doc_id, pos - d.start};
    }
    CHECK(c.position_to_doc(pos) == expected);
  }
}

TEST_CASE("sampled substrings map back to their source document") {
  std::mt19937_64 rng(17);
  const auto raw = synthetic(rng, 1000, 5000);
  const auto c = CorpusIndex::ingest(raw);
  for (int i = 0; i < 50; ++i) {
    const auto d = static_cast<DocId>(rng() % raw.size());
    const auto toks = c.tokenizer().encode(raw[d].text);
    const auto start = rng() % toks.size();
    const auto len = 1 + rng() % std::min<std::size_t>(4, toks.size() - start);
    const TokenSeq pattern(toks.begin() + static_cast<std::ptrdiff_t>(start),
                           toks.begin() + static_cast<std::ptrdiff_t>(start + len));
    bool found = false;
    for (auto pos : c.forward().locate(pattern)) {
      const auto where = c.position_to_doc(pos);
      REQUIRE(where.has_value());
      if (where->doc_id == d && where->offset == start) found = true;
    }
    CHECK(found);
  }
}

TEST_CASE("clue_stats on the two-document example") {
  const auto c = CorpusIndex::ingest(docs({"a b a", "b a"}));
  const auto a = c.tokenizer().encode("a");
  const auto s = clue_stats(c, a);
  CHECK(s.cf == 3);
  CHECK(s.df == 2);
  CHECK(s.tf == std::map<DocId, std::uint64_t>{{0, 2}, {1, 1}});

  const auto ab = clue_stats(c, c.tokenizer().encode("a b"));
  CHECK(ab.cf == 1);
  CHECK(ab.tf == std::map<DocId, std::uint64_t>{{0, 1}});

  // "a" then "a" only occurs across the document boundary, never inside one
  const auto aa = clue_stats(c, TokenSeq{a[0], a[0]});
  CHECK(aa.cf == 0);
  CHECK(aa.df == 0);
  CHECK(aa.tf.empty());

  CHECK_THROWS_AS(clue_stats(c, TokenSeq{}), InputError);
  CHECK_THROWS_AS(clue_stats(c, TokenSeq{a[0], kSeparator}), InputError);
  CHECK_THROWS_AS(clue_stats(c, TokenSeq{kUnknown}), InputError);
}

TEST_CASE("property: clue stats and hierarchy coherence") {
  std::mt19937_64 rng(41);
  const auto raw = synthetic(rng, 40, 12);
  const auto corpus = std::make_shared<const CorpusIndex>(CorpusIndex::ingest(raw));
  const DocIndexManager manager(corpus);
  const auto text = naive_concat(*corpus, raw);
  REQUIRE(corpus->forward().extract(0, corpus->forward().length()) == text);

  for (int i = 0; i < 200; ++i) {
    TokenSeq p;
    const auto len = 1 + rng() % 3;
    for (std::size_t k = 0; k < len; ++k) p.push_back(kFirstContentId + static_cast<TokenId>(rng() % 12));
    const auto s = clue_stats(*corpus, p);
    std::uint64_t sum = 0;
    for (const auto& [d, n] : s.tf) sum += n;
    CHECK(s.cf == sum);
    CHECK(s.df == s.tf.size());
    CHECK(s.cf == oracle::naive_count(text, p));

    const auto d = static_cast<DocId>(rng() % raw.size());
    const auto it = s.tf.find(d);
    const auto expected = it == s.tf.end() ? 0 : it->second;
    CHECK(manager.get(d)->forward.count(p) == expected);
    CHECK(manager.get(d)->reversed.count(TokenSeq(p.rbegin(), p.rend())) == expected);
  }
  CHECK(manager.cached() <= raw.size());
  CHECK(manager.get(0) == manager.get(0));
}

TEST_CASE("eager manager builds every document") {
  const auto corpus = std::make_shared<const CorpusIndex>(CorpusIndex::ingest(docs({"a", "b", "c d"})));
  const DocIndexManager eager(corpus, false);
  CHECK(eager.cached() == 3);
  const DocIndexManager lazy(corpus);
  CHECK(lazy.cached() == 0);
  CHECK(lazy.get(2)->forward.length() == 3);
  CHECK(lazy.cached() == 1);
}

TEST_CASE("save and load round trip") {
  std::mt19937_64 rng(8);
  auto raw = synthetic(rng, 30, 40);
  raw[3].title = "A \"quoted\" title";
  const auto c = CorpusIndex::ingest(raw);
  const auto dir = temp_dir("roundtrip");
  c.save(dir);
  const auto l = CorpusIndex::load(dir);

  CHECK(l.num_documents() == c.num_documents());
  CHECK(l.vocab_size() == c.vocab_size());
  CHECK(l.document(3).title == raw[3].title);
  CHECK(l.document(7).external_id == "7");
  CHECK(l.find_external("12") == std::optional<DocId>(12));
  for (int i = 0; i < 100; ++i) {
    const TokenSeq p = {kFirstContentId + static_cast<TokenId>(rng() % 40),
                        kFirstContentId + static_cast<TokenId>(rng() % 40)};
    CHECK(l.forward().locate(p) == c.forward().locate(p));
    CHECK(l.reversed().count(p) == c.reversed().count(p));
    CHECK(l.tokenizer().encode(raw[i % raw.size()].text) == c.tokenizer().encode(raw[i % raw.size()].text));
  }

  SUBCASE("saving twice is byte-identical") {
    const auto dir2 = temp_dir("roundtrip2");
    l.save(dir2);
    for (const char* f : {"manifest.json", "forward.rfmx", "reversed.rfmx", "offsets.bin", "vocab.json",
                          "documents.jsonl"}) {
      std::ifstream a(dir / f, std::ios::binary), b(dir2 / f, std::ios::binary);
      const std::string sa((std::istreambuf_iterator<char>(a)), {});
      const std::string sb((std::istreambuf_iterator<char>(b)), {});
      CHECK_MESSAGE(sa == sb, f);
    }
  }
  SUBCASE("version mismatch is an explicit error") {
    auto manifest = nlohmann::json::parse(std::ifstream(dir / "manifest.json"));
    manifest["version"] = 99;
    std::ofstream(dir / "manifest.json") << manifest.dump();
    CHECK_THROWS_AS(CorpusIndex::load(dir), FormatError);
  }
  SUBCASE("missing directory") { CHECK_THROWS_AS(CorpusIndex::load(temp_dir("absent")), FormatError); }
}
