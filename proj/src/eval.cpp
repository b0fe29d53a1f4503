#include "retro/eval.hpp"

#include <functional>
#include <istream>
#include <ostream>

#include "retro/errors.hpp"

namespace retro {

namespace {

void for_each_json_line(std::istream& in, const std::string& source,
                        const std::function<void(const nlohmann::json&, const std::string& where)>& fn) {
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
    fn(j, where);
  }
}

std::string required_string(const nlohmann::json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw InputError(where + "field '" + key + "' must be a string");
  return it->get<std::string>();
}

std::vector<std::string> string_list(const nlohmann::json& j, const char* key, const std::string& where,
                                     bool required, bool allow_ints = false) {
  std::vector<std::string> out;
  const auto it = j.find(key);
  if (it == j.end()) {
    if (required) throw InputError(where + "missing field '" + key + "'");
    return out;
  }
  if (!it->is_array()) throw InputError(where + "field '" + key + "' must be an array");
  for (const auto& v : *it) {
    if (v.is_string()) {
      out.push_back(v.get<std::string>());
    } else if (allow_ints && v.is_number_integer()) {
      out.push_back(std::to_string(v.get<long long>()));
    } else {
      throw InputError(where + "field '" + key + "' must hold strings");
    }
  }
  return out;
}

}  // namespace

std::vector<EvalRecord> read_eval_jsonl(std::istream& in, const std::string& source) {
  std::vector<EvalRecord> out;
  for_each_json_line(in, source, [&](const nlohmann::json& j, const std::string& where) {
    EvalRecord r;
    r.query = required_string(j, "query", where);
    r.answers = string_list(j, "answers", where, true);
    if (r.answers.empty()) throw InputError(where + "at least one gold answer is required");
    r.gold_doc_ids = string_list(j, "gold_doc_ids", where, false, true);
    out.push_back(std::move(r));
  });
  return out;
}

std::vector<ExampleRecord> read_examples_jsonl(std::istream& in, const std::string& source) {
  std::vector<ExampleRecord> out;
  for_each_json_line(in, source, [&](const nlohmann::json& j, const std::string& where) {
    ExampleRecord r;
    r.query = required_string(j, "query", where);
    r.clues = string_list(j, "clues", where, false);
    r.evidences = string_list(j, "evidences", where, false);
    r.answer = required_string(j, "answer", where);
    out.push_back(std::move(r));
  });
  return out;
}

void write_eval_jsonl(std::ostream& out, const std::vector<EvalRecord>& records) {
  for (const auto& r : records) {
    nlohmann::json j = {{"query", r.query}, {"answers", r.answers}};
    if (!r.gold_doc_ids.empty()) j["gold_doc_ids"] = r.gold_doc_ids;
    out << j.dump() << "\n";
  }
}

void write_examples_jsonl(std::ostream& out, const std::vector<ExampleRecord>& records) {
  for (const auto& r : records) {
    out << nlohmann::json{{"query", r.query}, {"clues", r.clues}, {"evidences", r.evidences}, {"answer", r.answer}}
               .dump()
        << "\n";
  }
}

void write_corpus_jsonl(std::ostream& out, const std::vector<RawDocument>& docs) {
  for (const auto& d : docs) {
    out << nlohmann::json{{"id", d.external_id}, {"title", d.title}, {"text", d.text}}.dump() << "\n";
  }
}

TrainingExample to_training_example(const ExampleRecord& ex, const Tokenizer& tok, const SpecialTokens& sp) {
  auto encode_all = [&](const std::vector<std::string>& items, const char* what) {
    std::vector<TokenSeq> out;
    for (const auto& s : items) {
      auto t = tok.encode(s);
      if (t.empty()) throw InputError(std::string("example has an empty ") + what + " for query '" + ex.query + "'");
      out.push_back(std::move(t));
    }
    return out;
  };
  TrainingExample te;
  te.query = tok.encode(ex.query);
  te.target = format_target(encode_all(ex.clues, "clue"), encode_all(ex.evidences, "evidence"),
                            tok.encode(ex.answer), sp);
  return te;
}

NGramModel fit_provider(const CorpusIndex& corpus, const std::vector<ExampleRecord>& examples, unsigned order) {
  const auto sp = SpecialTokens::after(corpus.vocab_size());
  std::vector<TokenSeq> docs;
  for (const auto& d : corpus.documents()) docs.push_back(corpus.document_tokens(d.doc_id));
  std::vector<TrainingExample> train;
  for (const auto& ex : examples) train.push_back(to_training_example(ex, corpus.tokenizer(), sp));
  return NGramModel::fit(docs, train, sp, order);
}

bool contains_answer(const std::string& text, const std::vector<std::string>& answers) {
  const auto hay = " " + normalize_text(text) + " ";
  for (const auto& a : answers) {
    const auto needle = normalize_text(a);
    if (!needle.empty() && hay.find(" " + needle + " ") != std::string::npos) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------

nlohmann::json EvalReport::to_json(bool with_outputs) const {
  nlohmann::json j = {
      {"hit_definition", "an evidence is a hit when it contains a gold answer after case/punctuation normalization"},
      {"queries", queries},
      {"R@1", recall_at_1},
      {"R@5", recall_at_5},
      {"Num", mean_evidences},
      {"answer_accuracy", answer_accuracy},
      {"incomplete", incomplete},
      {"tokens", {{"input", input_tokens}, {"output", output_tokens}, {"total", input_tokens + output_tokens}}},
  };
  if (queries_with_gold_docs > 0) {
    j["doc_R@5"] = doc_recall_at_5;
    j["queries_with_gold_docs"] = queries_with_gold_docs;
  }
  if (with_outputs) {
    auto arr = nlohmann::json::array();
    for (const auto& o : outputs) arr.push_back(o.to_json());
    j["outputs"] = arr;
  }
  return j;
}

EvalReport evaluate(const Engine& engine, const LogitProvider& provider, const DecoderConfig& config,
                    const std::vector<EvalRecord>& records, unsigned threads) {
  if (records.empty()) throw InputError("evaluation set is empty");
  EvalReport rep;
  rep.queries = records.size();
  rep.outputs = parallel_map<StructuredOutput>(
      records.size(), threads, [&](std::size_t i) { return run_query(engine, records[i].query, provider, config); });

  std::size_t hit1 = 0, hit5 = 0, answered = 0, evidences = 0, doc_hit = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& out = rep.outputs[i];
    const auto& rec = records[i];
    evidences += out.evidences.size();
    for (std::size_t k = 0; k < out.evidences.size() && k < 5; ++k) {
      if (contains_answer(out.evidences[k].text, rec.answers)) {
        if (k == 0) ++hit1;
        ++hit5;
        break;
      }
    }
    if (contains_answer(out.answer, rec.answers)) ++answered;
    if (!out.complete) ++rep.incomplete;
    rep.input_tokens += out.diagnostics["tokens"]["input"].get<std::uint64_t>();
    rep.output_tokens += out.diagnostics["tokens"]["output"].get<std::uint64_t>();
    if (!rec.gold_doc_ids.empty()) {
      ++rep.queries_with_gold_docs;
      for (std::size_t k = 0; k < out.evidences.size() && k < 5; ++k) {
        if (std::find(rec.gold_doc_ids.begin(), rec.gold_doc_ids.end(), out.evidences[k].source_id) !=
            rec.gold_doc_ids.end()) {
          ++doc_hit;
          break;
        }
      }
    }
  }
  const auto n = static_cast<double>(records.size());
  rep.recall_at_1 = static_cast<double>(hit1) / n;
  rep.recall_at_5 = static_cast<double>(hit5) / n;
  rep.mean_evidences = static_cast<double>(evidences) / n;
  rep.answer_accuracy = static_cast<double>(answered) / n;
  if (rep.queries_with_gold_docs > 0) {
    rep.doc_recall_at_5 = static_cast<double>(doc_hit) / static_cast<double>(rep.queries_with_gold_docs);
  }
  return rep;
}

// ---------------------------------------------------------------------------

const StudyRow& StudyReport::row(ConstraintMode mode, std::size_t beams) const {
  for (const auto& r : rows) {
    if (r.mode == mode && r.beams == beams) return r;
  }
  throw InputError("study has no row for " + to_string(mode) + " at beam size " + std::to_string(beams));
}

nlohmann::json StudyReport::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& r : rows) {
    arr.push_back({{"constraints", to_string(r.mode)},
                   {"beams", r.beams},
                   {"evidence_hit_rate", r.hit_rate},
                   {"mean_evidences", r.mean_evidences},
                   {"prefix_relevance", r.prefix_relevance}});
  }
  return {{"queries", queries},
          {"hit_definition", "any evidence of any returned beam contains a gold answer"},
          {"rows", arr}};
}

StudyReport false_pruning_study(const Engine& engine, const LogitProvider& provider, const DecoderConfig& base,
                                const std::vector<EvalRecord>& records, const StudyOptions& options) {
  if (records.empty()) throw InputError("study set is empty");
  struct QueryResult {
    bool hit = false;
    std::size_t evidences = 0;
    std::vector<double> curve;
  };
  StudyReport rep;
  rep.queries = records.size();
  for (auto mode : {ConstraintMode::Candidates, ConstraintMode::Corpus}) {
    for (auto beams : options.beam_sizes) {
      auto cfg = base;
      cfg.constraints = mode;
      cfg.num_beams = beams;
      const auto results = parallel_map<QueryResult>(records.size(), options.threads, [&](std::size_t i) {
        const auto decoded = decode(engine, records[i].query, provider, cfg);
        QueryResult q;
        q.curve.assign(options.curve_length, 0.0);
        for (const auto& b : decoded) {
          for (const auto& e : b.session.output(b.complete).evidences) {
            if (contains_answer(e.text, records[i].answers)) q.hit = true;
          }
        }
        const auto& top = decoded.front().session;
        q.evidences = top.evidences().size();
        if (!top.evidences().empty()) {
          const auto& ev = top.evidences().front().tokens;
          double last = 0.0;
          for (std::size_t k = 1; k <= options.curve_length; ++k) {
            if (k <= ev.size()) last = engine.scorer->score(top.query_tokens(), TokenView(ev.data(), k));
            q.curve[k - 1] = last;
          }
        }
        return q;
      });
      StudyRow row;
      row.mode = mode;
      row.beams = beams;
      row.prefix_relevance.assign(options.curve_length, 0.0);
      std::size_t hits = 0, evs = 0;
      for (const auto& q : results) {
        hits += q.hit;
        evs += q.evidences;
        for (std::size_t k = 0; k < options.curve_length; ++k) row.prefix_relevance[k] += q.curve[k];
      }
      const auto n = static_cast<double>(records.size());
      row.hit_rate = static_cast<double>(hits) / n;
      row.mean_evidences = static_cast<double>(evs) / n;
      for (auto& v : row.prefix_relevance) v /= n;
      rep.rows.push_back(std::move(row));
    }
  }
  return rep;
}

}  // namespace retro
