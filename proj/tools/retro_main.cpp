#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "retro/corpus.hpp"
#include "retro/decoder.hpp"
#include "retro/decoy.hpp"
#include "retro/errors.hpp"
#include "retro/eval.hpp"
#include "retro/ngram.hpp"

namespace fs = std::filesystem;
using namespace retro;

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  return out;
}

/// Decoder flags. Only flags given on the command line override the config
/// file, so each one is captured into a JSON overlay.
struct DecoderFlags {
  std::string config_path;
  nlohmann::json overlay = nlohmann::json::object();
  std::vector<std::function<void()>> collectors;

  template <typename T>
  void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    auto value = std::make_shared<T>();
    auto* opt = app->add_option(flag, *value, help);
    collectors.push_back([this, value, opt, key] {
      if (opt->count() > 0) overlay[key] = *value;
    });
  }

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "decoder config JSON; flags override its values")->check(CLI::ExistingFile);
    add<std::size_t>(app, "--lw", "lw", "context tokens on each side of a clue occurrence");
    add<std::size_t>(app, "--lmax", "lmax", "maximum merged window length");
    add<double>(app, "--lambda", "lambda", "window bonus weight");
    add<double>(app, "--w1", "w1", "fusion weight of the clue ranking");
    add<double>(app, "--w2", "w2", "fusion weight of the lexical ranking");
    add<std::size_t>(app, "--k-gen", "k_gen", "depth of the clue ranking");
    add<std::size_t>(app, "--k-lex", "k_lex", "depth of the lexical ranking");
    add<std::size_t>(app, "--k-aux", "k_aux", "auxiliary clues taken from the query");
    add<std::size_t>(app, "--candidates", "candidates", "candidate documents after fusion");
    add<std::size_t>(app, "--max-clues", "max_clues", "maximum number of clues");
    add<std::size_t>(app, "--max-clue-tokens", "max_clue_tokens", "maximum tokens per clue");
    add<std::size_t>(app, "--max-evidence", "max_evidence", "maximum number of evidences");
    add<std::size_t>(app, "--min-evidence-tokens", "min_evidence_tokens", "minimum tokens per evidence");
    add<std::size_t>(app, "--max-evidence-tokens", "max_evidence_tokens", "maximum tokens per evidence");
    add<std::size_t>(app, "--answer-budget", "answer_budget", "maximum answer tokens");
    add<std::size_t>(app, "--token-budget", "token_budget", "maximum emitted tokens per query");
    add<std::string>(app, "--constraints", "constraints", "candidates | corpus");
    add<std::size_t>(app, "--beams", "beams", "number of diverse beams");
    add<double>(app, "--diversity-penalty", "diversity_penalty", "Hamming diversity penalty");
  }

  DecoderConfig resolve() {
    for (auto& c : collectors) c();
    DecoderConfig base;
    if (!config_path.empty()) {
      auto in = open_input(config_path);
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw InputError(config_path + ": invalid JSON (" + e.what() + ")");
      }
      base = DecoderConfig::from_json(j, base);
    }
    auto cfg = DecoderConfig::from_json(overlay, base);
    cfg.validate();
    return cfg;
  }
};

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

struct Loaded {
  Engine engine;
  NGramModel model;
};

Loaded load(const std::string& index_dir, const std::string& model_path) {
  auto corpus = std::make_shared<const CorpusIndex>(CorpusIndex::load(index_dir));
  return {Engine::with_defaults(std::move(corpus)), NGramModel::load_file(model_path)};
}

std::vector<EvalRecord> load_eval(const std::string& path) {
  auto in = open_input(path);
  return read_eval_jsonl(in, path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clue, evidence and answer decoding constrained by FM-indexes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "retro 1.0");

  std::string corpus_path, out_dir, index_dir, model_path, examples_path, eval_path, query;
  bool keep_case = false, pretty = false, with_outputs = false;
  unsigned order = 3, threads = 1;
  std::vector<std::size_t> beam_sizes = {1, 3, 5};
  std::size_t curve_length = 20;
  DecoyOptions decoy;

  auto* build = app.add_subcommand("build", "index a JSON Lines corpus");
  build->add_option("--corpus", corpus_path, "corpus JSONL: {id, title?, text}")->required();
  build->add_option("--out", out_dir, "index directory to write")->required();
  build->add_flag("--keep-case", keep_case, "do not lowercase words");

  auto* fit = app.add_subcommand("fit", "fit the n-gram logit provider");
  fit->add_option("--index", index_dir, "index directory")->required();
  fit->add_option("--examples", examples_path, "examples JSONL: {query, clues[], evidences[], answer}")->required();
  fit->add_option("--out", model_path, "model file to write")->required();
  fit->add_option("--order", order, "n-gram order")->check(CLI::Range(1U, 8U));

  DecoderFlags query_flags, eval_flags, study_flags;

  auto* q = app.add_subcommand("query", "decode one query");
  q->add_option("--index", index_dir, "index directory")->required();
  q->add_option("--model", model_path, "model file")->required();
  q->add_option("--query", query, "question text")->required();
  q->add_flag("--pretty", pretty, "human-readable output");
  query_flags.attach(q);

  auto* ev = app.add_subcommand("eval", "decode an eval set and report retrieval metrics");
  ev->add_option("--index", index_dir, "index directory")->required();
  ev->add_option("--model", model_path, "model file")->required();
  ev->add_option("--eval", eval_path, "eval JSONL: {query, answers[], gold_doc_ids?[]}")->required();
  ev->add_option("--threads", threads, "worker threads")->check(CLI::Range(1U, 256U));
  ev->add_flag("--outputs", with_outputs, "include every structured output");
  eval_flags.attach(ev);

  auto* fp = app.add_subcommand("false-pruning", "compare candidate and corpus constraints");
  fp->add_option("--index", index_dir, "index directory")->required();
  fp->add_option("--model", model_path, "model file")->required();
  fp->add_option("--eval", eval_path, "eval JSONL")->required();
  fp->add_option("--beam-sizes", beam_sizes, "beam sizes to compare")->delimiter(',');
  fp->add_option("--curve-length", curve_length, "positions in the prefix relevance curve");
  fp->add_option("--threads", threads, "worker threads")->check(CLI::Range(1U, 256U));
  study_flags.attach(fp);

  auto* gen = app.add_subcommand("gen-decoy", "write the decoy corpus, eval and examples files");
  gen->add_option("--out", out_dir, "output directory")->required();
  gen->add_option("--families", decoy.families, "target families");
  gen->add_option("--decoys", decoy.decoys_per_family, "decoys per family");
  gen->add_option("--seed", decoy.seed, "generator seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*build) {
      auto in = open_input(corpus_path);
      const auto docs = read_corpus_jsonl(in, corpus_path);
      WordTokenizer::Options opt;
      opt.lowercase = !keep_case;
      const auto corpus = CorpusIndex::ingest(docs, opt);
      corpus.save(out_dir);
      print_json({{"documents", corpus.num_documents()},
                  {"tokens", corpus.content_tokens()},
                  {"vocab_size", corpus.vocab_size()},
                  {"index", out_dir}});
    } else if (*fit) {
      const auto corpus = CorpusIndex::load(index_dir);
      auto in = open_input(examples_path);
      const auto examples = read_examples_jsonl(in, examples_path);
      const auto model = fit_provider(corpus, examples, order);
      model.save_file(model_path);
      print_json({{"examples", examples.size()}, {"order", order}, {"vocab_size", model.vocab_size()},
                  {"model", model_path}});
    } else if (*q) {
      const auto cfg = query_flags.resolve();
      const auto l = load(index_dir, model_path);
      const auto out = run_query(l.engine, query, l.model, cfg);
      if (pretty) {
        std::cout << out.render_pretty();
      } else {
        print_json(out.to_json());
      }
    } else if (*ev) {
      const auto cfg = eval_flags.resolve();
      const auto l = load(index_dir, model_path);
      auto report = evaluate(l.engine, l.model, cfg, load_eval(eval_path), threads).to_json(with_outputs);
      report["config"] = cfg.to_json();
      print_json(report);
    } else if (*fp) {
      const auto cfg = study_flags.resolve();
      const auto l = load(index_dir, model_path);
      StudyOptions so;
      so.beam_sizes = beam_sizes;
      so.curve_length = curve_length;
      so.threads = threads;
      auto report = false_pruning_study(l.engine, l.model, cfg, load_eval(eval_path), so).to_json();
      report["config"] = cfg.to_json();
      print_json(report);
    } else if (*gen) {
      const auto fx = generate_decoy_fixture(decoy);
      fs::create_directories(out_dir);
      auto c = open_output(fs::path(out_dir) / "corpus.jsonl");
      write_corpus_jsonl(c, fx.corpus);
      auto e = open_output(fs::path(out_dir) / "eval.jsonl");
      write_eval_jsonl(e, fx.eval);
      auto x = open_output(fs::path(out_dir) / "examples.jsonl");
      write_examples_jsonl(x, fx.examples);
      print_json({{"documents", fx.corpus.size()}, {"queries", fx.eval.size()}, {"out", out_dir}});
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
