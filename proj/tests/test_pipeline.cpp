#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "ugglan/pipeline.hpp"

using namespace ugglan;

namespace {

namespace fs = std::filesystem;

std::string data(const std::string& name) {
  return (fs::path(UGGLAN_TEST_DATA) / name).string();
}

std::string tmp(const std::string& name) {
  return (fs::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Builds the KB from the bundled fixture files once per process.
const std::string& fixture_kb() {
  static std::string path = [] {
    kb::BuildInputs in;
    in.corpus = kb::read_corpus_jsonl(data("mini_corpus.jsonl"));
    in.redirects = kb::read_redirects_tsv(data("redirects.tsv"));
    in.disambig = kb::read_disambig_tsv(data("disambig.tsv"));
    in.class_records = kb::read_classes_tsv(data("classes.tsv"));
    in.nominal_records = kb::read_nominals_tsv(data("nominals.tsv"));
    in.titles = kb::read_titles_tsv(data("titles.tsv"));
    in.nominal_seed = kb::read_seed_list(data("seed.txt"));
    kb::KnowledgeBase k = kb::build_kb(in);
    std::string p = tmp("ug_pipeline_kb.bin");
    kb::save_kb(k, p);
    return p;
  }();
  return path;
}

std::string write_config(const std::string& name, const std::string& input,
                         const std::string& output, std::size_t workers,
                         const std::string& extra = "") {
  std::string path = tmp(name);
  std::ofstream f(path);
  f << "{\n"
    << "  \"kb\": \"" << fixture_kb() << "\",\n"
    << "  \"input\": \"" << input << "\",\n"
    << "  \"output\": \"" << output << "\",\n"
    << "  \"mode\": \"DICT_ONLY\",\n"
    << "  \"run_id\": \"golden\",\n"
    << "  \"nil_threshold\": 0.1,\n"
    << "  \"workers\": " << workers << extra << "\n}\n";
  return path;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config reader rejects bad input") {
  CHECK_THROWS_AS(pipeline::read_config(tmp("ug_no_such_config.json")),
                  pipeline::ConfigError);
  std::string bad = tmp("ug_bad_config.json");
  {
    std::ofstream f(bad);
    f << "{ not json";
  }
  CHECK_THROWS_AS(pipeline::read_config(bad), pipeline::ConfigError);
  fs::remove(bad);
}

TEST_CASE("modes that need an NER model fail before reading documents") {
  pipeline::Config cfg;
  cfg.kb_path = fixture_kb();
  cfg.input_path = tmp("ug_does_not_exist.jsonl");
  cfg.output_path = tmp("ug_out_unused.tsv");
  cfg.mode = mention::OverlapMode::Hybrid;
  CHECK_THROWS_AS(pipeline::run_pipeline(cfg), pipeline::ConfigError);
  cfg.mode = mention::OverlapMode::NerOnly;
  CHECK_THROWS_AS(pipeline::run_pipeline(cfg), pipeline::ConfigError);
}

TEST_CASE("empty input produces an empty output and a zero report") {
  std::string input = tmp("ug_empty.jsonl");
  std::ofstream(input).close();
  std::string output = tmp("ug_empty_out.tsv");
  pipeline::Config cfg =
      pipeline::read_config(write_config("ug_cfg_empty.json", input, output, 1));
  pipeline::Report report = pipeline::run_pipeline(cfg);
  CHECK(report.documents == 0);
  CHECK(report.emitted_mentions == 0);
  CHECK(slurp(output).empty());
  fs::remove(input);
  fs::remove(output);
}

TEST_CASE("golden run is byte-identical across runs and worker counts") {
  std::string golden = slurp(data("golden_run.tsv"));
  for (std::size_t workers : {1u, 4u}) {
    for (int round = 0; round < 2; ++round) {
      std::string output = tmp("ug_golden_out.tsv");
      pipeline::Config cfg = pipeline::read_config(write_config(
          "ug_cfg_golden.json", data("run_corpus.jsonl"), output, workers));
      pipeline::Report report = pipeline::run_pipeline(cfg);
      CHECK(report.documents == 2);
      CHECK(report.emitted_mentions > 0);
      CHECK(slurp(output) == golden);
      fs::remove(output);
    }
  }
}

TEST_CASE("report counts are internally consistent") {
  std::string output = tmp("ug_report_out.tsv");
  pipeline::Config cfg = pipeline::read_config(
      write_config("ug_cfg_report.json", data("run_corpus.jsonl"), output, 1));
  pipeline::Report r = pipeline::run_pipeline(cfg);
  CHECK(r.emitted_mentions <= r.resolved_mentions + r.coref_additions +
                                  r.nominal_additions);
  CHECK(r.linked_mentions + r.nil_mentions + r.dropped_no_class ==
        r.resolved_mentions);
  fs::remove(output);
}

TEST_CASE("reranker training from gold anchors picks a grid alpha") {
  pipeline::Config cfg;
  cfg.kb_path = fixture_kb();
  pipeline::Artifacts art = pipeline::load_artifacts(cfg);
  std::vector<kb::CorpusDocument> corpus =
      kb::read_corpus_jsonl(data("mini_corpus.jsonl"));
  rerank::RerankTrainOptions opt;
  opt.train.epochs = 10;
  opt.train.batch_size = 32;
  opt.train.dropout_start = 0.0;
  opt.train.dropout_end = 0.0;
  rerank::RerankModel model =
      pipeline::train_reranker_from_corpus(corpus, art, cfg, opt);
  bool on_grid = false;
  for (double a : rerank::default_alphas())
    if (a == model.alpha) on_grid = true;
  CHECK(on_grid);

  // the trained model runs end to end
  std::string model_path = tmp("ug_rr_model.bin");
  rerank::save_rerank_model(model, model_path);
  std::string output = tmp("ug_rr_out.tsv");
  std::string cfg_path = write_config(
      "ug_cfg_rr.json", data("run_corpus.jsonl"), output, 1,
      ",\n  \"reranker_model\": \"" + model_path + "\"");
  pipeline::Report r = pipeline::run_pipeline(pipeline::read_config(cfg_path));
  CHECK(r.documents == 2);
  fs::remove(model_path);
  fs::remove(output);
}

}  // TEST_SUITE
