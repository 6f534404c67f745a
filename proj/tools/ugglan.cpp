#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ugglan/pipeline.hpp"

namespace {

using namespace ugglan;

int cmd_build_kb(const std::string& corpus_path, const std::string& redirects_path,
                 const std::string& disambig_path, const std::string& classes_path,
                 const std::string& nominals_path, const std::string& titles_path,
                 const std::string& seed_path, const std::string& out_path,
                 const std::string& language_mode, std::size_t max_tokens) {
  kb::BuildInputs in;
  in.corpus = kb::read_corpus_jsonl(corpus_path);
  if (!redirects_path.empty()) in.redirects = kb::read_redirects_tsv(redirects_path);
  if (!disambig_path.empty()) in.disambig = kb::read_disambig_tsv(disambig_path);
  if (!classes_path.empty()) in.class_records = kb::read_classes_tsv(classes_path);
  if (!nominals_path.empty()) in.nominal_records = kb::read_nominals_tsv(nominals_path);
  if (!titles_path.empty()) in.titles = kb::read_titles_tsv(titles_path);
  if (!seed_path.empty()) in.nominal_seed = kb::read_seed_list(seed_path);
  if (language_mode == "alphabetic") {
    in.mode = text::TokenizeMode::Alphabetic;
  } else if (language_mode == "logographic") {
    in.mode = text::TokenizeMode::LogographicMixed;
  } else {
    throw pipeline::ConfigError("unknown language mode: " + language_mode);
  }
  in.max_mention_tokens = max_tokens;

  kb::Diagnostics diag;
  kb::KnowledgeBase knowledge = kb::build_kb(in, &diag);
  kb::save_kb(knowledge, out_path);
  std::cout << "surfaces\t" << knowledge.dictionary.size() << '\n'
            << "cooccurrence_pairs\t" << knowledge.cooccur.size() << '\n'
            << "skipped_redirects\t" << diag.skipped_redirects << '\n';
  for (const std::string& msg : diag.messages) std::cerr << msg << '\n';
  return 0;
}

int cmd_train_ner(const std::string& train_path, const std::string& out_path,
                  ner::TrainOptions opt) {
  std::vector<ner::SentenceData> corpus = ner::read_training_file(train_path);
  std::vector<double> trace;
  ner::NerModel model = ner::train_ner(corpus, opt, &trace);
  ner::save_ner_model(model, out_path);
  if (!trace.empty())
    std::cout << "final_epoch_loss\t" << trace.back() << '\n';
  return 0;
}

int cmd_train_reranker(const std::string& config_path, const std::string& corpus_path,
                       const std::string& out_path, rerank::RerankTrainOptions opt) {
  pipeline::Config cfg = pipeline::read_config(config_path);
  pipeline::Artifacts art = pipeline::load_artifacts(cfg);
  std::vector<kb::CorpusDocument> corpus = kb::read_corpus_jsonl(corpus_path);
  rerank::RerankModel model =
      pipeline::train_reranker_from_corpus(corpus, art, cfg, opt);
  rerank::save_rerank_model(model, out_path);
  std::cout << "alpha\t" << model.alpha << '\n';
  return 0;
}

int cmd_run(const std::string& config_path, std::size_t workers_override,
            const std::string& report_path) {
  pipeline::Config cfg = pipeline::read_config(config_path);
  if (workers_override > 0) cfg.workers = workers_override;
  pipeline::Report report = pipeline::run_pipeline(cfg);
  if (report_path.empty()) {
    std::cout << report.to_string();
  } else {
    std::ofstream rep(report_path);
    if (!rep) throw pipeline::ConfigError("cannot open report file: " + report_path);
    rep << report.to_string();
  }
  return 0;
}

int cmd_eval(const std::string& config_path, const std::string& golden_path) {
  pipeline::Config cfg = pipeline::read_config(config_path);
  pipeline::run_pipeline(cfg);

  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw pipeline::DataError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::string produced = slurp(cfg.output_path);
  std::string golden = slurp(golden_path);
  if (produced == golden) {
    std::cout << "PASS\toutput matches golden file\n";
    return 0;
  }
  std::cout << "FAIL\toutput differs from golden file\n";
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multilingual entity discovery and linking pipeline"};
  app.require_subcommand(1);

  // build-kb
  auto* build = app.add_subcommand("build-kb", "build a knowledge-base file");
  std::string corpus_path, redirects_path, disambig_path, classes_path;
  std::string nominals_path, titles_path, seed_path, kb_out;
  std::string language_mode = "alphabetic";
  std::size_t max_tokens = 8;
  build->add_option("--corpus", corpus_path, "JSONL corpus")->required();
  build->add_option("--redirects", redirects_path, "redirects TSV");
  build->add_option("--disambig", disambig_path, "disambiguation TSV");
  build->add_option("--classes", classes_path, "entity class TSV");
  build->add_option("--nominals", nominals_path, "nominal phrase TSV");
  build->add_option("--titles", titles_path, "entity title TSV");
  build->add_option("--seed", seed_path, "nominal seed phrase list");
  build->add_option("--out", kb_out, "output KB file")->required();
  build->add_option("--language-mode", language_mode, "alphabetic or logographic");
  build->add_option("--max-mention-tokens", max_tokens, "dictionary phrase limit");

  // train-ner
  auto* tner = app.add_subcommand("train-ner", "train the mention classifier");
  std::string ner_train_path, ner_out;
  ner::TrainOptions nopt;
  bool no_char = false;
  tner->add_option("--train", ner_train_path, "training file")->required();
  tner->add_option("--out", ner_out, "output model file")->required();
  tner->add_option("--epochs", nopt.train.epochs, "training epochs");
  tner->add_option("--batch-size", nopt.train.batch_size, "minibatch size");
  tner->add_option("--word-proj", nopt.word_proj, "word projection width");
  tner->add_option("--char-proj", nopt.char_proj, "character projection width");
  std::size_t hidden_width = 512, hidden_layers = 3;
  tner->add_option("--hidden-width", hidden_width, "hidden layer width");
  tner->add_option("--hidden-layers", hidden_layers, "hidden layer count");
  tner->add_option("--max-width", nopt.max_width, "candidate window width");
  tner->add_flag("--no-char-features", no_char, "disable character features");
  tner->add_option("--seed", nopt.train.seed, "training seed");
  tner->add_option("--lr-start", nopt.train.lr_start, "initial learning rate");
  tner->add_option("--lr-end", nopt.train.lr_end, "final learning rate");

  // train-reranker
  auto* trr = app.add_subcommand("train-reranker", "train the candidate reranker");
  std::string rr_config, rr_corpus, rr_out;
  rerank::RerankTrainOptions ropt;
  ropt.train.epochs = 40;
  trr->add_option("--config", rr_config, "pipeline configuration")->required();
  trr->add_option("--corpus", rr_corpus, "gold JSONL corpus")->required();
  trr->add_option("--out", rr_out, "output model file")->required();
  trr->add_option("--epochs", ropt.train.epochs, "training epochs");
  trr->add_option("--seed", ropt.train.seed, "training seed");

  // run
  auto* run = app.add_subcommand("run", "run the pipeline end to end");
  std::string run_config, report_path;
  std::size_t workers_override = 0;
  run->add_option("--config", run_config, "pipeline configuration")->required();
  run->add_option("--workers", workers_override, "worker thread count override");
  run->add_option("--report", report_path, "write the run report to a file");

  // eval
  auto* eval = app.add_subcommand("eval", "run and compare against a golden output");
  std::string eval_config, golden_path;
  eval->add_option("--config", eval_config, "pipeline configuration")->required();
  eval->add_option("--golden", golden_path, "expected output TSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (build->parsed())
      return cmd_build_kb(corpus_path, redirects_path, disambig_path, classes_path,
                          nominals_path, titles_path, seed_path, kb_out,
                          language_mode, max_tokens);
    if (tner->parsed()) {
      nopt.hidden.assign(hidden_layers, hidden_width);
      nopt.char_features = !no_char;
      return cmd_train_ner(ner_train_path, ner_out, nopt);
    }
    if (trr->parsed()) return cmd_train_reranker(rr_config, rr_corpus, rr_out, ropt);
    if (run->parsed()) return cmd_run(run_config, workers_override, report_path);
    if (eval->parsed()) return cmd_eval(eval_config, golden_path);
  } catch (const pipeline::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
