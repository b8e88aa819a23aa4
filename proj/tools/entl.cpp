// Copyright 2026 The entl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver for the entity timeline pipeline.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "entl/pipeline.hpp"

namespace {

void add_options(CLI::App& app, entl::PipelineConfig& cfg) {
  app.add_option("--corpus", cfg.corpus, "Corpus JSONL")->group("Inputs");
  app.add_option("--events", cfg.events, "Events JSON")->group("Inputs");
  app.add_option("--pageviews", cfg.pageviews, "Page-view TSV (entity_key, day, count)")->group("Inputs");
  app.add_option("--links", cfg.links, "Entity link TSV (entity_key, page_title)")->group("Inputs");
  app.add_option("--judgments", cfg.judgments, "Judgments TSV (entity_key, event_id, day, grade)")->group("Inputs");
  app.add_option("--stopwords", cfg.stopwords, "Stopword list, one per line")->group("Inputs");
  app.add_option("--news-terms", cfg.news_terms, "News-term lexicon")->group("Inputs");
  app.add_option("--attitude-terms", cfg.attitude_terms, "Attitude lexicon")->group("Inputs");
  app.add_option("--sentiment-terms", cfg.sentiment_terms, "Sentiment lexicon")->group("Inputs");

  app.add_option("--work-dir", cfg.work_dir, "Directory for stage artifacts")->capture_default_str()->group("Outputs");
  app.add_option("--model", cfg.model, "Model file (default <work-dir>/model.json)")->group("Outputs");
  app.add_option("--output", cfg.output, "Timeline JSON (default <work-dir>/timelines.json)")->group("Outputs");

  auto p = [&](const char* name, auto& field, const char* help) {
    app.add_option(name, field, help)->capture_default_str()->group("Parameters");
  };
  p("--docs-per-day", cfg.docs_per_day, "Documents retrieved per event and day");
  p("--expand-terms", cfg.expand_terms, "Query expansion terms");
  p("--expand-max-weight", cfg.expand_max_weight, "Weight of the strongest expansion term");
  p("--bm25-k1", cfg.bm25_k1, "BM25 k1");
  p("--bm25-b", cfg.bm25_b, "BM25 b");
  p("--lsh-hashes", cfg.lsh_hashes, "MinHash signature length");
  p("--lsh-bands", cfg.lsh_bands, "LSH bands");
  p("--lsh-rows", cfg.lsh_rows, "LSH rows per band");
  p("--lsh-threshold", cfg.lsh_threshold, "Bigram Jaccard threshold for label merging");
  p("--topics", cfg.topics, "LDA topics");
  p("--lda-iterations", cfg.lda_iterations, "LDA Gibbs sweeps");
  p("--dirichlet-mu", cfg.dirichlet_mu, "Dirichlet prior of context language models");
  p("--vor-window", cfg.vor_window, "Half-width of the page-view median window (days)");
  p("--vor-min-median", cfg.vor_min_median, "Median floor for the view outlier ratio");
  p("--components", cfg.components, "Mixture components for adaptation centroids");
  p("--decay-alpha", cfg.decay_alpha, "Decay base");
  p("--decay-lambda", cfg.decay_lambda, "Decay rate");
  p("--decay-mu", cfg.decay_mu, "Decay interval unit (days)");
  p("--c", cfg.c, "Hinge loss trade-off");
  p("--epochs", cfg.epochs, "Maximum training epochs");
  p("--tolerance", cfg.tolerance, "Relative objective change for early stop");
  p("--solver", cfg.solver, "pegasos or dual-cd");
  p("--pair-margin", cfg.pair_margin, "Minimum label difference for a preference pair");
  p("--topk", cfg.topk, "Entities kept per timeline day");
  p("--relevance-threshold", cfg.relevance_threshold, "Minimum grade counted relevant");
  p("--mode", cfg.mode, "AdaptER, No-Adapt, SAL or INF");
  p("--train-events", cfg.train_events, "Comma separated training events (default: all with labels)");
  p("--test-events", cfg.test_events, "Comma separated ranked events (default: all)");
  p("--seed", cfg.seed, "Global seed");
  p("--jobs", cfg.jobs, "Worker threads within a stage");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entity timelines for news events"};
  app.set_config("--config", "", "Flat key=value configuration file");
  app.require_subcommand(1);
  app.fallthrough();
  entl::PipelineConfig cfg;
  add_options(app, cfg);

  auto* ingest = app.add_subcommand("ingest", "Validate and normalize corpus and events");
  auto* index = app.add_subcommand("index", "Build day indexes, retrieve documents, derive reporting timelines");
  auto* coref = app.add_subcommand("coref", "Cluster entity mentions per event and day");
  bool dump_clusters = false;
  coref->add_flag("--dump-clusters", dump_clusters, "Print clusters for inspection");
  auto* features = app.add_subcommand("features", "Extract salience and informativeness features");
  auto* label = app.add_subcommand("label", "Compute soft labels from page views");
  auto* train = app.add_subcommand("train", "Train the ranking model");
  auto* rank = app.add_subcommand("rank", "Rank entities and write timelines");
  auto* eval = app.add_subcommand("eval", "Evaluate every mode against judgments");
  auto* dump = app.add_subcommand("dump-timeline", "Print a ranked timeline");
  std::string event;
  dump->add_option("--event", event, "Event to print (default: all)");
  auto* all = app.add_subcommand("all", "Run ingest through rank");

  CLI11_PARSE(app, argc, argv);

  if (auto v = cfg.violations(); !v.empty()) {
    std::cerr << "entl: invalid configuration\n";
    for (const auto& s : v) std::cerr << "  " << s << "\n";
    return 1;
  }

  try {
    if (ingest->parsed()) entl::run_ingest(cfg, std::cerr);
    if (index->parsed()) entl::run_index(cfg, std::cerr);
    if (coref->parsed()) entl::run_coref(cfg, std::cerr, dump_clusters ? &std::cout : nullptr);
    if (features->parsed()) entl::run_features(cfg, std::cerr);
    if (label->parsed()) entl::run_label(cfg, std::cerr);
    if (train->parsed()) entl::run_train(cfg, std::cerr);
    if (rank->parsed()) entl::run_rank(cfg, std::cerr);
    if (eval->parsed()) entl::run_eval(cfg, std::cerr, &std::cout);
    if (dump->parsed()) entl::dump_timeline(cfg, event, std::cout);
    if (all->parsed()) entl::run_all(cfg, std::cerr);
  } catch (const entl::StageError& e) {
    std::cerr << "entl " << e.stage() << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "entl: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
