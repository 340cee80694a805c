// agcnn: train / evaluate / cross-validate / predict plus data tooling and
// diagnostics for the attention-gated convolutional sentence classifier.
// Every subcommand writes its outputs and a replayable manifest under --out.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include "agcnn/diagnostics.hpp"
#include "agcnn/parallel.hpp"
#include "agcnn/reference.hpp"
#include "agcnn/runconfig.hpp"

namespace fs = std::filesystem;
using namespace agcnn;

namespace {

struct CommonOpts {
  std::string config_path;
  std::map<std::string, std::string> overrides;
};

void add_override(CLI::App* cmd, CommonOpts& o, const std::string& flag, const std::string& key,
                  const std::string& desc) {
  cmd->add_option_function<std::string>(
      flag, [&o, key](const std::string& v) { o.overrides[key] = v; }, desc);
}

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "config file of key = value lines (# comments)");
  add_override(cmd, o, "--seed", "seed", "PRNG seed");
  add_override(cmd, o, "--variant", "variant", "rand | static | non-static | multichannel-2 | multichannel-3");
  add_override(cmd, o, "--activation", "activation", "nlrelu | relu | softplus | sigmoid | elu | prelu | lrelu | selu");
  add_override(cmd, o, "--out", "out", "output directory");
  add_override(cmd, o, "--data", "dataset", "training dataset (label<TAB>text)");
  add_override(cmd, o, "--test", "test_dataset", "test dataset");
  add_override(cmd, o, "--val", "val_dataset", "validation dataset (otherwise val_fraction is held out)");
  add_override(cmd, o, "--embeddings", "embeddings", "word2vec-format vector file");
  add_override(cmd, o, "--embeddings-format", "embeddings_format", "binary | text");
  add_override(cmd, o, "--checkpoint", "checkpoint", "model checkpoint path");
  add_override(cmd, o, "--text", "text", "input sentence for predict/visualize");
  add_override(cmd, o, "--folds", "folds", "cross-validation fold count");
  add_override(cmd, o, "--kinds", "kinds", "comma list of activations for sweep/simulate");
  add_override(cmd, o, "--window-sizes", "window_sizes", "first-layer windows, e.g. 1,2,3,4,5");
  add_override(cmd, o, "--attention-windows", "attention_windows", "attention windows, e.g. 1,3,5");
  add_override(cmd, o, "--kernels-per-window", "kernels_per_window", "kernels per first-layer window");
  add_override(cmd, o, "--embedding-dim", "embedding_dim", "word vector dimensionality");
  add_override(cmd, o, "--dropout", "dropout", "dropout rate on the penultimate layer");
  add_override(cmd, o, "--batch-size", "batch_size", "mini-batch size");
  add_override(cmd, o, "--learning-rate", "learning_rate", "Adam learning rate");
  add_override(cmd, o, "--max-epochs", "max_epochs", "epoch cap");
  add_override(cmd, o, "--weight-std", "weight_std", "simulate: weight draw stddev");
  add_override(cmd, o, "--sim-layers", "sim_layers", "simulate: hidden layer count");
  add_override(cmd, o, "--sim-nodes", "sim_nodes", "simulate: nodes per layer");
  add_override(cmd, o, "--sim-batch", "sim_batch", "simulate: batch size");
  add_override(cmd, o, "--heatmap-samples", "heatmap_samples", "visualize: feature maps per stage");
}

RunConfig resolve_config(const CommonOpts& o) {
  RunConfig cfg;
  if (!o.config_path.empty()) apply_config_file(cfg, o.config_path);
  for (const auto& [key, value] : o.overrides) apply_config_value(cfg, key, value, "flag --" + key);
  cfg.validate();
  return cfg;
}

fs::path make_out_dir(const RunConfig& cfg) {
  fs::path out(cfg.out_dir);
  fs::create_directories(out);
  return out;
}

std::string absolute_str(const std::string& p) {
  return p.empty() ? p : fs::absolute(p).string();
}

/// Paths in the manifest are absolute so a replay works from any directory.
RunConfig manifest_view(const RunConfig& cfg) {
  RunConfig m = cfg;
  m.dataset = absolute_str(m.dataset);
  m.test_dataset = absolute_str(m.test_dataset);
  m.val_dataset = absolute_str(m.val_dataset);
  m.embeddings = absolute_str(m.embeddings);
  m.checkpoint = absolute_str(m.checkpoint);
  m.out_dir = absolute_str(m.out_dir);
  return m;
}

struct LoadedData {
  Dataset train;
  Dataset test;   // may be empty
  Dataset val;    // may be empty
  Vocabulary vocab;
  EmbeddingTable table;
  bool has_test = false;
  bool has_val = false;
  bool has_table = false;
};

LoadedData load_inputs(const RunConfig& cfg, bool want_embeddings) {
  if (cfg.dataset.empty()) throw std::invalid_argument("missing dataset path (--data or dataset=)");
  LoadedData d;
  d.train = load_dataset(cfg.dataset);
  if (!cfg.test_dataset.empty()) {
    d.test = load_dataset(cfg.test_dataset, &d.train.label_names);
    d.has_test = true;
  }
  if (!cfg.val_dataset.empty()) {
    d.val = load_dataset(cfg.val_dataset, &d.train.label_names);
    d.has_val = true;
  }
  std::vector<const Dataset*> parts{&d.train};
  if (d.has_test) parts.push_back(&d.test);
  if (d.has_val) parts.push_back(&d.val);
  d.vocab = build_vocabulary(parts);
  if (want_embeddings && (cfg.needs_pretrained() || !cfg.embeddings.empty())) {
    if (cfg.embeddings.empty())
      throw std::invalid_argument("variant \"" + cfg.variant + "\" needs --embeddings");
    d.table = load_word2vec(cfg.embeddings,
                            cfg.embeddings_format == "text" ? W2VFormat::Text : W2VFormat::Binary, d.vocab);
    d.has_table = true;
  }
  return d;
}

std::vector<int> encode_sentence(const std::string& text, const Vocabulary& vocab, int min_len) {
  std::vector<std::string> words = clean_text(text);
  if (words.empty()) throw std::invalid_argument("input sentence is empty after tokenization");
  std::vector<int> tokens;
  for (const auto& w : words) {
    int idx = vocab.find(w);
    if (idx != 0) tokens.push_back(idx);  // words outside the vocabulary are dropped
  }
  if (tokens.empty())
    throw std::invalid_argument("no sentence token is in the checkpoint vocabulary");
  while (tokens.size() < static_cast<std::size_t>(min_len)) tokens.push_back(0);
  return tokens;
}

int run_train(const RunConfig& cfg) {
  LoadedData d = load_inputs(cfg, true);
  fs::path out = make_out_dir(cfg);

  EncodedDataset train_enc = encode_dataset(d.train, d.vocab);
  EncodedDataset val_enc;
  if (d.has_val) {
    val_enc = encode_dataset(d.val, d.vocab);
  } else {
    auto [tr, va] = split_validation(train_enc, cfg.val_fraction, cfg.seed);
    train_enc = std::move(tr);
    val_enc = std::move(va);
  }

  Rng rng(cfg.seed);
  AgcnnModel model = build_model(cfg.model_config(static_cast<int>(d.train.label_names.size())), d.vocab,
                                 d.has_table ? &d.table : nullptr, rng);
  TrainResult tr = train(model, train_enc, val_enc, cfg.train_config());

  fs::path ckpt_path = out / "checkpoint.agcnn";
  save_checkpoint({model, d.vocab.tokens(), d.train.label_names}, ckpt_path);
  fs::path hist_path = out / "history.csv";
  write_history_csv(hist_path, tr.history);

  std::cout << "epochs = " << tr.history.size() << "\n";
  std::cout << "best_epoch = " << tr.best_epoch << "\n";
  std::cout << "best_val_acc = " << tr.best_val_acc << "\n";
  std::vector<fs::path> artifacts{ckpt_path, hist_path};
  if (d.has_test) {
    double acc = evaluate(model, encode_dataset(d.test, d.vocab));
    std::cout << "test_acc = " << acc << "\n";
    std::ofstream metrics(out / "metrics.txt");
    metrics << "test_acc = " << acc << "\nbest_val_acc = " << tr.best_val_acc << "\n";
    artifacts.push_back(out / "metrics.txt");
  }
  std::cout << "checkpoint = " << ckpt_path.string() << "\n";
  write_manifest(out, "train", manifest_view(cfg), artifacts);
  return 0;
}

int run_eval(const RunConfig& cfg) {
  if (cfg.checkpoint.empty()) throw std::invalid_argument("missing --checkpoint");
  if (cfg.dataset.empty()) throw std::invalid_argument("missing dataset path (--data or dataset=)");
  Checkpoint ckpt = load_checkpoint(cfg.checkpoint);
  Dataset ds = load_dataset(cfg.dataset, &ckpt.label_names);
  Vocabulary vocab = Vocabulary::from_tokens(ckpt.vocab_tokens);
  double acc = evaluate(ckpt.model, encode_dataset(ds, vocab));
  std::cout << "accuracy = " << acc << "\n";
  fs::path out = make_out_dir(cfg);
  std::ofstream metrics(out / "metrics.txt");
  metrics << "accuracy = " << acc << "\n";
  write_manifest(out, "eval", manifest_view(cfg), {out / "metrics.txt"});
  return 0;
}

int run_cv(const RunConfig& cfg) {
  LoadedData d = load_inputs(cfg, true);
  fs::path out = make_out_dir(cfg);
  EncodedDataset enc = encode_dataset(d.train, d.vocab);
  FoldReport report = cross_validate(enc, cfg.folds, cfg.model_config(static_cast<int>(d.train.label_names.size())),
                                     cfg.train_config(), d.vocab, d.has_table ? &d.table : nullptr);
  fs::path folds_path = out / "folds.csv";
  {
    std::ofstream fcsv(folds_path);
    fcsv << "fold,accuracy,epochs,seconds\n";
    fcsv.precision(17);
    for (std::size_t f = 0; f < report.fold_accuracy.size(); ++f)
      fcsv << f << ',' << report.fold_accuracy[f] << ',' << report.epochs[f] << ',' << report.seconds[f]
           << '\n';
  }
  for (std::size_t f = 0; f < report.fold_accuracy.size(); ++f)
    std::cout << "fold" << f << "_acc = " << report.fold_accuracy[f] << "\n";
  std::cout << "mean_acc = " << report.mean_accuracy << "\n";
  write_manifest(out, "cv", manifest_view(cfg), {folds_path});
  return 0;
}

int run_predict(const RunConfig& cfg) {
  if (cfg.checkpoint.empty()) throw std::invalid_argument("missing --checkpoint");
  if (cfg.text.empty()) throw std::invalid_argument("missing --text");
  Checkpoint ckpt = load_checkpoint(cfg.checkpoint);
  Vocabulary vocab = Vocabulary::from_tokens(ckpt.vocab_tokens);
  std::vector<int> tokens = encode_sentence(cfg.text, vocab, ckpt.model.config.min_sentence_len());
  int label = predict(ckpt.model, tokens);
  std::cout << ckpt.label_names[static_cast<std::size_t>(label)] << "\n";
  fs::path out = make_out_dir(cfg);
  write_manifest(out, "predict", manifest_view(cfg), {});
  return 0;
}

int run_data_stats(const RunConfig& cfg) {
  LoadedData d = load_inputs(cfg, !cfg.embeddings.empty());
  std::vector<const Dataset*> parts{&d.train};
  if (d.has_test) parts.push_back(&d.test);
  if (d.has_val) parts.push_back(&d.val);
  DatasetStats st = dataset_stats(parts);
  std::cout << "c = " << st.num_classes << "\n";
  std::cout << "l = " << st.avg_length << "\n";
  std::cout << "N = " << st.size << "\n";
  std::cout << "V = " << st.vocab_size << "\n";
  if (d.has_test) std::cout << "T = " << d.test.examples.size() << "\n";
  if (d.has_table) std::cout << "V_pre = " << d.table.coverage() << "\n";
  fs::path out = make_out_dir(cfg);
  write_manifest(out, "data-stats", manifest_view(cfg), {});
  return 0;
}

int run_convert(const RunConfig& cfg, const std::string& corpus, const std::string& in_dir) {
  if (corpus.empty() || in_dir.empty()) throw std::invalid_argument("missing --corpus or --in");
  fs::path out = make_out_dir(cfg);
  auto written = convert_corpus(corpus, in_dir, out);
  for (const auto& p : written) std::cout << p.string() << "\n";
  write_manifest(out, "convert-corpus", manifest_view(cfg), written);
  return 0;
}

int run_simulate(const RunConfig& cfg) {
  SimConfig sim;
  sim.hidden_layers = cfg.sim_layers;
  sim.nodes_per_layer = cfg.sim_nodes;
  sim.batch = cfg.sim_batch;
  sim.weight_std = cfg.weight_std;
  sim.bias_init = cfg.sim_bias;
  sim.kinds = cfg.kind_list();
  sim.seed = cfg.seed;
  auto stats = run_heteroscedasticity_sim(sim);
  fs::path out = make_out_dir(cfg);
  fs::path csv = out / "layer_stats.csv";
  write_layer_stats_csv(csv, stats);
  std::cout << "rows = " << stats.size() << "\n" << "csv = " << csv.string() << "\n";
  write_manifest(out, "simulate", manifest_view(cfg), {csv});
  return 0;
}

int run_visualize(const RunConfig& cfg) {
  if (cfg.checkpoint.empty()) throw std::invalid_argument("missing --checkpoint");
  if (cfg.text.empty()) throw std::invalid_argument("missing --text");
  Checkpoint ckpt = load_checkpoint(cfg.checkpoint);
  Vocabulary vocab = Vocabulary::from_tokens(ckpt.vocab_tokens);
  std::vector<int> tokens = encode_sentence(cfg.text, vocab, ckpt.model.config.min_sentence_len());
  std::vector<std::string> labels;
  for (int t : tokens) labels.push_back(vocab.token(static_cast<std::size_t>(t)));

  fs::path out = make_out_dir(cfg);
  fs::path maps_dir = out / "maps";
  HeatmapBundle bundle =
      export_attention_maps(ckpt.model, tokens, labels, maps_dir, cfg.heatmap_samples, cfg.seed);
  int label = predict(ckpt.model, tokens);
  std::cout << "stages = " << bundle.stages.size() << "\n";
  std::cout << "prediction = " << ckpt.label_names[static_cast<std::size_t>(label)] << "\n";
  std::cout << "maps_dir = " << maps_dir.string() << "\n";
  std::vector<fs::path> artifacts;
  for (const auto& s : bundle.stages) {
    artifacts.push_back(maps_dir / (s.stage + ".csv"));
    artifacts.push_back(maps_dir / (s.stage + ".pgm"));
  }
  write_manifest(out, "visualize", manifest_view(cfg), artifacts);
  return 0;
}

int run_sweep(const RunConfig& cfg) {
  LoadedData d = load_inputs(cfg, true);
  fs::path out = make_out_dir(cfg);
  EncodedDataset train_enc = encode_dataset(d.train, d.vocab);
  EncodedDataset test_enc;
  if (d.has_test) {
    test_enc = encode_dataset(d.test, d.vocab);
  } else {
    auto [tr, te] = split_validation(train_enc, 0.1, cfg.seed + 0x7E57);
    train_enc = std::move(tr);
    test_enc = std::move(te);
  }
  EncodedDataset val_enc;
  if (d.has_val) {
    val_enc = encode_dataset(d.val, d.vocab);
  } else {
    auto [tr, va] = split_validation(train_enc, cfg.val_fraction, cfg.seed);
    train_enc = std::move(tr);
    val_enc = std::move(va);
  }

  auto rows = activation_sweep(fs::path(cfg.dataset).stem().string(), train_enc, val_enc, test_enc,
                               cfg.model_config(static_cast<int>(d.train.label_names.size())),
                               cfg.train_config(), cfg.kind_list(), d.vocab,
                               d.has_table ? &d.table : nullptr);
  fs::path csv = out / "sweep.csv";
  write_sweep_csv(csv, rows);
  for (const auto& r : rows)
    std::cout << activation_name(r.kind) << "_acc = " << r.accuracy << "\n";
  std::cout << "csv = " << csv.string() << "\n";
  write_manifest(out, "sweep", manifest_view(cfg), {csv});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"attention-gated convolutional sentence classification toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string corpus, in_dir;

  CLI::App* train_cmd = app.add_subcommand("train", "train a model and write a checkpoint");
  CLI::App* eval_cmd = app.add_subcommand("eval", "accuracy of a checkpoint on a dataset");
  CLI::App* cv_cmd = app.add_subcommand("cv", "k-fold cross-validation");
  CLI::App* predict_cmd = app.add_subcommand("predict", "classify one sentence");
  CLI::App* stats_cmd = app.add_subcommand("data-stats", "dataset statistics (c, l, N, |V|, T, |V_pre|)");
  CLI::App* convert_cmd = app.add_subcommand("convert-corpus", "rewrite a source corpus into label<TAB>text");
  CLI::App* sim_cmd = app.add_subcommand("simulate", "layer-variance probe of the activation functions");
  CLI::App* vis_cmd = app.add_subcommand("visualize", "export attention heat maps for one sentence");
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "train once per activation and compare accuracy");

  for (CLI::App* cmd : {train_cmd, eval_cmd, cv_cmd, predict_cmd, stats_cmd, convert_cmd, sim_cmd, vis_cmd,
                        sweep_cmd})
    add_common_flags(cmd, opts);
  convert_cmd->add_option("--corpus", corpus, "mr | cr | subj | trec | sst1 | sst2");
  convert_cmd->add_option("--in", in_dir, "directory holding the raw corpus files");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = resolve_config(opts);
    if (train_cmd->parsed()) return run_train(cfg);
    if (eval_cmd->parsed()) return run_eval(cfg);
    if (cv_cmd->parsed()) return run_cv(cfg);
    if (predict_cmd->parsed()) return run_predict(cfg);
    if (stats_cmd->parsed()) return run_data_stats(cfg);
    if (convert_cmd->parsed()) return run_convert(cfg, corpus, in_dir);
    if (sim_cmd->parsed()) return run_simulate(cfg);
    if (vis_cmd->parsed()) return run_visualize(cfg);
    if (sweep_cmd->parsed()) return run_sweep(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
