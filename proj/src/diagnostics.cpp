#include "agcnn/diagnostics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "agcnn/parallel.hpp"

namespace agcnn {

std::vector<LayerStats> run_heteroscedasticity_sim(const SimConfig& config) {
  if (config.hidden_layers < 1 || config.nodes_per_layer < 1 || config.batch < 1)
    throw std::invalid_argument("simulation: layers, nodes and batch must be >= 1");
  const std::size_t nodes = static_cast<std::size_t>(config.nodes_per_layer);
  const std::size_t batch = static_cast<std::size_t>(config.batch);
  const int threads = resolve_threads();

  std::vector<LayerStats> all;
  for (ActivationKind kind : config.kinds) {
    // One rng per kind, same seed: every kind sees identical inputs/weights.
    Rng rng(config.seed);
    Tensor x({batch, nodes});
    for (double& v : x.data()) v = rng.normal();

    const Activation f{kind, kPReLUInitSlope};
    for (int layer = 1; layer <= config.hidden_layers; ++layer) {
      Tensor w({nodes, nodes});
      for (double& v : w.data()) v = rng.normal(0.0, config.weight_std);
      Tensor next({batch, nodes});
      parallel_for(static_cast<std::int64_t>(batch), threads, [&](std::int64_t r) {
        const std::size_t i = static_cast<std::size_t>(r);
        for (std::size_t j = 0; j < nodes; ++j) {
          double acc = config.bias_init;
          for (std::size_t u = 0; u < nodes; ++u) acc += x(i, u) * w(u, j);
          next(i, j) = f(acc);
        }
      });
      x = std::move(next);

      const std::size_t n = x.size();
      double mean = 0.0;
      for (double v : x.data()) mean += v;
      mean /= static_cast<double>(n);
      double ss = 0.0;
      for (double v : x.data()) ss += (v - mean) * (v - mean);
      const double variance = n > 1 ? ss / static_cast<double>(n - 1) : 0.0;
      all.push_back({layer, kind, mean, variance});
    }
  }
  return all;
}

void write_layer_stats_csv(const std::filesystem::path& path, const std::vector<LayerStats>& stats) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "layer,activation,mean,variance\n";
  out.precision(17);
  for (const auto& s : stats)
    out << s.layer << ',' << activation_name(s.kind) << ',' << s.mean << ',' << s.variance << '\n';
}

void write_pgm(const std::filesystem::path& path, const Tensor& matrix) {
  if (matrix.ndim() != 2) throw std::invalid_argument("write_pgm: matrix must be rank 2");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const std::size_t rows = matrix.dim(0), cols = matrix.dim(1);
  out << "P5\n" << cols << " " << rows << "\n255\n";
  const auto [mn, mx] = std::minmax_element(matrix.data().begin(), matrix.data().end());
  const double lo = *mn, hi = *mx;
  for (double v : matrix.data()) {
    unsigned char g = hi > lo
                          ? static_cast<unsigned char>(std::lround((v - lo) / (hi - lo) * 255.0))
                          : static_cast<unsigned char>(128);
    out.put(static_cast<char>(g));
  }
}

static void write_heatmap_csv(const std::filesystem::path& path, const HeatmapMatrix& m,
                              const std::vector<std::string>& tokens) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "map";
  for (std::size_t j = 0; j < m.values.dim(1); ++j)
    out << ',' << (j < tokens.size() ? tokens[j] : std::string("#") + std::to_string(j));
  out << '\n';
  out.precision(17);
  for (std::size_t r = 0; r < m.values.dim(0); ++r) {
    out << m.map_indices[r];
    for (std::size_t j = 0; j < m.values.dim(1); ++j) out << ',' << m.values(r, j);
    out << '\n';
  }
}

HeatmapBundle export_attention_maps(const AgcnnModel& model, std::span<const int> tokens,
                                    const std::vector<std::string>& token_labels,
                                    const std::filesystem::path& out_dir, int sample_count,
                                    std::uint64_t seed) {
  if (tokens.empty()) throw std::invalid_argument("visualize: sentence is empty after tokenization");
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  ForwardTape tape;
  model_forward(model, tokens, Mode::Eval, nullptr, &tape);

  const int t1 = model.config.kernels_per_window;
  std::vector<int> sample(static_cast<std::size_t>(t1));
  std::iota(sample.begin(), sample.end(), 0);
  if (sample_count > 0 && sample_count < t1) {
    Rng rng = Rng(seed).fork(0x4D41);
    for (int i = 0; i < sample_count; ++i) {
      const int j = i + static_cast<int>(rng.uniform01() * static_cast<double>(t1 - i));
      std::swap(sample[static_cast<std::size_t>(i)], sample[static_cast<std::size_t>(std::min(j, t1 - 1))]);
    }
    sample.resize(static_cast<std::size_t>(sample_count));
    std::sort(sample.begin(), sample.end());
  }

  HeatmapBundle bundle;
  bundle.tokens = token_labels;
  auto gather = [&](const std::vector<Tensor>& maps) {
    const std::size_t len = maps[0].size();
    Tensor out({sample.size(), len});
    for (std::size_t r = 0; r < sample.size(); ++r)
      for (std::size_t j = 0; j < len; ++j) out(r, j) = maps[static_cast<std::size_t>(sample[r])][j];
    return out;
  };

  for (std::size_t a = 0; a < tape.blocks.size(); ++a) {
    const auto& blk = tape.blocks[a];
    const std::string hs = "h" + std::to_string(blk.window);
    bundle.stages.push_back({hs + "_conv_pre", blk.window, -1, sample, gather(blk.preact)});
    bundle.stages.push_back({hs + "_conv_post", blk.window, -1, sample, gather(blk.post)});
    for (std::size_t b = 0; b < blk.attn.size(); ++b) {
      const int k = model.config.window_sizes_l2[b];
      const std::string ks = hs + "_k" + std::to_string(k);
      bundle.stages.push_back({ks + "_attention", blk.window, k, sample, gather(blk.gate[b])});
      bundle.stages.push_back({ks + "_gated", blk.window, k, sample, gather(blk.gated[b])});
    }
  }

  for (const auto& stage : bundle.stages) {
    write_heatmap_csv(out_dir / (stage.stage + ".csv"), stage, bundle.tokens);
    write_pgm(out_dir / (stage.stage + ".pgm"), stage.values);
  }
  return bundle;
}

std::vector<SweepRow> activation_sweep(const std::string& dataset_name, const EncodedDataset& train_set,
                                       const EncodedDataset& val_set, const EncodedDataset& test_set,
                                       const AgcnnConfig& model_config, const TrainConfig& train_config,
                                       const std::vector<ActivationKind>& kinds, const Vocabulary& vocab,
                                       const EmbeddingTable* pretrained) {
  std::vector<SweepRow> rows;
  for (ActivationKind kind : kinds) {
    AgcnnConfig cfg = model_config;
    cfg.activation = kind;
    Rng rng(cfg.seed);
    AgcnnModel model = build_model(cfg, vocab, pretrained, rng);
    const auto t0 = std::chrono::steady_clock::now();
    TrainResult tr = train(model, train_set, val_set, train_config);
    const auto t1 = std::chrono::steady_clock::now();
    SweepRow row;
    row.dataset = dataset_name;
    row.kind = kind;
    row.accuracy = evaluate(model, test_set, train_config.threads);
    row.epochs = static_cast<int>(tr.history.size());
    row.seconds = std::chrono::duration<double>(t1 - t0).count();
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "dataset,activation,accuracy,epochs,seconds\n";
  out.precision(17);
  for (const auto& r : rows)
    out << r.dataset << ',' << activation_name(r.kind) << ',' << r.accuracy << ',' << r.epochs << ','
        << r.seconds << '\n';
}

}  // namespace agcnn
