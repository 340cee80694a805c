#pragma once

#include <cstdio>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <string>
#include <vector>

#include "agcnn/data.hpp"
#include "agcnn/model.hpp"

namespace testutil {

inline std::filesystem::path fresh_dir(const std::string& tag) {
  auto p = std::filesystem::temp_directory_path() / ("agcnn_test_" + tag + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

/// Two-class keyword dataset: every sentence is filler words plus a couple of
/// class-indicative words, so a working model can learn it and a memorizing
/// model can overfit it.
inline agcnn::Dataset make_toy_dataset(int n, std::uint64_t seed) {
  static const std::vector<std::string> pos = {"great", "good", "superb", "delightful", "charming", "warm"};
  static const std::vector<std::string> neg = {"awful", "bad", "dreary", "tedious", "dull", "grim"};
  static const std::vector<std::string> fill = {"the",  "movie",  "a",    "film", "story", "plot",  "it",
                                                "was",  "and",    "with", "of",   "in",    "to",    "acting",
                                                "cast", "scenes", "very", "feels", "looks", "score"};
  agcnn::Rng rng(seed);
  agcnn::Dataset ds;
  ds.label_names = {"neg", "pos"};
  for (int i = 0; i < n; ++i) {
    const int label = i % 2;
    const auto& pool = label == 1 ? pos : neg;
    std::vector<std::string> words;
    const int len = 5 + static_cast<int>(rng.uniform01() * 5);
    for (int j = 0; j < len; ++j)
      words.push_back(fill[static_cast<std::size_t>(rng.uniform01() * fill.size())]);
    const int marks = 2 + static_cast<int>(rng.uniform01() * 2);
    for (int j = 0; j < marks; ++j) {
      const std::size_t at = static_cast<std::size_t>(rng.uniform01() * (words.size() + 1));
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(std::min(at, words.size())),
                   pool[static_cast<std::size_t>(rng.uniform01() * pool.size())]);
    }
    ds.examples.push_back({std::move(words), label});
  }
  return ds;
}

inline std::filesystem::path write_dataset_tsv(const agcnn::Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  for (const auto& ex : ds.examples) {
    out << ds.label_names[static_cast<std::size_t>(ex.label)] << '\t';
    for (std::size_t i = 0; i < ex.tokens.size(); ++i) out << (i ? " " : "") << ex.tokens[i];
    out << '\n';
  }
  return path;
}

inline void write_word2vec_binary(const std::filesystem::path& path,
                                  const std::vector<std::pair<std::string, std::vector<float>>>& entries,
                                  std::size_t dim) {
  std::ofstream out(path, std::ios::binary);
  out << entries.size() << " " << dim << "\n";
  for (const auto& [word, vec] : entries) {
    out << word << " ";
    out.write(reinterpret_cast<const char*>(vec.data()),
              static_cast<std::streamsize>(vec.size() * sizeof(float)));
    out << "\n";
  }
}

inline void write_word2vec_text(const std::filesystem::path& path,
                                const std::vector<std::pair<std::string, std::vector<float>>>& entries,
                                std::size_t dim) {
  std::ofstream out(path, std::ios::binary);
  out << entries.size() << " " << dim << "\n";
  for (const auto& [word, vec] : entries) {
    out << word;
    for (float v : vec) out << " " << v;
    out << "\n";
  }
}

/// The demo-scale network: two first-layer windows, two attention windows,
/// two kernels per window, two classes.
inline agcnn::AgcnnConfig micro_config(int d = 4, double dropout = 0.0) {
  agcnn::AgcnnConfig cfg;
  cfg.window_sizes_l1 = {2, 3};
  cfg.kernels_per_window = 2;
  cfg.window_sizes_l2 = {1, 3};
  cfg.embedding_dim = d;
  cfg.num_classes = 2;
  cfg.dropout_rate = dropout;
  cfg.seed = 99;
  return cfg;
}

inline agcnn::Tensor random_tensor(std::vector<std::size_t> shape, agcnn::Rng& rng, double scale = 1.0) {
  agcnn::Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.uniform(-scale, scale);
  return t;
}

}  // namespace testutil
