#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "agcnn/tensor.hpp"

namespace agcnn {

/// Tokenizer: keep [A-Za-z0-9(),!?'`], split the clitics 's 've n't 're 'd
/// 'll into their own tokens, space out , ! ? ( ), collapse whitespace,
/// lowercase, split on spaces. Pure function.
std::vector<std::string> clean_text(std::string_view raw);

/// Token <-> index map. Index 0 is reserved for the padding token, which is
/// pinned to the all-zero embedding row and never trained.
class Vocabulary {
 public:
  Vocabulary();
  int add(const std::string& token);        // existing token returns its index
  int find(std::string_view token) const;   // 0 when absent
  std::size_t size() const { return tokens_.size() - 1; }  // |V|, padding excluded
  const std::string& token(std::size_t index) const { return tokens_[index]; }
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::uint64_t content_hash() const;       // FNV-1a over tokens in index order
  static Vocabulary from_tokens(const std::vector<std::string>& tokens_with_pad);
  /// Placeholder vocabulary "w1".."wN"; used by synthetic models and tests.
  static Vocabulary placeholder(std::size_t n);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

struct Dataset {
  struct Example {
    std::vector<std::string> tokens;
    int label = 0;
  };
  std::vector<Example> examples;
  std::vector<std::string> label_names;  // first-appearance order
};

/// Parses the canonical "label<TAB>text" format, cleaning each line's text.
/// When `fixed_labels` is given (test split), unseen labels are rejected.
Dataset load_dataset(const std::filesystem::path& path,
                     const std::vector<std::string>* fixed_labels = nullptr);

struct DatasetStats {
  std::size_t num_classes = 0;   // c
  double avg_length = 0.0;       // l
  std::size_t size = 0;          // N
  std::size_t vocab_size = 0;    // |V|
};
DatasetStats dataset_stats(std::span<const Dataset* const> parts);

Vocabulary build_vocabulary(std::span<const Dataset* const> parts);

/// Word vectors found in a word2vec-format file for one vocabulary.
struct EmbeddingTable {
  int dim = 0;
  std::unordered_map<std::string, std::vector<double>> vectors;
  std::size_t coverage() const { return vectors.size(); }  // |V_pre|
};

enum class W2VFormat { Binary, Text };

/// Streams the file, keeping only words present in `vocab`. Binary layout:
/// ASCII header "count dim\n", then per word the token bytes terminated by a
/// space followed by dim little-endian float32s (an optional newline may
/// separate records). Text layout: same header, then "token v1 .. vdim" lines.
EmbeddingTable load_word2vec(const std::filesystem::path& path, W2VFormat format, const Vocabulary& vocab);

/// Full (|V|+1, d) embedding matrix: row 0 zero, covered rows copied from the
/// table, unknown rows drawn per dimension from Normal(mean_j, var_j) of the
/// covered vectors (variance floored at 1e-4). With zero coverage every row
/// is drawn from Normal(0, 0.01).
Tensor init_unknown_words(const Vocabulary& vocab, const EmbeddingTable& table, Rng& rng);

struct EncodedExample {
  std::vector<int> tokens;
  int label = 0;
};
using EncodedDataset = std::vector<EncodedExample>;
EncodedDataset encode_dataset(const Dataset& dataset, const Vocabulary& vocab);

/// A batch padded with token 0 to max(longest sentence, min_len).
struct SentenceBatch {
  std::size_t size = 0;
  std::size_t length = 0;
  std::vector<int> tokens;        // row-major (size, length)
  std::vector<int> labels;        // empty when built from bare sentences
  std::vector<int> true_lengths;
  std::span<const int> row(std::size_t i) const {
    return std::span<const int>(tokens).subspan(i * length, length);
  }
};

SentenceBatch pad_batch(std::span<const std::vector<int>> sentences, int min_len);
SentenceBatch pad_batch(const EncodedDataset& dataset, std::span<const int> indices, int min_len);

/// Rewrites one of the six source corpora into the canonical format.
/// Recognized names: mr, cr, subj, trec, sst1, sst2. Returns written files.
std::vector<std::filesystem::path> convert_corpus(std::string_view corpus,
                                                  const std::filesystem::path& in_dir,
                                                  const std::filesystem::path& out_dir);

std::uint64_t fnv1a64(std::span<const unsigned char> bytes);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);

}  // namespace agcnn
