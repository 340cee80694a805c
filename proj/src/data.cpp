#include "agcnn/data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace agcnn {

static bool kept_char(unsigned char c) {
  return std::isalnum(c) || c == '(' || c == ')' || c == ',' || c == '!' || c == '?' || c == '\'' ||
         c == '`';
}

static void replace_all(std::string& s, std::string_view from, std::string_view to) {
  std::size_t pos = 0;
  while ((pos = s.find(from, pos)) != std::string::npos) {
    s.replace(pos, from.size(), to);
    pos += to.size();
  }
}

std::vector<std::string> clean_text(std::string_view raw) {
  std::string s;
  s.reserve(raw.size());
  for (unsigned char c : raw) s.push_back(kept_char(c) ? static_cast<char>(c) : ' ');

  // clitics become their own tokens
  replace_all(s, "'s", " 's");
  replace_all(s, "'ve", " 've");
  replace_all(s, "n't", " n't");
  replace_all(s, "'re", " 're");
  replace_all(s, "'d", " 'd");
  replace_all(s, "'ll", " 'll");
  replace_all(s, ",", " , ");
  replace_all(s, "!", " ! ");
  replace_all(s, "(", " ( ");
  replace_all(s, ")", " ) ");
  replace_all(s, "?", " ? ");

  std::vector<std::string> tokens;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) tokens.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

// --- Vocabulary ----------------------------------------------------------

Vocabulary::Vocabulary() : tokens_{"<pad>"} {}

int Vocabulary::add(const std::string& token) {
  auto it = index_.find(token);
  if (it != index_.end()) return it->second;
  int idx = static_cast<int>(tokens_.size());
  tokens_.push_back(token);
  index_.emplace(token, idx);
  return idx;
}

int Vocabulary::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? 0 : it->second;
}

std::uint64_t fnv1a64(std::span<const unsigned char> bytes) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::uint64_t h = 0xCBF29CE484222325ULL;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001B3ULL;
    }
    if (!in) break;
  }
  return h;
}

std::uint64_t Vocabulary::content_hash() const {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const std::string& t : tokens_) {
    for (unsigned char b : t) {
      h ^= b;
      h *= 0x100000001B3ULL;
    }
    h ^= 0;  // separator byte
    h *= 0x100000001B3ULL;
  }
  return h;
}

Vocabulary Vocabulary::from_tokens(const std::vector<std::string>& tokens_with_pad) {
  Vocabulary v;
  if (tokens_with_pad.empty() || tokens_with_pad[0] != "<pad>")
    throw std::invalid_argument("vocabulary token list must start with <pad>");
  for (std::size_t i = 1; i < tokens_with_pad.size(); ++i) v.add(tokens_with_pad[i]);
  return v;
}

Vocabulary Vocabulary::placeholder(std::size_t n) {
  Vocabulary v;
  for (std::size_t i = 1; i <= n; ++i) v.add("w" + std::to_string(i));
  return v;
}

// --- Dataset loading -----------------------------------------------------

Dataset load_dataset(const std::filesystem::path& path, const std::vector<std::string>* fixed_labels) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset " + path.string());
  Dataset ds;
  std::unordered_map<std::string, int> label_index;
  if (fixed_labels) {
    ds.label_names = *fixed_labels;
    for (std::size_t i = 0; i < fixed_labels->size(); ++i) label_index[(*fixed_labels)[i]] = static_cast<int>(i);
  }
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected \"label<TAB>text\"");
    std::string label = line.substr(0, tab);
    auto it = label_index.find(label);
    int idx;
    if (it == label_index.end()) {
      if (fixed_labels)
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": unknown label \"" +
                                 label + "\"");
      idx = static_cast<int>(ds.label_names.size());
      label_index.emplace(label, idx);
      ds.label_names.push_back(std::move(label));
    } else {
      idx = it->second;
    }
    ds.examples.push_back({clean_text(std::string_view(line).substr(tab + 1)), idx});
  }
  return ds;
}

DatasetStats dataset_stats(std::span<const Dataset* const> parts) {
  DatasetStats st;
  std::unordered_map<std::string, int> vocab;
  std::size_t total_tokens = 0;
  std::size_t classes = 0;
  for (const Dataset* ds : parts) {
    classes = std::max(classes, ds->label_names.size());
    for (const auto& ex : ds->examples) {
      ++st.size;
      total_tokens += ex.tokens.size();
      for (const auto& t : ex.tokens) vocab.emplace(t, 1);
    }
  }
  st.num_classes = classes;
  st.vocab_size = vocab.size();
  st.avg_length = st.size ? static_cast<double>(total_tokens) / static_cast<double>(st.size) : 0.0;
  return st;
}

Vocabulary build_vocabulary(std::span<const Dataset* const> parts) {
  Vocabulary v;
  for (const Dataset* ds : parts)
    for (const auto& ex : ds->examples)
      for (const auto& t : ex.tokens) v.add(t);
  return v;
}

// --- word2vec loading ----------------------------------------------------

static std::pair<std::size_t, std::size_t> read_w2v_header(std::istream& in,
                                                           const std::filesystem::path& path) {
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error(path.string() + ": missing word2vec header");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  std::size_t count = 0, dim = 0;
  try {
    std::size_t sep = header.find(' ');
    if (sep == std::string::npos) throw std::invalid_argument("");
    count = std::stoull(header.substr(0, sep));
    dim = std::stoull(header.substr(sep + 1));
  } catch (...) {
    throw std::runtime_error(path.string() + ": malformed word2vec header \"" + header + "\"");
  }
  if (dim == 0) throw std::runtime_error(path.string() + ": word2vec dimension must be positive");
  return {count, dim};
}

static float read_le_float(const unsigned char* b) {
  std::uint32_t u = static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
                    (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  float f;
  std::memcpy(&f, &u, sizeof(f));
  return f;
}

EmbeddingTable load_word2vec(const std::filesystem::path& path, W2VFormat format, const Vocabulary& vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open embeddings " + path.string());
  auto [count, dim] = read_w2v_header(in, path);
  EmbeddingTable table;
  table.dim = static_cast<int>(dim);

  if (format == W2VFormat::Text) {
    std::string line;
    for (std::size_t w = 0; w < count; ++w) {
      if (!std::getline(in, line))
        throw std::runtime_error(path.string() + ": truncated at record " + std::to_string(w));
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::size_t sep = line.find(' ');
      if (sep == std::string::npos)
        throw std::runtime_error(path.string() + ": malformed record " + std::to_string(w));
      std::string token = line.substr(0, sep);
      const bool wanted = vocab.find(token) != 0;
      std::vector<double> vec;
      if (wanted) vec.reserve(dim);
      const char* p = line.c_str() + sep;
      char* end = nullptr;
      for (std::size_t j = 0; j < dim; ++j) {
        double v = std::strtod(p, &end);
        if (end == p)
          throw std::runtime_error(path.string() + ": record " + std::to_string(w) + " has fewer than " +
                                   std::to_string(dim) + " values");
        p = end;
        if (wanted) vec.push_back(v);
      }
      if (wanted) table.vectors.emplace(std::move(token), std::move(vec));
    }
    return table;
  }

  // binary body; offset tracks consumed bytes for truncation diagnostics
  std::uint64_t offset = static_cast<std::uint64_t>(in.tellg());
  std::vector<unsigned char> raw(dim * 4);
  for (std::size_t w = 0; w < count; ++w) {
    std::string token;
    int c;
    while ((c = in.get()) != EOF && (c == '\n' || c == '\r')) ++offset;
    while (c != EOF && c != ' ') {
      ++offset;
      token.push_back(static_cast<char>(c));
      c = in.get();
    }
    if (c == EOF)
      throw std::runtime_error(path.string() + ": truncated record " + std::to_string(w) + " at byte " +
                               std::to_string(offset));
    ++offset;  // the separating space
    if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
      throw std::runtime_error(path.string() + ": truncated vector for \"" + token + "\" at byte " +
                               std::to_string(offset + static_cast<std::uint64_t>(in.gcount())));
    offset += raw.size();
    if (vocab.find(token) != 0) {
      std::vector<double> vec(dim);
      for (std::size_t j = 0; j < dim; ++j) vec[j] = static_cast<double>(read_le_float(raw.data() + 4 * j));
      table.vectors.emplace(std::move(token), std::move(vec));
    }
  }
  return table;
}

Tensor init_unknown_words(const Vocabulary& vocab, const EmbeddingTable& table, Rng& rng) {
  if (table.dim <= 0) throw std::invalid_argument("init_unknown_words: table dimension must be set");
  const std::size_t d = static_cast<std::size_t>(table.dim);
  const std::size_t rows = vocab.size() + 1;
  Tensor emb({rows, d});

  std::vector<double> mean(d, 0.0), var(d, 0.01);
  if (!table.vectors.empty()) {
    std::vector<double> sums(d, 0.0), sqsums(d, 0.0);
    std::size_t covered = 0;
    for (std::size_t i = 1; i < rows; ++i) {
      auto it = table.vectors.find(vocab.token(i));
      if (it == table.vectors.end()) continue;
      if (it->second.size() != d)
        throw std::runtime_error("embedding for \"" + vocab.token(i) + "\" has wrong dimension");
      ++covered;
      for (std::size_t j = 0; j < d; ++j) {
        sums[j] += it->second[j];
        sqsums[j] += it->second[j] * it->second[j];
      }
    }
    if (covered > 0) {
      for (std::size_t j = 0; j < d; ++j) {
        mean[j] = sums[j] / static_cast<double>(covered);
        var[j] = std::max(sqsums[j] / static_cast<double>(covered) - mean[j] * mean[j], 1e-4);
      }
    }
  }

  for (std::size_t i = 1; i < rows; ++i) {
    auto it = table.vectors.find(vocab.token(i));
    if (it != table.vectors.end()) {
      for (std::size_t j = 0; j < d; ++j) emb(i, j) = it->second[j];
    } else {
      for (std::size_t j = 0; j < d; ++j) emb(i, j) = rng.normal(mean[j], std::sqrt(var[j]));
    }
  }
  return emb;  // row 0 stays zero for the padding token
}

EncodedDataset encode_dataset(const Dataset& dataset, const Vocabulary& vocab) {
  EncodedDataset out;
  out.reserve(dataset.examples.size());
  for (const auto& ex : dataset.examples) {
    EncodedExample e;
    e.label = ex.label;
    e.tokens.reserve(ex.tokens.size());
    for (const auto& t : ex.tokens) {
      int idx = vocab.find(t);
      if (idx != 0) e.tokens.push_back(idx);
    }
    out.push_back(std::move(e));
  }
  return out;
}

SentenceBatch pad_batch(std::span<const std::vector<int>> sentences, int min_len) {
  if (min_len < 1) throw std::invalid_argument("pad_batch: min_len must be >= 1");
  SentenceBatch b;
  b.size = sentences.size();
  std::size_t longest = static_cast<std::size_t>(min_len);
  for (const auto& s : sentences) longest = std::max(longest, s.size());
  b.length = longest;
  b.tokens.assign(b.size * b.length, 0);
  b.true_lengths.resize(b.size);
  for (std::size_t i = 0; i < b.size; ++i) {
    b.true_lengths[i] = static_cast<int>(sentences[i].size());
    std::copy(sentences[i].begin(), sentences[i].end(), b.tokens.begin() + static_cast<std::ptrdiff_t>(i * b.length));
  }
  return b;
}

SentenceBatch pad_batch(const EncodedDataset& dataset, std::span<const int> indices, int min_len) {
  std::vector<std::vector<int>> sentences;
  sentences.reserve(indices.size());
  std::vector<int> labels;
  labels.reserve(indices.size());
  for (int idx : indices) {
    sentences.push_back(dataset[static_cast<std::size_t>(idx)].tokens);
    labels.push_back(dataset[static_cast<std::size_t>(idx)].label);
  }
  SentenceBatch b = pad_batch(sentences, min_len);
  b.labels = std::move(labels);
  return b;
}

// --- corpus converters ---------------------------------------------------

static std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

static std::string sanitize_text(std::string text) {
  for (char& c : text)
    if (c == '\t') c = ' ';
  return text;
}

static void write_tsv(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& [label, text] : rows) out << label << '\t' << sanitize_text(text) << '\n';
}

static std::vector<std::pair<std::string, std::string>> pair_files(const std::filesystem::path& pos,
                                                                   const std::filesystem::path& neg,
                                                                   const std::string& pos_label,
                                                                   const std::string& neg_label) {
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& line : read_lines(pos)) rows.emplace_back(pos_label, line);
  for (const auto& line : read_lines(neg)) rows.emplace_back(neg_label, line);
  return rows;
}

static std::vector<std::pair<std::string, std::string>> trec_rows(const std::filesystem::path& path) {
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& line : read_lines(path)) {
    std::size_t colon = line.find(':');
    std::size_t space = line.find(' ');
    if (colon == std::string::npos || space == std::string::npos || colon > space)
      throw std::runtime_error(path.string() + ": expected \"COARSE:fine question\" lines");
    rows.emplace_back(line.substr(0, colon), line.substr(space + 1));
  }
  return rows;
}

static std::vector<std::pair<std::string, std::string>> stsa_rows(const std::filesystem::path& path,
                                                                  const std::vector<std::string>& names) {
  std::vector<std::pair<std::string, std::string>> rows;
  for (const auto& line : read_lines(path)) {
    if (line.size() < 3 || line[1] != ' ' || line[0] < '0' ||
        line[0] >= static_cast<char>('0' + names.size()))
      throw std::runtime_error(path.string() + ": expected \"<digit> text\" lines");
    rows.emplace_back(names[static_cast<std::size_t>(line[0] - '0')], line.substr(2));
  }
  return rows;
}

std::vector<std::filesystem::path> convert_corpus(std::string_view corpus,
                                                  const std::filesystem::path& in_dir,
                                                  const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  auto emit = [&](const fs::path& name, const std::vector<std::pair<std::string, std::string>>& rows) {
    fs::path p = out_dir / name;
    write_tsv(p, rows);
    written.push_back(p);
  };

  if (corpus == "mr") {
    emit("mr.tsv", pair_files(in_dir / "rt-polarity.pos", in_dir / "rt-polarity.neg", "positive", "negative"));
  } else if (corpus == "cr") {
    emit("cr.tsv", pair_files(in_dir / "custrev.pos", in_dir / "custrev.neg", "positive", "negative"));
  } else if (corpus == "subj") {
    emit("subj.tsv", pair_files(in_dir / "quote.tok.gt9.5000", in_dir / "plot.tok.gt9.5000", "subjective",
                                "objective"));
  } else if (corpus == "trec") {
    emit("trec.train.tsv", trec_rows(in_dir / "train_5500.label"));
    emit("trec.test.tsv", trec_rows(in_dir / "TREC_10.label"));
  } else if (corpus == "sst1") {
    const std::vector<std::string> names = {"very_negative", "negative", "neutral", "positive",
                                            "very_positive"};
    emit("sst1.train.tsv", stsa_rows(in_dir / "stsa.fine.train", names));
    emit("sst1.dev.tsv", stsa_rows(in_dir / "stsa.fine.dev", names));
    emit("sst1.test.tsv", stsa_rows(in_dir / "stsa.fine.test", names));
  } else if (corpus == "sst2") {
    const std::vector<std::string> names = {"negative", "positive"};
    emit("sst2.train.tsv", stsa_rows(in_dir / "stsa.binary.train", names));
    emit("sst2.dev.tsv", stsa_rows(in_dir / "stsa.binary.dev", names));
    emit("sst2.test.tsv", stsa_rows(in_dir / "stsa.binary.test", names));
  } else {
    throw std::invalid_argument("unknown corpus \"" + std::string(corpus) +
                                "\" (expected mr, cr, subj, trec, sst1 or sst2)");
  }
  return written;
}

}  // namespace agcnn
