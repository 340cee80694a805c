#include <doctest.h>

#include <cmath>
#include <fstream>

#include "agcnn/data.hpp"
#include "test_util.hpp"

using namespace agcnn;

TEST_CASE("clean_text matches the reference tokenization") {
  auto tokens = clean_text("A turgid little history lesson, humorless and dull");
  std::vector<std::string> want = {"a", "turgid", "little", "history", "lesson", ",", "humorless",
                                   "and", "dull"};
  CHECK(tokens == want);

  CHECK(clean_text("").empty());
  CHECK(clean_text("   \t  ").empty());

  auto clitic = clean_text("doesn't");
  CHECK(clitic == std::vector<std::string>{"does", "n't"});

  CHECK(clean_text("it's") == std::vector<std::string>{"it", "'s"});
  CHECK(clean_text("they'll've") == std::vector<std::string>{"they", "'ll", "'ve"});
  CHECK(clean_text("Hello, (World)! eh?") ==
        std::vector<std::string>{"hello", ",", "(", "world", ")", "!", "eh", "?"});
  CHECK(clean_text("naïve café") == std::vector<std::string>{"na", "ve", "caf"});  // bytes outside the class drop
}

TEST_CASE("clean_text is a pure function") {
  const std::string input = "The cat ISN'T on the (mat)?!";
  auto a = clean_text(input);
  auto b = clean_text(input);
  CHECK(a == b);
}

TEST_CASE("load_dataset parses the canonical format") {
  auto dir = testutil::fresh_dir("load");
  auto path = dir / "toy.tsv";
  {
    std::ofstream out(path);
    out << "pos\tA delightful romp!\n";
    out << "neg\tA turgid little history lesson\n";
    out << "pos\tcharming and warm\n";
  }
  Dataset ds = load_dataset(path);
  REQUIRE(ds.examples.size() == 3);
  CHECK(ds.label_names == std::vector<std::string>{"pos", "neg"});
  CHECK(ds.examples[0].label == 0);
  CHECK(ds.examples[1].label == 1);
  CHECK(ds.examples[0].tokens[1] == "delightful");
}

TEST_CASE("load_dataset single line and malformed lines") {
  auto dir = testutil::fresh_dir("load2");
  auto p1 = dir / "one.tsv";
  {
    std::ofstream out(p1);
    out << "only\thello world\n";
  }
  Dataset one = load_dataset(p1);
  std::vector<const Dataset*> parts{&one};
  DatasetStats st = dataset_stats(parts);
  CHECK(st.size == 1);
  CHECK(st.num_classes == 1);

  auto p2 = dir / "bad.tsv";
  {
    std::ofstream out(p2);
    out << "pos\tfine line\n";
    out << "no tab on this line\n";
  }
  CHECK_THROWS_WITH_AS(load_dataset(p2), doctest::Contains(":2"), std::runtime_error);
}

TEST_CASE("test splits reject labels missing from training") {
  auto dir = testutil::fresh_dir("load3");
  auto p = dir / "test.tsv";
  {
    std::ofstream out(p);
    out << "mystery\tsomething\n";
  }
  std::vector<std::string> labels = {"pos", "neg"};
  CHECK_THROWS_WITH_AS(load_dataset(p, &labels), doctest::Contains("mystery"), std::runtime_error);
}

TEST_CASE("dataset stats aggregate across splits") {
  auto dir = testutil::fresh_dir("stats");
  Dataset train = testutil::make_toy_dataset(40, 1);
  Dataset test = testutil::make_toy_dataset(10, 2);
  std::vector<const Dataset*> parts{&train, &test};
  DatasetStats st = dataset_stats(parts);
  CHECK(st.size == 50);
  CHECK(st.num_classes == 2);
  std::size_t tokens = 0;
  for (const auto& ex : train.examples) tokens += ex.tokens.size();
  for (const auto& ex : test.examples) tokens += ex.tokens.size();
  CHECK(st.avg_length == doctest::Approx(static_cast<double>(tokens) / 50.0));
}

TEST_CASE("vocabulary is stable, first-appearance ordered, pad at zero") {
  Dataset ds = testutil::make_toy_dataset(25, 3);
  std::vector<const Dataset*> parts{&ds};
  Vocabulary a = build_vocabulary(parts);
  Vocabulary b = build_vocabulary(parts);
  CHECK(a.tokens() == b.tokens());
  CHECK(a.token(0) == "<pad>");
  CHECK(a.find("<pad>") == 0);
  CHECK(a.find("never-seen-token") == 0);
  // every dataset token resolves
  for (const auto& ex : ds.examples)
    for (const auto& t : ex.tokens) CHECK(a.find(t) != 0);
  CHECK(a.content_hash() == b.content_hash());
}

TEST_CASE("word2vec binary fixture loads and filters by vocabulary") {
  auto dir = testutil::fresh_dir("w2v");
  auto path = dir / "vecs.bin";
  testutil::write_word2vec_binary(path, {{"a", {1, 2, 3}}, {"b", {4, 5, 6}}}, 3);

  Vocabulary vocab;
  vocab.add("a");
  vocab.add("b");
  EmbeddingTable t = load_word2vec(path, W2VFormat::Binary, vocab);
  CHECK(t.dim == 3);
  CHECK(t.coverage() == 2);
  CHECK(t.vectors.at("a") == std::vector<double>{1, 2, 3});
  CHECK(t.vectors.at("b") == std::vector<double>{4, 5, 6});

  Vocabulary disjoint;
  disjoint.add("zebra");
  EmbeddingTable none = load_word2vec(path, W2VFormat::Binary, disjoint);
  CHECK(none.coverage() == 0);
  CHECK(none.dim == 3);

  Vocabulary partial;
  partial.add("b");
  EmbeddingTable half = load_word2vec(path, W2VFormat::Binary, partial);
  CHECK(half.coverage() == 1);
  CHECK(half.vectors.count("a") == 0);
}

TEST_CASE("word2vec text format round-trips the same fixture") {
  auto dir = testutil::fresh_dir("w2vt");
  auto path = dir / "vecs.txt";
  testutil::write_word2vec_text(path, {{"a", {1, 2, 3}}, {"b", {4.5, -5, 6}}}, 3);
  Vocabulary vocab;
  vocab.add("a");
  vocab.add("b");
  EmbeddingTable t = load_word2vec(path, W2VFormat::Text, vocab);
  CHECK(t.coverage() == 2);
  CHECK(t.vectors.at("b")[0] == doctest::Approx(4.5));
}

TEST_CASE("word2vec loader rejects truncated and malformed files") {
  auto dir = testutil::fresh_dir("w2vbad");
  auto path = dir / "trunc.bin";
  testutil::write_word2vec_binary(path, {{"a", {1, 2, 3}}, {"b", {4, 5, 6}}}, 3);
  const auto full = std::filesystem::file_size(path);
  {
    std::ifstream in(path, std::ios::binary);
    std::string bytes(full - 7, '\0');
    in.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    std::ofstream out(dir / "cut.bin", std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  }
  Vocabulary vocab;
  vocab.add("a");
  vocab.add("b");
  CHECK_THROWS_WITH_AS(load_word2vec(dir / "cut.bin", W2VFormat::Binary, vocab),
                       doctest::Contains("truncated"), std::runtime_error);

  auto bad = dir / "bad.txt";
  {
    std::ofstream out(bad);
    out << "not a header\n";
  }
  CHECK_THROWS_WITH_AS(load_word2vec(bad, W2VFormat::Text, vocab), doctest::Contains("header"),
                       std::runtime_error);

  auto short_line = dir / "short.txt";
  {
    std::ofstream out(short_line);
    out << "1 3\n";
    out << "a 1.0 2.0\n";  // one value short
  }
  CHECK_THROWS_AS(load_word2vec(short_line, W2VFormat::Text, vocab), std::runtime_error);
}

TEST_CASE("unknown words draw from the covered per-dimension moments") {
  // covered vectors [1,1] and [3,3]: unknowns ~ per-dim Normal(2, 1)
  Vocabulary vocab;
  vocab.add("known1");
  vocab.add("known2");
  const int unknown = 5000;
  for (int i = 0; i < unknown; ++i) vocab.add("u" + std::to_string(i));
  EmbeddingTable table;
  table.dim = 2;
  table.vectors["known1"] = {1, 1};
  table.vectors["known2"] = {3, 3};
  Rng rng(88);
  Tensor emb = init_unknown_words(vocab, table, rng);
  REQUIRE(emb.dim(0) == vocab.size() + 1);

  CHECK(emb(1, 0) == 1.0);  // covered rows copied verbatim
  CHECK(emb(2, 1) == 3.0);
  for (std::size_t j = 0; j < 2; ++j) CHECK(emb(0, j) == 0.0);  // pad row zero

  double sum = 0.0, ss = 0.0;
  const double n = 2.0 * unknown;
  for (std::size_t i = 3; i < emb.dim(0); ++i)
    for (std::size_t j = 0; j < 2; ++j) sum += emb(i, j);
  const double mean = sum / n;
  for (std::size_t i = 3; i < emb.dim(0); ++i)
    for (std::size_t j = 0; j < 2; ++j) ss += (emb(i, j) - mean) * (emb(i, j) - mean);
  CHECK(mean == doctest::Approx(2.0).epsilon(0.05));
  CHECK(ss / (n - 1) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("single covered word floors the variance") {
  Vocabulary vocab;
  vocab.add("only");
  for (int i = 0; i < 1000; ++i) vocab.add("u" + std::to_string(i));
  EmbeddingTable table;
  table.dim = 3;
  table.vectors["only"] = {0.5, 0.5, 0.5};
  Rng rng(13);
  Tensor emb = init_unknown_words(vocab, table, rng);
  // floored sigma = 1e-2: draws hug the mean but are not all identical
  bool varied = false;
  for (std::size_t i = 2; i < emb.dim(0); ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(std::abs(emb(i, j) - 0.5) <= 6.0 * 1e-2);
      varied = varied || emb(i, j) != 0.5;
    }
  CHECK(varied);
}

TEST_CASE("zero coverage falls back to Normal(0, 0.01)") {
  Vocabulary vocab = Vocabulary::placeholder(20000);
  EmbeddingTable empty;
  empty.dim = 4;
  Rng rng(5);
  Tensor emb = init_unknown_words(vocab, empty, rng);
  double sum = 0.0, ss = 0.0;
  const double n = static_cast<double>((emb.dim(0) - 1) * 4);
  for (std::size_t i = 1; i < emb.dim(0); ++i)
    for (std::size_t j = 0; j < 4; ++j) sum += emb(i, j);
  const double mean = sum / n;
  for (std::size_t i = 1; i < emb.dim(0); ++i)
    for (std::size_t j = 0; j < 4; ++j) ss += (emb(i, j) - mean) * (emb(i, j) - mean);
  CHECK(std::abs(mean) <= 0.005);
  CHECK(ss / (n - 1) == doctest::Approx(0.01).epsilon(0.05));
}

TEST_CASE("pad_batch pads to the max of batch length and min_len") {
  std::vector<std::vector<int>> sents = {{1, 2}, {3}};
  SentenceBatch b = pad_batch(sents, 1);
  CHECK(b.length == 2);
  CHECK(b.true_lengths == std::vector<int>{2, 1});
  CHECK(b.row(1)[0] == 3);
  CHECK(b.row(1)[1] == 0);

  std::vector<std::vector<int>> shorts = {{1}, {2, 3}, {4}};
  SentenceBatch b5 = pad_batch(shorts, 5);
  CHECK(b5.length == 5);
  for (std::size_t i = 0; i < b5.size; ++i) CHECK(b5.row(i).size() == 5);

  std::vector<std::vector<int>> equal = {{1, 2, 3}, {4, 5, 6}};
  SentenceBatch be = pad_batch(equal, 2);
  CHECK(be.length == 3);
  CHECK(be.row(0)[2] == 3);
}

TEST_CASE("encode_dataset maps tokens through the vocabulary") {
  Dataset ds = testutil::make_toy_dataset(6, 10);
  std::vector<const Dataset*> parts{&ds};
  Vocabulary vocab = build_vocabulary(parts);
  EncodedDataset enc = encode_dataset(ds, vocab);
  REQUIRE(enc.size() == ds.examples.size());
  for (std::size_t i = 0; i < enc.size(); ++i) {
    CHECK(enc[i].label == ds.examples[i].label);
    REQUIRE(enc[i].tokens.size() == ds.examples[i].tokens.size());
    for (std::size_t j = 0; j < enc[i].tokens.size(); ++j)
      CHECK(vocab.token(static_cast<std::size_t>(enc[i].tokens[j])) == ds.examples[i].tokens[j]);
  }
}

TEST_CASE("corpus converters emit the canonical format") {
  auto dir = testutil::fresh_dir("conv");
  auto in = dir / "raw";
  std::filesystem::create_directories(in);
  {
    std::ofstream pos(in / "rt-polarity.pos");
    pos << "a delightful romp\nwarm and winning\n";
    std::ofstream neg(in / "rt-polarity.neg");
    neg << "a turgid little history lesson\n";
  }
  auto outs = convert_corpus("mr", in, dir / "out");
  REQUIRE(outs.size() == 1);
  Dataset ds = load_dataset(outs[0]);
  CHECK(ds.examples.size() == 3);
  CHECK(ds.label_names == std::vector<std::string>{"positive", "negative"});

  {
    std::ofstream tr(in / "train_5500.label");
    tr << "DESC:manner How did serfdom develop ?\n";
    tr << "NUM:count How many people live there ?\n";
    std::ofstream te(in / "TREC_10.label");
    te << "HUM:ind Who wrote this ?\n";
  }
  auto touts = convert_corpus("trec", in, dir / "out");
  REQUIRE(touts.size() == 2);
  Dataset trec_train = load_dataset(touts[0]);
  CHECK(trec_train.label_names == std::vector<std::string>{"DESC", "NUM"});
  CHECK(trec_train.examples[0].tokens[0] == "how");

  {
    std::ofstream f(in / "stsa.fine.train");
    f << "4 a masterpiece\n0 a disaster\n";
    std::ofstream d(in / "stsa.fine.dev");
    d << "2 it exists\n";
    std::ofstream t(in / "stsa.fine.test");
    t << "3 quite good\n";
  }
  auto souts = convert_corpus("sst1", in, dir / "out");
  REQUIRE(souts.size() == 3);
  Dataset sst = load_dataset(souts[0]);
  CHECK(sst.label_names == std::vector<std::string>{"very_positive", "very_negative"});

  CHECK_THROWS_AS(convert_corpus("imdb", in, dir / "out"), std::invalid_argument);
}
