// Benchmark comparing the serial reference kernels against the production
// implementations, and single-threaded against OpenMP batch training.
// Usage: agcnn-bench [--quick]

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "agcnn/parallel.hpp"
#include "agcnn/reference.hpp"
#include "agcnn/training.hpp"

using namespace agcnn;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

EncodedDataset synthetic_batchset(int n, int vocab, std::uint64_t seed) {
  Rng rng(seed);
  EncodedDataset ds;
  for (int i = 0; i < n; ++i) {
    EncodedExample ex;
    const int len = 8 + static_cast<int>(rng.uniform01() * 8);
    for (int j = 0; j < len; ++j)
      ex.tokens.push_back(1 + static_cast<int>(rng.uniform01() * (vocab - 1)));
    ex.label = static_cast<int>(rng.uniform01() * 2);
    ds.push_back(std::move(ex));
  }
  return ds;
}

struct Row {
  const char* name;
  double serial_s;
  double other_s;
  long ops;
};

void print_rows(const std::vector<Row>& rows, const char* other_label) {
  std::printf("%-34s %12s %12s %8s\n", "kernel", "serial", other_label, "speedup");
  for (const auto& r : rows) {
    std::printf("%-34s %9.3f ms %9.3f ms %7.2fx   (%ld ops)\n", r.name, r.serial_s * 1e3, r.other_s * 1e3,
                r.serial_s / r.other_s, r.ops);
  }
}

}  // namespace

int main(int argc, char** argv) {
  bool quick = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--quick") == 0) quick = true;

  const int reps = quick ? 5 : 50;
  const int vocab = 1000;
  AgcnnConfig cfg;
  cfg.window_sizes_l1 = {2, 3, 4};
  cfg.kernels_per_window = 30;
  cfg.window_sizes_l2 = {1, 3, 5};
  cfg.embedding_dim = 50;
  cfg.num_classes = 2;
  cfg.dropout_rate = 0.5;
  cfg.seed = 7;

  Vocabulary vb = Vocabulary::placeholder(vocab);
  Rng rng(cfg.seed);
  AgcnnModel model = build_model(cfg, vb, nullptr, rng);
  EncodedDataset data = synthetic_batchset(quick ? 64 : 256, vocab, 11);
  const int threads = resolve_threads();

  std::vector<Row> rows;

  // whole-sentence forward: reference kernels vs production forward
  {
    std::vector<int> sent = data[0].tokens;
    while (sent.size() < static_cast<std::size_t>(cfg.min_sentence_len())) sent.push_back(0);
    double sink = 0.0;
    auto t0 = Clock::now();
    for (int r = 0; r < reps * 4; ++r) sink += ref::model_forward(model, sent)[0];
    double t_ref = seconds_since(t0);
    t0 = Clock::now();
    for (int r = 0; r < reps * 4; ++r) sink += model_forward(model, sent, Mode::Eval, nullptr)[0];
    double t_main = seconds_since(t0);
    if (sink < 0.0) std::printf("unexpected negative probability sum\n");  // keeps sink live
    rows.push_back({"model_forward (1 sentence)", t_ref, t_main, reps * 4L});
  }

  // batch gradient epoch: 1 thread vs resolved thread count
  {
    TrainConfig tc;
    tc.batch_size = 50;
    tc.max_epochs = quick ? 1 : 2;
    tc.early_stop_patience = 1000;
    tc.val_fraction = 0.5;  // unused; explicit val below
    tc.seed = 3;

    auto run = [&](int nthreads) {
      AgcnnModel m = model;
      TrainConfig c = tc;
      c.threads = nthreads;
      auto t0 = Clock::now();
      train(m, data, data, c);
      return seconds_since(t0);
    };
    double t_serial = run(1);
    double t_parallel = run(threads);
    rows.push_back({"train epoch (batch forward+backward)", t_serial, t_parallel,
                    static_cast<long>(data.size()) * tc.max_epochs});
    std::printf("threads = %d (AGCNN_THREADS %s)\n", threads,
                serial_reference_mode() ? "reference mode" : "resolved");
  }

  print_rows(rows, "optimized");
  return 0;
}
