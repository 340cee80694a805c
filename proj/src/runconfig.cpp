#include "agcnn/runconfig.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace agcnn {

int RunConfig::channels() const {
  if (variant == "multichannel-2") return 2;
  if (variant == "multichannel-3") return 3;
  return 1;
}

std::vector<bool> RunConfig::channel_trainability() const {
  if (variant == "rand" || variant == "non-static") return {true};
  if (variant == "static") return {false};
  if (variant == "multichannel-2") return {true, false};
  if (variant == "multichannel-3") return {true, false, false};
  throw std::invalid_argument("unknown variant \"" + variant +
                              "\" (expected rand, static, non-static, multichannel-2 or multichannel-3)");
}

bool RunConfig::needs_pretrained() const { return variant != "rand"; }

void RunConfig::validate() const {
  channel_trainability();  // checks the variant name
  if (!activation_from_name(activation))
    throw std::invalid_argument("unknown activation \"" + activation + "\"");
  if (embeddings_format != "binary" && embeddings_format != "text")
    throw std::invalid_argument("embeddings_format must be binary or text");
  model_config(2).validate();
  train_config().validate();
}

AgcnnConfig RunConfig::model_config(int num_classes) const {
  AgcnnConfig cfg;
  cfg.window_sizes_l1 = window_sizes;
  cfg.kernels_per_window = kernels_per_window;
  cfg.window_sizes_l2 = attention_windows;
  cfg.embedding_dim = embedding_dim;
  cfg.num_classes = num_classes;
  cfg.channels = channels();
  cfg.channel_trainable = channel_trainability();
  cfg.activation = *activation_from_name(activation);
  cfg.dropout_rate = dropout;
  cfg.seed = seed;
  return cfg;
}

TrainConfig RunConfig::train_config() const {
  TrainConfig cfg;
  cfg.batch_size = batch_size;
  cfg.learning_rate = learning_rate;
  cfg.beta1 = beta1;
  cfg.beta2 = beta2;
  cfg.epsilon = epsilon;
  cfg.max_epochs = max_epochs;
  cfg.early_stop_patience = early_stop_patience;
  cfg.lr_decay_factor = lr_decay_factor;
  cfg.lr_decay_patience = lr_decay_patience;
  cfg.val_fraction = val_fraction;
  cfg.seed = seed;
  return cfg;
}

std::vector<ActivationKind> RunConfig::kind_list() const {
  if (kinds.empty()) return all_activation_kinds();
  std::vector<ActivationKind> out;
  std::stringstream ss(kinds);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto k = activation_from_name(item);
    if (!k) throw std::invalid_argument("unknown activation \"" + item + "\" in kinds list");
    out.push_back(*k);
  }
  if (out.empty()) throw std::invalid_argument("kinds list is empty");
  return out;
}

// --- parsing -----------------------------------------------------------------

namespace {

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  std::size_t e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void type_error(const std::string& key, const std::string& value, const std::string& where,
                             const char* expected) {
  throw std::invalid_argument(where + ": key \"" + key + "\": expected " + expected + ", got \"" + value +
                              "\"");
}

int parse_int(const std::string& key, const std::string& value, const std::string& where) {
  int v{};
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || p != value.data() + value.size()) type_error(key, value, where, "an integer");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value, const std::string& where) {
  std::uint64_t v{};
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || p != value.data() + value.size()) type_error(key, value, where, "an unsigned integer");
  return v;
}

double parse_double(const std::string& key, const std::string& value, const std::string& where) {
  try {
    std::size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    type_error(key, value, where, "a number");
  }
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value, const std::string& where) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(parse_int(key, item, where));
  }
  if (out.empty()) type_error(key, value, where, "a comma-separated integer list");
  return out;
}

}  // namespace

void apply_config_value(RunConfig& c, const std::string& key, const std::string& value,
                        const std::string& where) {
  if (key == "window_sizes") c.window_sizes = parse_int_list(key, value, where);
  else if (key == "kernels_per_window") c.kernels_per_window = parse_int(key, value, where);
  else if (key == "attention_windows") c.attention_windows = parse_int_list(key, value, where);
  else if (key == "embedding_dim") c.embedding_dim = parse_int(key, value, where);
  else if (key == "variant") c.variant = value;
  else if (key == "activation") c.activation = value;
  else if (key == "dropout") c.dropout = parse_double(key, value, where);
  else if (key == "seed") c.seed = parse_u64(key, value, where);
  else if (key == "batch_size") c.batch_size = parse_int(key, value, where);
  else if (key == "learning_rate") c.learning_rate = parse_double(key, value, where);
  else if (key == "beta1") c.beta1 = parse_double(key, value, where);
  else if (key == "beta2") c.beta2 = parse_double(key, value, where);
  else if (key == "epsilon") c.epsilon = parse_double(key, value, where);
  else if (key == "max_epochs") c.max_epochs = parse_int(key, value, where);
  else if (key == "early_stop_patience") c.early_stop_patience = parse_int(key, value, where);
  else if (key == "lr_decay_factor") c.lr_decay_factor = parse_double(key, value, where);
  else if (key == "lr_decay_patience") c.lr_decay_patience = parse_int(key, value, where);
  else if (key == "val_fraction") c.val_fraction = parse_double(key, value, where);
  else if (key == "folds") c.folds = parse_int(key, value, where);
  else if (key == "dataset") c.dataset = value;
  else if (key == "test_dataset") c.test_dataset = value;
  else if (key == "val_dataset") c.val_dataset = value;
  else if (key == "embeddings") c.embeddings = value;
  else if (key == "embeddings_format") c.embeddings_format = value;
  else if (key == "checkpoint") c.checkpoint = value;
  else if (key == "out") c.out_dir = value;
  else if (key == "sim_layers") c.sim_layers = parse_int(key, value, where);
  else if (key == "sim_nodes") c.sim_nodes = parse_int(key, value, where);
  else if (key == "sim_batch") c.sim_batch = parse_int(key, value, where);
  else if (key == "weight_std") c.weight_std = parse_double(key, value, where);
  else if (key == "sim_bias") c.sim_bias = parse_double(key, value, where);
  else if (key == "kinds") c.kinds = value;
  else if (key == "text") c.text = value;
  else if (key == "heatmap_samples") c.heatmap_samples = parse_int(key, value, where);
  else if (key == "subcommand" || key == "rng") { /* manifest bookkeeping keys */ }
  else throw std::invalid_argument(where + ": unknown key \"" + key + "\"");
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    const std::string where = path.string() + ":" + std::to_string(line_no);
    std::string body = trim(line);
    if (body.empty()) continue;
    const std::size_t eq = body.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument(where + ": expected \"key = value\"");
    apply_config_value(config, trim(body.substr(0, eq)), trim(body.substr(eq + 1)), where);
  }
}

static std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

static std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string render_config(const RunConfig& c, const std::string& subcommand) {
  std::ostringstream os;
  os << "# agcnn run manifest; feeding this file back through --config replays the run\n";
  os << "subcommand = " << subcommand << "\n";
  os << "rng = " << Rng::algorithm() << "\n";
  os << "seed = " << c.seed << "\n";
  os << "variant = " << c.variant << "\n";
  os << "activation = " << c.activation << "\n";
  os << "window_sizes = " << join_ints(c.window_sizes) << "\n";
  os << "kernels_per_window = " << c.kernels_per_window << "\n";
  os << "attention_windows = " << join_ints(c.attention_windows) << "\n";
  os << "embedding_dim = " << c.embedding_dim << "\n";
  os << "dropout = " << fmt(c.dropout) << "\n";
  os << "batch_size = " << c.batch_size << "\n";
  os << "learning_rate = " << fmt(c.learning_rate) << "\n";
  os << "beta1 = " << fmt(c.beta1) << "\n";
  os << "beta2 = " << fmt(c.beta2) << "\n";
  os << "epsilon = " << fmt(c.epsilon) << "\n";
  os << "max_epochs = " << c.max_epochs << "\n";
  os << "early_stop_patience = " << c.early_stop_patience << "\n";
  os << "lr_decay_factor = " << fmt(c.lr_decay_factor) << "\n";
  os << "lr_decay_patience = " << c.lr_decay_patience << "\n";
  os << "val_fraction = " << fmt(c.val_fraction) << "\n";
  os << "folds = " << c.folds << "\n";
  if (!c.dataset.empty()) os << "dataset = " << c.dataset << "\n";
  if (!c.test_dataset.empty()) os << "test_dataset = " << c.test_dataset << "\n";
  if (!c.val_dataset.empty()) os << "val_dataset = " << c.val_dataset << "\n";
  if (!c.embeddings.empty()) os << "embeddings = " << c.embeddings << "\n";
  os << "embeddings_format = " << c.embeddings_format << "\n";
  if (!c.checkpoint.empty()) os << "checkpoint = " << c.checkpoint << "\n";
  os << "out = " << c.out_dir << "\n";
  os << "sim_layers = " << c.sim_layers << "\n";
  os << "sim_nodes = " << c.sim_nodes << "\n";
  os << "sim_batch = " << c.sim_batch << "\n";
  os << "weight_std = " << fmt(c.weight_std) << "\n";
  os << "sim_bias = " << fmt(c.sim_bias) << "\n";
  if (!c.kinds.empty()) os << "kinds = " << c.kinds << "\n";
  if (!c.text.empty()) os << "text = " << c.text << "\n";
  os << "heatmap_samples = " << c.heatmap_samples << "\n";
  return os.str();
}

void write_manifest(const std::filesystem::path& out_dir, const std::string& subcommand,
                    const RunConfig& config, const std::vector<std::filesystem::path>& artifacts) {
  std::ofstream out(out_dir / "manifest.txt", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write manifest in " + out_dir.string());
  out << render_config(config, subcommand);
  for (const auto& a : artifacts) {
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(fnv1a64_file(a)));
    out << "# artifact " << hex << " " << a.filename().string() << "\n";
  }
}

}  // namespace agcnn
