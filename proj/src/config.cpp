#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "genbench/runner.hpp"

namespace genbench {

namespace {

struct KeySpec {
  std::string_view name;
  std::string_view fallback;
};

// Every recognized key with its built-in default, in snapshot order.
constexpr KeySpec kKeys[] = {
    {"dataset", ""},
    {"model", ""},
    {"data_path", "data"},
    {"lowercase", "true"},
    {"min_freq", "1"},
    {"max_vocab", "none"},
    {"split_ratio", "[0.8, 0.1, 0.1]"},
    {"shuffle", "true"},
    {"batch_size", "32"},
    {"order", "3"},
    {"delta", "0.01"},
    {"lambdas", "[]"},
    {"checkpoint", "none"},
    {"decoding_strategy", "topk"},
    {"beam_size", "5"},
    {"topk", "10"},
    {"max_len", "30"},
    {"length_penalty", "0"},
    {"generate_count", "0"},
    {"metrics", "[nll, ppl, bleu, self_bleu, rouge, distinct]"},
    {"bleu_max_n", "4"},
    {"rouge_max_n", "2"},
    {"distinct_max_n", "2"},
    {"smoothing", "none"},
    {"epsilon", "1e-09"},
    {"bleu_weighting", "one_hot"},
    {"self_bleu_sample", "0"},
    {"threads", "1"},
    {"seed", "2020"},
    {"output_dir", "saved"},
};

constexpr std::string_view kListKeys[] = {"split_ratio", "lambdas", "metrics"};
constexpr std::string_view kGpuKeys[] = {"use_gpu", "gpu_id", "DDP"};

bool is_known(std::string_view key) {
  return std::any_of(std::begin(kKeys), std::end(kKeys),
                     [&](const KeySpec& k) { return k.name == key; });
}

bool is_list_key(std::string_view key) {
  return std::find(std::begin(kListKeys), std::end(kListKeys), key) != std::end(kListKeys);
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::vector<std::string> split_list(std::string_view text) {
  std::string body = trim(text);
  if (body.size() >= 2 && body.front() == '[' && body.back() == ']') {
    body = body.substr(1, body.size() - 2);
  }
  std::vector<std::string> items;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

std::string render_list(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + items[i];
  return out + "]";
}

std::string canonical_value(std::string_view key, std::string_view value) {
  if (is_list_key(key)) return render_list(split_list(value));
  return trim(value);
}

std::string scalar_text(const YAML::Node& node) {
  if (node.IsNull()) return "none";
  return node.Scalar();
}

// ---- typed accessors -----------------------------------------------------

class Resolver {
 public:
  explicit Resolver(const std::map<std::string, Setting>& s) : settings_(s) {}

  const std::string& text(std::string_view key) const { return settings_.at(std::string(key)).value; }

  [[noreturn]] void fail(std::string_view key, std::string_view expected) const {
    const Setting& s = settings_.at(std::string(key));
    throw ConfigError("option '" + std::string(key) + "' = '" + s.value + "' (from " +
                      std::string(to_string(s.layer)) + "): expected " + std::string(expected));
  }

  bool boolean(std::string_view key) const {
    const std::string v = lower(text(key));
    if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
    if (v == "false" || v == "no" || v == "0" || v == "off") return false;
    fail(key, "a boolean");
  }

  std::uint64_t unsigned_int(std::string_view key) const {
    const std::string& v = text(key);
    std::uint64_t out = 0;
    auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || end != v.data() + v.size() || v.empty()) {
      fail(key, "a non-negative integer");
    }
    return out;
  }

  double real(std::string_view key) const { return parse_real(key, text(key)); }

  double parse_real(std::string_view key, const std::string& v) const {
    try {
      std::size_t used = 0;
      const double out = std::stod(v, &used);
      if (used == v.size()) return out;
    } catch (const std::exception&) {
    }
    fail(key, "a number");
  }

  std::vector<double> reals(std::string_view key) const {
    std::vector<double> out;
    for (const auto& item : split_list(text(key))) out.push_back(parse_real(key, item));
    return out;
  }

  std::vector<std::string> list(std::string_view key) const { return split_list(text(key)); }

  bool is_none(std::string_view key) const {
    const std::string v = lower(text(key));
    return v.empty() || v == "none" || v == "null" || v == "~";
  }

 private:
  const std::map<std::string, Setting>& settings_;
};

std::string join_names(const auto& names) {
  std::string out;
  for (const auto& n : names) {
    if (!out.empty()) out += ", ";
    out += std::string(n);
  }
  return out;
}

std::string yaml_scalar(const std::string& v) {
  const bool plain = !v.empty() && v.find_first_of(":#{}[],&*!|>'\"%@`\\") == std::string::npos &&
                     v.front() != ' ' && v.back() != ' ' && v.front() != '-' && v.front() != '?';
  if (plain) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

std::string_view to_string(Layer layer) {
  switch (layer) {
    case Layer::kDefault: return "default";
    case Layer::kDatasetFile: return "dataset-file";
    case Layer::kModelFile: return "model-file";
    case Layer::kCommandLine: return "command-line";
  }
  return "default";
}

// ---------------------------------------------------------------------------
// Registry

const Registry& list_registry() {
  static const Registry registry = [] {
    Registry r;
    r.datasets = {
        {"COCO-mini", Structure::kSingle, "500 synthetic image captions (unconditional)"},
        {"COCO-tiny", Structure::kSingle, "50 synthetic image captions (unconditional)"},
        {"IWSLT-mini", Structure::kPaired, "300 synthetic sentence pairs (translation)"},
    };
    r.models = {"NGLM"};
    for (auto m : known_metrics()) r.metrics.emplace_back(m);
    return r;
  }();
  return registry;
}

const DatasetEntry& find_dataset(std::string_view name) {
  const auto& all = list_registry().datasets;
  auto it = std::find_if(all.begin(), all.end(), [&](const DatasetEntry& d) { return d.name == name; });
  if (it == all.end()) {
    std::vector<std::string> names;
    for (const auto& d : all) names.push_back(d.name);
    throw ConfigError("unknown dataset '" + std::string(name) + "' (known: " + join_names(names) + ")");
  }
  return *it;
}

void check_model(std::string_view name) {
  const auto& models = list_registry().models;
  if (std::find(models.begin(), models.end(), name) == models.end()) {
    throw ConfigError("unknown model '" + std::string(name) + "' (known: " + join_names(models) + ")");
  }
}

// ---------------------------------------------------------------------------
// Parsing layers

std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text,
                                                                   std::string_view origin) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string(origin) + ": " + e.what());
  }
  std::vector<std::pair<std::string, std::string>> out;
  if (root.IsNull()) return out;
  if (!root.IsMap()) throw ConfigError(std::string(origin) + ": expected a key-value document");
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    const YAML::Node& value = kv.second;
    if (value.IsSequence()) {
      std::vector<std::string> items;
      for (const auto& item : value) {
        if (!item.IsScalar()) {
          throw ConfigError(std::string(origin) + ": '" + key + "' must be a flat list");
        }
        items.push_back(item.Scalar());
      }
      out.emplace_back(key, render_list(items));
    } else if (value.IsScalar() || value.IsNull()) {
      out.emplace_back(key, scalar_text(value));
    } else {
      throw ConfigError(std::string(origin) + ": '" + key + "' must be a scalar or a flat list");
    }
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

std::vector<std::pair<std::string, std::string>> parse_cli_overrides(
    const std::vector<std::string>& args) {
  std::vector<std::pair<std::string, std::string>> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string_view arg = args[i];
    if (!arg.starts_with("--") || arg.size() == 2) {
      throw ConfigError("unexpected argument '" + std::string(arg) + "', expected --key=value");
    }
    arg.remove_prefix(2);
    const auto eq = arg.find('=');
    if (eq != std::string_view::npos) {
      out.emplace_back(std::string(arg.substr(0, eq)), std::string(arg.substr(eq + 1)));
    } else if (i + 1 < args.size() && !std::string_view(args[i + 1]).starts_with("--")) {
      out.emplace_back(std::string(arg), args[++i]);
    } else {
      out.emplace_back(std::string(arg), "true");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Resolution

ExperimentConfig resolve_config(
    const std::vector<std::pair<std::string, std::string>>& dataset_layer,
    const std::vector<std::pair<std::string, std::string>>& model_layer,
    const std::vector<std::pair<std::string, std::string>>& cli_layer) {
  ExperimentConfig cfg;
  for (const auto& k : kKeys) {
    cfg.settings[std::string(k.name)] = {canonical_value(k.name, k.fallback), Layer::kDefault};
  }

  const auto apply = [&](const std::vector<std::pair<std::string, std::string>>& layer,
                         Layer which) {
    for (const auto& [key, value] : layer) {
      if (std::find(std::begin(kGpuKeys), std::end(kGpuKeys), key) != std::end(kGpuKeys)) {
        cfg.warnings.push_back("option '" + key + "' (" + std::string(to_string(which)) +
                               ") ignored: execution is CPU-only");
        continue;
      }
      if (!is_known(key)) {
        cfg.warnings.push_back("unknown option '" + key + "' (" + std::string(to_string(which)) +
                               ") ignored");
        continue;
      }
      cfg.settings[key] = {canonical_value(key, value), which};
    }
  };
  apply(dataset_layer, Layer::kDatasetFile);
  apply(model_layer, Layer::kModelFile);
  apply(cli_layer, Layer::kCommandLine);

  const Resolver r(cfg.settings);
  cfg.dataset = r.text("dataset");
  cfg.model = r.text("model");
  if (cfg.dataset.empty()) {
    std::vector<std::string> names;
    for (const auto& d : list_registry().datasets) names.push_back(d.name);
    throw ConfigError("no dataset given (known: " + join_names(names) + ")");
  }
  if (cfg.model.empty()) {
    throw ConfigError("no model given (known: " + join_names(list_registry().models) + ")");
  }
  const DatasetEntry& entry = find_dataset(cfg.dataset);
  check_model(cfg.model);
  cfg.task = entry.structure == Structure::kSingle ? Task::kUnconditional : Task::kConditional;

  cfg.data_path = r.text("data_path");
  cfg.load.lowercase = r.boolean("lowercase");
  cfg.min_freq = r.unsigned_int("min_freq");
  if (cfg.min_freq == 0) r.fail("min_freq", "a count >= 1");
  if (!r.is_none("max_vocab")) cfg.max_vocab = r.unsigned_int("max_vocab");
  const auto ratio = r.reals("split_ratio");
  if (ratio.size() != 3) r.fail("split_ratio", "three fractions [train, valid, test]");
  cfg.split_ratio = {ratio[0], ratio[1], ratio[2]};
  cfg.split_ratio.validate();
  cfg.shuffle = r.boolean("shuffle");
  cfg.batch_size = r.unsigned_int("batch_size");
  if (cfg.batch_size == 0) r.fail("batch_size", "a count >= 1");

  cfg.lm.order = r.unsigned_int("order");
  if (cfg.lm.order == 0) r.fail("order", "an order >= 1");
  cfg.lm.delta = r.real("delta");
  if (!(cfg.lm.delta > 0.0)) r.fail("delta", "a positive number");
  cfg.lm.lambdas = r.reals("lambdas");
  if (!r.is_none("checkpoint")) cfg.checkpoint = r.text("checkpoint");

  cfg.decode.strategy = parse_strategy(r.text("decoding_strategy"));
  cfg.decode.beam_size = r.unsigned_int("beam_size");
  cfg.decode.top_k = r.unsigned_int("topk");
  cfg.decode.max_len = r.unsigned_int("max_len");
  cfg.decode.length_penalty = r.real("length_penalty");
  if (cfg.decode.beam_size == 0) r.fail("beam_size", "a beam size >= 1");
  if (cfg.decode.top_k == 0) r.fail("topk", "k >= 1");
  if (cfg.decode.max_len == 0) r.fail("max_len", "a length >= 1");
  if (!(cfg.decode.length_penalty >= 0.0)) r.fail("length_penalty", "a number >= 0");
  cfg.generate_count = r.unsigned_int("generate_count");

  cfg.seed = r.unsigned_int("seed");
  cfg.decode.seed = cfg.seed;
  const std::size_t threads = r.unsigned_int("threads");
  if (threads == 0) r.fail("threads", "a worker count >= 1");
  cfg.decode.threads = threads;

  cfg.metrics.names = r.list("metrics");
  cfg.metrics.bleu_max_n = r.unsigned_int("bleu_max_n");
  cfg.metrics.rouge_max_n = r.unsigned_int("rouge_max_n");
  cfg.metrics.distinct_max_n = r.unsigned_int("distinct_max_n");
  const std::string smoothing = lower(r.text("smoothing"));
  if (smoothing == "none") {
    cfg.metrics.bleu.smoothing = Smoothing::kNone;
  } else if (smoothing == "epsilon") {
    cfg.metrics.bleu.smoothing = Smoothing::kEpsilon;
  } else {
    r.fail("smoothing", "none or epsilon");
  }
  cfg.metrics.bleu.epsilon = r.real("epsilon");
  const std::string weighting = lower(r.text("bleu_weighting"));
  if (weighting == "one_hot") {
    cfg.metrics.bleu.weighting = BleuWeighting::kOneHot;
  } else if (weighting == "geometric") {
    cfg.metrics.bleu.weighting = BleuWeighting::kGeometric;
  } else {
    r.fail("bleu_weighting", "one_hot or geometric");
  }
  if (const auto sample = r.unsigned_int("self_bleu_sample"); sample > 0) {
    cfg.metrics.self_bleu_sample = SelfBleuSample{sample, cfg.seed};
  }
  cfg.metrics.pairing =
      cfg.task == Task::kConditional ? Pairing::kAligned : Pairing::kAllReferences;
  cfg.metrics.threads = threads;
  cfg.metrics.validate();

  cfg.output_dir = r.text("output_dir");
  return cfg;
}

ExperimentConfig load_config(const std::optional<std::filesystem::path>& dataset_file,
                             const std::optional<std::filesystem::path>& model_file,
                             const std::vector<std::string>& cli_args) {
  const auto cli = parse_cli_overrides(cli_args);
  return resolve_config(dataset_file ? parse_config_file(*dataset_file) : decltype(cli){},
                        model_file ? parse_config_file(*model_file) : decltype(cli){}, cli);
}

std::pair<std::optional<std::filesystem::path>, std::optional<std::filesystem::path>>
locate_config_files(const std::filesystem::path& config_dir, std::string_view dataset,
                    std::string_view model) {
  std::pair<std::optional<std::filesystem::path>, std::optional<std::filesystem::path>> out;
  const auto ds = config_dir / "dataset" / (std::string(dataset) + ".yaml");
  const auto md = config_dir / "model" / (std::string(model) + ".yaml");
  if (std::filesystem::is_regular_file(ds)) out.first = ds;
  if (std::filesystem::is_regular_file(md)) out.second = md;
  return out;
}

std::map<std::string, std::string> ExperimentConfig::values() const {
  std::map<std::string, std::string> out;
  for (const auto& [k, s] : settings) out[k] = s.value;
  return out;
}

std::string ExperimentConfig::snapshot() const {
  std::string out;
  for (const auto& k : kKeys) {
    const std::string& v = settings.at(std::string(k.name)).value;
    out += std::string(k.name) + ": " + (is_list_key(k.name) ? v : yaml_scalar(v)) + "\n";
  }
  return out;
}

}  // namespace genbench
