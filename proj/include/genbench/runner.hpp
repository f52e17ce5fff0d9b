#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "genbench/corpus.hpp"
#include "genbench/decoding.hpp"
#include "genbench/metrics.hpp"
#include "genbench/ngram_lm.hpp"

namespace genbench {

/// Where a resolved configuration value came from, lowest precedence first.
enum class Layer { kDefault, kDatasetFile, kModelFile, kCommandLine };

std::string_view to_string(Layer layer);

enum class Task { kUnconditional, kConditional };
enum class Structure { kSingle, kPaired };

struct DatasetEntry {
  std::string name;
  Structure structure;
  std::string description;
};

struct Registry {
  std::vector<DatasetEntry> datasets;
  std::vector<std::string> models;
  std::vector<std::string> metrics;
};

const Registry& list_registry();

/// Throws ConfigError listing the known names.
const DatasetEntry& find_dataset(std::string_view name);
void check_model(std::string_view name);

struct Setting {
  std::string value;  // canonical text form
  Layer layer = Layer::kDefault;
};

/// Fully resolved experiment settings. Every known key has a value and the
/// layer that supplied it.
struct ExperimentConfig {
  std::string dataset;
  std::string model;
  Task task = Task::kUnconditional;

  std::filesystem::path data_path;
  LoadOptions load;
  std::size_t min_freq = 1;
  std::optional<std::size_t> max_vocab;
  SplitRatio split_ratio;
  bool shuffle = true;
  std::size_t batch_size = 32;

  NGramLM::Params lm;
  std::optional<std::filesystem::path> checkpoint;

  DecodeConfig decode;
  /// Samples generated for unconditional tasks; 0 means one per test line.
  std::size_t generate_count = 0;

  MetricConfig metrics;
  std::uint64_t seed = 2020;
  std::filesystem::path output_dir;

  std::map<std::string, Setting> settings;
  std::vector<std::string> warnings;

  /// The YAML document written next to every run; loading it as a dataset
  /// file reproduces the same values.
  std::string snapshot() const;
  /// Key -> value text, without provenance.
  std::map<std::string, std::string> values() const;
};

/// Flat key/value pairs from a YAML mapping. Sequences become "[a, b]".
/// Throws ConfigError on anything else.
std::vector<std::pair<std::string, std::string>> parse_config_file(const std::filesystem::path& path);
std::vector<std::pair<std::string, std::string>> parse_config_text(std::string_view text,
                                                                   std::string_view origin);

/// "--key=value" and "--key value" pairs. Throws ConfigError on stray arguments.
std::vector<std::pair<std::string, std::string>> parse_cli_overrides(
    const std::vector<std::string>& args);

/// Layers built-in defaults < dataset file < model file < command line.
/// Unknown keys and GPU options produce warnings. Throws ConfigError when the
/// dataset or model name is missing or not registered, or a value does not parse.
ExperimentConfig load_config(const std::optional<std::filesystem::path>& dataset_file,
                             const std::optional<std::filesystem::path>& model_file,
                             const std::vector<std::string>& cli_args);

/// Same, from already-parsed layers.
ExperimentConfig resolve_config(
    const std::vector<std::pair<std::string, std::string>>& dataset_layer,
    const std::vector<std::pair<std::string, std::string>>& model_layer,
    const std::vector<std::pair<std::string, std::string>>& cli_layer);

/// `<config_dir>/dataset/<name>.yaml` and `<config_dir>/model/<name>.yaml`
/// when they exist.
std::pair<std::optional<std::filesystem::path>, std::optional<std::filesystem::path>>
locate_config_files(const std::filesystem::path& config_dir, std::string_view dataset,
                    std::string_view model);

struct RunArtifacts {
  std::filesystem::path directory;
  std::filesystem::path checkpoint;
  std::filesystem::path generated;
  std::filesystem::path report_json;
  std::filesystem::path report_text;
  std::filesystem::path config_snapshot;
  std::filesystem::path vocabulary;
  std::filesystem::path timing;
};

struct RunResult {
  MetricReport report;
  RunArtifacts artifacts;
  std::vector<std::pair<std::string, double>> timing;  // phase -> seconds
  std::vector<std::string> warnings;
};

/// Prepared splits for either dataset structure.
struct PreparedData {
  Structure structure = Structure::kSingle;
  Split<TokenSequence> single;
  Split<PairedExample> paired;
  bool pre_split = false;
};

/// Loads `<data_path>/<dataset>/`: pre-split files when present, otherwise
/// the whole corpus split by cfg.split_ratio.
PreparedData prepare_data(const ExperimentConfig& cfg, std::vector<std::string>& warnings);

/// data -> vocabulary (train split only) -> fit or load model -> generate ->
/// evaluate on the test split -> artifacts under
/// `<output_dir>/<dataset>/<model>/<timestamp>/`. Failures are rethrown as
/// PhaseError naming the phase.
RunResult run_experiment(const ExperimentConfig& cfg);

}  // namespace genbench
