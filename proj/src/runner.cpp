#include "genbench/runner.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <json.hpp>

namespace genbench {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

fs::path require_file(const fs::path& path) {
  if (!fs::is_regular_file(path)) throw IoError("missing data file " + path.string());
  return path;
}

bool all_exist(std::initializer_list<fs::path> paths) {
  return std::all_of(paths.begin(), paths.end(),
                     [](const fs::path& p) { return fs::is_regular_file(p); });
}

fs::path timestamped_dir(const fs::path& base) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%d-%H%M%S", &tm);
  fs::path dir = base / stamp;
  for (int i = 1; fs::exists(dir); ++i) dir = base / (std::string(stamp) + "-" + std::to_string(i));
  fs::create_directories(dir);
  return dir;
}

IdSequence frame_pair(const Vocabulary& vocab, const PairedExample& ex) {
  IdSequence ids = encode(vocab, ex.source, false);
  const IdSequence tgt = encode(vocab, ex.target, false);
  ids.insert(ids.begin(), special::kSos);
  ids.insert(ids.end(), tgt.begin(), tgt.end());
  ids.push_back(special::kEos);
  return ids;
}

/// Runs one phase, timing it and tagging any library error with the phase name.
template <typename Fn>
auto phase(std::string_view name, RunResult& result, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  const auto record = [&] {
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    result.timing.emplace_back(std::string(name), elapsed.count());
  };
  try {
    if constexpr (std::is_void_v<decltype(fn())>) {
      fn();
      record();
    } else {
      auto value = fn();
      record();
      return value;
    }
  } catch (const PhaseError&) {
    throw;
  } catch (const Error& e) {
    throw PhaseError(std::string(name), e);
  } catch (const fs::filesystem_error& e) {
    throw PhaseError(std::string(name), IoError(e.what()));
  }
}

}  // namespace

PreparedData prepare_data(const ExperimentConfig& cfg, std::vector<std::string>& warnings) {
  const DatasetEntry& entry = find_dataset(cfg.dataset);
  const fs::path dir = cfg.data_path / cfg.dataset;
  const auto file = [&](std::string_view suffix) { return dir / (cfg.dataset + std::string(suffix)); };
  const bool ratio_given = cfg.settings.at("split_ratio").layer != Layer::kDefault;

  PreparedData out;
  out.structure = entry.structure;
  if (entry.structure == Structure::kSingle) {
    if (all_exist({file(".train"), file(".valid"), file(".test")})) {
      out.pre_split = true;
      out.single.train = load_single(file(".train"), cfg.load);
      out.single.valid = load_single(file(".valid"), cfg.load);
      out.single.test = load_single(file(".test"), cfg.load);
    } else {
      const auto all = load_single(require_file(file(".txt")), cfg.load);
      out.single = split(all, cfg.split_ratio, cfg.seed, cfg.shuffle);
    }
  } else {
    if (all_exist({file(".train.src"), file(".train.tgt"), file(".valid.src"),
                   file(".valid.tgt"), file(".test.src"), file(".test.tgt")})) {
      out.pre_split = true;
      out.paired.train = load_paired(file(".train.src"), file(".train.tgt"), cfg.load);
      out.paired.valid = load_paired(file(".valid.src"), file(".valid.tgt"), cfg.load);
      out.paired.test = load_paired(file(".test.src"), file(".test.tgt"), cfg.load);
    } else {
      const auto all = load_paired(require_file(file(".src")), require_file(file(".tgt")), cfg.load);
      out.paired = split(all, cfg.split_ratio, cfg.seed, cfg.shuffle);
    }
  }
  if (out.pre_split && ratio_given) {
    warnings.push_back("dataset " + cfg.dataset + " is pre-split; split_ratio ignored");
  }
  return out;
}

RunResult run_experiment(const ExperimentConfig& cfg) {
  RunResult result;
  result.warnings = cfg.warnings;
  const bool paired = cfg.task == Task::kConditional;

  const PreparedData data = phase("data", result, [&] { return prepare_data(cfg, result.warnings); });
  if ((paired ? data.paired.train.size() : data.single.train.size()) == 0) {
    throw PhaseError("data", SplitError("training split is empty"));
  }
  if ((paired ? data.paired.test.size() : data.single.test.size()) == 0) {
    throw PhaseError("data", SplitError("test split is empty"));
  }

  const Vocabulary vocab = phase("vocabulary", result, [&] {
    if (!paired) return build_vocabulary(data.single.train, cfg.max_vocab, cfg.min_freq);
    std::vector<TokenSequence> sides;
    for (const auto& ex : data.paired.train) {
      sides.push_back(ex.source);
      sides.push_back(ex.target);
    }
    return build_vocabulary(sides, cfg.max_vocab, cfg.min_freq);
  });

  const auto frame_all = [&](const auto& examples) {
    std::vector<IdSequence> out;
    out.reserve(examples.size());
    for (const auto& ex : examples) {
      if constexpr (std::is_same_v<std::decay_t<decltype(ex)>, PairedExample>) {
        out.push_back(frame_pair(vocab, ex));
      } else {
        out.push_back(encode(vocab, ex, true));
      }
    }
    return out;
  };
  const std::vector<IdSequence> test_ids = paired ? frame_all(data.paired.test) : frame_all(data.single.test);

  const NGramLM model = phase("model", result, [&] {
    if (cfg.checkpoint) {
      NGramLM lm = NGramLM::load(*cfg.checkpoint);
      if (lm.vocab_size() != vocab.size()) {
        throw CheckpointError("checkpoint " + cfg.checkpoint->string() + " has vocabulary size " +
                              std::to_string(lm.vocab_size()) + " but the dataset yields " +
                              std::to_string(vocab.size()) + " (format version " +
                              std::to_string(NGramLM::kFormatVersion) + ")");
      }
      return lm;
    }
    const auto train_ids = paired ? frame_all(data.paired.train) : frame_all(data.single.train);
    return NGramLM::fit(train_ids, vocab.size(), cfg.lm);
  });

  // validation loss through the model contract; recorded in timing output only
  double valid_loss = 0.0;
  {
    const auto valid_ids = paired ? frame_all(data.paired.valid) : frame_all(data.single.valid);
    double weighted = 0.0;
    std::size_t tokens = 0;
    for (const Batch& b : batches(valid_ids, cfg.batch_size)) {
      std::size_t scored = 0;
      for (auto len : b.lengths) scored += len > 1 ? len - 1 : 0;
      weighted += model.forward(b) * static_cast<double>(scored);
      tokens += scored;
    }
    if (tokens > 0) valid_loss = weighted / static_cast<double>(tokens);
  }

  const std::vector<TokenSequence> generated = phase("generate", result, [&] {
    if (paired) {
      std::vector<IdSequence> prompts;
      for (const auto& ex : data.paired.test) prompts.push_back(encode(vocab, ex.source, false));
      const auto hyps = generate_for(model, cfg.decode, prompts);
      return to_text(vocab, hyps);
    }
    const std::size_t count = cfg.generate_count ? cfg.generate_count : data.single.test.size();
    const auto hyps = generate(model, cfg.decode, count);
    return to_text(vocab, hyps);
  });

  std::vector<TokenSequence> refs;
  if (paired) {
    for (const auto& ex : data.paired.test) refs.push_back(ex.target);
  } else {
    refs = data.single.test;
  }

  const std::string snapshot = cfg.snapshot();
  result.report = phase("evaluate", result, [&] {
    EvalInputs in;
    in.hyps = std::span<const TokenSequence>(generated);
    in.refs = std::span<const TokenSequence>(refs);
    in.model = &model;
    in.data = std::span<const IdSequence>(test_ids);
    in.dataset_id = cfg.dataset;
    MetricReport report = evaluate(cfg.metrics, in);
    report.config_digest = digest(snapshot);
    return report;
  });

  phase("write", result, [&] {
    RunArtifacts& a = result.artifacts;
    a.directory = timestamped_dir(cfg.output_dir / cfg.dataset / cfg.model);
    a.config_snapshot = a.directory / "config.yaml";
    a.vocabulary = a.directory / "vocab.txt";
    a.checkpoint = a.directory / "model.nglm";
    a.generated = a.directory / "generated.txt";
    a.report_json = a.directory / "report.json";
    a.report_text = a.directory / "report.txt";
    a.timing = a.directory / "timing.json";

    write_file(a.config_snapshot, snapshot);
    std::string vocab_text;
    for (const auto& tok : vocab.tokens()) vocab_text += tok + "\n";
    write_file(a.vocabulary, vocab_text);
    model.save(a.checkpoint);
    std::string lines;
    for (const auto& seq : generated) lines += join(seq) + "\n";
    write_file(a.generated, lines);
    write_file(a.report_json, result.report.to_json());
    write_file(a.report_text, result.report.to_text());
  });

  nlohmann::ordered_json timing;
  for (const auto& [name, seconds] : result.timing) timing["phases"][name] = seconds;
  timing["valid_loss"] = valid_loss;
  timing["warnings"] = result.warnings;
  write_file(result.artifacts.timing, timing.dump(2) + "\n");
  return result;
}

}  // namespace genbench
