// genbench: run experiments, score generated text, list built-ins.
//
//   genbench run --model=NGLM --dataset=COCO-mini [--key=value ...]
//   genbench eval --hyp out.txt --ref ref.txt --metrics bleu,rouge
//   genbench list

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "genbench/runner.hpp"

namespace {

using namespace genbench;

int run_command(const std::vector<std::string>& args, const std::string& config_dir,
                const std::string& dataset_file, const std::string& model_file) {
  // the dataset and model names decide which config files apply, so peek at
  // the command-line layer first
  const auto cli = parse_cli_overrides(args);
  std::string dataset, model;
  for (const auto& [k, v] : cli) {
    if (k == "dataset") dataset = v;
    if (k == "model") model = v;
  }
  auto [ds_path, md_path] = locate_config_files(config_dir, dataset, model);
  if (!dataset_file.empty()) ds_path = dataset_file;
  if (!model_file.empty()) md_path = model_file;

  const ExperimentConfig cfg = load_config(ds_path, md_path, args);
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
  const RunResult result = run_experiment(cfg);
  for (std::size_t i = cfg.warnings.size(); i < result.warnings.size(); ++i) {
    std::cerr << "warning: " << result.warnings[i] << "\n";
  }
  std::cout << result.report.to_text();
  std::cout << "output: " << result.artifacts.directory.string() << "\n";
  return 0;
}

struct EvalArgs {
  std::string hyp;
  std::string ref;
  std::string metrics = "bleu,rouge,distinct,self_bleu";
  std::size_t bleu_max_n = 4;
  std::size_t rouge_max_n = 2;
  std::size_t distinct_max_n = 2;
  std::size_t threads = 1;
  std::string smoothing = "none";
  double epsilon = 1e-9;
  std::string weighting = "one_hot";
  bool aligned = false;
  bool keep_case = false;
  std::string json_out;
};

int eval_command(const EvalArgs& a) {
  MetricConfig cfg;
  cfg.names.clear();
  for (std::size_t start = 0; start <= a.metrics.size();) {
    const auto comma = a.metrics.find(',', start);
    const auto end = comma == std::string::npos ? a.metrics.size() : comma;
    if (end > start) cfg.names.push_back(a.metrics.substr(start, end - start));
    start = end + 1;
  }
  cfg.bleu_max_n = a.bleu_max_n;
  cfg.rouge_max_n = a.rouge_max_n;
  cfg.distinct_max_n = a.distinct_max_n;
  cfg.threads = a.threads;
  cfg.bleu.smoothing = a.smoothing == "epsilon" ? Smoothing::kEpsilon : Smoothing::kNone;
  cfg.bleu.epsilon = a.epsilon;
  cfg.bleu.weighting = a.weighting == "geometric" ? BleuWeighting::kGeometric : BleuWeighting::kOneHot;
  cfg.pairing = a.aligned ? Pairing::kAligned : Pairing::kAllReferences;

  const LoadOptions load{.lowercase = !a.keep_case};
  const auto hyps = load_single(a.hyp, load);
  std::vector<TokenSequence> refs;
  EvalInputs in;
  in.hyps = std::span<const TokenSequence>(hyps);
  if (!a.ref.empty()) {
    refs = load_single(a.ref, load);
    in.refs = std::span<const TokenSequence>(refs);
  }
  in.dataset_id = a.ref.empty() ? a.hyp : a.ref;
  const MetricReport report = evaluate(cfg, in);
  std::cout << report.to_text();
  if (!a.json_out.empty()) {
    std::ofstream out(a.json_out, std::ios::binary);
    if (!out) throw IoError("cannot write " + a.json_out);
    out << report.to_json();
  }
  return 0;
}

int list_command() {
  const Registry& r = list_registry();
  std::cout << "datasets:\n";
  for (const auto& d : r.datasets) {
    std::cout << "  " << d.name << " ("
              << (d.structure == Structure::kSingle ? "single, unconditional" : "paired, conditional")
              << ") " << d.description << "\n";
  }
  std::cout << "models:\n";
  for (const auto& m : r.models) std::cout << "  " << m << "\n";
  std::cout << "metrics:\n";
  for (const auto& m : r.metrics) std::cout << "  " << m << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"genbench: text-generation experiments and evaluation"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "fit/load a model, generate, evaluate");
  std::string config_dir = "properties";
  std::string dataset_file, model_file;
  run->add_option("--config-dir", config_dir, "directory holding dataset/ and model/ YAML files");
  run->add_option("--dataset-config", dataset_file, "dataset YAML file");
  run->add_option("--model-config", model_file, "model YAML file");
  run->allow_extras();

  auto* eval = app.add_subcommand("eval", "score hypothesis text against references");
  EvalArgs ea;
  eval->add_option("--hyp", ea.hyp, "generated text, one sequence per line")->required();
  eval->add_option("--ref", ea.ref, "reference text, one sequence per line");
  eval->add_option("--metrics", ea.metrics, "comma-separated metric names");
  eval->add_option("--bleu-max-n", ea.bleu_max_n);
  eval->add_option("--rouge-max-n", ea.rouge_max_n);
  eval->add_option("--distinct-max-n", ea.distinct_max_n);
  eval->add_option("--threads", ea.threads);
  eval->add_option("--smoothing", ea.smoothing)->check(CLI::IsMember({"none", "epsilon"}));
  eval->add_option("--epsilon", ea.epsilon);
  eval->add_option("--weighting", ea.weighting)->check(CLI::IsMember({"one_hot", "geometric"}));
  eval->add_flag("--aligned", ea.aligned, "score line i of --hyp against line i of --ref only");
  eval->add_flag("--keep-case", ea.keep_case, "do not lowercase before tokenizing");
  eval->add_option("--json", ea.json_out, "also write the report as JSON");

  app.add_subcommand("list", "list registered datasets, models and metrics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      return run_command(run->remaining(), config_dir, dataset_file, model_file);
    }
    if (eval->parsed()) return eval_command(ea);
    return list_command();
  } catch (const genbench::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
