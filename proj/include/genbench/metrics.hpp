#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "genbench/corpus.hpp"
#include "genbench/model.hpp"

namespace genbench {

/// Counted bag of the contiguous n-grams of one sequence.
struct NGramMultiset {
  std::size_t n = 1;
  std::map<TokenSequence, std::size_t> counts;

  std::size_t total() const;
  std::size_t count(const TokenSequence& gram) const;
};

/// Sliding-window n-gram counts; empty when the sequence is shorter than n.
/// Throws ConfigError for n == 0.
NGramMultiset ngram_counts(std::span<const Token> seq, std::size_t n);

enum class Smoothing { kNone, kEpsilon };

/// kOneHot scores only order n, e.g. BLEU-4 uses weights (0,0,0,1).
/// kGeometric is the classic uniform geometric mean over orders 1..n.
enum class BleuWeighting { kOneHot, kGeometric };

struct BleuOptions {
  Smoothing smoothing = Smoothing::kNone;
  /// Replaces a zero match count when smoothing == kEpsilon.
  double epsilon = 1e-9;
  BleuWeighting weighting = BleuWeighting::kOneHot;
};

/// Sentence BLEU against a multi-reference set: BP * p_n with clipped
/// precision and the brevity penalty min(1, exp(1 - r/c)) where r is the
/// reference length closest to c (ties toward the shorter one). An empty
/// hypothesis, or one shorter than n, scores 0. Throws MetricError when refs is empty.
double bleu_n(std::span<const Token> hyp, std::span<const TokenSequence> refs, std::size_t n,
              const BleuOptions& options = {});

/// F1 of clipped n-gram overlap, maximized over references.
double rouge_n(std::span<const Token> hyp, std::span<const TokenSequence> refs, std::size_t n);

/// Length of the longest common subsequence.
std::size_t lcs_length(std::span<const Token> a, std::span<const Token> b);

/// LCS-based F1, maximized over references.
double rouge_l(std::span<const Token> hyp, std::span<const TokenSequence> refs);

/// Distinct n-grams over total n-grams, pooled across all hypotheses; 0 when
/// no hypothesis reaches length n.
double distinct_n(std::span<const TokenSequence> hyps, std::size_t n);

// ---------------------------------------------------------------------------
// Corpus-level drivers

/// How hypotheses meet references at corpus level. kAllReferences scores each
/// hypothesis against the whole reference set (unconditional generation);
/// kAligned scores hypothesis i against reference i only (conditional tasks).
enum class Pairing { kAllReferences, kAligned };

struct SelfBleuSample {
  std::size_t size = 0;
  std::uint64_t seed = 0;
};

struct MetricConfig {
  std::vector<std::string> names{"bleu"};
  std::size_t bleu_max_n = 4;
  std::size_t rouge_max_n = 2;
  std::size_t distinct_max_n = 2;
  BleuOptions bleu;
  std::optional<SelfBleuSample> self_bleu_sample;
  Pairing pairing = Pairing::kAllReferences;
  std::size_t threads = 1;

  /// Throws ConfigError on unknown names, zero orders or a non-positive epsilon.
  void validate() const;
  /// Stable textual form used for the report digest.
  std::string canonical() const;
};

std::span<const std::string_view> known_metrics();

/// Mean of per-hypothesis bleu_n. Reference n-gram tables are built once and
/// shared; per-hypothesis scores land in fixed slots and are summed in sorted
/// order, so the result is bit-identical for any thread count and any
/// ordering of hypotheses or references. Throws MetricError on empty input.
double corpus_bleu(std::span<const TokenSequence> hyps, std::span<const TokenSequence> refs,
                   std::size_t n, const MetricConfig& cfg);

/// Mean over i of bleu_n(hyps[i], hyps without i). With cfg.self_bleu_sample
/// each hypothesis is scored against a seeded subsample of the others.
/// Throws MetricError for fewer than two hypotheses.
double self_bleu(std::span<const TokenSequence> hyps, std::size_t n, const MetricConfig& cfg);

double corpus_rouge_n(std::span<const TokenSequence> hyps, std::span<const TokenSequence> refs,
                      std::size_t n, const MetricConfig& cfg);
double corpus_rouge_l(std::span<const TokenSequence> hyps, std::span<const TokenSequence> refs,
                      const MetricConfig& cfg);

struct NllResult {
  double nll_token = 0.0;
  double nll_seq = 0.0;
  double ppl = 1.0;
  /// Set when the model gave an observed token zero probability.
  bool infinite = false;
};

/// Natural-log NLL of SOS-framed sequences: SOS conditions but is not
/// scored, EOS is. ppl = exp(nll_token).
NllResult nll_ppl(const LanguageModel& model, std::span<const IdSequence> data,
                  std::size_t threads = 1);

// ---------------------------------------------------------------------------
// Report

struct MetricReport {
  std::vector<std::pair<std::string, double>> scores;
  std::string dataset_id;
  std::size_t hypothesis_count = 0;
  std::string config_digest;
  std::vector<std::string> flags;

  std::optional<double> get(std::string_view key) const;
  /// "key: value" lines, scores first, then metadata.
  std::string to_text() const;
  /// Pretty-printed JSON object with "scores" and "meta".
  std::string to_json() const;
};

struct EvalInputs {
  std::optional<std::span<const TokenSequence>> hyps;
  std::optional<std::span<const TokenSequence>> refs;
  const LanguageModel* model = nullptr;
  std::optional<std::span<const IdSequence>> data;
  std::string dataset_id;
};

/// Runs every metric named in cfg. Throws ConfigError naming the metric and
/// the missing input when one is requested without what it needs.
MetricReport evaluate(const MetricConfig& cfg, const EvalInputs& inputs);

/// 16 hex digits of FNV-1a 64.
std::string digest(std::string_view text);

/// Shortest decimal that round-trips the double.
std::string format_double(double v);

}  // namespace genbench
