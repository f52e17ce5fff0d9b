#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "genbench/corpus.hpp"
#include "genbench/model.hpp"

namespace genbench {

enum class Strategy { kGreedy, kTopK, kBeam };

std::string_view to_string(Strategy s);
/// Accepts "greedy", "topk"/"top_k", "beam"/"beam_search". Throws ConfigError otherwise.
Strategy parse_strategy(std::string_view name);

struct DecodeConfig {
  Strategy strategy = Strategy::kGreedy;
  std::size_t beam_size = 5;
  std::size_t top_k = 10;
  /// Upper bound on generated tokens after SOS (and any prompt), EOS included.
  std::size_t max_len = 30;
  std::uint64_t seed = 0;
  /// Beam scores are logprob / len^length_penalty; 0 disables.
  double length_penalty = 0.0;
  /// Workers used when generating many samples.
  std::size_t threads = 1;

  /// Throws ConfigError on a zero beam/k/max_len, negative penalty, or k > vocab_size.
  void validate(std::size_t vocab_size) const;
};

struct Hypothesis {
  IdSequence ids;        // SOS, then the prompt, then generated ids
  double logprob = 0.0;  // of the generated ids only
  bool finished = false;
  std::size_t generated = 0;

  double score(double length_penalty) const;
};

/// Argmax at every step; ties go to the lowest id.
Hypothesis greedy(const LanguageModel& model, const DecodeConfig& cfg,
                  std::span<const TokenId> prompt = {});

/// Samples from the k most probable tokens (boundary ties keep lower ids),
/// renormalized, with an Rng seeded by `seed`.
Hypothesis top_k(const LanguageModel& model, const DecodeConfig& cfg, std::uint64_t seed,
                 std::span<const TokenId> prompt = {});

/// Keeps the beam_size best one-token extensions per step; EOS extensions go
/// to a finished pool. Stops once no live hypothesis can overtake the best
/// finished one (length_penalty == 0), when no live hypotheses remain, or at
/// max_len. Returns the best finished hypothesis, else the best live one.
Hypothesis beam(const LanguageModel& model, const DecodeConfig& cfg,
                std::span<const TokenId> prompt = {});

/// Dispatches on cfg.strategy.
Hypothesis decode(const LanguageModel& model, const DecodeConfig& cfg, std::uint64_t seed,
                  std::span<const TokenId> prompt = {});

/// `count` samples. Top-k sample i uses derive_seed(cfg.seed, i); greedy and
/// beam are deterministic so every sample is the same sequence.
std::vector<Hypothesis> generate(const LanguageModel& model, const DecodeConfig& cfg,
                                 std::size_t count);

/// One hypothesis per prompt, prompt i seeded with derive_seed(cfg.seed, i).
std::vector<Hypothesis> generate_for(const LanguageModel& model, const DecodeConfig& cfg,
                                     std::span<const IdSequence> prompts);

/// Generated ids of each hypothesis (prompt excluded) mapped to tokens, specials stripped.
std::vector<TokenSequence> to_text(const Vocabulary& vocab, std::span<const Hypothesis> hyps);

}  // namespace genbench
