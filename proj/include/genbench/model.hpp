#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "genbench/corpus.hpp"

namespace genbench {

struct DecodeConfig;

/// What every model plugged into the toolkit provides: a next-token
/// distribution, a loss over a batch, and text generation.
///
/// next_logprobs is the only pure virtual; forward and generate are
/// expressed through it and may be overridden.
class LanguageModel {
 public:
  virtual ~LanguageModel() = default;

  virtual std::size_t vocab_size() const = 0;

  /// Natural-log probabilities of every token id following `prefix`.
  /// Exactly vocab_size() entries whose exponentials sum to 1.
  virtual std::vector<double> next_logprobs(std::span<const TokenId> prefix) const = 0;

  /// Sum of next-token log-probabilities of seq[1..] given the preceding ids.
  /// seq[0] (normally SOS) conditions but is not scored.
  virtual double sequence_logprob(std::span<const TokenId> seq) const;

  /// Mean per-token negative log-likelihood over the rows of `batch`.
  virtual double forward(const Batch& batch) const;

  /// `count` id sequences (SOS-framed) decoded per `cfg`; defined in decoding.cpp.
  virtual std::vector<IdSequence> generate(const DecodeConfig& cfg, std::size_t count) const;
};

}  // namespace genbench
