#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <unordered_map>
#include <vector>

#include "genbench/model.hpp"

namespace genbench {

struct IdSequenceHash {
  std::size_t operator()(std::span<const TokenId> ids) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (TokenId id : ids) {
      h ^= id;
      h *= 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
  std::size_t operator()(const IdSequence& ids) const noexcept {
    return (*this)(std::span<const TokenId>(ids));
  }
};

/// Interpolated add-delta n-gram model:
///
///   p(t | h) = sum_k lambda_k * (c(h_k, t) + delta) / (c(h_k) + delta * V)
///
/// where h_k is the last k ids of the prefix, k = 0..order-1. A context the
/// prefix is too short to supply counts as unseen.
class NGramLM final : public LanguageModel {
 public:
  static constexpr std::uint32_t kFormatVersion = 1;

  struct Params {
    std::size_t order = 3;
    double delta = 0.01;
    /// One weight per context length 0..order-1; empty means uniform.
    std::vector<double> lambdas;
  };

  /// Counts every (context, token) pair of the SOS-framed corpus.
  /// Throws ConfigError for order 0, delta <= 0, bad lambdas, or an empty
  /// corpus; DataError when a sequence is not SOS-framed or holds an id >= vocab_size.
  static NGramLM fit(std::span<const IdSequence> corpus, std::size_t vocab_size,
                     const Params& params);

  /// Throws CheckpointError on a corrupt, truncated or foreign file.
  static NGramLM load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
  std::vector<std::uint8_t> serialize() const;
  static NGramLM deserialize(std::span<const std::uint8_t> bytes);

  std::size_t vocab_size() const override { return vocab_size_; }
  std::vector<double> next_logprobs(std::span<const TokenId> prefix) const override;

  std::size_t order() const { return order_; }
  double delta() const { return delta_; }
  std::span<const double> lambdas() const { return lambdas_; }

  /// Raw count of `token` after `context` (context length < order).
  std::uint64_t count(std::span<const TokenId> context, TokenId token) const;
  std::uint64_t context_total(std::span<const TokenId> context) const;

 private:
  struct Row {
    std::uint64_t total = 0;
    std::unordered_map<TokenId, std::uint64_t> next;
  };
  using Table = std::unordered_map<IdSequence, Row, IdSequenceHash>;

  NGramLM(std::size_t order, std::size_t vocab_size, double delta, std::vector<double> lambdas);
  const Row* find_row(std::span<const TokenId> context) const;

  std::size_t order_;
  std::size_t vocab_size_;
  double delta_;
  std::vector<double> lambdas_;
  std::vector<Table> tables_;  // indexed by context length
};

}  // namespace genbench
