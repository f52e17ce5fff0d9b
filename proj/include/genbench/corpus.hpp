#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "genbench/error.hpp"
#include "genbench/random.hpp"

namespace genbench {

using Token = std::string;
using TokenId = std::uint32_t;
using TokenSequence = std::vector<Token>;
using IdSequence = std::vector<TokenId>;

/// One line of a source file aligned with the same line of its target file.
struct PairedExample {
  TokenSequence source;
  TokenSequence target;
  bool operator==(const PairedExample&) const = default;
};

namespace special {
inline constexpr TokenId kPad = 0;
inline constexpr TokenId kUnk = 1;
inline constexpr TokenId kSos = 2;
inline constexpr TokenId kEos = 3;
inline constexpr TokenId kCount = 4;
inline constexpr std::string_view kSurface[kCount] = {"<pad>", "<unk>", "<sos>", "<eos>"};
}  // namespace special

inline bool is_special(TokenId id) { return id < special::kCount; }

/// Bidirectional token <-> id map. Ids 0-3 are always PAD, UNK, SOS, EOS;
/// ordinary tokens occupy the dense range [4, size).
class Vocabulary {
 public:
  Vocabulary();
  /// Specials followed by `tokens` in order. Duplicates and special
  /// surfaces are skipped.
  explicit Vocabulary(std::span<const Token> tokens);

  std::size_t size() const { return token_of_.size(); }
  std::optional<TokenId> find(std::string_view token) const;
  /// Id of `token`, or UNK when absent.
  TokenId id_of(std::string_view token) const;
  /// Throws RangeError when id >= size().
  const Token& token_of(TokenId id) const;
  std::span<const Token> tokens() const { return token_of_; }

  bool operator==(const Vocabulary& other) const { return token_of_ == other.token_of_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  std::vector<Token> token_of_;
  std::unordered_map<Token, TokenId, Hash, std::equal_to<>> id_of_;
};

// ---------------------------------------------------------------------------
// Text normalization

/// Splits on runs of Unicode whitespace, optionally lowercasing first.
/// Throws DecodeError on malformed UTF-8.
TokenSequence tokenize(std::string_view text, bool lowercase);

/// Tokens joined with single spaces.
std::string join(std::span<const Token> tokens);

/// Byte offset of the first malformed UTF-8 sequence, if any.
std::optional<std::size_t> find_invalid_utf8(std::string_view text);

// ---------------------------------------------------------------------------
// Vocabulary and id mapping

/// Counts every token, keeps those with frequency >= min_freq, and truncates
/// to max_size entries (specials included) by descending frequency; equal
/// frequencies keep the token seen first. Throws ConfigError when
/// max_size < 4, min_freq == 0 or sequences is empty.
Vocabulary build_vocabulary(std::span<const TokenSequence> sequences,
                            std::optional<std::size_t> max_size, std::size_t min_freq);

IdSequence encode(const Vocabulary& vocab, std::span<const Token> seq, bool add_bos_eos);

/// Drops special ids. Throws RangeError for ids outside the vocabulary.
TokenSequence decode(const Vocabulary& vocab, std::span<const TokenId> ids);

// ---------------------------------------------------------------------------
// Files

struct LoadOptions {
  bool lowercase = true;
};

/// Raw lines of a UTF-8 text file; LF or CRLF. Throws IoError / DecodeError
/// (the latter names the 1-based line number).
std::vector<std::string> read_lines(const std::filesystem::path& path);

std::vector<TokenSequence> load_single(const std::filesystem::path& path,
                                       const LoadOptions& options = {});

/// Throws AlignmentError when the files have different line counts.
std::vector<PairedExample> load_paired(const std::filesystem::path& src_path,
                                       const std::filesystem::path& tgt_path,
                                       const LoadOptions& options = {});

// ---------------------------------------------------------------------------
// Splitting

struct SplitRatio {
  double train = 0.8;
  double valid = 0.1;
  double test = 0.1;

  /// Throws ConfigError unless each fraction is in [0,1] and they sum to 1.
  void validate() const;
  bool operator==(const SplitRatio&) const = default;
};

template <typename T>
struct Split {
  std::vector<T> train;
  std::vector<T> valid;
  std::vector<T> test;
};

/// Partition sizes for n items: floor, floor, remainder.
struct SplitSizes {
  std::size_t train, valid, test;
};
SplitSizes split_sizes(std::size_t n, const SplitRatio& ratio);

/// Seeded Fisher-Yates permutation of [0, n).
std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed);

template <typename T>
Split<T> split(std::span<const T> data, const SplitRatio& ratio, std::uint64_t seed,
               bool shuffle) {
  const SplitSizes sizes = split_sizes(data.size(), ratio);
  std::vector<std::size_t> order(data.size());
  if (shuffle) {
    order = seeded_permutation(data.size(), seed);
  } else {
    std::iota(order.begin(), order.end(), std::size_t{0});
  }
  Split<T> out;
  out.train.reserve(sizes.train);
  out.valid.reserve(sizes.valid);
  out.test.reserve(sizes.test);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const T& item = data[order[i]];
    if (i < sizes.train) {
      out.train.push_back(item);
    } else if (i < sizes.train + sizes.valid) {
      out.valid.push_back(item);
    } else {
      out.test.push_back(item);
    }
  }
  return out;
}

template <typename T>
Split<T> split(const std::vector<T>& data, const SplitRatio& ratio, std::uint64_t seed,
               bool shuffle) {
  return split(std::span<const T>(data), ratio, seed, shuffle);
}

// ---------------------------------------------------------------------------
// Batching

/// Rows of token ids padded with PAD to the longest row of the group.
struct Batch {
  std::size_t rows = 0;
  std::size_t width = 0;
  std::vector<TokenId> ids;  // row-major rows x width
  std::vector<std::size_t> lengths;

  TokenId at(std::size_t row, std::size_t col) const { return ids[row * width + col]; }
  std::span<const TokenId> row(std::size_t r) const {
    return std::span<const TokenId>(ids).subspan(r * width, lengths[r]);
  }
};

/// Consecutive groups of at most batch_size sequences, order preserved; the
/// last batch may be short. Throws ConfigError when batch_size == 0.
std::vector<Batch> batches(std::span<const IdSequence> data, std::size_t batch_size);

}  // namespace genbench
