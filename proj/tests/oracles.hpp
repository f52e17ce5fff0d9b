#pragma once

// Brute-force reference computations and toy models shared by the unit and
// acceptance suites. Nothing here calls into the metric implementations.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "genbench/corpus.hpp"
#include "genbench/decoding.hpp"
#include "genbench/model.hpp"
#include "genbench/ngram_lm.hpp"
#include "genbench/random.hpp"

namespace oracle {

using genbench::IdSequence;
using genbench::Token;
using genbench::TokenId;
using genbench::TokenSequence;

inline std::vector<TokenSequence> windows(const TokenSequence& seq, std::size_t n) {
  std::vector<TokenSequence> out;
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    out.emplace_back(seq.begin() + static_cast<long>(i), seq.begin() + static_cast<long>(i + n));
  }
  return out;
}

inline std::size_t occurrences(const TokenSequence& seq, const TokenSequence& gram) {
  std::size_t c = 0;
  for (const auto& w : windows(seq, gram.size())) c += (w == gram);
  return c;
}

/// Clipped n-gram matches by scanning every window of every sequence.
inline std::size_t clipped_matches(const TokenSequence& hyp, const std::vector<TokenSequence>& refs,
                                   std::size_t n) {
  std::vector<TokenSequence> distinct = windows(hyp, n);
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::size_t matches = 0;
  for (const auto& g : distinct) {
    std::size_t ref_max = 0;
    for (const auto& r : refs) ref_max = std::max(ref_max, occurrences(r, g));
    matches += std::min(occurrences(hyp, g), ref_max);
  }
  return matches;
}

inline double bleu(const TokenSequence& hyp, const std::vector<TokenSequence>& refs, std::size_t n) {
  if (hyp.size() < n || hyp.empty()) return 0.0;
  std::size_t best_r = refs.front().size();
  for (const auto& r : refs) {
    const auto d = [&](std::size_t len) {
      return len > hyp.size() ? len - hyp.size() : hyp.size() - len;
    };
    if (d(r.size()) < d(best_r) || (d(r.size()) == d(best_r) && r.size() < best_r)) best_r = r.size();
  }
  const double c = static_cast<double>(hyp.size());
  const double bp = hyp.size() >= best_r ? 1.0 : std::exp(1.0 - static_cast<double>(best_r) / c);
  return bp * static_cast<double>(clipped_matches(hyp, refs, n)) /
         static_cast<double>(hyp.size() - n + 1);
}

inline double f1(double p, double r) { return (p + r) == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

inline double rouge_n(const TokenSequence& hyp, const std::vector<TokenSequence>& refs, std::size_t n) {
  double best = 0.0;
  for (const auto& r : refs) {
    if (hyp.size() < n || r.size() < n) continue;
    const double m = static_cast<double>(clipped_matches(hyp, {r}, n));
    best = std::max(best, f1(m / static_cast<double>(hyp.size() - n + 1),
                             m / static_cast<double>(r.size() - n + 1)));
  }
  return best;
}

inline double distinct(const std::vector<TokenSequence>& hyps, std::size_t n) {
  std::vector<TokenSequence> all;
  for (const auto& h : hyps) {
    for (auto& w : windows(h, n)) all.push_back(std::move(w));
  }
  if (all.empty()) return 0.0;
  const double total = static_cast<double>(all.size());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return static_cast<double>(all.size()) / total;
}

inline bool is_subsequence(const TokenSequence& sub, const TokenSequence& seq) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < seq.size() && j < sub.size(); ++i) j += (seq[i] == sub[j]);
  return j == sub.size();
}

/// Longest common subsequence by trying every subset of `a`.
inline std::size_t lcs_exhaustive(const TokenSequence& a, const TokenSequence& b) {
  std::size_t best = 0;
  for (std::uint32_t mask = 0; mask < (1u << a.size()); ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    if (size <= best) continue;
    TokenSequence sub;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (mask & (1u << i)) sub.push_back(a[i]);
    }
    if (is_subsequence(sub, b)) best = size;
  }
  return best;
}

inline double rouge_l(const TokenSequence& hyp, const std::vector<TokenSequence>& refs) {
  double best = 0.0;
  for (const auto& r : refs) {
    if (hyp.empty() || r.empty()) continue;
    const double l = static_cast<double>(lcs_exhaustive(hyp, r));
    best = std::max(best, f1(l / static_cast<double>(hyp.size()), l / static_cast<double>(r.size())));
  }
  return best;
}

inline double self_bleu(const std::vector<TokenSequence>& hyps, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    std::vector<TokenSequence> others;
    for (std::size_t j = 0; j < hyps.size(); ++j) {
      if (j != i) others.push_back(hyps[j]);
    }
    sum += bleu(hyps[i], others, n);
  }
  return sum / static_cast<double>(hyps.size());
}

inline TokenSequence random_sentence(std::mt19937_64& rng, std::size_t vocab, std::size_t max_len,
                                     std::size_t min_len = 0) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<std::size_t> word(0, vocab - 1);
  TokenSequence out(len(rng));
  for (auto& t : out) t = "w" + std::to_string(word(rng));
  return out;
}

// ---------------------------------------------------------------------------
// Toy models

/// Explicit next-token probabilities per prefix; unlisted prefixes put all mass on EOS.
class TableModel : public genbench::LanguageModel {
 public:
  explicit TableModel(std::size_t vocab) : vocab_(vocab) {}

  void set(IdSequence prefix, std::map<TokenId, double> probs) {
    std::vector<double> p(vocab_, 0.0);
    for (auto [id, v] : probs) p[id] = v;
    table_[std::move(prefix)] = std::move(p);
  }

  std::size_t vocab_size() const override { return vocab_; }
  std::vector<double> next_logprobs(std::span<const TokenId> prefix) const override {
    std::vector<double> lp(vocab_, -INFINITY);
    auto it = table_.find(IdSequence(prefix.begin(), prefix.end()));
    if (it == table_.end()) {
      lp[genbench::special::kEos] = 0.0;
      return lp;
    }
    for (std::size_t i = 0; i < vocab_; ++i) lp[i] = std::log(it->second[i]);
    return lp;
  }

 private:
  std::size_t vocab_;
  std::map<IdSequence, std::vector<double>> table_;
};

/// Every prefix gets its own strictly positive pseudo-random distribution.
class HashedModel : public genbench::LanguageModel {
 public:
  HashedModel(std::size_t vocab, std::uint64_t seed) : vocab_(vocab), seed_(seed) {}

  std::size_t vocab_size() const override { return vocab_; }
  std::vector<double> next_logprobs(std::span<const TokenId> prefix) const override {
    std::uint64_t h = seed_;
    for (TokenId id : prefix) h = genbench::derive_seed(h, id);
    genbench::Rng rng(h);
    std::vector<double> w(vocab_);
    double total = 0.0;
    for (auto& x : w) {
      x = 0.05 + rng.uniform();
      total += x;
    }
    for (auto& x : w) x = std::log(x / total);
    return w;
  }

 private:
  std::size_t vocab_;
  std::uint64_t seed_;
};

/// Uniform over `vocab` ids.
class UniformModel : public genbench::LanguageModel {
 public:
  explicit UniformModel(std::size_t vocab) : vocab_(vocab) {}
  std::size_t vocab_size() const override { return vocab_; }
  std::vector<double> next_logprobs(std::span<const TokenId>) const override {
    return std::vector<double>(vocab_, -std::log(static_cast<double>(vocab_)));
  }

 private:
  std::size_t vocab_;
};

/// n-gram model fit on a random SOS/EOS-framed corpus.
inline genbench::NGramLM random_ngram_model(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t vocab = 6 + rng() % 10;
  const std::size_t order = 1 + rng() % 3;
  std::vector<IdSequence> corpus(3 + rng() % 20);
  for (auto& s : corpus) {
    s.push_back(genbench::special::kSos);
    const std::size_t len = rng() % 8;
    for (std::size_t i = 0; i < len; ++i) {
      s.push_back(static_cast<TokenId>(4 + rng() % (vocab - 4)));
    }
    s.push_back(genbench::special::kEos);
  }
  genbench::NGramLM::Params p;
  p.order = order;
  p.delta = 0.001 + 0.5 * static_cast<double>(rng() % 1000) / 1000.0;
  return genbench::NGramLM::fit(corpus, vocab, p);
}

struct Scored {
  IdSequence ids;
  double logprob = -INFINITY;
};

/// Highest-probability finished sequence of at most max_len generated ids,
/// or, if nothing can finish, the best unfinished sequence of exactly max_len.
/// Ties go to the lexicographically smaller id sequence.
inline Scored best_sequence(const genbench::LanguageModel& model, std::size_t max_len) {
  Scored best_finished, best_open;
  const auto better = [](const Scored& cand, const Scored& cur) {
    if (cand.logprob != cur.logprob) return cand.logprob > cur.logprob;
    return cur.ids.empty() || cand.ids < cur.ids;
  };
  std::function<void(IdSequence&)> walk = [&](IdSequence& ids) {
    const std::size_t generated = ids.size() - 1;
    if (generated > 0 && ids.back() == genbench::special::kEos) {
      Scored s{ids, model.sequence_logprob(ids)};
      if (better(s, best_finished)) best_finished = s;
      return;
    }
    if (generated == max_len) {
      Scored s{ids, model.sequence_logprob(ids)};
      if (better(s, best_open)) best_open = s;
      return;
    }
    for (TokenId t = 0; t < model.vocab_size(); ++t) {
      ids.push_back(t);
      walk(ids);
      ids.pop_back();
    }
  };
  IdSequence start{genbench::special::kSos};
  walk(start);
  return best_finished.ids.empty() ? best_open : best_finished;
}

}  // namespace oracle
