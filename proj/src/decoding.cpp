#include "genbench/decoding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "genbench/parallel.hpp"
#include "genbench/random.hpp"

namespace genbench {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::kGreedy: return "greedy";
    case Strategy::kTopK: return "topk";
    case Strategy::kBeam: return "beam";
  }
  return "greedy";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "greedy" || name == "greedy_search") return Strategy::kGreedy;
  if (name == "topk" || name == "top_k" || name == "topk_sampling") return Strategy::kTopK;
  if (name == "beam" || name == "beam_search") return Strategy::kBeam;
  throw ConfigError("unknown decoding_strategy '" + std::string(name) +
                    "' (known: greedy, topk, beam)");
}

void DecodeConfig::validate(std::size_t vocab_size) const {
  if (beam_size == 0) throw ConfigError("beam_size must be >= 1");
  if (top_k == 0) throw ConfigError("topk must be >= 1");
  if (max_len == 0) throw ConfigError("max_len must be >= 1");
  if (!(length_penalty >= 0.0)) throw ConfigError("length_penalty must be >= 0");
  if (strategy == Strategy::kTopK && top_k > vocab_size) {
    throw ConfigError("topk " + std::to_string(top_k) + " exceeds vocabulary size " +
                      std::to_string(vocab_size));
  }
}

double Hypothesis::score(double length_penalty) const {
  if (length_penalty == 0.0 || generated == 0) return logprob;
  return logprob / std::pow(static_cast<double>(generated), length_penalty);
}

namespace {

Hypothesis start(std::span<const TokenId> prompt) {
  Hypothesis h;
  h.ids.reserve(prompt.size() + 1);
  h.ids.push_back(special::kSos);
  h.ids.insert(h.ids.end(), prompt.begin(), prompt.end());
  return h;
}

void extend(Hypothesis& h, TokenId id, double logprob) {
  h.ids.push_back(id);
  h.logprob += logprob;
  ++h.generated;
  h.finished = id == special::kEos;
}

std::vector<double> step_logprobs(const LanguageModel& model, const Hypothesis& h) {
  auto lp = model.next_logprobs(h.ids);
  if (lp.size() != model.vocab_size()) {
    throw Error("model returned " + std::to_string(lp.size()) + " log-probabilities, expected " +
                std::to_string(model.vocab_size()));
  }
  return lp;
}

TokenId argmax(std::span<const double> lp) {
  // first maximum wins, i.e. the lowest id among ties
  return static_cast<TokenId>(std::max_element(lp.begin(), lp.end()) - lp.begin());
}

/// Better score first; equal scores fall back to the smaller id sequence.
bool ranks_before(double score_a, const IdSequence& a, double score_b, const IdSequence& b) {
  if (score_a != score_b) return score_a > score_b;
  return a < b;
}

}  // namespace

Hypothesis greedy(const LanguageModel& model, const DecodeConfig& cfg,
                  std::span<const TokenId> prompt) {
  cfg.validate(model.vocab_size());
  Hypothesis h = start(prompt);
  while (h.generated < cfg.max_len && !h.finished) {
    const auto lp = step_logprobs(model, h);
    const TokenId next = argmax(lp);
    extend(h, next, lp[next]);
  }
  return h;
}

Hypothesis top_k(const LanguageModel& model, const DecodeConfig& cfg, std::uint64_t seed,
                 std::span<const TokenId> prompt) {
  cfg.validate(model.vocab_size());
  if (cfg.top_k > model.vocab_size()) {
    throw ConfigError("topk " + std::to_string(cfg.top_k) + " exceeds vocabulary size " +
                      std::to_string(model.vocab_size()));
  }
  Rng rng(seed);
  Hypothesis h = start(prompt);
  std::vector<TokenId> order(model.vocab_size());
  std::vector<double> weights(cfg.top_k);
  while (h.generated < cfg.max_len && !h.finished) {
    const auto lp = step_logprobs(model, h);
    std::iota(order.begin(), order.end(), TokenId{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cfg.top_k),
                      order.end(), [&](TokenId a, TokenId b) {
                        if (lp[a] != lp[b]) return lp[a] > lp[b];
                        return a < b;
                      });
    double total = 0.0;
    for (std::size_t i = 0; i < cfg.top_k; ++i) {
      weights[i] = std::exp(lp[order[i]]);
      total += weights[i];
    }
    const double u = rng.uniform() * total;
    std::size_t pick = cfg.top_k - 1;
    double cumulative = 0.0;
    for (std::size_t i = 0; i < cfg.top_k; ++i) {
      cumulative += weights[i];
      if (u < cumulative) {
        pick = i;
        break;
      }
    }
    extend(h, order[pick], lp[order[pick]]);
  }
  return h;
}

Hypothesis beam(const LanguageModel& model, const DecodeConfig& cfg,
                std::span<const TokenId> prompt) {
  cfg.validate(model.vocab_size());
  const double penalty = cfg.length_penalty;
  const std::size_t vocab = model.vocab_size();

  struct Candidate {
    std::size_t parent;
    TokenId token;
    double logprob;
    double score;
  };

  std::vector<Hypothesis> live{start(prompt)};
  std::vector<Hypothesis> finished;
  std::vector<Candidate> candidates;

  const auto best_of = [&](const std::vector<Hypothesis>& pool) {
    return std::min_element(pool.begin(), pool.end(), [&](const Hypothesis& a, const Hypothesis& b) {
      return ranks_before(a.score(penalty), a.ids, b.score(penalty), b.ids);
    });
  };

  for (std::size_t step = 0; step < cfg.max_len && !live.empty(); ++step) {
    candidates.clear();
    candidates.reserve(live.size() * vocab);
    const auto new_len = static_cast<double>(live.front().generated + 1);
    const double norm = penalty == 0.0 ? 1.0 : std::pow(new_len, penalty);
    for (std::size_t p = 0; p < live.size(); ++p) {
      const auto lp = step_logprobs(model, live[p]);
      for (TokenId t = 0; t < vocab; ++t) {
        const double total = live[p].logprob + lp[t];
        candidates.push_back({p, t, lp[t], penalty == 0.0 ? total : total / norm});
      }
    }
    // live hypotheses all share one length, so (parent ids, token) order is
    // the lexicographic order of the extended sequences
    const std::size_t keep = std::min(cfg.beam_size, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), [&](const Candidate& a, const Candidate& b) {
                        if (a.score != b.score) return a.score > b.score;
                        if (a.parent != b.parent) return live[a.parent].ids < live[b.parent].ids;
                        return a.token < b.token;
                      });
    std::vector<Hypothesis> next;
    next.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
      Hypothesis h = live[candidates[i].parent];
      extend(h, candidates[i].token, candidates[i].logprob);
      (h.finished ? finished : next).push_back(std::move(h));
    }
    live = std::move(next);

    // Without normalization extending never raises a score, so once the best
    // finished hypothesis is at least as good as every live one it is final.
    if (penalty == 0.0 && !finished.empty() && !live.empty()) {
      const Hypothesis& best_done = *best_of(finished);
      const Hypothesis& best_live = *best_of(live);
      if (best_done.score(0.0) >= best_live.score(0.0)) break;
    }
  }
  if (!finished.empty()) return *best_of(finished);
  return *best_of(live);
}

Hypothesis decode(const LanguageModel& model, const DecodeConfig& cfg, std::uint64_t seed,
                  std::span<const TokenId> prompt) {
  switch (cfg.strategy) {
    case Strategy::kGreedy: return greedy(model, cfg, prompt);
    case Strategy::kTopK: return top_k(model, cfg, seed, prompt);
    case Strategy::kBeam: return beam(model, cfg, prompt);
  }
  return greedy(model, cfg, prompt);
}

std::vector<Hypothesis> generate(const LanguageModel& model, const DecodeConfig& cfg,
                                 std::size_t count) {
  cfg.validate(model.vocab_size());
  if (count == 0) return {};
  if (cfg.strategy != Strategy::kTopK) {
    return std::vector<Hypothesis>(count, decode(model, cfg, cfg.seed));
  }
  std::vector<Hypothesis> out(count);
  parallel_for(count, cfg.threads, [&](std::size_t i) {
    out[i] = top_k(model, cfg, derive_seed(cfg.seed, i));
  });
  return out;
}

std::vector<Hypothesis> generate_for(const LanguageModel& model, const DecodeConfig& cfg,
                                     std::span<const IdSequence> prompts) {
  cfg.validate(model.vocab_size());
  std::vector<Hypothesis> out(prompts.size());
  parallel_for(prompts.size(), cfg.threads, [&](std::size_t i) {
    out[i] = decode(model, cfg, derive_seed(cfg.seed, i), prompts[i]);
  });
  return out;
}

std::vector<TokenSequence> to_text(const Vocabulary& vocab, std::span<const Hypothesis> hyps) {
  std::vector<TokenSequence> out;
  out.reserve(hyps.size());
  for (const auto& h : hyps) {
    const auto generated = std::span<const TokenId>(h.ids).last(h.generated);
    out.push_back(decode(vocab, generated));
  }
  return out;
}

std::vector<IdSequence> LanguageModel::generate(const DecodeConfig& cfg, std::size_t count) const {
  std::vector<IdSequence> out;
  for (auto& h : genbench::generate(*this, cfg, count)) out.push_back(std::move(h.ids));
  return out;
}

}  // namespace genbench
