#include "genbench/metrics.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "genbench/parallel.hpp"
#include "genbench/random.hpp"

namespace genbench {

// ---------------------------------------------------------------------------
// Public n-gram multiset

std::size_t NGramMultiset::total() const {
  std::size_t t = 0;
  for (const auto& [gram, c] : counts) t += c;
  return t;
}

std::size_t NGramMultiset::count(const TokenSequence& gram) const {
  auto it = counts.find(gram);
  return it == counts.end() ? 0 : it->second;
}

NGramMultiset ngram_counts(std::span<const Token> seq, std::size_t n) {
  if (n == 0) throw ConfigError("n-gram order must be >= 1");
  NGramMultiset out{n, {}};
  for (std::size_t i = 0; i + n <= seq.size(); ++i) {
    ++out.counts[TokenSequence(seq.begin() + static_cast<std::ptrdiff_t>(i),
                               seq.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return out;
}

namespace {

// ---------------------------------------------------------------------------
// Interned representation: every distinct token becomes one char32_t so an
// n-gram is a short u32string (inline up to three tokens).

using Ids = std::u32string;
using GramCounts = std::unordered_map<Ids, std::uint32_t>;

class Interner {
 public:
  Ids intern(std::span<const Token> seq) {
    Ids out;
    out.reserve(seq.size());
    for (const auto& tok : seq) {
      auto [it, inserted] = ids_.try_emplace(tok, static_cast<char32_t>(ids_.size()));
      out.push_back(it->second);
    }
    return out;
  }
  std::vector<Ids> intern_all(std::span<const TokenSequence> seqs) {
    std::vector<Ids> out;
    out.reserve(seqs.size());
    for (const auto& s : seqs) out.push_back(intern(s));
    return out;
  }

 private:
  std::unordered_map<std::string_view, char32_t> ids_;
};

std::size_t gram_total(std::size_t len, std::size_t n) { return len >= n ? len - n + 1 : 0; }

GramCounts count_grams(const Ids& seq, std::size_t n) {
  GramCounts out;
  if (seq.size() < n) return out;
  out.reserve(seq.size() - n + 1);
  for (std::size_t i = 0; i + n <= seq.size(); ++i) ++out[seq.substr(i, n)];
  return out;
}

/// Closest reference length to c; ties go to the shorter length. `sorted` is non-empty.
std::size_t closest_length(std::span<const std::size_t> sorted, std::size_t c) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), c);
  if (it == sorted.end()) return sorted.back();
  if (*it == c || it == sorted.begin()) return *it;
  const std::size_t above = *it;
  const std::size_t below = *(it - 1);
  return (c - below) <= (above - c) ? below : above;
}

double brevity_penalty(std::size_t c, std::size_t r) {
  if (c >= r) return 1.0;
  return std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c));
}

struct Overlap {
  std::size_t matches = 0;
  std::size_t total = 0;
};

/// Clipped matches of hyp's n-grams against max_count(gram).
template <typename MaxCount>
Overlap clipped_overlap(const Ids& hyp, std::size_t n, MaxCount&& max_count) {
  Overlap o;
  o.total = gram_total(hyp.size(), n);
  for (const auto& [gram, c] : count_grams(hyp, n)) {
    o.matches += std::min<std::size_t>(c, max_count(gram));
  }
  return o;
}

double precision(const Overlap& o, const BleuOptions& opt) {
  double m = static_cast<double>(o.matches);
  if (o.matches == 0 && opt.smoothing == Smoothing::kEpsilon) m = opt.epsilon;
  return m / static_cast<double>(o.total);
}

/// BLEU of one interned hypothesis. overlap(k) returns the clipped overlap at order k.
template <typename OverlapAt>
double sentence_bleu(std::size_t hyp_len, std::size_t ref_len, std::size_t n,
                     const BleuOptions& opt, OverlapAt&& overlap) {
  if (hyp_len < n || hyp_len == 0) return 0.0;
  const double bp = brevity_penalty(hyp_len, ref_len);
  if (opt.weighting == BleuWeighting::kOneHot) {
    return bp * precision(overlap(n), opt);
  }
  double log_sum = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double p = precision(overlap(k), opt);
    if (p == 0.0) return 0.0;
    log_sum += std::log(p);
  }
  return bp * std::exp(log_sum / static_cast<double>(n));
}

std::size_t lowest_order(std::size_t n, const BleuOptions& opt) {
  return opt.weighting == BleuWeighting::kOneHot ? n : 1;
}

/// Per-order maximum reference counts plus the sorted reference lengths.
struct ReferenceTable {
  ReferenceTable(std::span<const Ids> refs, std::size_t n, const BleuOptions& opt)
      : max_counts(n + 1) {
    for (const auto& r : refs) lengths.push_back(r.size());
    std::sort(lengths.begin(), lengths.end());
    for (std::size_t k = lowest_order(n, opt); k <= n; ++k) {
      for (const auto& r : refs) {
        for (const auto& [gram, c] : count_grams(r, k)) {
          auto& slot = max_counts[k][gram];
          slot = std::max(slot, c);
        }
      }
    }
  }

  double score(const Ids& hyp, std::size_t n, const BleuOptions& opt) const {
    if (hyp.empty()) return 0.0;
    return sentence_bleu(hyp.size(), closest_length(lengths, hyp.size()), n, opt,
                         [&](std::size_t k) {
                           const GramCounts& table = max_counts[k];
                           return clipped_overlap(hyp, k, [&](const Ids& g) -> std::uint32_t {
                             auto it = table.find(g);
                             return it == table.end() ? 0 : it->second;
                           });
                         });
  }

  std::vector<GramCounts> max_counts;
  std::vector<std::size_t> lengths;
};

void check_order(std::size_t n, std::string_view what) {
  if (n == 0) throw ConfigError(std::string(what) + ": order must be >= 1");
}

/// Sums values in ascending order so the result ignores input order.
double order_free_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double f1(double p, double r) {
  if (p == 0.0 && r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

double rouge_n_interned(const Ids& hyp, const GramCounts& hyp_grams, const Ids& ref,
                        const GramCounts& ref_grams, std::size_t n) {
  const std::size_t hyp_total = gram_total(hyp.size(), n);
  const std::size_t ref_total = gram_total(ref.size(), n);
  if (hyp_total == 0 || ref_total == 0) return 0.0;
  std::size_t matches = 0;
  for (const auto& [gram, c] : hyp_grams) {
    auto it = ref_grams.find(gram);
    if (it != ref_grams.end()) matches += std::min(c, it->second);
  }
  const double p = static_cast<double>(matches) / static_cast<double>(hyp_total);
  const double r = static_cast<double>(matches) / static_cast<double>(ref_total);
  return f1(p, r);
}

std::size_t lcs(std::u32string_view a, std::u32string_view b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l_interned(const Ids& hyp, const Ids& ref) {
  if (hyp.empty() || ref.empty()) return 0.0;
  const std::size_t l = lcs(hyp, ref);
  if (l == 0) return 0.0;
  return f1(static_cast<double>(l) / static_cast<double>(hyp.size()),
            static_cast<double>(l) / static_cast<double>(ref.size()));
}

void require_non_empty(std::size_t size, std::string_view what) {
  if (size == 0) throw MetricError(std::string(what) + " requires at least one sequence");
}

void require_aligned(std::size_t hyps, std::size_t refs, const MetricConfig& cfg) {
  if (cfg.pairing == Pairing::kAligned && hyps != refs) {
    throw MetricError("aligned scoring needs as many references as hypotheses (" +
                      std::to_string(hyps) + " vs " + std::to_string(refs) + ")");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Sentence-level metrics

double bleu_n(std::span<const Token> hyp, std::span<const TokenSequence> refs, std::size_t n,
              const BleuOptions& options) {
  check_order(n, "bleu");
  if (refs.empty()) throw MetricError("bleu requires at least one reference");
  Interner interner;
  const auto ref_ids = interner.intern_all(refs);
  const Ids hyp_ids = interner.intern(hyp);
  return ReferenceTable(ref_ids, n, options).score(hyp_ids, n, options);
}

double rouge_n(std::span<const Token> hyp, std::span<const TokenSequence> refs, std::size_t n) {
  check_order(n, "rouge");
  Interner interner;
  const Ids h = interner.intern(hyp);
  const GramCounts hg = count_grams(h, n);
  double best = 0.0;
  for (const auto& ref : refs) {
    const Ids r = interner.intern(ref);
    best = std::max(best, rouge_n_interned(h, hg, r, count_grams(r, n), n));
  }
  return best;
}

std::size_t lcs_length(std::span<const Token> a, std::span<const Token> b) {
  Interner interner;
  const Ids x = interner.intern(a);
  const Ids y = interner.intern(b);
  return lcs(x, y);
}

double rouge_l(std::span<const Token> hyp, std::span<const TokenSequence> refs) {
  Interner interner;
  const Ids h = interner.intern(hyp);
  double best = 0.0;
  for (const auto& ref : refs) best = std::max(best, rouge_l_interned(h, interner.intern(ref)));
  return best;
}

double distinct_n(std::span<const TokenSequence> hyps, std::size_t n) {
  check_order(n, "distinct");
  Interner interner;
  std::unordered_set<Ids> seen;
  std::size_t total = 0;
  for (const auto& h : hyps) {
    const Ids ids = interner.intern(h);
    for (std::size_t i = 0; i + n <= ids.size(); ++i) {
      seen.insert(ids.substr(i, n));
      ++total;
    }
  }
  return total == 0 ? 0.0 : static_cast<double>(seen.size()) / static_cast<double>(total);
}

// ---------------------------------------------------------------------------
// Corpus-level drivers

double corpus_bleu(std::span<const TokenSequence> hyps, std::span<const TokenSequence> refs,
                   std::size_t n, const MetricConfig& cfg) {
  check_order(n, "bleu");
  require_non_empty(hyps.size(), "corpus bleu");
  require_non_empty(refs.size(), "corpus bleu references");
  require_aligned(hyps.size(), refs.size(), cfg);

  Interner interner;
  const auto ref_ids = interner.intern_all(refs);
  const auto hyp_ids = interner.intern_all(hyps);
  std::vector<double> scores(hyps.size());

  if (cfg.pairing == Pairing::kAligned) {
    parallel_for(hyps.size(), cfg.threads, [&](std::size_t i) {
      scores[i] = ReferenceTable(std::span(&ref_ids[i], 1), n, cfg.bleu).score(hyp_ids[i], n, cfg.bleu);
    });
  } else {
    const ReferenceTable table(ref_ids, n, cfg.bleu);
    parallel_for(hyps.size(), cfg.threads,
                 [&](std::size_t i) { scores[i] = table.score(hyp_ids[i], n, cfg.bleu); });
  }
  return order_free_mean(std::move(scores));
}

double self_bleu(std::span<const TokenSequence> hyps, std::size_t n, const MetricConfig& cfg) {
  check_order(n, "self-bleu");
  if (hyps.size() < 2) throw MetricError("self-bleu requires at least two hypotheses");
  Interner interner;
  const auto ids = interner.intern_all(hyps);
  const std::size_t count = ids.size();
  std::vector<double> scores(count);

  if (cfg.self_bleu_sample && cfg.self_bleu_sample->size < count - 1) {
    const SelfBleuSample sample = *cfg.self_bleu_sample;
    if (sample.size == 0) throw ConfigError("self_bleu_sample must be >= 1");
    parallel_for(count, cfg.threads, [&](std::size_t i) {
      // partial Fisher-Yates over the other indices
      std::vector<std::size_t> others;
      others.reserve(count - 1);
      for (std::size_t j = 0; j < count; ++j) {
        if (j != i) others.push_back(j);
      }
      Rng rng(derive_seed(sample.seed, i));
      std::vector<Ids> refs;
      refs.reserve(sample.size);
      for (std::size_t s = 0; s < sample.size; ++s) {
        std::swap(others[s], others[s + rng.below(others.size() - s)]);
        refs.push_back(ids[others[s]]);
      }
      scores[i] = ReferenceTable(refs, n, cfg.bleu).score(ids[i], n, cfg.bleu);
    });
    return order_free_mean(std::move(scores));
  }

  // Leave-one-out maxima: for every n-gram keep the largest count, the
  // sentence owning it, and the runner-up count over the remaining sentences.
  struct TopTwo {
    std::uint32_t first = 0;
    std::uint32_t second = 0;
    std::size_t owner = 0;
  };
  std::vector<std::unordered_map<Ids, TopTwo>> tables(n + 1);
  for (std::size_t k = lowest_order(n, cfg.bleu); k <= n; ++k) {
    for (std::size_t i = 0; i < count; ++i) {
      for (const auto& [gram, c] : count_grams(ids[i], k)) {
        TopTwo& t = tables[k][gram];
        if (c > t.first) {
          t.second = t.first;
          t.first = c;
          t.owner = i;
        } else if (c > t.second) {
          t.second = c;
        }
      }
    }
  }
  std::map<std::size_t, std::size_t> length_counts;
  for (const auto& s : ids) ++length_counts[s.size()];

  // closest length among the other sentences; ties toward the shorter
  const auto closest_other = [&](std::size_t c) {
    if (length_counts.at(c) > 1) return c;
    auto above = length_counts.upper_bound(c);
    auto below = length_counts.lower_bound(c);
    const bool has_below = below != length_counts.begin();
    if (has_below) --below;
    if (!has_below) return above->first;
    if (above == length_counts.end()) return below->first;
    return (c - below->first) <= (above->first - c) ? below->first : above->first;
  };

  parallel_for(count, cfg.threads, [&](std::size_t i) {
    const Ids& hyp = ids[i];
    if (hyp.empty()) {
      scores[i] = 0.0;
      return;
    }
    scores[i] = sentence_bleu(hyp.size(), closest_other(hyp.size()), n, cfg.bleu,
                              [&](std::size_t k) {
                                const auto& table = tables[k];
                                return clipped_overlap(hyp, k, [&](const Ids& g) -> std::uint32_t {
                                  const TopTwo& t = table.at(g);
                                  return t.owner == i ? t.second : t.first;
                                });
                              });
  });
  return order_free_mean(std::move(scores));
}

double corpus_rouge_n(std::span<const TokenSequence> hyps, std::span<const TokenSequence> refs,
                      std::size_t n, const MetricConfig& cfg) {
  check_order(n, "rouge");
  require_non_empty(hyps.size(), "corpus rouge");
  require_non_empty(refs.size(), "corpus rouge references");
  require_aligned(hyps.size(), refs.size(), cfg);
  Interner interner;
  const auto ref_ids = interner.intern_all(refs);
  const auto hyp_ids = interner.intern_all(hyps);
  std::vector<GramCounts> ref_grams;
  ref_grams.reserve(ref_ids.size());
  for (const auto& r : ref_ids) ref_grams.push_back(count_grams(r, n));

  std::vector<double> scores(hyps.size());
  parallel_for(hyps.size(), cfg.threads, [&](std::size_t i) {
    const GramCounts hg = count_grams(hyp_ids[i], n);
    if (cfg.pairing == Pairing::kAligned) {
      scores[i] = rouge_n_interned(hyp_ids[i], hg, ref_ids[i], ref_grams[i], n);
      return;
    }
    double best = 0.0;
    for (std::size_t r = 0; r < ref_ids.size(); ++r) {
      best = std::max(best, rouge_n_interned(hyp_ids[i], hg, ref_ids[r], ref_grams[r], n));
    }
    scores[i] = best;
  });
  return order_free_mean(std::move(scores));
}

double corpus_rouge_l(std::span<const TokenSequence> hyps, std::span<const TokenSequence> refs,
                      const MetricConfig& cfg) {
  require_non_empty(hyps.size(), "corpus rouge-l");
  require_non_empty(refs.size(), "corpus rouge-l references");
  require_aligned(hyps.size(), refs.size(), cfg);
  Interner interner;
  const auto ref_ids = interner.intern_all(refs);
  const auto hyp_ids = interner.intern_all(hyps);
  std::vector<double> scores(hyps.size());
  parallel_for(hyps.size(), cfg.threads, [&](std::size_t i) {
    if (cfg.pairing == Pairing::kAligned) {
      scores[i] = rouge_l_interned(hyp_ids[i], ref_ids[i]);
      return;
    }
    double best = 0.0;
    for (const auto& r : ref_ids) best = std::max(best, rouge_l_interned(hyp_ids[i], r));
    scores[i] = best;
  });
  return order_free_mean(std::move(scores));
}

NllResult nll_ppl(const LanguageModel& model, std::span<const IdSequence> data,
                  std::size_t threads) {
  std::vector<double> logprobs(data.size());
  parallel_for(data.size(), threads,
               [&](std::size_t i) { logprobs[i] = model.sequence_logprob(data[i]); });
  double total = 0.0;
  std::size_t tokens = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    total += logprobs[i];
    if (data[i].size() > 1) tokens += data[i].size() - 1;
  }
  NllResult out;
  if (tokens == 0) return out;
  out.nll_token = -total / static_cast<double>(tokens);
  out.nll_seq = -total / static_cast<double>(data.size());
  out.ppl = std::exp(out.nll_token);
  out.infinite = !std::isfinite(out.nll_token);
  return out;
}

// ---------------------------------------------------------------------------
// Configuration and report

namespace {
constexpr std::array<std::string_view, 6> kMetricNames = {"nll",   "ppl",   "bleu",
                                                          "self_bleu", "rouge", "distinct"};
}

std::span<const std::string_view> known_metrics() { return kMetricNames; }

void MetricConfig::validate() const {
  if (names.empty()) throw ConfigError("metrics: at least one metric must be requested");
  for (const auto& name : names) {
    if (std::find(kMetricNames.begin(), kMetricNames.end(), name) == kMetricNames.end()) {
      std::string known;
      for (auto k : kMetricNames) known += (known.empty() ? "" : ", ") + std::string(k);
      throw ConfigError("unknown metric '" + name + "' (known: " + known + ")");
    }
  }
  if (bleu_max_n == 0 || rouge_max_n == 0 || distinct_max_n == 0) {
    throw ConfigError("metric orders must be >= 1");
  }
  if (bleu.smoothing == Smoothing::kEpsilon && !(bleu.epsilon > 0.0)) {
    throw ConfigError("epsilon smoothing needs epsilon > 0");
  }
  if (self_bleu_sample && self_bleu_sample->size == 0) {
    throw ConfigError("self_bleu_sample must be >= 1");
  }
}

std::string MetricConfig::canonical() const {
  std::ostringstream os;
  os << "metrics=";
  for (std::size_t i = 0; i < names.size(); ++i) os << (i ? "," : "") << names[i];
  os << ";bleu_max_n=" << bleu_max_n << ";rouge_max_n=" << rouge_max_n
     << ";distinct_max_n=" << distinct_max_n
     << ";smoothing=" << (bleu.smoothing == Smoothing::kNone ? "none" : "epsilon")
     << ";epsilon=" << format_double(bleu.epsilon)
     << ";weighting=" << (bleu.weighting == BleuWeighting::kOneHot ? "one_hot" : "geometric")
     << ";pairing=" << (pairing == Pairing::kAligned ? "aligned" : "all");
  if (self_bleu_sample) {
    os << ";self_bleu_sample=" << self_bleu_sample->size << "@" << self_bleu_sample->seed;
  }
  return os.str();
}

std::string digest(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
  return out;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), end);
}

std::optional<double> MetricReport::get(std::string_view key) const {
  for (const auto& [k, v] : scores) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::string MetricReport::to_text() const {
  std::string out;
  for (const auto& [k, v] : scores) out += k + ": " + format_double(v) + "\n";
  out += "dataset: " + dataset_id + "\n";
  out += "hypotheses: " + std::to_string(hypothesis_count) + "\n";
  out += "config_digest: " + config_digest + "\n";
  out += "rng: " + std::string(Rng::kAlgorithm) + "\n";
  for (const auto& f : flags) out += "flag: " + f + "\n";
  return out;
}

std::string MetricReport::to_json() const {
  nlohmann::ordered_json j;
  j["scores"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : scores) j["scores"][k] = v;
  j["meta"]["dataset"] = dataset_id;
  j["meta"]["hypotheses"] = hypothesis_count;
  j["meta"]["config_digest"] = config_digest;
  j["meta"]["rng"] = std::string(Rng::kAlgorithm);
  j["meta"]["flags"] = flags;
  return j.dump(2) + "\n";
}

MetricReport evaluate(const MetricConfig& cfg, const EvalInputs& in) {
  cfg.validate();
  MetricReport report;
  report.dataset_id = in.dataset_id;
  report.hypothesis_count = in.hyps ? in.hyps->size() : 0;
  report.config_digest = digest(cfg.canonical());

  const auto need = [](bool present, const std::string& metric, std::string_view input) {
    if (!present) {
      throw ConfigError("metric '" + metric + "' requires " + std::string(input) +
                        ", which was not provided");
    }
  };
  const auto add = [&](std::string key, double v) {
    if (!report.get(key)) report.scores.emplace_back(std::move(key), v);
  };

  std::optional<NllResult> nll;
  for (const auto& name : cfg.names) {
    if (name == "nll" || name == "ppl") {
      need(in.model != nullptr, name, "a model");
      need(in.data.has_value(), name, "encoded evaluation data");
      if (!nll) {
        nll = nll_ppl(*in.model, *in.data, cfg.threads);
        if (nll->infinite) report.flags.push_back("nll-infinite");
      }
      if (name == "nll") {
        add("nll-token", nll->nll_token);
        add("nll-seq", nll->nll_seq);
      } else {
        add("ppl", nll->ppl);
      }
    } else if (name == "bleu") {
      need(in.hyps.has_value(), name, "hypotheses");
      need(in.refs.has_value(), name, "references");
      for (std::size_t k = 1; k <= cfg.bleu_max_n; ++k) {
        add("bleu-" + std::to_string(k), corpus_bleu(*in.hyps, *in.refs, k, cfg));
      }
    } else if (name == "self_bleu") {
      need(in.hyps.has_value(), name, "hypotheses");
      for (std::size_t k = 1; k <= cfg.bleu_max_n; ++k) {
        add("self-bleu-" + std::to_string(k), self_bleu(*in.hyps, k, cfg));
      }
    } else if (name == "rouge") {
      need(in.hyps.has_value(), name, "hypotheses");
      need(in.refs.has_value(), name, "references");
      for (std::size_t k = 1; k <= cfg.rouge_max_n; ++k) {
        add("rouge-" + std::to_string(k), corpus_rouge_n(*in.hyps, *in.refs, k, cfg));
      }
      add("rouge-l", corpus_rouge_l(*in.hyps, *in.refs, cfg));
    } else if (name == "distinct") {
      need(in.hyps.has_value(), name, "hypotheses");
      require_non_empty(in.hyps->size(), "distinct");
      for (std::size_t k = 1; k <= cfg.distinct_max_n; ++k) {
        add("distinct-" + std::to_string(k), distinct_n(*in.hyps, k));
      }
    }
  }
  return report;
}

}  // namespace genbench
