#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "genbench/metrics.hpp"
#include "genbench/ngram_lm.hpp"
#include "oracles.hpp"

using namespace genbench;

namespace {

using Seqs = std::vector<TokenSequence>;

const TokenSequence kSat{"the", "cat", "sat"};
const TokenSequence kAte{"the", "cat", "ate"};

MetricConfig with_threads(std::size_t threads) {
  MetricConfig cfg;
  cfg.threads = threads;
  return cfg;
}

}  // namespace

TEST(NgramCounts, SlidingWindow) {
  const auto bigrams = ngram_counts(TokenSequence{"a", "b", "a"}, 2);
  EXPECT_EQ(bigrams.counts.size(), 2u);
  EXPECT_EQ(bigrams.count({"a", "b"}), 1u);
  EXPECT_EQ(bigrams.count({"b", "a"}), 1u);
  EXPECT_EQ(ngram_counts(TokenSequence{"a", "a", "a"}, 1).count({"a"}), 3u);
  EXPECT_TRUE(ngram_counts(TokenSequence{"a"}, 2).counts.empty());
  EXPECT_THROW(ngram_counts(TokenSequence{"a"}, 0), ConfigError);
}

TEST(NgramCounts, TotalMatchesLengthProperty) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto seq = oracle::random_sentence(rng, 4, 12);
    for (std::size_t n = 1; n <= 4; ++n) {
      const auto m = ngram_counts(seq, n);
      EXPECT_EQ(m.total(), seq.size() >= n ? seq.size() - n + 1 : 0u);
      for (const auto& [gram, c] : m.counts) {
        EXPECT_EQ(gram.size(), n);
        EXPECT_GE(c, 1u);
      }
    }
  }
}

TEST(Bleu, HandFixtures) {
  EXPECT_DOUBLE_EQ(bleu_n(kSat, Seqs{kSat}, 2), 1.0);
  EXPECT_DOUBLE_EQ(bleu_n(kSat, Seqs{kAte}, 2), 0.5);
  EXPECT_DOUBLE_EQ(oracle::bleu(kSat, {kAte}, 2), 0.5);
  EXPECT_DOUBLE_EQ(bleu_n(TokenSequence{"x", "y"}, Seqs{TokenSequence{"a", "b"}}, 1), 0.0);
  EXPECT_DOUBLE_EQ(bleu_n(TokenSequence{}, Seqs{kSat}, 1), 0.0);
  EXPECT_THROW(bleu_n(kSat, std::vector<TokenSequence>{}, 1), MetricError);
}

TEST(Bleu, OneHotWeightingUsesOnlyOrderN) {
  // unigram precision 4/4, bigram 2/3, trigram 1/2, 4-gram 0/1
  const TokenSequence hyp{"a", "b", "c", "d"};
  const TokenSequence ref{"a", "b", "c", "x", "d"};
  EXPECT_DOUBLE_EQ(bleu_n(hyp, Seqs{ref}, 4), 0.0);
  const double bp = std::exp(1.0 - 5.0 / 4.0);
  EXPECT_DOUBLE_EQ(bleu_n(hyp, Seqs{ref}, 3), bp * 0.5);
  EXPECT_DOUBLE_EQ(bleu_n(hyp, Seqs{ref}, 1), bp * 1.0);

  BleuOptions geo;
  geo.weighting = BleuWeighting::kGeometric;
  EXPECT_NEAR(bleu_n(hyp, Seqs{ref}, 3, geo), bp * std::cbrt(1.0 * (2.0 / 3.0) * 0.5), 1e-15);
  EXPECT_DOUBLE_EQ(bleu_n(hyp, Seqs{ref}, 4, geo), 0.0);
}

TEST(Bleu, EpsilonSmoothing) {
  BleuOptions opt;
  opt.smoothing = Smoothing::kEpsilon;
  opt.epsilon = 1e-3;
  const TokenSequence hyp{"x", "y"};
  EXPECT_DOUBLE_EQ(bleu_n(hyp, Seqs{TokenSequence{"a", "b"}}, 1, opt), 1e-3 / 2.0);
}

TEST(Bleu, BrevityPenaltyClosestReferenceTiesShorter) {
  const TokenSequence hyp{"a", "b", "c", "d"};
  // lengths 2 and 6 are equally close to 4; the shorter one gives BP = 1
  const std::vector<TokenSequence> refs{{"a", "b"}, {"a", "b", "c", "d", "e", "f"}};
  EXPECT_DOUBLE_EQ(bleu_n(hyp, refs, 1), 1.0);
  const std::vector<TokenSequence> longer{{"a", "b", "c", "d", "e", "f"}};
  EXPECT_DOUBLE_EQ(bleu_n(hyp, longer, 1), std::exp(1.0 - 6.0 / 4.0));
}

TEST(Bleu, MatchesBruteForceOracle) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 300; ++trial) {
    const auto hyp = oracle::random_sentence(rng, 5, 10);
    std::vector<TokenSequence> refs(1 + rng() % 4);
    for (auto& r : refs) r = oracle::random_sentence(rng, 5, 10);
    for (std::size_t n = 1; n <= 4; ++n) {
      const double got = bleu_n(hyp, refs, n);
      EXPECT_NEAR(got, oracle::bleu(hyp, refs, n), 1e-12);
      EXPECT_GE(got, 0.0);
      EXPECT_LE(got, 1.0);
    }
  }
}

TEST(Bleu, SelfReferenceScoresOne) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = oracle::random_sentence(rng, 6, 10, 4);
    std::vector<TokenSequence> refs{x};
    for (int i = 0; i < 3; ++i) refs.push_back(oracle::random_sentence(rng, 6, 10));
    // BP is 1 whenever the hypothesis is at least as long as the closest reference,
    // and x itself is always the closest
    for (std::size_t n = 1; n <= 4; ++n) EXPECT_DOUBLE_EQ(bleu_n(x, refs, n), 1.0);
  }
}

TEST(Bleu, ClippedMatchesNeverExceedReferenceMax) {
  // with one-hot weights and BP fixed at 1, adding a reference can only add matches
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    const auto hyp = oracle::random_sentence(rng, 4, 8, 1);
    std::vector<TokenSequence> refs{hyp.size() > 1 ? TokenSequence(hyp.begin(), hyp.end() - 1)
                                                   : TokenSequence{"z"}};
    refs[0].push_back("q");  // same length as hyp, so BP = 1
    const double before = bleu_n(hyp, refs, 1);
    auto extra = oracle::random_sentence(rng, 4, 8);
    extra.resize(hyp.size(), "w0");
    refs.push_back(extra);
    EXPECT_GE(bleu_n(hyp, refs, 1), before);
    EXPECT_LE(oracle::clipped_matches(hyp, refs, 1), hyp.size());
  }
}

TEST(Rouge, HandFixtures) {
  EXPECT_DOUBLE_EQ(rouge_n(kSat, Seqs{kSat}, 2), 1.0);
  EXPECT_NEAR(rouge_n(kSat, Seqs{kAte}, 1), 2.0 / 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(rouge_n(TokenSequence{"x"}, Seqs{kSat}, 1), 0.0);

  const TokenSequence abcd{"a", "b", "c", "d"};
  const TokenSequence acbd{"a", "c", "b", "d"};
  EXPECT_EQ(lcs_length(abcd, acbd), 3u);
  EXPECT_EQ(oracle::lcs_exhaustive(abcd, acbd), 3u);
  EXPECT_DOUBLE_EQ(rouge_l(abcd, Seqs{acbd}), 0.75);
  EXPECT_DOUBLE_EQ(rouge_l(abcd, Seqs{abcd}), 1.0);
  EXPECT_DOUBLE_EQ(rouge_l(abcd, Seqs{TokenSequence{"x", "y"}}), 0.0);
}

TEST(Rouge, MatchesOraclesAndIsMonotoneInReferences) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 300; ++trial) {
    const auto hyp = oracle::random_sentence(rng, 5, 8);
    std::vector<TokenSequence> refs(1 + rng() % 3);
    for (auto& r : refs) r = oracle::random_sentence(rng, 5, 8);
    for (std::size_t n = 1; n <= 3; ++n) EXPECT_NEAR(rouge_n(hyp, refs, n), oracle::rouge_n(hyp, refs, n), 1e-12);
    EXPECT_NEAR(rouge_l(hyp, refs), oracle::rouge_l(hyp, refs), 1e-12);

    const double l_before = rouge_l(hyp, refs);
    const double n_before = rouge_n(hyp, refs, 1);
    refs.push_back(oracle::random_sentence(rng, 5, 8));
    EXPECT_GE(rouge_l(hyp, refs), l_before);
    EXPECT_GE(rouge_n(hyp, refs, 1), n_before);
  }
}

TEST(Distinct, Fixtures) {
  EXPECT_DOUBLE_EQ(distinct_n(Seqs{TokenSequence{"a", "a", "a", "a"}}, 1), 0.25);
  EXPECT_DOUBLE_EQ(distinct_n(Seqs{TokenSequence{"a", "b"}, TokenSequence{"a", "b"}}, 1), 0.5);
  EXPECT_DOUBLE_EQ(distinct_n(Seqs{TokenSequence{"a", "b", "c"}}, 2), 1.0);
  EXPECT_DOUBLE_EQ(distinct_n(Seqs{TokenSequence{"a"}}, 2), 0.0);
}

TEST(Distinct, OracleAndUpperBound) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<TokenSequence> hyps(1 + rng() % 5);
    for (auto& h : hyps) h = oracle::random_sentence(rng, 6, 9);
    for (std::size_t n = 1; n <= 3; ++n) {
      const double d = distinct_n(hyps, n);
      EXPECT_NEAR(d, oracle::distinct(hyps, n), 1e-12);
      EXPECT_LE(d, 1.0);
    }
  }
}

TEST(CorpusBleu, MeanOfSentenceScores) {
  const auto cfg = with_threads(1);
  EXPECT_DOUBLE_EQ(corpus_bleu(Seqs{kSat}, Seqs{kSat}, 3, cfg), 1.0);
  EXPECT_DOUBLE_EQ(corpus_bleu(Seqs{kSat, kAte}, Seqs{kAte}, 2, cfg), 0.75);
  EXPECT_THROW(corpus_bleu(std::vector<TokenSequence>{}, Seqs{kSat}, 2, cfg), MetricError);
}

TEST(CorpusBleu, AlignedPairing) {
  auto cfg = with_threads(1);
  cfg.pairing = Pairing::kAligned;
  // hyp 0 only sees ref 0, so the perfect match in ref 1 does not help it
  EXPECT_DOUBLE_EQ(corpus_bleu(Seqs{kSat, kAte}, Seqs{kAte, kSat}, 2, cfg), 0.5);
  EXPECT_THROW(corpus_bleu(Seqs{kSat}, Seqs{kAte, kSat}, 2, cfg), MetricError);
}

TEST(CorpusBleu, InvariantUnderThreadsAndPermutations) {
  std::mt19937_64 rng(13);
  std::vector<TokenSequence> hyps(300), refs(200);
  for (auto& h : hyps) h = oracle::random_sentence(rng, 8, 12);
  for (auto& r : refs) r = oracle::random_sentence(rng, 8, 12);
  for (std::size_t n = 1; n <= 4; ++n) {
    const double base = corpus_bleu(hyps, refs, n, with_threads(1));
    for (std::size_t t : {2u, 3u, 8u}) EXPECT_EQ(corpus_bleu(hyps, refs, n, with_threads(t)), base);
    auto h2 = hyps;
    auto r2 = refs;
    std::shuffle(h2.begin(), h2.end(), rng);
    std::shuffle(r2.begin(), r2.end(), rng);
    EXPECT_EQ(corpus_bleu(h2, r2, n, with_threads(4)), base);
  }
}

TEST(SelfBleu, Fixtures) {
  const auto cfg = with_threads(1);
  EXPECT_DOUBLE_EQ(self_bleu(Seqs{kSat, kSat, kSat}, 2, cfg), 1.0);
  EXPECT_DOUBLE_EQ(self_bleu(Seqs{TokenSequence{"a", "b"}, TokenSequence{"c", "d"}}, 1, cfg), 0.0);
  const std::vector<TokenSequence> three{{"a", "b", "c"}, {"a", "b", "d"}, {"a", "e", "f"}};
  const double expected = oracle::self_bleu(three, 1);
  EXPECT_NEAR(expected, 5.0 / 9.0, 1e-15);  // (2/3 + 2/3 + 1/3) / 3
  EXPECT_NEAR(self_bleu(three, 1, cfg), expected, 1e-15);
  EXPECT_THROW(self_bleu(Seqs{kSat}, 1, cfg), MetricError);
}

TEST(SelfBleu, MatchesLeaveOneOutOracle) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<TokenSequence> hyps(2 + rng() % 8);
    for (auto& h : hyps) h = oracle::random_sentence(rng, 5, 9);
    for (std::size_t n = 1; n <= 4; ++n) {
      EXPECT_NEAR(self_bleu(hyps, n, with_threads(1 + trial % 3)), oracle::self_bleu(hyps, n), 1e-12);
    }
  }
}

TEST(SelfBleu, SamplingIsSeededAndExactWhenSampleCoversAll) {
  std::mt19937_64 rng(15);
  std::vector<TokenSequence> hyps(40);
  for (auto& h : hyps) h = oracle::random_sentence(rng, 6, 10, 1);
  auto cfg = with_threads(2);
  const double exact = self_bleu(hyps, 2, cfg);
  cfg.self_bleu_sample = SelfBleuSample{39, 5};
  EXPECT_EQ(self_bleu(hyps, 2, cfg), exact);
  cfg.self_bleu_sample = SelfBleuSample{10, 5};
  const double sampled = self_bleu(hyps, 2, cfg);
  EXPECT_EQ(self_bleu(hyps, 2, cfg), sampled);
  EXPECT_GE(sampled, 0.0);
  EXPECT_LE(sampled, 1.0);
}

TEST(NllPpl, UniformModelGivesVocabularySize) {
  for (std::size_t v : {2u, 10u, 100u}) {
    const oracle::UniformModel model(v);
    const std::vector<IdSequence> data{{0, 1}, {1, 1, 1, 0, 1}};
    const auto r = nll_ppl(model, data);
    EXPECT_NEAR(r.ppl, static_cast<double>(v), 1e-9);
    EXPECT_EQ(r.ppl, std::exp(r.nll_token));
    EXPECT_NEAR(r.nll_seq, 2.5 * std::log(static_cast<double>(v)), 1e-12);
  }
}

TEST(NllPpl, CertainModelGivesPplOne) {
  oracle::TableModel model(5);
  model.set({2}, {{4, 1.0}});
  model.set({2, 4}, {{3, 1.0}});
  const auto r = nll_ppl(model, std::vector<IdSequence>{{2, 4, 3}});
  EXPECT_DOUBLE_EQ(r.nll_token, 0.0);
  EXPECT_DOUBLE_EQ(r.ppl, 1.0);
}

TEST(NllPpl, ZeroProbabilityIsFlaggedInfinite) {
  oracle::TableModel model(5);
  model.set({2}, {{4, 1.0}});
  const auto r = nll_ppl(model, std::vector<IdSequence>{{2, 1, 3}});
  EXPECT_TRUE(r.infinite);
  EXPECT_TRUE(std::isinf(r.ppl));
}

TEST(NllPpl, BigramCountRatios) {
  // fit on [a b a b]: P(a|SOS)=1/1, P(b|a)=2/2, P(EOS|b)=1/2
  const TokenId a = 4, b = 5;
  NGramLM::Params p;
  p.order = 2;
  p.delta = 1e-12;
  p.lambdas = {0.0, 1.0};
  const auto lm = NGramLM::fit(std::vector<IdSequence>{{2, a, b, a, b, 3}}, 6, p);
  const auto r = nll_ppl(lm, std::vector<IdSequence>{{2, a, b, 3}});
  const double expected = -(std::log(1.0) + std::log(1.0) + std::log(0.5)) / 3.0;
  EXPECT_NEAR(r.nll_token, expected, 1e-9);
  EXPECT_NEAR(r.ppl, std::exp(expected), 1e-9);
}

TEST(Evaluate, DispatchesAndNamesKeys) {
  MetricConfig cfg;
  cfg.names = {"bleu", "rouge", "distinct", "self_bleu"};
  cfg.bleu_max_n = 2;
  const std::vector<TokenSequence> hyps{kSat, kAte};
  const std::vector<TokenSequence> refs{kAte};
  EvalInputs in;
  in.hyps = std::span<const TokenSequence>(hyps);
  in.refs = std::span<const TokenSequence>(refs);
  in.dataset_id = "fixture";
  const auto report = evaluate(cfg, in);
  std::vector<std::string> keys;
  for (const auto& [k, v] : report.scores) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"bleu-1", "bleu-2", "rouge-1", "rouge-2", "rouge-l",
                                            "distinct-1", "distinct-2", "self-bleu-1", "self-bleu-2"}));
  EXPECT_DOUBLE_EQ(*report.get("bleu-2"), 0.75);
  EXPECT_EQ(report.hypothesis_count, 2u);
  EXPECT_EQ(report.config_digest.size(), 16u);
  for (const auto& [k, v] : report.scores) {
    EXPECT_GE(v, 0.0) << k;
    EXPECT_LE(v, 1.0) << k;
  }
  EXPECT_NE(report.to_json().find("\"bleu-2\": 0.75"), std::string::npos) << report.to_json();
  EXPECT_NE(report.to_text().find("bleu-2: 0.75\n"), std::string::npos);
}

TEST(Evaluate, MissingInputsNameMetricAndInput) {
  MetricConfig cfg;
  cfg.names = {"bleu"};
  const std::vector<TokenSequence> hyps{kSat};
  EvalInputs in;
  in.hyps = std::span<const TokenSequence>(hyps);
  try {
    evaluate(cfg, in);
    FAIL();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("'bleu'"), std::string::npos);
    EXPECT_NE(msg.find("references"), std::string::npos);
  }
  cfg.names = {"ppl"};
  EXPECT_THROW(evaluate(cfg, in), ConfigError);
  cfg.names = {"meteor"};
  EXPECT_THROW(evaluate(cfg, in), ConfigError);
}

TEST(Evaluate, NllKeys) {
  MetricConfig cfg;
  cfg.names = {"nll", "ppl"};
  const oracle::UniformModel model(10);
  const std::vector<IdSequence> data{{2, 5, 3}};
  EvalInputs in;
  in.model = &model;
  in.data = std::span<const IdSequence>(data);
  const auto report = evaluate(cfg, in);
  EXPECT_NEAR(*report.get("ppl"), 10.0, 1e-9);
  EXPECT_NEAR(*report.get("nll-token"), std::log(10.0), 1e-12);
  EXPECT_NEAR(*report.get("nll-seq"), 2.0 * std::log(10.0), 1e-12);
}
