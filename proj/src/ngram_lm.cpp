#include "genbench/ngram_lm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <tuple>

namespace genbench {

namespace {

constexpr char kMagic[4] = {'N', 'G', 'L', 'M'};

std::vector<double> check_params(const NGramLM::Params& p) {
  if (p.order == 0) throw ConfigError("n-gram order must be >= 1");
  if (!(p.delta > 0.0) || !std::isfinite(p.delta)) throw ConfigError("delta must be > 0");
  std::vector<double> lambdas = p.lambdas;
  if (lambdas.empty()) lambdas.assign(p.order, 1.0 / static_cast<double>(p.order));
  if (lambdas.size() != p.order) {
    throw ConfigError("expected " + std::to_string(p.order) + " interpolation weights, got " +
                      std::to_string(lambdas.size()));
  }
  double sum = 0.0;
  for (double l : lambdas) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw ConfigError("interpolation weights must be >= 0");
    sum += l;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("interpolation weights must sum to 1");
  return lambdas;
}

class Writer {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void raw(const char* p, std::size_t n) { bytes.insert(bytes.end(), p, p + n); }
  std::vector<std::uint8_t> bytes;

 private:
  void put(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : bytes_(b) {}
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  bool done() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::uint64_t get(int width) {
    if (remaining() < static_cast<std::size_t>(width)) {
      throw CheckpointError("truncated checkpoint (format version " +
                            std::to_string(NGramLM::kFormatVersion) + ")");
    }
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v |= std::uint64_t{bytes_[pos_++]} << (8 * i);
    return v;
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 4;  // past the magic
};

}  // namespace

NGramLM::NGramLM(std::size_t order, std::size_t vocab_size, double delta,
                 std::vector<double> lambdas)
    : order_(order), vocab_size_(vocab_size), delta_(delta), lambdas_(std::move(lambdas)),
      tables_(order) {}

NGramLM NGramLM::fit(std::span<const IdSequence> corpus, std::size_t vocab_size,
                     const Params& params) {
  auto lambdas = check_params(params);
  if (corpus.empty()) throw ConfigError("cannot fit an n-gram model on an empty corpus");
  if (vocab_size == 0) throw ConfigError("vocabulary size must be positive");
  NGramLM lm(params.order, vocab_size, params.delta, std::move(lambdas));

  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const IdSequence& seq = corpus[s];
    if (seq.empty() || seq.front() != special::kSos) {
      throw DataError("training sequence " + std::to_string(s) + " does not start with SOS");
    }
    for (TokenId id : seq) {
      if (id >= vocab_size) {
        throw DataError("training sequence " + std::to_string(s) + " holds id " +
                        std::to_string(id) + " >= vocabulary size");
      }
    }
    for (std::size_t i = 1; i < seq.size(); ++i) {
      for (std::size_t k = 0; k < lm.order_ && k <= i; ++k) {
        IdSequence ctx(seq.begin() + static_cast<std::ptrdiff_t>(i - k),
                       seq.begin() + static_cast<std::ptrdiff_t>(i));
        Row& row = lm.tables_[k][std::move(ctx)];
        ++row.total;
        ++row.next[seq[i]];
      }
    }
  }
  return lm;
}

const NGramLM::Row* NGramLM::find_row(std::span<const TokenId> context) const {
  if (context.size() >= order_) return nullptr;
  const Table& table = tables_[context.size()];
  auto it = table.find(IdSequence(context.begin(), context.end()));
  return it == table.end() ? nullptr : &it->second;
}

std::uint64_t NGramLM::count(std::span<const TokenId> context, TokenId token) const {
  const Row* row = find_row(context);
  if (!row) return 0;
  auto it = row->next.find(token);
  return it == row->next.end() ? 0 : it->second;
}

std::uint64_t NGramLM::context_total(std::span<const TokenId> context) const {
  const Row* row = find_row(context);
  return row ? row->total : 0;
}

std::vector<double> NGramLM::next_logprobs(std::span<const TokenId> prefix) const {
  const double v = static_cast<double>(vocab_size_);
  std::vector<double> p(vocab_size_, 0.0);
  double floor_mass = 0.0;  // probability every token receives from delta
  for (std::size_t k = 0; k < order_; ++k) {
    const double w = lambdas_[k];
    if (w == 0.0) continue;
    const Row* row = k <= prefix.size() ? find_row(prefix.last(k)) : nullptr;
    const double denom = static_cast<double>(row ? row->total : 0) + delta_ * v;
    floor_mass += w * delta_ / denom;
    if (!row) continue;
    for (const auto& [tok, c] : row->next) p[tok] += w * static_cast<double>(c) / denom;
  }
  for (double& x : p) x = std::log(x + floor_mass);
  return p;
}

// ---------------------------------------------------------------------------
// Checkpoint: "NGLM", u32 version, u32 order, u64 vocab size, f64 delta,
// u32 lambda count + f64 lambdas, u64 triple count, then triples sorted by
// (context length, context, token): u32 context length, u32 ids, u32 token,
// u64 count. Little-endian throughout.

std::vector<std::uint8_t> NGramLM::serialize() const {
  using Triple = std::tuple<std::size_t, const IdSequence*, TokenId, std::uint64_t>;
  std::vector<Triple> triples;
  for (std::size_t k = 0; k < order_; ++k) {
    for (const auto& [ctx, row] : tables_[k]) {
      for (const auto& [tok, c] : row.next) triples.emplace_back(k, &ctx, tok, c);
    }
  }
  std::sort(triples.begin(), triples.end(), [](const Triple& a, const Triple& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
    if (*std::get<1>(a) != *std::get<1>(b)) return *std::get<1>(a) < *std::get<1>(b);
    return std::get<2>(a) < std::get<2>(b);
  });

  Writer w;
  w.raw(kMagic, 4);
  w.u32(kFormatVersion);
  w.u32(static_cast<std::uint32_t>(order_));
  w.u64(vocab_size_);
  w.f64(delta_);
  w.u32(static_cast<std::uint32_t>(lambdas_.size()));
  for (double l : lambdas_) w.f64(l);
  w.u64(triples.size());
  for (const auto& [k, ctx, tok, c] : triples) {
    w.u32(static_cast<std::uint32_t>(k));
    for (TokenId id : *ctx) w.u32(id);
    w.u32(tok);
    w.u64(c);
  }
  return std::move(w.bytes);
}

NGramLM NGramLM::deserialize(std::span<const std::uint8_t> bytes) {
  const std::string version = " (format version " + std::to_string(kFormatVersion) + ")";
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw CheckpointError("not an NGLM checkpoint: bad magic" + version);
  }
  Reader r(bytes);
  const std::uint32_t file_version = r.u32();
  if (file_version != kFormatVersion) {
    throw CheckpointError("unsupported checkpoint format version " +
                          std::to_string(file_version) + ", expected " +
                          std::to_string(kFormatVersion));
  }
  Params params;
  params.order = r.u32();
  const std::uint64_t vocab = r.u64();
  params.delta = r.f64();
  const std::uint32_t n_lambdas = r.u32();
  if (n_lambdas != params.order || r.remaining() < 8ULL * n_lambdas) {
    throw CheckpointError("corrupt checkpoint header" + version);
  }
  for (std::uint32_t i = 0; i < n_lambdas; ++i) params.lambdas.push_back(r.f64());
  std::vector<double> lambdas;
  try {
    lambdas = check_params(params);
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("corrupt checkpoint header: ") + e.what() + version);
  }
  if (vocab == 0) throw CheckpointError("corrupt checkpoint header: empty vocabulary" + version);

  NGramLM lm(params.order, vocab, params.delta, std::move(lambdas));
  const std::uint64_t n_triples = r.u64();
  for (std::uint64_t t = 0; t < n_triples; ++t) {
    const std::uint32_t k = r.u32();
    if (k >= lm.order_) throw CheckpointError("corrupt checkpoint: context too long" + version);
    IdSequence ctx(k);
    for (auto& id : ctx) id = r.u32();
    const TokenId tok = r.u32();
    const std::uint64_t c = r.u64();
    if (c == 0 || tok >= vocab ||
        std::any_of(ctx.begin(), ctx.end(), [&](TokenId id) { return id >= vocab; })) {
      throw CheckpointError("corrupt checkpoint: invalid triple" + version);
    }
    Row& row = lm.tables_[k][std::move(ctx)];
    if (!row.next.emplace(tok, c).second) {
      throw CheckpointError("corrupt checkpoint: duplicate triple" + version);
    }
    row.total += c;
  }
  if (!r.done()) throw CheckpointError("corrupt checkpoint: trailing bytes" + version);
  return lm;
}

void NGramLM::save(const std::filesystem::path& path) const {
  const auto bytes = serialize();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

NGramLM NGramLM::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

}  // namespace genbench
