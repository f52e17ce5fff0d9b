#include "genbench/corpus.hpp"

#include <algorithm>
#include <clocale>
#include <cwctype>
#include <fstream>
#include <locale.h>
#include <sstream>
#include <wctype.h>

namespace genbench {

namespace {

// glibc's C.UTF-8 locale carries the full Unicode case and space tables.
locale_t utf8_locale() {
  static const locale_t loc = [] {
    locale_t l = newlocale(LC_CTYPE_MASK, "C.UTF-8", static_cast<locale_t>(nullptr));
    if (l == static_cast<locale_t>(nullptr)) {
      l = newlocale(LC_CTYPE_MASK, "C.utf8", static_cast<locale_t>(nullptr));
    }
    return l;
  }();
  return loc;
}

/// Decodes one code point starting at text[pos]; returns its byte length or 0 if malformed.
std::size_t decode_utf8(std::string_view text, std::size_t pos, char32_t& out) {
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
  const unsigned char lead = byte(pos);
  std::size_t len;
  char32_t cp;
  if (lead < 0x80) {
    out = lead;
    return 1;
  } else if ((lead & 0xE0) == 0xC0) {
    len = 2;
    cp = lead & 0x1F;
  } else if ((lead & 0xF0) == 0xE0) {
    len = 3;
    cp = lead & 0x0F;
  } else if ((lead & 0xF8) == 0xF0) {
    len = 4;
    cp = lead & 0x07;
  } else {
    return 0;
  }
  if (pos + len > text.size()) return 0;
  for (std::size_t i = 1; i < len; ++i) {
    const unsigned char b = byte(pos + i);
    if ((b & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b & 0x3F);
  }
  // overlong forms, surrogates, out of range
  static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  out = cp;
  return len;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_space(char32_t cp) {
  if (cp < 0x80) return cp == ' ' || (cp >= '\t' && cp <= '\r');
  if (cp == 0x85 || cp == 0xA0 || cp == 0x1680 || (cp >= 0x2000 && cp <= 0x200A) ||
      cp == 0x2028 || cp == 0x2029 || cp == 0x202F || cp == 0x205F || cp == 0x3000) {
    return true;
  }
  return iswspace_l(static_cast<wint_t>(cp), utf8_locale()) != 0;
}

char32_t to_lower(char32_t cp) {
  if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  return static_cast<char32_t>(towlower_l(static_cast<wint_t>(cp), utf8_locale()));
}

}  // namespace

// ---------------------------------------------------------------------------

Vocabulary::Vocabulary() {
  for (TokenId id = 0; id < special::kCount; ++id) {
    token_of_.emplace_back(special::kSurface[id]);
    id_of_.emplace(token_of_.back(), id);
  }
}

Vocabulary::Vocabulary(std::span<const Token> tokens) : Vocabulary() {
  for (const auto& t : tokens) {
    if (t.empty() || id_of_.contains(t)) continue;
    const auto id = static_cast<TokenId>(token_of_.size());
    token_of_.push_back(t);
    id_of_.emplace(t, id);
  }
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  auto it = id_of_.find(token);
  if (it == id_of_.end()) return std::nullopt;
  return it->second;
}

TokenId Vocabulary::id_of(std::string_view token) const {
  return find(token).value_or(special::kUnk);
}

const Token& Vocabulary::token_of(TokenId id) const {
  if (id >= token_of_.size()) {
    throw RangeError("token id " + std::to_string(id) + " outside vocabulary of size " +
                     std::to_string(token_of_.size()));
  }
  return token_of_[id];
}

// ---------------------------------------------------------------------------

std::optional<std::size_t> find_invalid_utf8(std::string_view text) {
  char32_t cp;
  for (std::size_t pos = 0; pos < text.size();) {
    const std::size_t len = decode_utf8(text, pos, cp);
    if (len == 0) return pos;
    pos += len;
  }
  return std::nullopt;
}

TokenSequence tokenize(std::string_view text, bool lowercase) {
  TokenSequence out;
  std::string current;
  char32_t cp;
  for (std::size_t pos = 0; pos < text.size();) {
    const std::size_t len = decode_utf8(text, pos, cp);
    if (len == 0) throw DecodeError("invalid UTF-8 at byte " + std::to_string(pos));
    if (is_space(cp)) {
      if (!current.empty()) out.push_back(std::move(current));
      current.clear();
    } else if (lowercase) {
      append_utf8(current, to_lower(cp));
    } else {
      current.append(text.substr(pos, len));
    }
    pos += len;
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::string join(std::span<const Token> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

// ---------------------------------------------------------------------------

Vocabulary build_vocabulary(std::span<const TokenSequence> sequences,
                            std::optional<std::size_t> max_size, std::size_t min_freq) {
  if (sequences.empty()) throw ConfigError("build_vocabulary: empty corpus");
  if (min_freq == 0) throw ConfigError("build_vocabulary: min_freq must be >= 1");
  if (max_size && *max_size < special::kCount) {
    throw ConfigError("build_vocabulary: max_size " + std::to_string(*max_size) +
                      " cannot hold the 4 special tokens");
  }

  struct Entry {
    std::string_view token;
    std::size_t count;
    std::size_t first_seen;
  };
  std::vector<Entry> entries;
  std::unordered_map<std::string_view, std::size_t> index;
  for (const auto& seq : sequences) {
    for (const auto& tok : seq) {
      auto [it, inserted] = index.try_emplace(tok, entries.size());
      if (inserted) {
        entries.push_back({tok, 0, entries.size()});
      }
      ++entries[it->second].count;
    }
  }

  std::erase_if(entries, [&](const Entry& e) {
    if (e.count < min_freq) return true;
    for (auto s : special::kSurface) {
      if (e.token == s) return true;
    }
    return false;
  });
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.first_seen < b.first_seen;
  });
  if (max_size && entries.size() > *max_size - special::kCount) {
    entries.resize(*max_size - special::kCount);
  }

  std::vector<Token> kept;
  kept.reserve(entries.size());
  for (const auto& e : entries) kept.emplace_back(e.token);
  return Vocabulary(kept);
}

IdSequence encode(const Vocabulary& vocab, std::span<const Token> seq, bool add_bos_eos) {
  IdSequence out;
  out.reserve(seq.size() + 2);
  if (add_bos_eos) out.push_back(special::kSos);
  for (const auto& tok : seq) out.push_back(vocab.id_of(tok));
  if (add_bos_eos) out.push_back(special::kEos);
  return out;
}

TokenSequence decode(const Vocabulary& vocab, std::span<const TokenId> ids) {
  TokenSequence out;
  out.reserve(ids.size());
  for (TokenId id : ids) {
    const Token& tok = vocab.token_of(id);
    if (!is_special(id)) out.push_back(tok);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lines.empty() && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (auto bad = find_invalid_utf8(line)) {
      throw DecodeError(path.string() + ":" + std::to_string(lines.size() + 1) +
                        ": invalid UTF-8 at byte " + std::to_string(*bad));
    }
    lines.push_back(std::move(line));
  }
  if (in.bad()) throw IoError("read failure on " + path.string());
  return lines;
}

std::vector<TokenSequence> load_single(const std::filesystem::path& path,
                                       const LoadOptions& options) {
  std::vector<TokenSequence> out;
  for (const auto& line : read_lines(path)) out.push_back(tokenize(line, options.lowercase));
  return out;
}

std::vector<PairedExample> load_paired(const std::filesystem::path& src_path,
                                       const std::filesystem::path& tgt_path,
                                       const LoadOptions& options) {
  auto src = load_single(src_path, options);
  auto tgt = load_single(tgt_path, options);
  if (src.size() != tgt.size()) {
    throw AlignmentError("line count mismatch: " + src_path.string() + " has " +
                         std::to_string(src.size()) + " lines, " + tgt_path.string() + " has " +
                         std::to_string(tgt.size()));
  }
  std::vector<PairedExample> out;
  out.reserve(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    out.push_back({std::move(src[i]), std::move(tgt[i])});
  }
  return out;
}

// ---------------------------------------------------------------------------

void SplitRatio::validate() const {
  for (double f : {train, valid, test}) {
    if (!(f >= 0.0 && f <= 1.0)) {
      throw ConfigError("split_ratio fractions must lie in [0,1]");
    }
  }
  if (std::abs(train + valid + test - 1.0) > 1e-9) {
    throw ConfigError("split_ratio fractions must sum to 1");
  }
}

SplitSizes split_sizes(std::size_t n, const SplitRatio& ratio) {
  ratio.validate();
  if (n < 3 && ratio.train > 0 && ratio.valid > 0 && ratio.test > 0) {
    throw SplitError("cannot split " + std::to_string(n) +
                     " examples into three non-empty parts");
  }
  // the small slack keeps products such as 0.29 * 100 from flooring to 28
  const auto part = [n](double frac) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * frac + 1e-9));
  };
  SplitSizes s{part(ratio.train), part(ratio.valid), 0};
  s.train = std::min(s.train, n);
  s.valid = std::min(s.valid, n - s.train);
  s.test = n - s.train - s.valid;
  return s;
}

std::vector<std::size_t> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  return order;
}

// ---------------------------------------------------------------------------

std::vector<Batch> batches(std::span<const IdSequence> data, std::size_t batch_size) {
  if (batch_size == 0) throw ConfigError("batch_size must be >= 1");
  std::vector<Batch> out;
  for (std::size_t start = 0; start < data.size(); start += batch_size) {
    const std::size_t end = std::min(data.size(), start + batch_size);
    Batch b;
    b.rows = end - start;
    for (std::size_t i = start; i < end; ++i) b.width = std::max(b.width, data[i].size());
    b.ids.assign(b.rows * b.width, special::kPad);
    for (std::size_t i = start; i < end; ++i) {
      std::copy(data[i].begin(), data[i].end(), b.ids.begin() + (i - start) * b.width);
      b.lengths.push_back(data[i].size());
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace genbench
