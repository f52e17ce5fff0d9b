#include "genbench/model.hpp"

namespace genbench {

double LanguageModel::sequence_logprob(std::span<const TokenId> seq) const {
  double total = 0.0;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    if (seq[i] >= vocab_size()) {
      throw RangeError("token id " + std::to_string(seq[i]) + " outside model vocabulary");
    }
    total += next_logprobs(seq.first(i))[seq[i]];
  }
  return total;
}

double LanguageModel::forward(const Batch& batch) const {
  double nll = 0.0;
  std::size_t scored = 0;
  for (std::size_t r = 0; r < batch.rows; ++r) {
    const auto row = batch.row(r);
    if (row.size() < 2) continue;
    nll -= sequence_logprob(row);
    scored += row.size() - 1;
  }
  return scored == 0 ? 0.0 : nll / static_cast<double>(scored);
}

}  // namespace genbench
