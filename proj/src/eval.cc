// phonelm/eval.cc

// Copyright 2026  The phonelm authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phonelm/eval.h"

#include <algorithm>

namespace phonelm {

UttErrors edit_distance(const std::vector<std::string> &ref,
                        const std::vector<std::string> &hyp) {
  const size_t n = ref.size(), m = hyp.size();
  std::vector<std::vector<int64_t>> dp(n + 1, std::vector<int64_t>(m + 1));
  for (size_t i = 0; i <= n; ++i) dp[i][0] = static_cast<int64_t>(i);
  for (size_t j = 0; j <= m; ++j) dp[0][j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      const int64_t sub = dp[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      dp[i][j] = std::min({sub, dp[i - 1][j] + 1, dp[i][j - 1] + 1});
    }
  }

  // Traceback, diagonal first so equal-cost alignments resolve to
  // substitutions rather than insertion+deletion pairs.
  UttErrors e;
  e.ref_length = static_cast<int64_t>(n);
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        dp[i][j] == dp[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++e.substitutions;
      --i;
      --j;
    } else if (i > 0 && dp[i][j] == dp[i - 1][j] + 1) {
      ++e.deletions;
      --i;
    } else {
      ++e.insertions;
      --j;
    }
  }
  return e;
}

Real wer(const std::vector<UttErrors> &errors) {
  int64_t errs = 0, len = 0;
  for (const UttErrors &e : errors) {
    errs += e.total();
    len += e.ref_length;
  }
  if (len == 0) throw DataError("wer: total reference length is zero");
  return 100.0 * static_cast<Real>(errs) / static_cast<Real>(len);
}

Real bootstrap_compare(const std::vector<UttErrors> &sys1,
                       const std::vector<UttErrors> &sys2, int64_t resamples,
                       uint64_t seed) {
  if (sys1.size() != sys2.size())
    throw DataError("bootstrap_compare: paired systems differ in length");
  if (sys1.empty()) throw DataError("bootstrap_compare: no utterances");
  if (resamples < 1) throw DataError("bootstrap_compare: resamples must be >= 1");

  const size_t n = sys1.size();
  Rng rng(seed);
  int64_t wins = 0, ties = 0;
  for (int64_t r = 0; r < resamples; ++r) {
    // Paired indices share the reference, so the per-replicate denominators
    // agree and comparing WERs reduces to comparing error totals.
    int64_t err1 = 0, err2 = 0;
    for (size_t k = 0; k < n; ++k) {
      const size_t idx = static_cast<size_t>(uniform_index(rng, n));
      err1 += sys1[idx].total();
      err2 += sys2[idx].total();
    }
    if (err1 < err2)
      ++wins;
    else if (err1 == err2)
      ++ties;
  }
  return (static_cast<Real>(wins) + 0.5 * static_cast<Real>(ties)) /
         static_cast<Real>(resamples);
}

Real oov_rate(const std::set<std::string> &train_vocab,
              const std::vector<std::vector<std::string>> &eval_utterances) {
  int64_t tokens = 0, oov = 0;
  for (const auto &words : eval_utterances) {
    for (const std::string &w : words) {
      ++tokens;
      if (!train_vocab.count(w)) ++oov;
    }
  }
  if (tokens == 0) throw DataError("oov_rate: no evaluation tokens");
  return 100.0 * static_cast<Real>(oov) / static_cast<Real>(tokens);
}

}  // namespace phonelm
