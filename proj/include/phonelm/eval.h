// phonelm/eval.h

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

#ifndef PHONELM_EVAL_H_
#define PHONELM_EVAL_H_

#include <set>
#include <string>
#include <vector>

#include "phonelm/types.h"

namespace phonelm {

struct UttErrors {
  int64_t substitutions = 0;
  int64_t deletions = 0;
  int64_t insertions = 0;
  int64_t ref_length = 0;

  int64_t total() const { return substitutions + deletions + insertions; }
};

// Minimal S+D+I alignment (unit costs); among minimal alignments the
// traceback prefers substitutions over insertion+deletion pairs.
UttErrors edit_distance(const std::vector<std::string> &ref,
                        const std::vector<std::string> &hyp);

// 100 * sum(S+D+I) / sum(ref length). Throws DataError when the reference
// is empty overall.
Real wer(const std::vector<UttErrors> &errors);

// Paired bootstrap over utterances: resample indices with replacement,
// compare total WERs per replicate, credit ties 0.5. Returns the
// probability that system 1 improves on system 2. Deterministic per seed.
Real bootstrap_compare(const std::vector<UttErrors> &sys1,
                       const std::vector<UttErrors> &sys2, int64_t resamples,
                       uint64_t seed);

// 100 * (eval tokens outside train_vocab) / (eval tokens).
Real oov_rate(const std::set<std::string> &train_vocab,
              const std::vector<std::vector<std::string>> &eval_utterances);

}  // namespace phonelm

#endif  // PHONELM_EVAL_H_
