// phonelm/ctc.h

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

#ifndef PHONELM_CTC_H_
#define PHONELM_CTC_H_

#include <string>
#include <vector>

#include "phonelm/alphabet.h"
#include "phonelm/lexicon.h"
#include "phonelm/lm.h"
#include "phonelm/types.h"

namespace phonelm {

// Posteriorgram label values: alphabet symbol ids, or one of these.
constexpr int kBlankLabel = -1;
constexpr int kBoundaryLabel = -2;  // the word-boundary target token

// T x L frame-level log-probabilities from a CTC acoustic model (here, the
// synthetic generator). `labels[col]` maps a column to its label value.
struct Posteriorgram {
  Matrix frames;            // T x L, log domain
  std::vector<int> labels;  // symbol id, kBlankLabel or kBoundaryLabel
  int blank_col = -1;

  int num_frames() const { return static_cast<int>(frames.rows()); }
  int num_labels() const { return static_cast<int>(frames.cols()); }
  // -1 when the label value has no column.
  int col_of(int label) const;
  // Checks row normalization (1e-6), label uniqueness, the single blank
  // column and T >= 1. Throws DataError with a description.
  void validate() const;
};

// Collapse adjacent repeats, then drop blanks.
std::vector<int> squash(const std::vector<int> &labels, int blank = kBlankLabel);

// Per-frame argmax (ties -> lowest column) followed by squash. Returns
// label values (symbol ids and possibly kBoundaryLabel).
std::vector<int> greedy_decode(const Posteriorgram &post);

// log P(target | posteriorgram): the CTC forward algorithm summing over
// every alignment that squashes to `target`. -inf when infeasible. Targets
// are label values present in the posteriorgram.
Real seq_log_prob(const Posteriorgram &post, const std::vector<int> &target);

enum class DecodeMode { kGreedy, kOpenVocab, kLexicon };

struct DecodeConfig {
  DecodeMode mode = DecodeMode::kLexicon;
  int beam = 40;
  Real lm_weight = 1.0;     // alpha, scales LM log-probs
  Real ins_penalty = 0.35;  // beta, added per emitted word (log-domain bonus)
  // Skip extensions whose frame log-prob is below this floor.
  bool floor_enabled = true;
  Real label_floor = -30.0;

  void validate() const;
};

struct DecodeResult {
  std::vector<std::string> words;
  Real score = kLogZero;
  // Lexicon mode: no hypothesis survived the constraint (distinct from a
  // legitimately empty transcript).
  bool no_hypothesis = false;
};

// Open-vocabulary CTC prefix beam search with per-symbol LM fusion. The
// boundary label is scored as the language's <space>; output words are the
// phoneme texts between boundaries, so OOV outputs are possible.
DecodeResult beam_search_open(const Posteriorgram &post, const LMParams &lm,
                              const Alphabet &a, int lang,
                              const DecodeConfig &cfg);

// As above, but a phoneme extension must stay inside the pronunciation
// trie and a boundary is admitted only at a terminal node, committing the
// homophone-rule word. Every output word is a lexicon word.
DecodeResult beam_search_lexicon(const Posteriorgram &post, const LMParams &lm,
                                 const Alphabet &a, int lang,
                                 const PrefixTree &trie, const DecodeConfig &cfg);

// Exact reference: enumerates every feasible pronunciation sequence (with
// boundary tokens between words), scores seq_log_prob + alpha * LM +
// beta * words, and returns the argmax under the shared tie rules. Refuses
// instances with more than `max_candidates` sequences.
DecodeResult brute_force_decode(const Posteriorgram &post, const LMParams &lm,
                                const Alphabet &a, int lang,
                                const PrefixTree &trie, const DecodeConfig &cfg,
                                int64_t max_candidates = 1000000);

// Decodes a batch across `jobs` worker threads sharing the immutable model;
// results are in input order regardless of completion order. The trie may
// be null outside lexicon mode.
std::vector<DecodeResult> decode_batch(const std::vector<Posteriorgram> &posts,
                                       const LMParams &lm, const Alphabet &a,
                                       int lang, const PrefixTree *trie,
                                       const DecodeConfig &cfg, int jobs);

}  // namespace phonelm

#endif  // PHONELM_CTC_H_
