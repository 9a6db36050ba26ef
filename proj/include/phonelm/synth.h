// phonelm/synth.h

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

#ifndef PHONELM_SYNTH_H_
#define PHONELM_SYNTH_H_

#include <vector>

#include "phonelm/alphabet.h"
#include "phonelm/ctc.h"
#include "phonelm/types.h"

namespace phonelm {

// Column order of synthetic posteriorgrams for one language: the language's
// phonemes by ascending id, then BOUNDARY, then BLANK last.
std::vector<int> synth_labels(const Alphabet &a, int lang);

// encode_utterance layout -> acoustic reference: boundary <sos> symbols
// dropped, <space> mapped to kBoundaryLabel.
std::vector<int> to_acoustic_labels(const Alphabet &a, int lang,
                                    const std::vector<int> &encoded);

struct SynthConfig {
  int frames_per_symbol = 3;
  Real noise = 0.0;       // mass taken from the true label per emission frame
  Real blank_mass = 0.3;  // share of the noise mass routed to blank
  // Optional L x L similarity over synth_labels columns; row i weighs the
  // confusable columns when column i is the true label (diagonal and blank
  // entries ignored). Uniform when null.
  const Matrix *confusion = nullptr;
  uint64_t seed = 0;
};

// Per reference symbol, emits frames_per_symbol frames concentrating
// (1 - noise) on the true label, the rest split between blank and
// confusables; equal adjacent symbols get a blank-dominated separator frame
// in between. The mass is jittered by a seeded exponential race drawn once
// per symbol occurrence (P(argmax = c) = mean mass of c, and corruption is
// correlated across the symbol's frames), so noisy decoding actually errs;
// at noise = 0 frames are exact one-hots and greedy_decode returns the
// reference. Rows normalize exactly. Requires blank_mass + noise < 1.
Posteriorgram synth_posteriors(const std::vector<int> &ref_labels,
                               const Alphabet &a, int lang,
                               const SynthConfig &cfg);

}  // namespace phonelm

#endif  // PHONELM_SYNTH_H_
