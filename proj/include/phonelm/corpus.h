// phonelm/corpus.h

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

#ifndef PHONELM_CORPUS_H_
#define PHONELM_CORPUS_H_

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "phonelm/alphabet.h"
#include "phonelm/lexicon.h"
#include "phonelm/types.h"

namespace phonelm {

struct Utterance {
  std::string id;
  int lang = 0;
  std::vector<std::string> words;
  std::vector<int> symbols;  // encode_utterance layout
};

struct Corpus {
  std::vector<Utterance> utterances;
  std::string source;
  int skipped_oov = 0;  // utterances dropped under OovPolicy::kSkip

  int size() const { return static_cast<int>(utterances.size()); }
  bool empty() const { return utterances.empty(); }
  // Unigram word counts, for the prefix-tree homophone rule.
  std::unordered_map<std::string, int64_t> word_frequencies() const;
};

// Transcript format (shared with eval): one utterance per line,
// `utt-id<TAB>word word ...`.
std::vector<std::pair<std::string, std::vector<std::string>>> read_transcript(
    std::istream &in);
std::vector<std::pair<std::string, std::vector<std::string>>> read_transcript_file(
    const std::string &path);
void write_transcript_file(
    const std::string &path,
    const std::vector<std::pair<std::string, std::vector<std::string>>> &utts);

// Reads a transcript and encodes every utterance for `lang`. Utterances with
// OOV words are dropped (and counted) under kSkip, fatal under kStrict.
// Duplicate utterance ids are a format error.
Corpus load_corpus(const std::string &path, const Alphabet &a, int lang,
                   const Lexicon &lex, OovPolicy policy = OovPolicy::kSkip);

// Seed-deterministic uniform subset of floor(fraction * N) utterances plus
// the remainder. Subsets nest: for one seed, the 5% subset is contained in
// the 10% subset (both are prefixes of the same permutation). Utterance
// order inside each part follows the original corpus.
std::pair<Corpus, Corpus> split_corpus(const Corpus &c, Real fraction,
                                       uint64_t seed);

}  // namespace phonelm

#endif  // PHONELM_CORPUS_H_
