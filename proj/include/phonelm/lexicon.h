// phonelm/lexicon.h

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

#ifndef PHONELM_LEXICON_H_
#define PHONELM_LEXICON_H_

#include <iosfwd>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "phonelm/alphabet.h"
#include "phonelm/types.h"

namespace phonelm {

// word -> pronunciation variants (phoneme-id sequences). Word order is the
// file order; pronunciations keep their file order too, and the first
// variant is the encoding variant.
class Lexicon {
 public:
  struct Entry {
    std::string word;
    std::vector<std::vector<int>> prons;
  };

  int size() const { return static_cast<int>(entries_.size()); }
  bool empty() const { return entries_.empty(); }
  const Entry &entry(int word_id) const { return entries_[word_id]; }
  const std::vector<Entry> &entries() const { return entries_; }
  // -1 if the word is absent.
  int word_id(const std::string &word) const;
  bool contains(const std::string &word) const { return word_id(word) >= 0; }

  // Accumulates a variant; duplicate (word, pron) pairs are dropped.
  void add(const std::string &word, const std::vector<int> &pron);

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::string, int> index_;
};

// TSV: `word<TAB>phoneme phoneme ...`, UTF-8, '#' comment lines and blank
// lines ignored. Unknown phonemes and malformed lines raise DataError with
// the 1-based line number.
Lexicon parse_lexicon(std::istream &in, const Alphabet &a);
Lexicon parse_lexicon_file(const std::string &path, const Alphabet &a);

// Deterministic pronunciation trie. Node 0 is the root; each node maps
// phoneme id -> child node and carries the ids of words whose pronunciation
// ends exactly there, ordered best-first (higher unigram frequency, then
// lexicographic) so terminals.front() is the homophone-rule winner.
class PrefixTree {
 public:
  static constexpr int kRoot = 0;
  static constexpr int kNoNode = -1;

  struct Node {
    std::map<int, int> children;
    std::vector<int> terminals;
  };

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  const Node &node(int n) const { return nodes_[n]; }

  // Child reached by extending with phoneme `s`, or kNoNode when the
  // extension is no longer a prefix of any pronunciation.
  int step(int n, int s) const;

  bool is_terminal(int n) const { return !nodes_[n].terminals.empty(); }
  // Word id committed when a word ends at `n` (homophone rule), or -1.
  int best_word_at(int n) const;

  const std::string &word(int word_id) const { return words_[word_id]; }
  int num_words() const { return static_cast<int>(words_.size()); }

 private:
  friend PrefixTree build_prefix_tree(
      const Lexicon &lex,
      const std::unordered_map<std::string, int64_t> *word_freq);

  std::vector<Node> nodes_;
  std::vector<std::string> words_;
};

// Builds the trie over every pronunciation variant. `word_freq` supplies
// unigram counts (typically from the LM training corpus) for the homophone
// tie rule; missing or null means frequency 0, i.e. lexicographic only.
PrefixTree build_prefix_tree(
    const Lexicon &lex,
    const std::unordered_map<std::string, int64_t> *word_freq = nullptr);

}  // namespace phonelm

#endif  // PHONELM_LEXICON_H_
