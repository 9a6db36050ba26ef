// phonelm/alphabet.h

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

#ifndef PHONELM_ALPHABET_H_
#define PHONELM_ALPHABET_H_

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "phonelm/types.h"

namespace phonelm {

class Lexicon;

enum class SymbolKind { kPhoneme, kSpace, kSos };

const char *symbol_kind_name(SymbolKind k);

// One unit of the shared inventory. Phonemes are language-agnostic
// (lang == -1); each language owns exactly one space and one sos symbol.
struct Symbol {
  int id = -1;
  std::string text;
  SymbolKind kind = SymbolKind::kPhoneme;
  int lang = -1;
};

// Union inventory over all languages, with per-language masks selecting
// the language's phonemes plus its own boundary symbols. Immutable after
// construction; safe to share read-only across decode/eval workers.
class Alphabet {
 public:
  int size() const { return static_cast<int>(symbols_.size()); }
  int num_languages() const { return static_cast<int>(languages_.size()); }

  const Symbol &symbol(int id) const { return symbols_[id]; }
  const std::vector<Symbol> &symbols() const { return symbols_; }

  const std::string &language_name(int lang) const { return languages_[lang]; }
  // -1 if the name is not registered.
  int language_index(const std::string &name) const;

  int space_id(int lang) const { return space_ids_[lang]; }
  int sos_id(int lang) const { return sos_ids_[lang]; }
  // -1 if no phoneme with this text exists.
  int phoneme_id(const std::string &text) const;

  const BoolVec &mask(int lang) const { return masks_[lang]; }
  bool allowed(int lang, int id) const { return masks_[lang][id] != 0; }
  // Ascending symbol ids selected by mask(lang).
  const std::vector<int> &allowed_ids(int lang) const { return allowed_[lang]; }

  // Stable content hash over languages and symbols; checkpoints carry it
  // so a model is never evaluated against a mismatching inventory.
  uint64_t hash() const;

  // One line per symbol: id <TAB> text <TAB> kind <TAB> owner (or "-").
  void dump_tsv(std::ostream &os) const;

 private:
  friend Alphabet build_alphabet(
      const std::vector<std::pair<std::string, std::set<std::string>>> &inventories);
  friend Alphabet extend_alphabet(const Alphabet &a, const std::string &new_lang,
                                  const std::set<std::string> &phonemes);
  friend struct AlphabetSerde;  // checkpoint (de)serialization

  void add_symbol(const std::string &text, SymbolKind kind, int lang);
  void rebuild_masks();

  std::vector<Symbol> symbols_;
  std::vector<std::string> languages_;
  std::vector<std::set<std::string>> lang_has_phoneme_;
  std::vector<int> space_ids_, sos_ids_;
  std::vector<BoolVec> masks_;
  std::vector<std::vector<int>> allowed_;
};

// Builds the union alphabet: shared phonemes sorted by text first, then
// <space>/<sos> per language in index order. Language index = position in
// `inventories`. Throws DataError on an empty phoneme set or duplicate name.
Alphabet build_alphabet(
    const std::vector<std::pair<std::string, std::set<std::string>>> &inventories);

// Adds one language to an existing alphabet. Phonemes already in the union
// keep their ids; unseen phonemes (sorted) and the new boundary symbols are
// appended, so every pre-existing id is stable.
Alphabet extend_alphabet(const Alphabet &a, const std::string &new_lang,
                         const std::set<std::string> &phonemes);

enum class OovPolicy { kSkip, kStrict };

// Sentence layout: <sos>_l pron(w1) <sp>_l pron(w2) ... pron(wn) <sos>_l.
// The trailing <sos>_l is the sentence terminator. The first pronunciation
// variant encodes each word. Returns nullopt for an OOV word under kSkip;
// throws DataError under kStrict.
std::optional<std::vector<int>> encode_utterance(
    const Alphabet &a, int lang, const std::vector<std::string> &words,
    const Lexicon &lex, OovPolicy policy = OovPolicy::kSkip);

}  // namespace phonelm

#endif  // PHONELM_ALPHABET_H_
