// phonelm/alphabet.cc

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

#include "phonelm/alphabet.h"

#include <algorithm>
#include <ostream>

#include "phonelm/lexicon.h"

namespace phonelm {

const char *symbol_kind_name(SymbolKind k) {
  switch (k) {
    case SymbolKind::kPhoneme: return "phoneme";
    case SymbolKind::kSpace: return "space";
    case SymbolKind::kSos: return "sos";
  }
  return "?";
}

int Alphabet::language_index(const std::string &name) const {
  for (int l = 0; l < num_languages(); ++l)
    if (languages_[l] == name) return l;
  return -1;
}

int Alphabet::phoneme_id(const std::string &text) const {
  for (const Symbol &s : symbols_)
    if (s.kind == SymbolKind::kPhoneme && s.text == text) return s.id;
  return -1;
}

uint64_t Alphabet::hash() const {
  uint64_t h = 0xcbf29ce484222325ull;
  h = fnv1a64_u64(languages_.size(), h);
  for (size_t l = 0; l < languages_.size(); ++l) {
    h = fnv1a64(languages_[l], fnv1a64("\x1f", h));
    // membership sets matter: the same symbol list under different
    // language assignments produces different masks
    h = fnv1a64_u64(lang_has_phoneme_[l].size(), h);
    for (const std::string &p : lang_has_phoneme_[l])
      h = fnv1a64(p, fnv1a64("\x1e", h));
  }
  h = fnv1a64_u64(symbols_.size(), h);
  for (const Symbol &s : symbols_) {
    h = fnv1a64(s.text, fnv1a64("\x1f", h));
    h = fnv1a64_u64(static_cast<uint64_t>(s.kind), h);
    h = fnv1a64_u64(static_cast<uint64_t>(s.lang) + 1, h);
  }
  return h;
}

void Alphabet::dump_tsv(std::ostream &os) const {
  for (const Symbol &s : symbols_) {
    os << s.id << '\t' << s.text << '\t' << symbol_kind_name(s.kind) << '\t'
       << (s.lang < 0 ? std::string("-") : languages_[s.lang]) << '\n';
  }
}

void Alphabet::add_symbol(const std::string &text, SymbolKind kind, int lang) {
  Symbol s;
  s.id = static_cast<int>(symbols_.size());
  s.text = text;
  s.kind = kind;
  s.lang = lang;
  symbols_.push_back(std::move(s));
}

void Alphabet::rebuild_masks() {
  const int v = size();
  masks_.assign(languages_.size(), BoolVec(v, 0));
  allowed_.assign(languages_.size(), {});
  for (const Symbol &s : symbols_) {
    if (s.kind == SymbolKind::kPhoneme) {
      for (size_t l = 0; l < languages_.size(); ++l)
        if (lang_has_phoneme_[l].count(s.text)) masks_[l][s.id] = 1;
    } else {
      masks_[s.lang][s.id] = 1;
    }
  }
  for (size_t l = 0; l < languages_.size(); ++l)
    for (int id = 0; id < v; ++id)
      if (masks_[l][id]) allowed_[l].push_back(id);
}

Alphabet build_alphabet(
    const std::vector<std::pair<std::string, std::set<std::string>>> &inventories) {
  if (inventories.empty()) throw DataError("build_alphabet: no languages given");
  Alphabet a;
  std::set<std::string> union_phonemes;
  for (const auto &[name, phonemes] : inventories) {
    if (phonemes.empty())
      throw DataError("build_alphabet: empty phoneme set for language '" + name + "'");
    if (a.language_index(name) >= 0)
      throw DataError("build_alphabet: duplicate language '" + name + "'");
    a.languages_.push_back(name);
    a.lang_has_phoneme_.push_back(phonemes);
    union_phonemes.insert(phonemes.begin(), phonemes.end());
  }
  for (const std::string &p : union_phonemes)  // std::set iterates sorted
    a.add_symbol(p, SymbolKind::kPhoneme, -1);
  a.space_ids_.resize(a.num_languages());
  a.sos_ids_.resize(a.num_languages());
  for (int l = 0; l < a.num_languages(); ++l) {
    a.space_ids_[l] = a.size();
    a.add_symbol("<sp>", SymbolKind::kSpace, l);
    a.sos_ids_[l] = a.size();
    a.add_symbol("<sos>", SymbolKind::kSos, l);
  }
  a.rebuild_masks();
  return a;
}

Alphabet extend_alphabet(const Alphabet &a, const std::string &new_lang,
                         const std::set<std::string> &phonemes) {
  if (phonemes.empty())
    throw DataError("extend_alphabet: empty phoneme set for language '" + new_lang + "'");
  if (a.language_index(new_lang) >= 0)
    throw DataError("extend_alphabet: language '" + new_lang + "' already present");
  Alphabet out = a;
  out.languages_.push_back(new_lang);
  out.lang_has_phoneme_.push_back(phonemes);
  for (const std::string &p : phonemes)  // sorted; only unseen ones appended
    if (a.phoneme_id(p) < 0) out.add_symbol(p, SymbolKind::kPhoneme, -1);
  out.space_ids_.push_back(out.size());
  out.add_symbol("<sp>", SymbolKind::kSpace, out.num_languages() - 1);
  out.sos_ids_.push_back(out.size());
  out.add_symbol("<sos>", SymbolKind::kSos, out.num_languages() - 1);
  out.rebuild_masks();
  return out;
}

std::optional<std::vector<int>> encode_utterance(
    const Alphabet &a, int lang, const std::vector<std::string> &words,
    const Lexicon &lex, OovPolicy policy) {
  std::vector<int> seq;
  seq.push_back(a.sos_id(lang));
  bool first = true;
  for (const std::string &w : words) {
    int wid = lex.word_id(w);
    if (wid < 0) {
      if (policy == OovPolicy::kStrict)
        throw DataError("encode_utterance: OOV word '" + w + "'");
      return std::nullopt;
    }
    if (!first) seq.push_back(a.space_id(lang));
    first = false;
    const std::vector<int> &pron = lex.entry(wid).prons.front();
    seq.insert(seq.end(), pron.begin(), pron.end());
  }
  seq.push_back(a.sos_id(lang));
  return seq;
}

}  // namespace phonelm
