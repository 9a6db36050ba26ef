// phonelm/lexicon.cc

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

#include "phonelm/lexicon.h"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace phonelm {

int Lexicon::word_id(const std::string &word) const {
  auto it = index_.find(word);
  return it == index_.end() ? -1 : it->second;
}

void Lexicon::add(const std::string &word, const std::vector<int> &pron) {
  if (pron.empty()) throw DataError("lexicon: empty pronunciation for '" + word + "'");
  int wid = word_id(word);
  if (wid < 0) {
    wid = size();
    index_.emplace(word, wid);
    entries_.push_back({word, {}});
  }
  auto &prons = entries_[wid].prons;
  if (std::find(prons.begin(), prons.end(), pron) == prons.end())
    prons.push_back(pron);
}

Lexicon parse_lexicon(std::istream &in, const Alphabet &a) {
  Lexicon lex;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw DataError("lexicon line " + std::to_string(lineno) +
                      ": expected `word<TAB>phonemes`");
    std::string word = line.substr(0, tab);
    std::istringstream rest(line.substr(tab + 1));
    std::vector<int> pron;
    std::string ph;
    while (rest >> ph) {
      int id = a.phoneme_id(ph);
      if (id < 0)
        throw DataError("lexicon line " + std::to_string(lineno) +
                        ": unknown phoneme '" + ph + "'");
      pron.push_back(id);
    }
    if (pron.empty())
      throw DataError("lexicon line " + std::to_string(lineno) +
                      ": no phonemes for '" + word + "'");
    lex.add(word, pron);
  }
  return lex;
}

Lexicon parse_lexicon_file(const std::string &path, const Alphabet &a) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file: " + path);
  return parse_lexicon(in, a);
}

int PrefixTree::step(int n, int s) const {
  const auto &ch = nodes_[n].children;
  auto it = ch.find(s);
  return it == ch.end() ? kNoNode : it->second;
}

int PrefixTree::best_word_at(int n) const {
  const auto &t = nodes_[n].terminals;
  return t.empty() ? -1 : t.front();
}

PrefixTree build_prefix_tree(
    const Lexicon &lex, const std::unordered_map<std::string, int64_t> *word_freq) {
  if (lex.empty()) throw DataError("build_prefix_tree: empty lexicon");
  PrefixTree t;
  t.nodes_.emplace_back();
  std::vector<int64_t> freq;
  for (const Lexicon::Entry &e : lex.entries()) {
    t.words_.push_back(e.word);
    int64_t f = 0;
    if (word_freq) {
      auto it = word_freq->find(e.word);
      if (it != word_freq->end()) f = it->second;
    }
    freq.push_back(f);
  }
  for (int wid = 0; wid < lex.size(); ++wid) {
    for (const std::vector<int> &pron : lex.entry(wid).prons) {
      int n = PrefixTree::kRoot;
      for (int s : pron) {
        auto [it, inserted] =
            t.nodes_[n].children.try_emplace(s, static_cast<int>(t.nodes_.size()));
        if (inserted) t.nodes_.emplace_back();
        n = it->second;
      }
      auto &term = t.nodes_[n].terminals;
      if (std::find(term.begin(), term.end(), wid) == term.end())
        term.push_back(wid);
    }
  }
  // Homophone rule: higher corpus frequency wins, then lexicographic.
  for (auto &node : t.nodes_) {
    std::sort(node.terminals.begin(), node.terminals.end(), [&](int x, int y) {
      if (freq[x] != freq[y]) return freq[x] > freq[y];
      return t.words_[x] < t.words_[y];
    });
  }
  return t;
}

}  // namespace phonelm
