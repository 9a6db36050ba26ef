// phonelm/corpus.cc

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

#include "phonelm/corpus.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace phonelm {

std::unordered_map<std::string, int64_t> Corpus::word_frequencies() const {
  std::unordered_map<std::string, int64_t> freq;
  for (const Utterance &u : utterances)
    for (const std::string &w : u.words) ++freq[w];
  return freq;
}

std::vector<std::pair<std::string, std::vector<std::string>>> read_transcript(
    std::istream &in) {
  std::vector<std::pair<std::string, std::vector<std::string>>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw DataError("transcript line " + std::to_string(lineno) +
                      ": expected `utt-id<TAB>words`");
    std::string id = line.substr(0, tab);
    std::istringstream rest(line.substr(tab + 1));
    std::vector<std::string> words;
    std::string w;
    while (rest >> w) words.push_back(w);
    out.emplace_back(std::move(id), std::move(words));
  }
  return out;
}

std::vector<std::pair<std::string, std::vector<std::string>>> read_transcript_file(
    const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open transcript file: " + path);
  return read_transcript(in);
}

void write_transcript_file(
    const std::string &path,
    const std::vector<std::pair<std::string, std::vector<std::string>>> &utts) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write transcript file: " + path);
  for (const auto &[id, words] : utts) {
    out << id << '\t';
    for (size_t i = 0; i < words.size(); ++i) {
      if (i) out << ' ';
      out << words[i];
    }
    out << '\n';
  }
  if (!out) throw DataError("failed writing transcript file: " + path);
}

Corpus load_corpus(const std::string &path, const Alphabet &a, int lang,
                   const Lexicon &lex, OovPolicy policy) {
  Corpus c;
  c.source = path;
  std::set<std::string> seen;
  for (auto &[id, words] : read_transcript_file(path)) {
    if (!seen.insert(id).second)
      throw DataError("corpus " + path + ": duplicate utterance id '" + id + "'");
    auto encoded = encode_utterance(a, lang, words, lex, policy);
    if (!encoded) {
      ++c.skipped_oov;
      continue;
    }
    Utterance u;
    u.id = id;
    u.lang = lang;
    u.words = std::move(words);
    u.symbols = std::move(*encoded);
    c.utterances.push_back(std::move(u));
  }
  return c;
}

std::pair<Corpus, Corpus> split_corpus(const Corpus &c, Real fraction,
                                       uint64_t seed) {
  if (!(fraction > 0) || fraction > 1)
    throw DataError("split_corpus: fraction must be in (0, 1]");
  const size_t n = c.utterances.size();
  const size_t take = static_cast<size_t>(std::floor(fraction * static_cast<Real>(n)));

  // One seeded permutation; every fraction takes a prefix of it, which is
  // what makes the 5% subset nest inside the 10% subset.
  std::vector<size_t> perm(n);
  for (size_t i = 0; i < n; ++i) perm[i] = i;
  Rng rng(seed);
  for (size_t i = n; i > 1; --i)
    std::swap(perm[i - 1], perm[uniform_index(rng, i)]);

  std::vector<uint8_t> in_subset(n, 0);
  for (size_t i = 0; i < take; ++i) in_subset[perm[i]] = 1;

  Corpus subset, remainder;
  subset.source = c.source;
  remainder.source = c.source;
  for (size_t i = 0; i < n; ++i)
    (in_subset[i] ? subset : remainder).utterances.push_back(c.utterances[i]);
  return {std::move(subset), std::move(remainder)};
}

}  // namespace phonelm
