// phonelm/ctc.cc

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

#include "phonelm/ctc.h"

#include <algorithm>
#include <set>

namespace phonelm {

int Posteriorgram::col_of(int label) const {
  for (size_t c = 0; c < labels.size(); ++c)
    if (labels[c] == label) return static_cast<int>(c);
  return -1;
}

void Posteriorgram::validate() const {
  if (num_frames() < 1) throw DataError("posteriorgram: T must be >= 1");
  if (num_labels() != static_cast<int>(labels.size()))
    throw DataError("posteriorgram: label list does not match column count");
  int blanks = 0;
  std::set<int> seen;
  for (size_t c = 0; c < labels.size(); ++c) {
    if (!seen.insert(labels[c]).second)
      throw DataError("posteriorgram: duplicate label value");
    if (labels[c] == kBlankLabel) {
      ++blanks;
      if (static_cast<int>(c) != blank_col)
        throw DataError("posteriorgram: blank_col does not match the BLANK column");
    }
  }
  if (blanks != 1) throw DataError("posteriorgram: exactly one BLANK column required");
  for (int t = 0; t < num_frames(); ++t) {
    Real total = kLogZero;
    for (int c = 0; c < num_labels(); ++c) total = log_add(total, frames(t, c));
    if (std::abs(total) > 1e-6)
      throw DataError("posteriorgram: row " + std::to_string(t) +
                      " does not normalize (log-sum " + std::to_string(total) + ")");
  }
}

std::vector<int> squash(const std::vector<int> &labels, int blank) {
  std::vector<int> out;
  int prev = blank;  // sentinel: leading repeats of blank collapse anyway
  bool first = true;
  for (int l : labels) {
    if (!first && l == prev) continue;
    first = false;
    prev = l;
    if (l != blank) out.push_back(l);
  }
  return out;
}

std::vector<int> greedy_decode(const Posteriorgram &post) {
  std::vector<int> path(post.num_frames());
  for (int t = 0; t < post.num_frames(); ++t) {
    int best = 0;
    for (int c = 1; c < post.num_labels(); ++c)
      if (post.frames(t, c) > post.frames(t, best)) best = c;
    path[t] = post.labels[best];
  }
  return squash(path, kBlankLabel);
}

Real seq_log_prob(const Posteriorgram &post, const std::vector<int> &target) {
  const int T = post.num_frames();
  const int n = static_cast<int>(target.size());
  std::vector<int> cols(n);
  for (int i = 0; i < n; ++i) {
    cols[i] = post.col_of(target[i]);
    if (cols[i] < 0) return kLogZero;
    if (target[i] == kBlankLabel)
      throw DataError("seq_log_prob: target contains the blank label");
  }
  const int blank = post.blank_col;

  // Forward over the blank-interleaved state graph: states 0..2n, even =
  // blank slots, odd state 2i+1 = target[i]. A diagonal move into state s
  // is allowed unless it repeats the same label with no blank in between.
  const int states = 2 * n + 1;
  std::vector<Real> alpha(states, kLogZero), next(states);
  alpha[0] = post.frames(0, blank);
  if (n > 0) alpha[1] = post.frames(0, cols[0]);
  for (int t = 1; t < T; ++t) {
    for (int s = 0; s < states; ++s) {
      Real acc = alpha[s];
      if (s >= 1) acc = log_add(acc, alpha[s - 1]);
      if (s >= 2 && s % 2 == 1 && target[s / 2] != target[s / 2 - 1])
        acc = log_add(acc, alpha[s - 2]);
      const int col = s % 2 == 0 ? blank : cols[s / 2];
      next[s] = acc == kLogZero ? kLogZero : acc + post.frames(t, col);
    }
    alpha.swap(next);
  }
  Real total = alpha[states - 1];
  if (states >= 2) total = log_add(total, alpha[states - 2]);
  return total;
}

void DecodeConfig::validate() const {
  if (beam < 1) throw DataError("decode: beam must be >= 1");
}

}  // namespace phonelm
