// phonelm/synth.cc

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

#include "phonelm/synth.h"

#include <cmath>

namespace phonelm {

std::vector<int> synth_labels(const Alphabet &a, int lang) {
  std::vector<int> labels;
  for (int id : a.allowed_ids(lang))
    if (a.symbol(id).kind == SymbolKind::kPhoneme) labels.push_back(id);
  labels.push_back(kBoundaryLabel);
  labels.push_back(kBlankLabel);
  return labels;
}

std::vector<int> to_acoustic_labels(const Alphabet &a, int lang,
                                    const std::vector<int> &encoded) {
  std::vector<int> out;
  for (int s : encoded) {
    if (s == a.sos_id(lang)) continue;
    if (s == a.space_id(lang)) {
      out.push_back(kBoundaryLabel);
    } else {
      if (a.symbol(s).kind != SymbolKind::kPhoneme || !a.allowed(lang, s))
        throw DataError("to_acoustic_labels: symbol outside the language");
      out.push_back(s);
    }
  }
  return out;
}

Posteriorgram synth_posteriors(const std::vector<int> &ref_labels,
                               const Alphabet &a, int lang,
                               const SynthConfig &cfg) {
  if (ref_labels.empty()) throw DataError("synth_posteriors: empty reference");
  if (cfg.frames_per_symbol < 1)
    throw DataError("synth_posteriors: frames_per_symbol must be >= 1");
  if (cfg.noise < 0 || cfg.noise > 1 || cfg.blank_mass < 0 || cfg.blank_mass > 1)
    throw DataError("synth_posteriors: noise and blank_mass must be in [0, 1]");
  if (cfg.blank_mass + cfg.noise >= 1)
    throw DataError("synth_posteriors: blank_mass + noise must be < 1");

  Posteriorgram post;
  post.labels = synth_labels(a, lang);
  const int L = static_cast<int>(post.labels.size());
  post.blank_col = L - 1;
  if (cfg.confusion &&
      (cfg.confusion->rows() != L || cfg.confusion->cols() != L))
    throw DataError("synth_posteriors: confusion matrix must be L x L");

  std::vector<int> ref_cols;
  for (int r : ref_labels) {
    int c = -1;
    for (int k = 0; k < L; ++k)
      if (post.labels[k] == r) { c = k; break; }
    if (c < 0 || c == post.blank_col)
      throw DataError("synth_posteriors: reference symbol outside the label set");
    ref_cols.push_back(c);
  }

  // Frame plan: frames_per_symbol per reference symbol, plus one separator
  // frame between equal adjacent symbols (CTC needs the blank gap). Jitter
  // is drawn once per symbol occurrence (group), not per frame, so a
  // misheard phone stays misheard across its frames and CTC voting cannot
  // simply average the corruption away; separators draw their own.
  struct PlanEntry {
    int true_col;
    bool separator;
    int group;
  };
  std::vector<PlanEntry> plan;
  int group = 0;
  for (size_t i = 0; i < ref_cols.size(); ++i) {
    if (i > 0 && ref_cols[i] == ref_cols[i - 1])
      plan.push_back({ref_cols[i], true, group++});
    for (int f = 0; f < cfg.frames_per_symbol; ++f)
      plan.push_back({ref_cols[i], false, group});
    ++group;
  }

  Rng rng(cfg.seed);
  post.frames.resize(static_cast<int>(plan.size()), L);
  Vector mean(L), prob(L);
  int drawn_group = -1;
  for (size_t t = 0; t < plan.size(); ++t) {
    const auto [true_col, separator, grp] = plan[t];
    if (grp == drawn_group) {  // reuse the group's distribution
      for (int c = 0; c < L; ++c)
        post.frames(static_cast<int>(t), c) = post.frames(static_cast<int>(t) - 1, c);
      continue;
    }
    mean.setZero();
    if (separator) {
      mean[post.blank_col] = 1.0 - cfg.noise;
      if (cfg.noise > 0)
        for (int c = 0; c < L; ++c)
          if (c != post.blank_col) mean[c] = cfg.noise / (L - 1);
    } else {
      mean[true_col] = 1.0 - cfg.noise;
      mean[post.blank_col] = cfg.noise * cfg.blank_mass;
      const Real spread = cfg.noise * (1.0 - cfg.blank_mass);
      if (spread > 0) {
        Real wsum = 0;
        for (int c = 0; c < L; ++c) {
          if (c == true_col || c == post.blank_col) continue;
          wsum += cfg.confusion ? std::max(0.0, (*cfg.confusion)(true_col, c)) : 1.0;
        }
        for (int c = 0; c < L; ++c) {
          if (c == true_col || c == post.blank_col) continue;
          const Real w =
              cfg.confusion ? std::max(0.0, (*cfg.confusion)(true_col, c)) : 1.0;
          mean[c] = wsum > 0 ? spread * w / wsum : 0.0;
        }
        if (wsum <= 0) mean[true_col] += spread;  // nothing to confuse with
      }
    }
    // Exponential race: P(argmax = c) equals mean[c] exactly, and a column
    // with zero mean stays exactly zero, so noise = 0 keeps one-hot frames.
    if (cfg.noise > 0) {
      for (int c = 0; c < L; ++c) prob[c] = mean[c] * exponential_real(rng);
    } else {
      prob = mean;
    }
    prob /= prob.sum();
    for (int c = 0; c < L; ++c)
      post.frames(static_cast<int>(t), c) =
          prob[c] > 0 ? std::log(prob[c]) : kLogZero;
    drawn_group = grp;
  }
  return post;
}

}  // namespace phonelm
