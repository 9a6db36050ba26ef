// phonelm/beam_search.cc

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

#include <algorithm>
#include <atomic>
#include <limits>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "phonelm/ctc.h"

namespace phonelm {

namespace {

// ---------------------------------------------------------------------------
// CTC prefix beam search bookkeeping.
//
// Every hypothesis is a squashed label prefix carrying its alignment mass
// split by how the alignment ends:
//   lp_b  = log sum of alignments that squash to the prefix and end in blank
//   lp_nb = log sum of alignments that squash to the prefix and end in the
//           prefix's last label
// Frame t updates, with p(t,c) the frame log-prob of label c:
//   stay on prefix P:
//     lp_b'(P)  += (lp_b(P) ⊕ lp_nb(P)) + p(t, blank)      [emit blank]
//     lp_nb'(P) += lp_nb(P) + p(t, last(P))                [repeat, absorbed]
//   extend P with label c into P+c:
//     c == last(P):  lp_nb'(P+c) += lp_b(P) + p(t, c)      [needs blank gap]
//     c != last(P):  lp_nb'(P+c) += (lp_b(P) ⊕ lp_nb(P)) + p(t, c)
// where ⊕ is log-add. Hypotheses reaching the same prefix are merged by
// log-adding their masses; the LM term is a function of the prefix alone, so
// the merged hypothesis keeps the single shared LM score.
// ---------------------------------------------------------------------------

constexpr int kNoLabel = std::numeric_limits<int>::min();

// Interned prefixes: a prefix is its parent plus one label, so one arena
// entry per distinct emitted sequence. Entry 0 is the empty prefix.
struct PrefixArena {
  struct Entry {
    int parent = -1;
    int label = kNoLabel;
  };
  std::vector<Entry> entries{Entry{}};
  std::unordered_map<uint64_t, int> children;

  int child(int parent, int label) {
    const uint64_t key = (static_cast<uint64_t>(parent) << 32) ^
                         static_cast<uint32_t>(label);
    auto [it, inserted] = children.try_emplace(key, static_cast<int>(entries.size()));
    if (inserted) entries.push_back({parent, label});
    return it->second;
  }

  std::vector<int> sequence(int id) const {
    std::vector<int> seq;
    for (int n = id; n != 0; n = entries[n].parent) seq.push_back(entries[n].label);
    std::reverse(seq.begin(), seq.end());
    return seq;
  }
};

struct Hyp {
  int prefix = 0;
  Real lp_b = 0, lp_nb = kLogZero;
  Real lm_lp = 0;     // unweighted LM log-prob of the consumed symbols
  LMState state;      // after <sos> and the prefix's LM translation
  Vector dist;        // masked log-probs of the next LM symbol
  int node = PrefixTree::kRoot;  // lexicon mode only
  int n_words = 0;    // committed (boundary-delimited) words
  int last_label = kNoLabel;

  Real ctc_mass() const { return log_add(lp_b, lp_nb); }
};

struct Pending {
  Real lp_b = kLogZero, lp_nb = kLogZero;
  Real lm_lp = 0;
  int n_words = 0;
  int existing = -1;   // index into the previous beam when this is a stay
  int parent = -1;     // parent hyp index when this is an extension
  int label = kNoLabel;
  int lm_sym = -1;
  int node = PrefixTree::kRoot;
};

struct LabelInfo {
  int col = -1;
  int label = kNoLabel;
  int lm_sym = -1;  // LM symbol consumed when this label is emitted
  bool boundary = false;
};

// Shared search over both modes; `trie` enables the lexicon constraint.
class BeamSearch {
 public:
  BeamSearch(const Posteriorgram &post, const LMParams &lm, const Alphabet &a,
             int lang, const PrefixTree *trie, const DecodeConfig &cfg)
      : post_(post), lm_(lm), a_(a), lang_(lang), trie_(trie), cfg_(cfg) {
    cfg.validate();
    if (lm.vocab_size != a.size() || lm.alphabet_hash != a.hash())
      throw DataError("decode: model does not match the alphabet");
    for (int c = 0; c < post.num_labels(); ++c) {
      const int label = post.labels[c];
      if (c == post.blank_col) continue;
      LabelInfo info;
      info.col = c;
      info.label = label;
      if (label == kBoundaryLabel) {
        info.boundary = true;
        info.lm_sym = a.space_id(lang);
      } else {
        if (label < 0 || label >= a.size() ||
            a.symbol(label).kind != SymbolKind::kPhoneme)
          throw DataError("decode: posteriorgram label " + std::to_string(label) +
                          " is not a phoneme of the model alphabet");
        info.lm_sym = label;
      }
      emit_labels_.push_back(info);
    }
  }

  DecodeResult run();

 private:
  Hyp make_root_hyp() const;
  Hyp materialize(const std::vector<Hyp> &beam, const Pending &p) const;
  Real pending_score(const Pending &p) const {
    return log_add(p.lp_b, p.lp_nb) + cfg_.lm_weight * p.lm_lp +
           cfg_.ins_penalty * p.n_words;
  }
  bool finalize(const Hyp &h, DecodeResult *out) const;

  const Posteriorgram &post_;
  const LMParams &lm_;
  const Alphabet &a_;
  int lang_;
  const PrefixTree *trie_;
  const DecodeConfig &cfg_;
  std::vector<LabelInfo> emit_labels_;
  mutable PrefixArena arena_;
};

Hyp BeamSearch::make_root_hyp() const {
  Hyp h;
  StepResult r = forward_step(lm_, LMState::zero(lm_.hidden_dim), a_.sos_id(lang_));
  h.state = std::move(r.state);
  h.dist = masked_log_softmax(r.logits, a_.mask(lang_));
  return h;
}

Hyp BeamSearch::materialize(const std::vector<Hyp> &beam, const Pending &p) const {
  if (p.existing >= 0) {
    Hyp h = beam[p.existing];
    h.lp_b = p.lp_b;
    h.lp_nb = p.lp_nb;
    return h;
  }
  const Hyp &parent = beam[p.parent];
  Hyp h;
  h.prefix = arena_.child(parent.prefix, p.label);
  h.lp_b = p.lp_b;
  h.lp_nb = p.lp_nb;
  h.lm_lp = p.lm_lp;
  h.n_words = p.n_words;
  h.node = p.node;
  h.last_label = p.label;
  StepResult r = forward_step(lm_, parent.state, p.lm_sym);
  h.state = std::move(r.state);
  h.dist = masked_log_softmax(r.logits, a_.mask(lang_));
  return h;
}

// Splits a prefix into boundary-delimited segments and renders each as a
// word: the trie's committed word in lexicon mode, concatenated phoneme
// texts in open mode. Returns false when the hypothesis is not a valid
// sentence form at end of utterance: a dangling non-terminal partial word,
// or a trailing boundary (boundaries sit between word pairs only, matching
// the realization space the exact oracle enumerates).
bool BeamSearch::finalize(const Hyp &h, DecodeResult *out) const {
  if (h.last_label == kBoundaryLabel) return false;
  std::vector<int> seq = arena_.sequence(h.prefix);
  std::vector<std::string> words;
  Real extra_words = 0;
  std::vector<int> segment;
  int node = PrefixTree::kRoot;
  auto flush = [&](bool at_end) -> bool {
    if (segment.empty()) return true;
    if (trie_) {
      if (!trie_->is_terminal(node)) return false;
      words.push_back(trie_->word(trie_->best_word_at(node)));
    } else {
      std::string w;
      for (int s : segment) w += a_.symbol(s).text;
      words.push_back(std::move(w));
    }
    if (at_end) extra_words = 1;  // pending word committed at end
    segment.clear();
    node = PrefixTree::kRoot;
    return true;
  };
  for (int label : seq) {
    if (label == kBoundaryLabel) {
      if (!flush(false)) return false;  // cannot happen: guarded during search
    } else {
      if (trie_) node = trie_->step(node, label);
      segment.push_back(label);
    }
  }
  if (!flush(true)) return false;

  Real score = h.ctc_mass() + cfg_.lm_weight * (h.lm_lp + h.dist[a_.sos_id(lang_)]) +
               cfg_.ins_penalty * (h.n_words + extra_words);
  out->words = std::move(words);
  out->score = score;
  out->no_hypothesis = false;
  return true;
}

DecodeResult BeamSearch::run() {
  std::vector<Hyp> beam{make_root_hyp()};

  for (int t = 0; t < post_.num_frames(); ++t) {
    std::unordered_map<int, Pending> next;
    const Real p_blank = post_.frames(t, post_.blank_col);

    for (size_t i = 0; i < beam.size(); ++i) {
      const Hyp &h = beam[i];
      // Stay: emit blank, or repeat the last label without a new emission.
      Pending &stay = next[h.prefix];
      if (stay.existing < 0 && stay.parent < 0) {
        stay.existing = static_cast<int>(i);
        stay.lm_lp = h.lm_lp;
        stay.n_words = h.n_words;
      } else if (stay.existing < 0) {
        stay.existing = static_cast<int>(i);  // stay beats extension records
      }
      stay.lp_b = log_add(stay.lp_b, h.ctc_mass() + p_blank);
      if (h.last_label != kNoLabel) {
        const int last_col = post_.col_of(h.last_label);
        stay.lp_nb = log_add(stay.lp_nb, h.lp_nb + post_.frames(t, last_col));
      }

      for (const LabelInfo &li : emit_labels_) {
        const Real lp = post_.frames(t, li.col);
        if (cfg_.floor_enabled && lp < cfg_.label_floor) continue;
        int node = h.node;
        if (li.boundary) {
          // A boundary needs a non-empty pending word; in lexicon mode the
          // pending word must be complete (terminal node).
          if (h.last_label == kNoLabel || h.last_label == kBoundaryLabel) continue;
          if (trie_) {
            if (!trie_->is_terminal(h.node)) continue;
            node = PrefixTree::kRoot;
          }
        } else if (trie_) {
          node = trie_->step(h.node, li.label);
          if (node == PrefixTree::kNoNode) continue;
        }
        const Real lm_term = h.dist[li.lm_sym];
        if (lm_term == kLogZero) continue;

        const Real contrib =
            li.label == h.last_label ? h.lp_b + lp : h.ctc_mass() + lp;
        if (contrib == kLogZero) continue;
        const int child = arena_.child(h.prefix, li.label);
        Pending &pc = next[child];
        pc.lp_nb = log_add(pc.lp_nb, contrib);
        if (pc.existing < 0 && pc.parent < 0) {
          pc.parent = static_cast<int>(i);
          pc.label = li.label;
          pc.lm_sym = li.lm_sym;
          pc.node = node;
          pc.lm_lp = h.lm_lp + lm_term;
          pc.n_words = h.n_words + (li.boundary ? 1 : 0);
        }
      }
    }

    // Prune to the beam: higher score, then fewer words, then lexicographic
    // label sequence.
    std::vector<std::pair<int, Pending>> cands(next.begin(), next.end());
    std::sort(cands.begin(), cands.end(), [&](const auto &x, const auto &y) {
      const Real sx = pending_score(x.second), sy = pending_score(y.second);
      if (sx != sy) return sx > sy;
      if (x.second.n_words != y.second.n_words)
        return x.second.n_words < y.second.n_words;
      return arena_.sequence(x.first) < arena_.sequence(y.first);
    });
    if (static_cast<int>(cands.size()) > cfg_.beam) cands.resize(cfg_.beam);

    std::vector<Hyp> new_beam;
    new_beam.reserve(cands.size());
    for (auto &[prefix, pending] : cands) new_beam.push_back(materialize(beam, pending));
    beam = std::move(new_beam);
  }

  DecodeResult best;
  best.no_hypothesis = true;
  std::vector<int> best_labels;
  for (const Hyp &h : beam) {
    DecodeResult r;
    if (!finalize(h, &r)) continue;
    std::vector<int> labels = arena_.sequence(h.prefix);
    const bool better =
        best.no_hypothesis || r.score > best.score ||
        (r.score == best.score &&
         (r.words.size() < best.words.size() ||
          (r.words.size() == best.words.size() &&
           (r.words < best.words ||
            (r.words == best.words && labels < best_labels)))));
    if (better) {
      best = std::move(r);
      best_labels = std::move(labels);
    }
  }
  return best;
}

}  // namespace

DecodeResult beam_search_open(const Posteriorgram &post, const LMParams &lm,
                              const Alphabet &a, int lang,
                              const DecodeConfig &cfg) {
  return BeamSearch(post, lm, a, lang, nullptr, cfg).run();
}

DecodeResult beam_search_lexicon(const Posteriorgram &post, const LMParams &lm,
                                 const Alphabet &a, int lang,
                                 const PrefixTree &trie, const DecodeConfig &cfg) {
  return BeamSearch(post, lm, a, lang, &trie, cfg).run();
}

namespace {

// Distinct pronunciations with their committed words, for the oracle.
struct OraclePron {
  std::vector<int> labels;
  std::string word;
};

void collect_prons(const PrefixTree &trie, int node, std::vector<int> &path,
                   std::vector<OraclePron> &out) {
  if (trie.is_terminal(node))
    out.push_back({path, trie.word(trie.best_word_at(node))});
  for (const auto &[sym, child] : trie.node(node).children) {
    path.push_back(sym);
    collect_prons(trie, child, path, out);
    path.pop_back();
  }
}

// Minimal frames to realize a label sequence: every label costs a frame and
// every adjacent repeat needs a separating blank frame.
int min_frames(const std::vector<int> &labels) {
  int need = static_cast<int>(labels.size());
  for (size_t i = 1; i < labels.size(); ++i)
    if (labels[i] == labels[i - 1]) ++need;
  return need;
}

struct OracleState {
  const Posteriorgram &post;
  const LMParams &lm;
  const Alphabet &a;
  int lang;
  const DecodeConfig &cfg;
  const std::vector<OraclePron> &prons;
  int64_t budget;

  DecodeResult best;
  std::vector<int> best_labels;

  void consider(const std::vector<int> &labels,
                const std::vector<std::string> &words, Real lm_lp_with_end) {
    const Real ctc = seq_log_prob(post, labels);
    if (ctc == kLogZero) return;
    const Real score = ctc + cfg.lm_weight * lm_lp_with_end +
                       cfg.ins_penalty * static_cast<Real>(words.size());
    const bool better =
        best.no_hypothesis || score > best.score ||
        (score == best.score &&
         (words.size() < best.words.size() ||
          (words.size() == best.words.size() &&
           (words < best.words || (words == best.words && labels < best_labels)))));
    if (better) {
      best.no_hypothesis = false;
      best.score = score;
      best.words = words;
      best_labels = labels;
    }
  }

  // Depth-first over word sequences; LM state advances incrementally.
  void extend(std::vector<int> &labels, std::vector<std::string> &words,
              Real lm_lp, const LMState &state, const Vector &dist) {
    if (--budget < 0)
      throw DataError("brute_force_decode: instance too large to enumerate");
    consider(labels, words, lm_lp + dist[a.sos_id(lang)]);

    for (const OraclePron &pron : prons) {
      const size_t n_labels = labels.size(), n_words = words.size();
      Real lp = lm_lp;
      LMState st = state;
      Vector d = dist;
      if (!words.empty()) {
        lp += d[a.space_id(lang)];
        StepResult r = forward_step(lm, st, a.space_id(lang));
        st = std::move(r.state);
        d = masked_log_softmax(r.logits, a.mask(lang));
        labels.push_back(kBoundaryLabel);
      }
      bool viable = true;
      for (int s : pron.labels) {
        if (d[s] == kLogZero) { viable = false; break; }
        lp += d[s];
        StepResult r = forward_step(lm, st, s);
        st = std::move(r.state);
        d = masked_log_softmax(r.logits, a.mask(lang));
        labels.push_back(s);
      }
      if (viable && min_frames(labels) <= post.num_frames()) {
        words.push_back(pron.word);
        extend(labels, words, lp, st, d);
        words.resize(n_words);
      }
      labels.resize(n_labels);
    }
  }
};

}  // namespace

DecodeResult brute_force_decode(const Posteriorgram &post, const LMParams &lm,
                                const Alphabet &a, int lang,
                                const PrefixTree &trie, const DecodeConfig &cfg,
                                int64_t max_candidates) {
  if (lm.vocab_size != a.size() || lm.alphabet_hash != a.hash())
    throw DataError("decode: model does not match the alphabet");
  std::vector<OraclePron> prons;
  std::vector<int> path;
  collect_prons(trie, PrefixTree::kRoot, path, prons);

  OracleState st{post, lm, a, lang, cfg, prons, max_candidates, {}, {}};
  st.best.no_hypothesis = true;

  StepResult r0 = forward_step(lm, LMState::zero(lm.hidden_dim), a.sos_id(lang));
  Vector dist0 = masked_log_softmax(r0.logits, a.mask(lang));
  std::vector<int> labels;
  std::vector<std::string> words;
  st.extend(labels, words, 0.0, r0.state, dist0);
  return std::move(st.best);
}

std::vector<DecodeResult> decode_batch(const std::vector<Posteriorgram> &posts,
                                       const LMParams &lm, const Alphabet &a,
                                       int lang, const PrefixTree *trie,
                                       const DecodeConfig &cfg, int jobs) {
  std::vector<DecodeResult> results(posts.size());
  if (jobs < 1) jobs = 1;
  std::atomic<size_t> cursor{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto worker = [&]() {
    for (;;) {
      const size_t i = cursor.fetch_add(1);
      if (i >= posts.size() || failed.load()) break;
      try {
        results[i] = trie ? beam_search_lexicon(posts[i], lm, a, lang, *trie, cfg)
                          : beam_search_open(posts[i], lm, a, lang, cfg);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!failed.exchange(true)) first_error = std::current_exception();
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (std::thread &th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

}  // namespace phonelm
