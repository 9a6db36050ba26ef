// phonelm/lm.h

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

#ifndef PHONELM_LM_H_
#define PHONELM_LM_H_

#include <string>
#include <vector>

#include "phonelm/alphabet.h"
#include "phonelm/corpus.h"
#include "phonelm/types.h"

namespace phonelm {

// Single-layer LSTM language model over the union alphabet:
//   logits = w_out * LSTM(emb(x_1..x_{t-1})) + b_out
// All math is double precision; training is single threaded and
// bit-deterministic for a fixed seed.
struct LMParams {
  Matrix emb;                  // d x V, one column per symbol
  Matrix w_i, w_f, w_o, w_g;   // h x (d+h), gate weights on [emb(x); h]
  Vector b_i, b_f, b_o, b_g;   // h
  Matrix w_out;                // V x h
  Vector b_out;                // V
  int embed_dim = 0;
  int hidden_dim = 0;
  int vocab_size = 0;
  uint64_t alphabet_hash = 0;

  static LMParams zeros(int embed_dim, int hidden_dim, int vocab_size,
                        uint64_t alphabet_hash);
  // Uniform [-1/sqrt(h), 1/sqrt(h)] weights, zero biases except forget
  // gate bias = 1.
  static LMParams init(int embed_dim, int hidden_dim, int vocab_size,
                       uint64_t alphabet_hash, Rng &rng);
};

// d|V| + 4(h(d+h) + h) + |V|h + |V|.
int64_t count_params(const LMParams &p);

// Flat view of one parameter block, shared by the optimizer, the gradient
// check and serialization. Eigen stores column-major; `data` follows that.
struct BlockView {
  const char *name;
  Real *data;
  Eigen::Index rows, cols;
  Eigen::Index size() const { return rows * cols; }
};
std::vector<BlockView> param_blocks(LMParams &p);

struct LMState {
  Vector h, c;
  static LMState zero(int hidden_dim);
};

struct StepResult {
  Vector logits;  // |V|
  LMState state;
};

// One LSTM cell update on [emb(x); h] followed by the output projection.
// `dropout_mask`, when given, scales the hidden vector on the output path
// only; the recurrent state is carried undropped. Throws NumericError on a
// non-finite result, naming the offending parameter block when one exists.
StepResult forward_step(const LMParams &p, const LMState &s, int x,
                        const Vector *dropout_mask = nullptr);

// Max-shifted log-softmax over the mask-selected logits. Returns a full
// |V|-sized vector with -inf outside the mask; excluded units get no
// probability and (in training) no gradient. Throws DataError on an
// all-false mask.
Vector masked_log_softmax(const Vector &logits, const BoolVec &mask);

struct NllStats {
  Real total = 0;    // -log p summed over every target (training loss)
  Real counted = 0;  // same, restricted to phoneme/space targets
  int64_t tokens = 0;  // number of phoneme/space targets

  NllStats &operator+=(const NllStats &o) {
    total += o.total;
    counted += o.counted;
    tokens += o.tokens;
    return *this;
  }
};

// Teacher-forced pass over one encoded utterance (must start and end with
// the language's <sos>). Training consumes `total`; perplexity reporting
// consumes `counted`/`tokens`, which skip sentence boundaries. A target
// outside the language mask is a corpus/language mismatch (DataError).
NllStats utterance_nll(const LMParams &p, const Alphabet &a, int lang,
                       const std::vector<int> &seq);

// exp(sum counted nll / sum counted tokens) over the corpus, each utterance
// scored under its own language mask. Throws DataError when no tokens count.
Real perplexity(const LMParams &p, const Alphabet &a, const Corpus &corpus);

struct TrainConfig {
  enum class Optimizer { kAdam, kSgdMomentum };

  int embed_dim = 64;
  int hidden_dim = 256;
  Real lr = 1e-3;
  Real lr_decay = 1.0;  // per-epoch multiplier
  Optimizer optimizer = Optimizer::kAdam;
  Real momentum = 0.9;
  Real adam_beta1 = 0.9;
  Real adam_beta2 = 0.999;
  Real adam_eps = 1e-8;
  Real dropout = 0.0;    // on the LSTM output vector, same mask per window
  Real clip_norm = 5.0;  // global gradient norm
  int max_epochs = 50;
  int max_steps = 0;  // optimizer updates; 0 = bounded by epochs only
  int patience = 5;   // epochs without held-out improvement before stopping
  int bptt_len = 64;
  int batch_utts = 1;            // utterances per optimizer step
  Real holdout_fraction = 0.1;   // 0 disables early stopping
  bool shuffle = true;           // utterance-level shuffling across languages
  uint64_t seed = 0;

  void validate() const;
};

struct TrainResult {
  LMParams params;
  bool diverged = false;  // params hold the last finite checkpoint if so
  int steps = 0;
  int epochs = 0;
  Real best_holdout_nll = 0;  // per counted token; 0 when no holdout
};

// Masked-softmax training by truncated BPTT over per-utterance language
// masks. Returns the parameters with the best held-out NLL when a holdout
// is configured, the final parameters otherwise.
TrainResult train(const Corpus &corpus, const Alphabet &a, const TrainConfig &cfg);

// Crosslingual adaptation: `ext` must extend `a` (same leading symbols).
// emb gains columns and w_out/b_out gain rows for the fresh symbols,
// initialized by the training scheme; every pre-existing weight is carried
// over. Then fine-tunes on `target` under its language masks.
TrainResult adapt(const LMParams &p, const Alphabet &a, const Alphabet &ext,
                  const Corpus &target, const TrainConfig &cfg);

// Grows the parameter matrices for `ext` without any fine-tuning.
LMParams grow_params(const LMParams &p, const Alphabet &a, const Alphabet &ext,
                     uint64_t seed);

// Ancestral sampling under the language mask, starting from <sos>_lang and
// stopping when it re-appears or at max_len symbols. temperature 0 is the
// greedy argmax rollout. Returned sequence includes both boundary symbols.
std::vector<int> sample(const LMParams &p, const Alphabet &a, int lang,
                        int max_len, Real temperature, uint64_t seed);

// Analytic BPTT gradient of utterance_nll(...).total versus central finite
// differences at `epsilon`, on >= 20 random coordinates per block (all, for
// small blocks), dropout off, full double precision. Returns the max
// relative error; per-block maxima via `block_errors` when non-null.
Real grad_check(const LMParams &p, const Alphabet &a, int lang,
                const std::vector<int> &seq, Real epsilon,
                std::vector<std::pair<std::string, Real>> *block_errors = nullptr);

// Gradient of utterance_nll(...).total accumulated into `grad` (shapes must
// match p). Backprop windows are `bptt_len` symbols long; state carries
// across windows, gradient does not. Shared by train(), adapt() and
// grad_check(). Returns the stats of the pass.
NllStats accumulate_utterance_gradient(const LMParams &p, const Alphabet &a,
                                       int lang, const std::vector<int> &seq,
                                       int bptt_len, Real dropout, Rng *rng,
                                       LMParams *grad);

}  // namespace phonelm

#endif  // PHONELM_LM_H_
