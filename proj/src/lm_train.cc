// phonelm/lm_train.cc

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
#include <cmath>

#include "phonelm/lm.h"

namespace phonelm {

void TrainConfig::validate() const {
  if (dropout < 0 || dropout >= 1) throw DataError("train: dropout must be in [0, 1)");
  if (clip_norm <= 0) throw DataError("train: clip_norm must be > 0");
  if (bptt_len < 2) throw DataError("train: bptt_len must be >= 2");
  if (batch_utts < 1) throw DataError("train: batch_utts must be >= 1");
  if (embed_dim < 1 || hidden_dim < 1) throw DataError("train: bad model size");
  if (holdout_fraction < 0 || holdout_fraction >= 1)
    throw DataError("train: holdout_fraction must be in [0, 1)");
}

namespace {

Vector sigmoid(const Vector &x) {
  return (0.5 * (1.0 + (0.5 * x.array()).tanh())).matrix();
}

struct StepCache {
  int x, y;
  Vector z;            // [emb(x); h_prev]
  Vector i, f, o, g;
  Vector c_prev, c, tanh_c, h;
  Vector probs;        // masked softmax probabilities, 0 outside the mask
};

}  // namespace

NllStats accumulate_utterance_gradient(const LMParams &p, const Alphabet &a,
                                       int lang, const std::vector<int> &seq,
                                       int bptt_len, Real dropout, Rng *rng,
                                       LMParams *grad) {
  if (seq.size() < 2 || seq.front() != a.sos_id(lang) || seq.back() != a.sos_id(lang))
    throw DataError("train: sequence must start and end with <sos>");
  const BoolVec &mask = a.mask(lang);
  const int d = p.embed_dim, h = p.hidden_dim;
  NllStats stats;
  LMState state = LMState::zero(h);
  const int total_steps = static_cast<int>(seq.size()) - 1;

  for (int w0 = 0; w0 < total_steps; w0 += bptt_len) {
    const int wlen = std::min(bptt_len, total_steps - w0);
    Vector drop_mask;
    const bool use_dropout = dropout > 0 && rng != nullptr;
    if (use_dropout) {
      drop_mask.resize(h);
      const Real keep = 1.0 - dropout;
      for (int j = 0; j < h; ++j)
        drop_mask[j] = uniform_real(*rng) < keep ? 1.0 / keep : 0.0;
    }

    // Forward over the window, caching activations.
    std::vector<StepCache> cache(wlen);
    for (int t = 0; t < wlen; ++t) {
      StepCache &c = cache[t];
      c.x = seq[w0 + t];
      c.y = seq[w0 + t + 1];
      if (!mask[c.y])
        throw DataError("train: target symbol outside the language mask "
                        "(corpus/language mismatch)");
      c.z.resize(d + h);
      c.z.head(d) = p.emb.col(c.x);
      c.z.tail(h) = state.h;
      c.c_prev = state.c;
      c.i = sigmoid(p.w_i * c.z + p.b_i);
      c.f = sigmoid(p.w_f * c.z + p.b_f);
      c.o = sigmoid(p.w_o * c.z + p.b_o);
      c.g = (p.w_g * c.z + p.b_g).array().tanh();
      c.c = c.f.cwiseProduct(c.c_prev) + c.i.cwiseProduct(c.g);
      c.tanh_c = c.c.array().tanh();
      c.h = c.o.cwiseProduct(c.tanh_c);
      state.h = c.h;
      state.c = c.c;

      Vector h_out = use_dropout ? c.h.cwiseProduct(drop_mask).eval() : c.h;
      Vector logits = p.w_out * h_out + p.b_out;
      Vector logp = masked_log_softmax(logits, mask);
      const Real nll = -logp[c.y];
      if (!std::isfinite(nll)) throw NumericError("train: non-finite loss");
      stats.total += nll;
      if (a.symbol(c.y).kind != SymbolKind::kSos) {
        stats.counted += nll;
        ++stats.tokens;
      }
      c.probs.resize(p.vocab_size);
      for (int k = 0; k < p.vocab_size; ++k)
        c.probs[k] = mask[k] ? std::exp(logp[k]) : 0.0;
    }

    if (grad == nullptr) continue;

    // Backward through the window. dh/dc do not cross window boundaries;
    // the forward state does.
    Vector dh_next = Vector::Zero(h);
    Vector dc_next = Vector::Zero(h);
    for (int t = wlen - 1; t >= 0; --t) {
      const StepCache &c = cache[t];
      Vector dlogits = c.probs;
      dlogits[c.y] -= 1.0;

      Vector h_out = use_dropout ? c.h.cwiseProduct(drop_mask).eval() : c.h;
      grad->w_out.noalias() += dlogits * h_out.transpose();
      grad->b_out += dlogits;

      Vector dhd = p.w_out.transpose() * dlogits;
      if (use_dropout) dhd = dhd.cwiseProduct(drop_mask);
      Vector dh = dh_next + dhd;

      Vector da_o = dh.cwiseProduct(c.tanh_c)
                        .cwiseProduct(c.o)
                        .cwiseProduct((1.0 - c.o.array()).matrix());
      Vector dc = dc_next +
                  dh.cwiseProduct(c.o).cwiseProduct(
                      (1.0 - c.tanh_c.array().square()).matrix());
      Vector da_f = dc.cwiseProduct(c.c_prev)
                        .cwiseProduct(c.f)
                        .cwiseProduct((1.0 - c.f.array()).matrix());
      Vector da_i = dc.cwiseProduct(c.g)
                        .cwiseProduct(c.i)
                        .cwiseProduct((1.0 - c.i.array()).matrix());
      Vector da_g =
          dc.cwiseProduct(c.i).cwiseProduct((1.0 - c.g.array().square()).matrix());

      grad->w_i.noalias() += da_i * c.z.transpose();
      grad->w_f.noalias() += da_f * c.z.transpose();
      grad->w_o.noalias() += da_o * c.z.transpose();
      grad->w_g.noalias() += da_g * c.z.transpose();
      grad->b_i += da_i;
      grad->b_f += da_f;
      grad->b_o += da_o;
      grad->b_g += da_g;

      Vector dz = p.w_i.transpose() * da_i + p.w_f.transpose() * da_f +
                  p.w_o.transpose() * da_o + p.w_g.transpose() * da_g;
      grad->emb.col(c.x) += dz.head(d);
      dh_next = dz.tail(h);
      dc_next = dc.cwiseProduct(c.f);
    }
  }
  return stats;
}

namespace {

struct Optimizer {
  const TrainConfig &cfg;
  LMParams m, v;  // Adam moments / momentum buffer
  int64_t step_count = 0;

  explicit Optimizer(const TrainConfig &cfg, const LMParams &shape)
      : cfg(cfg),
        m(LMParams::zeros(shape.embed_dim, shape.hidden_dim, shape.vocab_size, 0)),
        v(LMParams::zeros(shape.embed_dim, shape.hidden_dim, shape.vocab_size, 0)) {}

  void apply(LMParams &params, LMParams &grad, Real lr) {
    auto pb = param_blocks(params);
    auto gb = param_blocks(grad);
    auto mb = param_blocks(m);
    auto vb = param_blocks(v);

    Real sq_norm = 0;
    for (const BlockView &b : gb)
      for (Eigen::Index k = 0; k < b.size(); ++k) sq_norm += b.data[k] * b.data[k];
    const Real norm = std::sqrt(sq_norm);
    const Real scale = norm > cfg.clip_norm ? cfg.clip_norm / norm : 1.0;

    ++step_count;
    if (cfg.optimizer == TrainConfig::Optimizer::kAdam) {
      const Real bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<Real>(step_count));
      const Real bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<Real>(step_count));
      for (size_t b = 0; b < pb.size(); ++b) {
        for (Eigen::Index k = 0; k < pb[b].size(); ++k) {
          const Real g = gb[b].data[k] * scale;
          Real &mk = mb[b].data[k];
          Real &vk = vb[b].data[k];
          mk = cfg.adam_beta1 * mk + (1.0 - cfg.adam_beta1) * g;
          vk = cfg.adam_beta2 * vk + (1.0 - cfg.adam_beta2) * g * g;
          pb[b].data[k] -= lr * (mk / bc1) / (std::sqrt(vk / bc2) + cfg.adam_eps);
        }
      }
    } else {
      for (size_t b = 0; b < pb.size(); ++b) {
        for (Eigen::Index k = 0; k < pb[b].size(); ++k) {
          const Real g = gb[b].data[k] * scale;
          Real &vk = vb[b].data[k];
          vk = cfg.momentum * vk + g;
          pb[b].data[k] -= lr * vk;
        }
      }
    }
  }
};

bool params_finite(LMParams &p) {
  for (const BlockView &b : param_blocks(p))
    for (Eigen::Index k = 0; k < b.size(); ++k)
      if (!std::isfinite(b.data[k])) return false;
  return true;
}

// Mean counted NLL per token; +inf when nothing counts.
Real holdout_metric(const LMParams &p, const Alphabet &a, const Corpus &held) {
  NllStats sum;
  for (const Utterance &u : held.utterances)
    sum += utterance_nll(p, a, u.lang, u.symbols);
  if (sum.tokens == 0) return std::numeric_limits<Real>::infinity();
  return sum.counted / static_cast<Real>(sum.tokens);
}

// The shared optimization loop; `params` enters initialized.
TrainResult train_loop(LMParams params, const Corpus &corpus, const Alphabet &a,
                       const TrainConfig &cfg, Rng &rng) {
  Corpus held, tr;
  const Corpus *train_set = &corpus;
  bool have_holdout = false;
  if (cfg.holdout_fraction > 0 && cfg.patience > 0) {
    std::tie(held, tr) = split_corpus(corpus, cfg.holdout_fraction, cfg.seed ^ 0x5e1ec7ull);
    if (!held.empty() && !tr.empty()) {
      have_holdout = true;
      train_set = &tr;
    }
  }
  if (train_set->empty()) throw DataError("train: empty corpus");

  TrainResult result;
  Optimizer opt(cfg, params);
  LMParams grad = LMParams::zeros(params.embed_dim, params.hidden_dim,
                                  params.vocab_size, 0);
  LMParams best = params;
  Real best_metric = have_holdout ? holdout_metric(params, a, held)
                                  : std::numeric_limits<Real>::infinity();
  int bad_epochs = 0;
  Real lr = cfg.lr;
  std::vector<int> order(train_set->size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);

  bool stop = false;
  for (int epoch = 0; epoch < cfg.max_epochs && !stop; ++epoch) {
    if (cfg.shuffle) {
      for (size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[uniform_index(rng, i)]);
    }
    for (size_t pos = 0; pos < order.size() && !stop; pos += cfg.batch_utts) {
      LMParams snapshot = params;
      int64_t n_targets = 0;
      auto gblocks = param_blocks(grad);
      for (const BlockView &b : gblocks)
        std::fill(b.data, b.data + b.size(), 0.0);
      try {
        const size_t end = std::min(pos + cfg.batch_utts, order.size());
        for (size_t j = pos; j < end; ++j) {
          const Utterance &u = train_set->utterances[order[j]];
          accumulate_utterance_gradient(params, a, u.lang, u.symbols,
                                        cfg.bptt_len, cfg.dropout, &rng, &grad);
          n_targets += static_cast<int64_t>(u.symbols.size()) - 1;
        }
        if (n_targets > 0) {
          for (const BlockView &b : gblocks) {
            const Real inv = 1.0 / static_cast<Real>(n_targets);
            for (Eigen::Index k = 0; k < b.size(); ++k) b.data[k] *= inv;
          }
          opt.apply(params, grad, lr);
          ++result.steps;
        }
        if (!params_finite(params)) throw NumericError("train: diverged");
      } catch (const NumericError &) {
        params = std::move(snapshot);  // last finite parameters
        result.diverged = true;
        stop = true;
        break;
      }
      if (cfg.max_steps > 0 && result.steps >= cfg.max_steps) stop = true;
    }
    result.epochs = epoch + 1;
    lr *= cfg.lr_decay;
    if (have_holdout && !result.diverged) {
      const Real metric = holdout_metric(params, a, held);
      if (metric < best_metric) {
        best_metric = metric;
        best = params;
        bad_epochs = 0;
      } else if (++bad_epochs > cfg.patience) {
        stop = true;
      }
    }
  }

  if (have_holdout && !result.diverged) {
    result.params = std::move(best);
    result.best_holdout_nll = best_metric;
  } else {
    result.params = std::move(params);
  }
  return result;
}

}  // namespace

TrainResult train(const Corpus &corpus, const Alphabet &a, const TrainConfig &cfg) {
  cfg.validate();
  if (corpus.empty()) throw DataError("train: empty corpus");
  Rng rng(cfg.seed);
  LMParams params = LMParams::init(cfg.embed_dim, cfg.hidden_dim, a.size(),
                                   a.hash(), rng);
  return train_loop(std::move(params), corpus, a, cfg, rng);
}

LMParams grow_params(const LMParams &p, const Alphabet &a, const Alphabet &ext,
                     uint64_t seed) {
  if (p.alphabet_hash != a.hash())
    throw DataError("adapt: checkpoint does not match the source alphabet");
  if (ext.size() < a.size() || ext.num_languages() < a.num_languages())
    throw DataError("adapt: extended alphabet is smaller than the source");
  for (int l = 0; l < a.num_languages(); ++l)
    if (ext.language_name(l) != a.language_name(l))
      throw DataError("adapt: extended alphabet does not preserve languages");
  for (int id = 0; id < a.size(); ++id) {
    const Symbol &s0 = a.symbol(id), &s1 = ext.symbol(id);
    if (s0.text != s1.text || s0.kind != s1.kind || s0.lang != s1.lang)
      throw DataError("adapt: extended alphabet does not preserve symbol ids");
  }

  const int v_old = a.size(), v_new = ext.size();
  const int d = p.embed_dim, h = p.hidden_dim;
  LMParams out = p;
  out.vocab_size = v_new;
  out.alphabet_hash = ext.hash();
  out.emb.conservativeResize(d, v_new);
  out.w_out.conservativeResize(v_new, h);
  out.b_out.conservativeResize(v_new);

  Rng rng(seed);
  const Real bound = 1.0 / std::sqrt(static_cast<Real>(h));
  for (int c = v_old; c < v_new; ++c)
    for (int r = 0; r < d; ++r)
      out.emb(r, c) = -bound + 2 * bound * uniform_real(rng);
  for (int r = v_old; r < v_new; ++r)
    for (int c = 0; c < h; ++c)
      out.w_out(r, c) = -bound + 2 * bound * uniform_real(rng);
  out.b_out.tail(v_new - v_old).setZero();
  return out;
}

TrainResult adapt(const LMParams &p, const Alphabet &a, const Alphabet &ext,
                  const Corpus &target, const TrainConfig &cfg) {
  cfg.validate();
  if (target.empty()) throw DataError("adapt: empty target corpus");
  LMParams params = grow_params(p, a, ext, cfg.seed);
  Rng rng(cfg.seed);
  return train_loop(std::move(params), target, ext, cfg, rng);
}

}  // namespace phonelm
