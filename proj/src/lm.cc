// phonelm/lm.cc

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

#include "phonelm/lm.h"

#include <algorithm>
#include <cmath>

namespace phonelm {

static void fill_uniform(Real *data, Eigen::Index n, Real lo, Real hi, Rng &rng) {
  for (Eigen::Index i = 0; i < n; ++i) data[i] = lo + (hi - lo) * uniform_real(rng);
}

LMParams LMParams::zeros(int d, int h, int v, uint64_t ahash) {
  LMParams p;
  p.embed_dim = d;
  p.hidden_dim = h;
  p.vocab_size = v;
  p.alphabet_hash = ahash;
  p.emb = Matrix::Zero(d, v);
  p.w_i = Matrix::Zero(h, d + h);
  p.w_f = Matrix::Zero(h, d + h);
  p.w_o = Matrix::Zero(h, d + h);
  p.w_g = Matrix::Zero(h, d + h);
  p.b_i = Vector::Zero(h);
  p.b_f = Vector::Zero(h);
  p.b_o = Vector::Zero(h);
  p.b_g = Vector::Zero(h);
  p.w_out = Matrix::Zero(v, h);
  p.b_out = Vector::Zero(v);
  return p;
}

LMParams LMParams::init(int d, int h, int v, uint64_t ahash, Rng &rng) {
  LMParams p = zeros(d, h, v, ahash);
  const Real bound = 1.0 / std::sqrt(static_cast<Real>(h));
  fill_uniform(p.emb.data(), p.emb.size(), -bound, bound, rng);
  fill_uniform(p.w_i.data(), p.w_i.size(), -bound, bound, rng);
  fill_uniform(p.w_f.data(), p.w_f.size(), -bound, bound, rng);
  fill_uniform(p.w_o.data(), p.w_o.size(), -bound, bound, rng);
  fill_uniform(p.w_g.data(), p.w_g.size(), -bound, bound, rng);
  fill_uniform(p.w_out.data(), p.w_out.size(), -bound, bound, rng);
  p.b_f.setOnes();  // open forget gates at the start
  return p;
}

int64_t count_params(const LMParams &p) {
  const int64_t d = p.embed_dim, h = p.hidden_dim, v = p.vocab_size;
  return d * v + 4 * (h * (d + h) + h) + v * h + v;
}

std::vector<BlockView> param_blocks(LMParams &p) {
  return {
      {"emb", p.emb.data(), p.emb.rows(), p.emb.cols()},
      {"w_i", p.w_i.data(), p.w_i.rows(), p.w_i.cols()},
      {"w_f", p.w_f.data(), p.w_f.rows(), p.w_f.cols()},
      {"w_o", p.w_o.data(), p.w_o.rows(), p.w_o.cols()},
      {"w_g", p.w_g.data(), p.w_g.rows(), p.w_g.cols()},
      {"b_i", p.b_i.data(), p.b_i.rows(), 1},
      {"b_f", p.b_f.data(), p.b_f.rows(), 1},
      {"b_o", p.b_o.data(), p.b_o.rows(), 1},
      {"b_g", p.b_g.data(), p.b_g.rows(), 1},
      {"w_out", p.w_out.data(), p.w_out.rows(), p.w_out.cols()},
      {"b_out", p.b_out.data(), p.b_out.rows(), 1},
  };
}

LMState LMState::zero(int hidden_dim) {
  return {Vector::Zero(hidden_dim), Vector::Zero(hidden_dim)};
}

static Vector sigmoid(const Vector &x) {
  return (0.5 * (1.0 + (0.5 * x.array()).tanh())).matrix();
}

StepResult forward_step(const LMParams &p, const LMState &s, int x,
                        const Vector *dropout_mask) {
  if (x < 0 || x >= p.vocab_size)
    throw DataError("forward_step: symbol id out of range");
  Vector z(p.embed_dim + p.hidden_dim);
  z.head(p.embed_dim) = p.emb.col(x);
  z.tail(p.hidden_dim) = s.h;

  const Vector i = sigmoid(p.w_i * z + p.b_i);
  const Vector f = sigmoid(p.w_f * z + p.b_f);
  const Vector o = sigmoid(p.w_o * z + p.b_o);
  const Vector g = (p.w_g * z + p.b_g).array().tanh();

  StepResult r;
  r.state.c = f.cwiseProduct(s.c) + i.cwiseProduct(g);
  r.state.h = o.cwiseProduct(r.state.c.array().tanh().matrix());
  Vector h_out =
      dropout_mask ? r.state.h.cwiseProduct(*dropout_mask).eval() : r.state.h;
  r.logits = p.w_out * h_out + p.b_out;

  if (!r.logits.allFinite() || !r.state.h.allFinite() || !r.state.c.allFinite()) {
    LMParams &mp = const_cast<LMParams &>(p);
    for (const BlockView &b : param_blocks(mp)) {
      for (Eigen::Index k = 0; k < b.size(); ++k) {
        if (!std::isfinite(b.data[k]))
          throw NumericError(std::string("forward_step: non-finite values in "
                                         "parameter block ") + b.name);
      }
    }
    throw NumericError("forward_step: non-finite activations");
  }
  return r;
}

Vector masked_log_softmax(const Vector &logits, const BoolVec &mask) {
  bool any_allowed = false;
  Real max_logit = kLogZero;
  for (Eigen::Index k = 0; k < logits.size(); ++k) {
    if (!mask[k]) continue;
    any_allowed = true;
    if (logits[k] > max_logit) max_logit = logits[k];
  }
  if (!any_allowed) throw DataError("masked_log_softmax: empty mask");
  if (!std::isfinite(max_logit))
    throw NumericError("masked_log_softmax: non-finite logits");
  Real denom = 0;
  for (Eigen::Index k = 0; k < logits.size(); ++k)
    if (mask[k]) denom += std::exp(logits[k] - max_logit);
  const Real log_denom = max_logit + std::log(denom);
  Vector out = Vector::Constant(logits.size(), kLogZero);
  for (Eigen::Index k = 0; k < logits.size(); ++k)
    if (mask[k]) out[k] = logits[k] - log_denom;
  return out;
}

NllStats utterance_nll(const LMParams &p, const Alphabet &a, int lang,
                       const std::vector<int> &seq) {
  if (seq.size() < 2 || seq.front() != a.sos_id(lang) || seq.back() != a.sos_id(lang))
    throw DataError("utterance_nll: sequence must start and end with <sos>");
  const BoolVec &mask = a.mask(lang);
  NllStats stats;
  LMState s = LMState::zero(p.hidden_dim);
  for (size_t t = 0; t + 1 < seq.size(); ++t) {
    const int target = seq[t + 1];
    if (!mask[target])
      throw DataError("utterance_nll: target symbol outside the language mask "
                      "(corpus/language mismatch)");
    StepResult r = forward_step(p, s, seq[t]);
    const Real nll = -masked_log_softmax(r.logits, mask)[target];
    stats.total += nll;
    if (a.symbol(target).kind != SymbolKind::kSos) {
      stats.counted += nll;
      ++stats.tokens;
    }
    s = std::move(r.state);
  }
  return stats;
}

Real perplexity(const LMParams &p, const Alphabet &a, const Corpus &corpus) {
  NllStats sum;
  for (const Utterance &u : corpus.utterances)
    sum += utterance_nll(p, a, u.lang, u.symbols);
  if (sum.tokens == 0) throw DataError("perplexity: no countable tokens");
  return std::exp(sum.counted / static_cast<Real>(sum.tokens));
}

std::vector<int> sample(const LMParams &p, const Alphabet &a, int lang,
                        int max_len, Real temperature, uint64_t seed) {
  const BoolVec &mask = a.mask(lang);
  const int sos = a.sos_id(lang);
  Rng rng(seed);
  std::vector<int> seq{sos};
  LMState s = LMState::zero(p.hidden_dim);
  int x = sos;
  for (int t = 0; t < max_len; ++t) {
    StepResult r = forward_step(p, s, x);
    int next;
    if (temperature <= 0) {
      next = -1;
      Real best = kLogZero;
      for (int k = 0; k < p.vocab_size; ++k)
        if (mask[k] && r.logits[k] > best) { best = r.logits[k]; next = k; }
    } else {
      Vector lp = masked_log_softmax(r.logits / temperature, mask);
      const Real u = uniform_real(rng);
      Real cdf = 0;
      next = -1;
      for (int k = 0; k < p.vocab_size; ++k) {
        if (!mask[k]) continue;
        cdf += std::exp(lp[k]);
        if (u < cdf) { next = k; break; }
      }
      if (next < 0) {  // rounding left u above the accumulated cdf
        for (int k = p.vocab_size - 1; k >= 0; --k)
          if (mask[k]) { next = k; break; }
      }
    }
    seq.push_back(next);
    if (next == sos) break;
    s = std::move(r.state);
    x = next;
  }
  return seq;
}

Real grad_check(const LMParams &p, const Alphabet &a, int lang,
                const std::vector<int> &seq, Real epsilon,
                std::vector<std::pair<std::string, Real>> *block_errors) {
  LMParams grad = LMParams::zeros(p.embed_dim, p.hidden_dim, p.vocab_size,
                                  p.alphabet_hash);
  accumulate_utterance_gradient(p, a, lang, seq,
                                static_cast<int>(seq.size()) + 1,
                                /*dropout=*/0.0, /*rng=*/nullptr, &grad);

  LMParams work = p;
  auto work_blocks = param_blocks(work);
  auto grad_blocks = param_blocks(grad);
  Rng rng(0x9e3779b97f4a7c15ull);
  Real max_err = 0;
  if (block_errors) block_errors->clear();
  for (size_t b = 0; b < work_blocks.size(); ++b) {
    const Eigen::Index n = work_blocks[b].size();
    std::vector<Eigen::Index> coords;
    if (n <= 20) {
      coords.resize(n);
      for (Eigen::Index k = 0; k < n; ++k) coords[k] = k;
    } else {
      for (int k = 0; k < 20; ++k)
        coords.push_back(static_cast<Eigen::Index>(uniform_index(rng, n)));
    }
    Real block_err = 0;
    for (Eigen::Index k : coords) {
      Real *theta = &work_blocks[b].data[k];
      const Real saved = *theta;
      *theta = saved + epsilon;
      const Real up = utterance_nll(work, a, lang, seq).total;
      *theta = saved - epsilon;
      const Real down = utterance_nll(work, a, lang, seq).total;
      *theta = saved;
      const Real numeric = (up - down) / (2 * epsilon);
      const Real analytic = grad_blocks[b].data[k];
      const Real scale = std::max(std::abs(numeric), std::abs(analytic));
      const Real err =
          scale < 1e-6 ? 0.0 : std::abs(numeric - analytic) / scale;
      block_err = std::max(block_err, err);
    }
    if (block_errors) block_errors->emplace_back(work_blocks[b].name, block_err);
    max_err = std::max(max_err, block_err);
  }
  return max_err;
}

}  // namespace phonelm
