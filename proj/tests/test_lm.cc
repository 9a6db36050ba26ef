// phonelm/tests/test_lm.cc

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

#include <cmath>
#include <cstring>

#include "doctest.h"
#include "phonelm/lm.h"
#include "test_util.h"

using namespace phonelm;
using testutil::make_alphabet;
using testutil::make_corpus;
using testutil::make_lexicon;

namespace {

// Straight scalar re-implementation of the LSTM step, plain loops only.
// This is the oracle forward_step is checked against.
std::vector<double> reference_logits(const LMParams &p,
                                     const std::vector<double> &h0,
                                     const std::vector<double> &c0, int x) {
  const int d = p.embed_dim, h = p.hidden_dim, v = p.vocab_size;
  std::vector<double> z(d + h);
  for (int r = 0; r < d; ++r) z[r] = p.emb(r, x);
  for (int r = 0; r < h; ++r) z[d + r] = h0[r];
  auto gate = [&](const Matrix &w, const Vector &b, bool use_tanh) {
    std::vector<double> out(h);
    for (int r = 0; r < h; ++r) {
      double acc = b[r];
      for (int k = 0; k < d + h; ++k) acc += w(r, k) * z[k];
      out[r] = use_tanh ? std::tanh(acc) : 1.0 / (1.0 + std::exp(-acc));
    }
    return out;
  };
  auto gi = gate(p.w_i, p.b_i, false), gf = gate(p.w_f, p.b_f, false),
       go = gate(p.w_o, p.b_o, false), gg = gate(p.w_g, p.b_g, true);
  std::vector<double> c(h), hh(h);
  for (int r = 0; r < h; ++r) c[r] = gf[r] * c0[r] + gi[r] * gg[r];
  for (int r = 0; r < h; ++r) hh[r] = go[r] * std::tanh(c[r]);
  std::vector<double> logits(v);
  for (int r = 0; r < v; ++r) {
    double acc = p.b_out[r];
    for (int k = 0; k < h; ++k) acc += p.w_out(r, k) * hh[k];
    logits[r] = acc;
  }
  return logits;
}

bool params_equal(LMParams &x, LMParams &y) {
  auto bx = param_blocks(x), by = param_blocks(y);
  for (size_t b = 0; b < bx.size(); ++b) {
    if (bx[b].size() != by[b].size()) return false;
    if (std::memcmp(bx[b].data, by[b].data,
                    sizeof(Real) * static_cast<size_t>(bx[b].size())) != 0)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("forward_step degenerates to b_out with zero weights") {
  LMParams p = LMParams::zeros(3, 4, 5, 0);
  p.b_out << 0.5, -1.0, 2.0, 0.0, 3.5;
  LMState s = LMState::zero(4);
  s.h.setConstant(0.7);
  s.c.setConstant(-0.3);
  for (int x = 0; x < 5; ++x) {
    StepResult r = forward_step(p, s, x);
    CHECK((r.logits - p.b_out).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("gate saturation pins the hidden state at zero") {
  // i, o saturated open, f closed, g with zero bias: h' = o * tanh(i * tanh(0)) = 0
  LMParams p = LMParams::zeros(2, 3, 4, 0);
  p.b_i.setConstant(40.0);
  p.b_o.setConstant(40.0);
  p.b_f.setConstant(-40.0);
  p.b_out << 1.0, 2.0, 3.0, 4.0;
  LMState s = LMState::zero(3);
  s.c.setConstant(5.0);  // killed by the closed forget gate
  StepResult r = forward_step(p, s, 1);
  CHECK(r.state.h.cwiseAbs().maxCoeff() < 1e-15);
  CHECK((r.logits - p.b_out).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("forward_step matches the scalar reference implementation") {
  Rng rng(0);
  LMParams p = LMParams::init(4, 4, 5, 0, rng);
  SUBCASE("zero state, x = 2") {
    LMState s = LMState::zero(4);
    auto ref = reference_logits(p, {0, 0, 0, 0}, {0, 0, 0, 0}, 2);
    StepResult r = forward_step(p, s, 2);
    for (int k = 0; k < 5; ++k) CHECK(r.logits[k] == doctest::Approx(ref[k]).epsilon(1e-12));
  }
  SUBCASE("random states and inputs") {
    Rng rng2(99);
    for (int trial = 0; trial < 20; ++trial) {
      LMState s = LMState::zero(4);
      std::vector<double> h0(4), c0(4);
      for (int k = 0; k < 4; ++k) {
        h0[k] = uniform_real(rng2) * 2 - 1;
        c0[k] = uniform_real(rng2) * 2 - 1;
        s.h[k] = h0[k];
        s.c[k] = c0[k];
      }
      const int x = static_cast<int>(uniform_index(rng2, 5));
      auto ref = reference_logits(p, h0, c0, x);
      StepResult r = forward_step(p, s, x);
      for (int k = 0; k < 5; ++k)
        CHECK(r.logits[k] == doctest::Approx(ref[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("forward_step flags non-finite parameters by block name") {
  Rng rng(1);
  LMParams p = LMParams::init(2, 2, 3, 0, rng);
  p.w_out(0, 0) = std::numeric_limits<Real>::quiet_NaN();
  LMState s = LMState::zero(2);
  try {
    forward_step(p, s, 0);
    FAIL("expected NumericError");
  } catch (const NumericError &e) {
    CHECK(std::string(e.what()).find("w_out") != std::string::npos);
  }
}

TEST_CASE("SGD with momentum trains deterministically") {
  Alphabet a = make_alphabet({{"l1", {"a", "b"}}});
  Lexicon lex = make_lexicon(a, {{"ab", {"a", "b"}}, {"ba", {"b", "a"}}});
  Corpus corpus = make_corpus(a, 0, lex, {{"ab"}, {"ba", "ab"}});
  TrainConfig cfg;
  cfg.embed_dim = 3;
  cfg.hidden_dim = 5;
  cfg.optimizer = TrainConfig::Optimizer::kSgdMomentum;
  cfg.lr = 0.5;
  cfg.max_epochs = 30;
  cfg.holdout_fraction = 0;
  cfg.seed = 8;
  TrainResult r1 = train(corpus, a, cfg);
  TrainResult r2 = train(corpus, a, cfg);
  CHECK(params_equal(r1.params, r2.params));
  Rng rng(cfg.seed);
  LMParams init = LMParams::init(3, 5, a.size(), a.hash(), rng);
  CHECK(perplexity(r1.params, a, corpus) < perplexity(init, a, corpus));
}

TEST_CASE("masked_log_softmax values") {
  SUBCASE("uniform over four allowed entries") {
    Vector logits = Vector::Zero(6);
    BoolVec mask{1, 1, 0, 1, 1, 0};
    Vector lp = masked_log_softmax(logits, mask);
    for (int k : {0, 1, 3, 4})
      CHECK(lp[k] == doctest::Approx(std::log(0.25)).epsilon(1e-12));
    CHECK(lp[2] == kLogZero);
    CHECK(lp[5] == kLogZero);
  }
  SUBCASE("single allowed index has log-prob zero") {
    Vector logits(3);
    logits << 5.0, -2.0, 7.0;
    BoolVec mask{0, 1, 0};
    Vector lp = masked_log_softmax(logits, mask);
    CHECK(lp[1] == 0.0);
  }
  SUBCASE("two-term case computed directly") {
    Vector logits(4);
    logits << 1, 2, 3, 4;
    BoolVec mask{1, 0, 1, 0};
    Vector lp = masked_log_softmax(logits, mask);
    const double denom = std::log(std::exp(1.0) + std::exp(3.0));
    CHECK(lp[0] == doctest::Approx(1.0 - denom).epsilon(1e-12));
    CHECK(lp[2] == doctest::Approx(3.0 - denom).epsilon(1e-12));
    CHECK(lp[1] == kLogZero);
    CHECK(lp[3] == kLogZero);
  }
  SUBCASE("all-false mask is an error") {
    Vector logits = Vector::Zero(3);
    CHECK_THROWS_AS(masked_log_softmax(logits, BoolVec{0, 0, 0}), DataError);
  }
  SUBCASE("normalization holds for wild logits") {
    Rng rng(3);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 2 + static_cast<int>(uniform_index(rng, 12));
      Vector logits(n);
      BoolVec mask(n, 0);
      bool any = false;
      for (int k = 0; k < n; ++k) {
        logits[k] = uniform_real(rng) * 100 - 50;
        mask[k] = uniform_real(rng) < 0.6 ? 1 : 0;
        any |= mask[k] != 0;
      }
      if (!any) mask[0] = 1;
      Vector lp = masked_log_softmax(logits, mask);
      double total = 0;
      for (int k = 0; k < n; ++k)
        if (mask[k]) total += std::exp(lp[k]);
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("utterance_nll counting rule") {
  Alphabet a = make_alphabet({{"l1", {"a", "b"}}});
  LMParams p = LMParams::zeros(2, 3, a.size(), a.hash());
  const int k = static_cast<int>(a.allowed_ids(0).size());  // 4

  SUBCASE("one phoneme: 2 summed targets, 1 counted token") {
    std::vector<int> seq{a.sos_id(0), a.phoneme_id("a"), a.sos_id(0)};
    NllStats s = utterance_nll(p, a, 0, seq);
    CHECK(s.tokens == 1);
    CHECK(s.total == doctest::Approx(2.0 * std::log(k)).epsilon(1e-12));
    CHECK(s.counted == doctest::Approx(std::log(k)).epsilon(1e-12));
  }
  SUBCASE("uniform model charges log k per target") {
    std::vector<int> seq{a.sos_id(0), a.phoneme_id("a"), a.space_id(0),
                         a.phoneme_id("b"), a.sos_id(0)};
    NllStats s = utterance_nll(p, a, 0, seq);
    CHECK(s.total == doctest::Approx(4.0 * std::log(k)).epsilon(1e-12));
    CHECK(s.tokens == 3);
  }
  SUBCASE("target outside the mask is a corpus mismatch") {
    Alphabet two = make_alphabet({{"l1", {"a"}}, {"l2", {"z"}}});
    std::vector<int> seq{two.sos_id(0), two.phoneme_id("z"), two.sos_id(0)};
    CHECK_THROWS_AS(utterance_nll(LMParams::zeros(2, 3, two.size(), two.hash()),
                                  two, 0, seq),
                    DataError);
  }
  SUBCASE("sequence must be boundary-framed") {
    CHECK_THROWS_AS(utterance_nll(p, a, 0, {a.phoneme_id("a")}), DataError);
  }
}

TEST_CASE("evaluation NLL is invariant to the truncation window length") {
  Alphabet a = make_alphabet({{"l1", {"a", "b", "c"}}});
  Rng rng(11);
  LMParams p = LMParams::init(4, 6, a.size(), a.hash(), rng);
  std::vector<int> seq{a.sos_id(0)};
  for (int k = 0; k < 23; ++k)
    seq.push_back(a.allowed_ids(0)[uniform_index(rng, 3)]);  // phonemes sort first
  seq.push_back(a.sos_id(0));

  NllStats whole = utterance_nll(p, a, 0, seq);
  for (int window : {2, 3, 5, 64}) {
    NllStats split = accumulate_utterance_gradient(p, a, 0, seq, window, 0.0,
                                                   nullptr, nullptr);
    CHECK(split.total == doctest::Approx(whole.total).epsilon(1e-10));
    CHECK(split.counted == doctest::Approx(whole.counted).epsilon(1e-10));
    CHECK(split.tokens == whole.tokens);
  }
}

TEST_CASE("uniform model perplexity equals the mask size") {
  Alphabet a = make_alphabet({{"l1", {"a", "b"}}, {"l2", {"b", "c"}}});
  LMParams p = LMParams::zeros(2, 3, a.size(), a.hash());
  Lexicon lex1 = make_lexicon(a, {{"ab", {"a", "b"}}});
  Corpus c1 = make_corpus(a, 0, lex1, {{"ab"}, {"ab", "ab"}});
  const int k1 = static_cast<int>(a.allowed_ids(0).size());
  CHECK(perplexity(p, a, c1) == doctest::Approx(k1).epsilon(1e-12));
}

TEST_CASE("count_params closed form") {
  CHECK(count_params(LMParams::zeros(2, 2, 3, 0)) == 55);
  // Large config lands at the expected order of magnitude.
  const int64_t large = count_params(LMParams::zeros(64, 1024, 60, 0));
  CHECK(large > 4400000);
  CHECK(large < 4700000);
  // multilingual-vs-monolingual ratio follows from the formula
  CHECK(count_params(LMParams::zeros(2, 2, 7, 0)) == 75);
}

TEST_CASE("gradient check: analytic BPTT vs central differences") {
  Alphabet a = make_alphabet({{"l1", {"a", "b", "c"}}, {"l2", {"c", "d"}}});
  SUBCASE("zero-weight model") {
    LMParams p = LMParams::zeros(3, 4, a.size(), a.hash());
    std::vector<int> seq{a.sos_id(0), a.phoneme_id("a"), a.phoneme_id("b"),
                         a.sos_id(0)};
    CHECK(grad_check(p, a, 0, seq, 1e-5) < 1e-6);
  }
  SUBCASE("random small model") {
    Rng rng(5);
    LMParams p = LMParams::init(4, 4, a.size(), a.hash(), rng);
    std::vector<int> seq{a.sos_id(0), a.phoneme_id("a"), a.phoneme_id("c"),
                         a.phoneme_id("b"), a.space_id(0), a.phoneme_id("a"),
                         a.sos_id(0)};
    std::vector<std::pair<std::string, Real>> per_block;
    const Real err = grad_check(p, a, 0, seq, 1e-5, &per_block);
    CHECK(err < 1e-4);
    CHECK(per_block.size() == 11);
  }
  SUBCASE("excluded output rows get exactly zero gradient") {
    Rng rng(6);
    LMParams p = LMParams::init(4, 4, a.size(), a.hash(), rng);
    LMParams grad = LMParams::zeros(4, 4, a.size(), a.hash());
    std::vector<int> seq{a.sos_id(0), a.phoneme_id("a"), a.sos_id(0)};
    accumulate_utterance_gradient(p, a, 0, seq, 64, 0.0, nullptr, &grad);
    const int excluded = a.phoneme_id("d");  // not a language-0 unit
    CHECK(grad.w_out.row(excluded).cwiseAbs().maxCoeff() == 0.0);
    CHECK(grad.b_out[excluded] == 0.0);
    CHECK(grad.w_out.row(a.space_id(1)).cwiseAbs().maxCoeff() == 0.0);
    // never-input symbols also accumulate no embedding gradient
    CHECK(grad.emb.col(excluded).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("training is deterministic and masked updates stay local") {
  Alphabet a = make_alphabet({{"l1", {"a", "b"}}, {"l2", {"c"}}});
  Lexicon lex = make_lexicon(a, {{"ab", {"a", "b"}}, {"ba", {"b", "a"}}});
  Corpus corpus = make_corpus(a, 0, lex, {{"ab"}, {"ba"}, {"ab", "ba"}});

  TrainConfig cfg;
  cfg.embed_dim = 3;
  cfg.hidden_dim = 5;
  cfg.max_epochs = 4;
  cfg.holdout_fraction = 0;
  cfg.seed = 123;

  SUBCASE("zero epochs returns the initialization") {
    TrainConfig c0 = cfg;
    c0.max_epochs = 0;
    TrainResult r = train(corpus, a, c0);
    Rng rng(c0.seed);
    LMParams expect = LMParams::init(3, 5, a.size(), a.hash(), rng);
    CHECK(params_equal(r.params, expect));
  }
  SUBCASE("same seed, bit-identical parameters") {
    TrainResult r1 = train(corpus, a, cfg);
    TrainResult r2 = train(corpus, a, cfg);
    CHECK(params_equal(r1.params, r2.params));
    CHECK_FALSE(r1.diverged);
  }
  SUBCASE("symbols of an untrained language keep their initial weights") {
    TrainResult r = train(corpus, a, cfg);
    Rng rng(cfg.seed);
    LMParams init = LMParams::init(3, 5, a.size(), a.hash(), rng);
    const int c_id = a.phoneme_id("c");
    CHECK(r.params.emb.col(c_id) == init.emb.col(c_id));
    CHECK(r.params.w_out.row(c_id) == init.w_out.row(c_id));
    CHECK(r.params.b_out[c_id] == init.b_out[c_id]);
    CHECK(r.params.w_out.row(a.space_id(1)) == init.w_out.row(a.space_id(1)));
    // trained symbols did move
    CHECK(r.params.w_out.row(a.phoneme_id("a")) != init.w_out.row(a.phoneme_id("a")));
  }
}

TEST_CASE("overfitting a single sentence drives its NLL to zero") {
  Alphabet a = make_alphabet({{"l1", {"d", "e", "f", "g"}}});
  Lexicon lex = make_lexicon(a, {{"defg", {"d", "e", "f", "g"}}});
  Corpus corpus = make_corpus(a, 0, lex, {{"defg", "defg"}});

  TrainConfig cfg;
  cfg.embed_dim = 8;
  cfg.hidden_dim = 16;
  cfg.lr = 5e-2;
  cfg.max_epochs = 400;
  cfg.max_steps = 400;
  cfg.holdout_fraction = 0;
  cfg.seed = 1;
  TrainResult r = train(corpus, a, cfg);
  REQUIRE_FALSE(r.diverged);
  NllStats s = utterance_nll(r.params, a, 0, corpus.utterances[0].symbols);
  CHECK(s.counted / static_cast<Real>(s.tokens) < 0.05);

  SUBCASE("the overfit model regenerates its sentence greedily") {
    std::vector<int> rollout = sample(r.params, a, 0, 64, 0.0, 0);
    CHECK(rollout == corpus.utterances[0].symbols);
  }
}

TEST_CASE("bigram-deterministic corpus trains to perplexity near 1") {
  // b always follows a, c always follows b, ... : every next symbol is
  // fully determined, so a fitted model approaches perplexity 1.
  Alphabet a = make_alphabet({{"l1", {"p", "q", "r", "s"}}});
  Lexicon lex = make_lexicon(a, {{"cycle", {"p", "q", "r", "s", "p", "q", "r", "s"}}});
  std::vector<std::vector<std::string>> sentences(8, {"cycle"});
  Corpus corpus = make_corpus(a, 0, lex, sentences);

  TrainConfig cfg;
  cfg.embed_dim = 8;
  cfg.hidden_dim = 16;
  cfg.lr = 5e-2;
  cfg.max_epochs = 100;
  cfg.holdout_fraction = 0;
  cfg.shuffle = false;
  cfg.seed = 3;
  TrainResult r = train(corpus, a, cfg);
  REQUIRE_FALSE(r.diverged);
  CHECK(perplexity(r.params, a, corpus) < 1.2);
}

TEST_CASE("dropout training stays deterministic and converges") {
  Alphabet a = make_alphabet({{"l1", {"a", "b", "c"}}});
  Lexicon lex = make_lexicon(a, {{"abc", {"a", "b", "c"}}, {"cb", {"c", "b"}}});
  Corpus corpus = make_corpus(a, 0, lex, {{"abc"}, {"cb", "abc"}, {"cb"}});
  TrainConfig cfg;
  cfg.embed_dim = 4;
  cfg.hidden_dim = 8;
  cfg.dropout = 0.4;
  cfg.max_epochs = 6;
  cfg.holdout_fraction = 0;
  cfg.seed = 99;
  TrainResult r1 = train(corpus, a, cfg);
  TrainResult r2 = train(corpus, a, cfg);
  CHECK(params_equal(r1.params, r2.params));
  Rng rng(cfg.seed);
  LMParams init = LMParams::init(4, 8, a.size(), a.hash(), rng);
  CHECK(perplexity(r1.params, a, corpus) < perplexity(init, a, corpus));
}

TEST_CASE("divergence keeps the last finite parameters") {
  Alphabet a = make_alphabet({{"l1", {"a", "b"}}});
  Lexicon lex = make_lexicon(a, {{"ab", {"a", "b"}}});
  Corpus corpus = make_corpus(a, 0, lex, {{"ab"}, {"ab", "ab"}});
  TrainConfig cfg;
  cfg.embed_dim = 3;
  cfg.hidden_dim = 4;
  cfg.lr = 1e300;  // guaranteed overflow on the first update
  cfg.max_epochs = 2;
  cfg.holdout_fraction = 0;
  cfg.seed = 5;
  TrainResult r = train(corpus, a, cfg);
  CHECK(r.diverged);
  auto blocks = param_blocks(r.params);
  for (const BlockView &b : blocks)
    for (Eigen::Index k = 0; k < b.size(); ++k) CHECK(std::isfinite(b.data[k]));
}

TEST_CASE("sampling is seed-deterministic and respects temperature zero") {
  Alphabet a = make_alphabet({{"l1", {"a", "b"}}});
  Rng rng(17);
  LMParams p = LMParams::init(4, 6, a.size(), a.hash(), rng);

  std::vector<int> s1 = sample(p, a, 0, 50, 1.0, 42);
  std::vector<int> s2 = sample(p, a, 0, 50, 1.0, 42);
  CHECK(s1 == s2);

  std::vector<int> greedy = sample(p, a, 0, 20, 0.0, 7);
  // manual argmax rollout
  std::vector<int> manual{a.sos_id(0)};
  LMState st = LMState::zero(6);
  int x = a.sos_id(0);
  for (int t = 0; t < 20; ++t) {
    StepResult r = forward_step(p, st, x);
    int best = -1;
    for (int k = 0; k < a.size(); ++k)
      if (a.allowed(0, k) && (best < 0 || r.logits[k] > r.logits[best])) best = k;
    manual.push_back(best);
    if (best == a.sos_id(0)) break;
    st = std::move(r.state);
    x = best;
  }
  CHECK(greedy == manual);
}

TEST_CASE("grow_params preserves old predictions before fine-tuning") {
  Alphabet a = make_alphabet({{"l1", {"a", "b"}}, {"l2", {"b", "c"}}});
  Rng rng(9);
  LMParams p = LMParams::init(4, 6, a.size(), a.hash(), rng);
  Alphabet ext = extend_alphabet(a, "l3", {"c", "x", "y"});
  LMParams grown = grow_params(p, a, ext, 77);

  CHECK(grown.vocab_size == ext.size());
  CHECK(ext.size() == a.size() + 4);  // x, y, <sp>_3, <sos>_3

  // same state trajectory and same masked prediction on an old language
  std::vector<int> seq{a.sos_id(0), a.phoneme_id("a"), a.phoneme_id("b")};
  LMState s_old = LMState::zero(6), s_new = LMState::zero(6);
  for (int x : seq) {
    StepResult r_old = forward_step(p, s_old, x);
    StepResult r_new = forward_step(grown, s_new, x);
    BoolVec mask_new = ext.mask(0);  // language-0 mask over the grown inventory
    Vector lp_old = masked_log_softmax(r_old.logits, a.mask(0));
    Vector lp_new = masked_log_softmax(r_new.logits, mask_new);
    for (int k = 0; k < a.size(); ++k)
      if (a.mask(0)[k]) CHECK(lp_new[k] == doctest::Approx(lp_old[k]).epsilon(1e-12));
    s_old = std::move(r_old.state);
    s_new = std::move(r_new.state);
  }

  SUBCASE("hash mismatch is rejected") {
    LMParams bad = p;
    bad.alphabet_hash ^= 1;
    CHECK_THROWS_AS(grow_params(bad, a, ext, 0), DataError);
  }
  SUBCASE("no new phonemes still adds the boundary pair") {
    Alphabet ext2 = extend_alphabet(a, "l4", {"a", "b"});
    LMParams g2 = grow_params(p, a, ext2, 0);
    CHECK(g2.vocab_size == a.size() + 2);
  }
}

TEST_CASE("adapt fine-tunes on the target language") {
  Alphabet a = make_alphabet({{"l1", {"a", "b"}}});
  Lexicon lex1 = make_lexicon(a, {{"ab", {"a", "b"}}});
  Corpus c1 = make_corpus(a, 0, lex1, {{"ab"}, {"ab"}});
  TrainConfig cfg;
  cfg.embed_dim = 3;
  cfg.hidden_dim = 4;
  cfg.max_epochs = 3;
  cfg.holdout_fraction = 0;
  cfg.seed = 2;
  TrainResult base = train(c1, a, cfg);

  Alphabet ext = extend_alphabet(a, "l2", {"b", "z"});
  Lexicon lex2 = make_lexicon(ext, {{"zb", {"z", "b"}}});
  Corpus c2 = make_corpus(ext, 1, lex2, {{"zb"}, {"zb"}});
  TrainResult adapted = adapt(base.params, a, ext, c2, cfg);
  CHECK_FALSE(adapted.diverged);
  CHECK(adapted.params.vocab_size == ext.size());
  // fine-tuning actually happened
  NllStats before = utterance_nll(grow_params(base.params, a, ext, cfg.seed), ext,
                                  1, c2.utterances[0].symbols);
  NllStats after = utterance_nll(adapted.params, ext, 1, c2.utterances[0].symbols);
  CHECK(after.total < before.total);
}
