// phonelm/phonelm_main.cc

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

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "phonelm/corpus.h"
#include "phonelm/ctc.h"
#include "phonelm/eval.h"
#include "phonelm/io.h"
#include "phonelm/lm.h"
#include "phonelm/synth.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace phonelm;

namespace {

struct CorpusSpec {
  std::string lang, transcript, lexicon;
};

// `lang:transcript:lexicon`
CorpusSpec parse_corpus_spec(const std::string &spec) {
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string::npos ? std::string::npos : spec.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos || c1 == 0 ||
      c2 == c1 + 1 || c2 + 1 == spec.size())
    throw DataError("corpus spec must be `lang:transcript:lexicon`, got: " + spec);
  return {spec.substr(0, c1), spec.substr(c1 + 1, c2 - c1 - 1), spec.substr(c2 + 1)};
}

// Phoneme inventory of one language = every phoneme in its lexicon file.
// The lexicon is re-parsed against the final alphabet afterwards.
std::set<std::string> lexicon_inventory(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open lexicon file: " + path);
  std::set<std::string> inv;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;  // parse_lexicon reports this later
    std::istringstream rest(line.substr(tab + 1));
    std::string ph;
    while (rest >> ph) inv.insert(ph);
  }
  return inv;
}

uint64_t hash_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot hash output file: " + path);
  uint64_t h = 0xcbf29ce484222325ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    h = fnv1a64(std::string_view(buf, static_cast<size_t>(in.gcount())), h);
  return h;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct RunLog {
  std::string path = "phonelm_runs.jsonl";
  json entry;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  void add_output(const std::string &file) {
    entry["outputs"][file] = hex64(hash_file(file));
  }
  void flush() {
    if (path.empty()) return;
    entry["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ofstream os(path, std::ios::app);
    os << entry.dump() << '\n';
  }
};

int lang_index_or_throw(const Alphabet &a, const std::string &name) {
  const int l = a.language_index(name);
  if (l < 0) throw DataError("language '" + name + "' is not in the model alphabet");
  return l;
}

std::vector<UttErrors> paired_errors(const std::string &ref_path,
                                     const std::string &hyp_path) {
  auto ref = read_transcript_file(ref_path);
  auto hyp = read_transcript_file(hyp_path);
  std::map<std::string, std::vector<std::string>> hyp_by_id;
  for (auto &[id, words] : hyp) {
    if (!hyp_by_id.emplace(id, std::move(words)).second)
      throw DataError("hypothesis " + hyp_path + ": duplicate utterance id '" + id + "'");
  }
  std::vector<UttErrors> errors;
  for (const auto &[id, words] : ref) {
    auto it = hyp_by_id.find(id);
    // A missing hypothesis scores as an empty one: all deletions.
    static const std::vector<std::string> kEmpty;
    errors.push_back(edit_distance(words, it == hyp_by_id.end() ? kEmpty : it->second));
  }
  return errors;
}

json train_config_json(const TrainConfig &cfg) {
  return json{{"embed_dim", cfg.embed_dim},
              {"hidden_dim", cfg.hidden_dim},
              {"lr", cfg.lr},
              {"lr_decay", cfg.lr_decay},
              {"optimizer", cfg.optimizer == TrainConfig::Optimizer::kAdam
                                ? "adam"
                                : "sgd-momentum"},
              {"dropout", cfg.dropout},
              {"clip_norm", cfg.clip_norm},
              {"max_epochs", cfg.max_epochs},
              {"max_steps", cfg.max_steps},
              {"patience", cfg.patience},
              {"bptt_len", cfg.bptt_len},
              {"batch_utts", cfg.batch_utts},
              {"holdout_fraction", cfg.holdout_fraction},
              {"shuffle", cfg.shuffle},
              {"seed", cfg.seed}};
}

struct DecodedCorpus {
  Corpus corpus;
  Lexicon lexicon;
  int lang;
};

DecodedCorpus load_spec_corpus(const CorpusSpec &spec, const Alphabet &a,
                               OovPolicy policy) {
  DecodedCorpus out{Corpus{}, parse_lexicon_file(spec.lexicon, a),
                    lang_index_or_throw(a, spec.lang)};
  out.corpus = load_corpus(spec.transcript, a, out.lang, out.lexicon, policy);
  if (out.corpus.skipped_oov > 0)
    std::cerr << "warning: skipped " << out.corpus.skipped_oov
              << " utterance(s) with OOV words in " << spec.transcript << "\n";
  return out;
}

// ---- subcommand bodies ----

int run_train(const std::vector<std::string> &corpus_specs, TrainConfig cfg,
              const std::string &out_path, RunLog &log) {
  std::vector<CorpusSpec> specs;
  std::vector<std::pair<std::string, std::set<std::string>>> inventories;
  for (const std::string &s : corpus_specs) {
    CorpusSpec spec = parse_corpus_spec(s);
    inventories.emplace_back(spec.lang, lexicon_inventory(spec.lexicon));
    specs.push_back(std::move(spec));
  }
  Alphabet a = build_alphabet(inventories);

  Corpus all;
  for (const CorpusSpec &spec : specs) {
    DecodedCorpus dc = load_spec_corpus(spec, a, OovPolicy::kSkip);
    for (Utterance &u : dc.corpus.utterances) all.utterances.push_back(std::move(u));
    all.skipped_oov += dc.corpus.skipped_oov;
  }
  all.source = "train";

  TrainResult result = train(all, a, cfg);
  Checkpoint ckpt{a, std::move(result.params), train_config_json(cfg).dump(), cfg.seed};
  save_checkpoint(ckpt, out_path);
  log.add_output(out_path);
  std::cout << "trained " << (specs.size() > 1 ? "Multi-PLM" : "PLM") << " on "
            << all.size() << " utterances, " << result.steps << " steps, "
            << count_params(ckpt.params) << " parameters -> " << out_path << "\n";
  if (result.diverged) {
    std::cerr << "error: training diverged; last finite checkpoint saved\n";
    return 3;
  }
  return 0;
}

int run_adapt(const std::string &ckpt_path, const std::string &target_spec,
              double fraction, TrainConfig cfg, const std::string &out_path,
              RunLog &log) {
  if (!(fraction > 0) || fraction > 1)
    throw DataError("adapt: --fraction must be in (0, 1]");
  Checkpoint base = load_checkpoint(ckpt_path);
  CorpusSpec spec = parse_corpus_spec(target_spec);
  Alphabet ext = extend_alphabet(base.alphabet, spec.lang,
                                 lexicon_inventory(spec.lexicon));
  DecodedCorpus dc = load_spec_corpus(spec, ext, OovPolicy::kSkip);
  Corpus subset = dc.corpus;
  if (fraction < 1.0)
    subset = split_corpus(dc.corpus, fraction, cfg.seed).first;

  TrainResult result = adapt(base.params, base.alphabet, ext, subset, cfg);
  json echo = train_config_json(cfg);
  echo["adapted_from"] = ckpt_path;
  echo["fraction"] = fraction;
  Checkpoint out{ext, std::move(result.params), echo.dump(), cfg.seed};
  save_checkpoint(out, out_path);
  log.add_output(out_path);
  std::cout << "adapted to '" << spec.lang << "' on " << subset.size()
            << " utterances (" << fraction * 100 << "% of " << dc.corpus.size()
            << ") -> " << out_path << "\n";
  if (result.diverged) {
    std::cerr << "error: training diverged; last finite checkpoint saved\n";
    return 3;
  }
  return 0;
}

int run_ppl(const std::string &ckpt_path, const std::string &transcript,
            const std::string &lexicon_path, const std::string &lang) {
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  const int l = lang_index_or_throw(ckpt.alphabet, lang);
  Lexicon lex = parse_lexicon_file(lexicon_path, ckpt.alphabet);
  Corpus corpus = load_corpus(transcript, ckpt.alphabet, l, lex, OovPolicy::kSkip);
  if (corpus.skipped_oov > 0)
    std::cerr << "warning: skipped " << corpus.skipped_oov
              << " utterance(s) with OOV words\n";
  std::printf("%.2f\n", perplexity(ckpt.params, ckpt.alphabet, corpus));
  return 0;
}

int run_decode(const std::string &ckpt_path, const std::string &post_dir,
               const std::string &mode, const std::string &lexicon_path,
               const std::string &freq_corpus, const std::string &lang,
               DecodeConfig cfg, int jobs, const std::string &out_path,
               RunLog &log) {
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  const int l = lang_index_or_throw(ckpt.alphabet, lang);

  if (mode == "greedy") cfg.mode = DecodeMode::kGreedy;
  else if (mode == "open") cfg.mode = DecodeMode::kOpenVocab;
  else if (mode == "lexicon") cfg.mode = DecodeMode::kLexicon;
  else throw DataError("decode: unknown mode '" + mode + "'");

  std::optional<PrefixTree> trie;
  if (cfg.mode == DecodeMode::kLexicon) {
    if (lexicon_path.empty()) throw DataError("decode: lexicon mode needs --lexicon");
    Lexicon lex = parse_lexicon_file(lexicon_path, ckpt.alphabet);
    if (!freq_corpus.empty()) {
      std::unordered_map<std::string, int64_t> freq;
      for (const auto &[id, words] : read_transcript_file(freq_corpus))
        for (const std::string &w : words) ++freq[w];
      trie = build_prefix_tree(lex, &freq);
    } else {
      trie = build_prefix_tree(lex);
    }
  }

  std::vector<std::string> files;
  for (const auto &e : fs::directory_iterator(post_dir)) {
    const std::string p = e.path().string();
    if (p.size() >= 5 && (p.ends_with(".post") || p.ends_with(".postb")))
      files.push_back(p);
  }
  if (files.empty()) throw DataError("decode: no .post/.postb files in " + post_dir);
  std::sort(files.begin(), files.end());

  std::vector<Posteriorgram> posts;
  posts.reserve(files.size());
  for (const std::string &f : files) posts.push_back(read_posteriorgram(f));

  std::vector<std::pair<std::string, std::vector<std::string>>> hyp;
  if (cfg.mode == DecodeMode::kGreedy) {
    for (size_t i = 0; i < posts.size(); ++i) {
      std::vector<std::string> words;
      std::string w;
      for (int label : greedy_decode(posts[i])) {
        if (label == kBoundaryLabel) {
          if (!w.empty()) words.push_back(std::move(w));
          w.clear();
        } else {
          w += ckpt.alphabet.symbol(label).text;
        }
      }
      if (!w.empty()) words.push_back(std::move(w));
      hyp.emplace_back(fs::path(files[i]).stem().string(), std::move(words));
    }
  } else {
    std::vector<DecodeResult> results =
        decode_batch(posts, ckpt.params, ckpt.alphabet, l,
                     trie ? &*trie : nullptr, cfg, jobs);
    int starved = 0;
    for (size_t i = 0; i < results.size(); ++i) {
      if (results[i].no_hypothesis) ++starved;
      hyp.emplace_back(fs::path(files[i]).stem().string(),
                       std::move(results[i].words));
    }
    if (starved > 0)
      std::cerr << "warning: " << starved
                << " utterance(s) had no surviving hypothesis\n";
  }

  write_transcript_file(out_path, hyp);
  log.add_output(out_path);
  std::cout << "decoded " << hyp.size() << " utterances (mode=" << mode
            << " beam=" << cfg.beam << " alpha=" << cfg.lm_weight
            << " beta=" << cfg.ins_penalty << ") -> " << out_path << "\n";
  return 0;
}

int run_synth(const std::string &ckpt_path, const std::string &corpus_spec,
              SynthConfig cfg, bool binary, const std::string &out_dir,
              RunLog &log) {
  Checkpoint ckpt = load_checkpoint(ckpt_path);
  CorpusSpec spec = parse_corpus_spec(corpus_spec);
  DecodedCorpus dc = load_spec_corpus(spec, ckpt.alphabet, OovPolicy::kSkip);

  fs::create_directories(out_dir);
  Rng seeder(cfg.seed);
  int n = 0;
  uint64_t dir_hash = 0xcbf29ce484222325ull;
  for (const Utterance &u : dc.corpus.utterances) {
    SynthConfig ucfg = cfg;
    ucfg.seed = seeder();  // per-utterance stream, deterministic overall
    Posteriorgram post = synth_posteriors(
        to_acoustic_labels(ckpt.alphabet, dc.lang, u.symbols), ckpt.alphabet,
        dc.lang, ucfg);
    const std::string path =
        (fs::path(out_dir) / (u.id + (binary ? ".postb" : ".post"))).string();
    write_posteriorgram(post, path);
    dir_hash = fnv1a64(hex64(hash_file(path)), dir_hash);
    ++n;
  }
  std::cout << "synthesized " << n << " posteriorgrams (noise=" << cfg.noise
            << ", frames-per-symbol=" << cfg.frames_per_symbol << ") -> "
            << out_dir << "\n";
  log.entry["outputs"][out_dir] = hex64(dir_hash);
  return 0;
}

int run_validate(const std::string &post_path, const std::string &ckpt_path,
                 const std::string &lexicon_path, const std::string &against_ckpt,
                 const std::string &transcript_path) {
  json report;
  bool valid = true;
  auto check = [&](const std::string &kind, const std::string &path, auto &&fn) {
    if (path.empty()) return;
    json item{{"kind", kind}, {"path", path}};
    try {
      fn(item);
      item["valid"] = true;
    } catch (const std::exception &e) {
      item["valid"] = false;
      item["error"] = e.what();
      valid = false;
    }
    report.push_back(std::move(item));
  };

  check("posteriorgram", post_path, [&](json &item) {
    Posteriorgram p = read_posteriorgram(post_path);
    item["frames"] = p.num_frames();
    item["labels"] = p.num_labels();
    item["blank_col"] = p.blank_col;
  });
  check("checkpoint", ckpt_path, [&](json &item) {
    Checkpoint c = load_checkpoint(ckpt_path);
    item["vocab"] = c.params.vocab_size;
    item["embed_dim"] = c.params.embed_dim;
    item["hidden_dim"] = c.params.hidden_dim;
    item["languages"] = c.alphabet.num_languages();
    item["parameters"] = count_params(c.params);
  });
  check("lexicon", lexicon_path, [&](json &item) {
    if (against_ckpt.empty())
      throw DataError("lexicon validation needs --against-ckpt for the alphabet");
    Checkpoint c = load_checkpoint(against_ckpt);
    Lexicon lex = parse_lexicon_file(lexicon_path, c.alphabet);
    item["words"] = lex.size();
    item["trie_nodes"] = build_prefix_tree(lex).num_nodes();
  });
  check("transcript", transcript_path, [&](json &item) {
    auto utts = read_transcript_file(transcript_path);
    std::set<std::string> ids;
    int64_t tokens = 0;
    for (const auto &[id, words] : utts) {
      if (!ids.insert(id).second) throw DataError("duplicate utterance id '" + id + "'");
      tokens += static_cast<int64_t>(words.size());
    }
    item["utterances"] = utts.size();
    item["tokens"] = tokens;
  });

  if (report.empty()) throw DataError("validate: nothing to validate");
  std::cout << report.dump(2) << "\n";
  return valid ? 0 : 2;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"phoneme-level LM training, CTC decoding and evaluation"};
  app.require_subcommand(1);

  std::string run_log_path = "phonelm_runs.jsonl";
  app.add_option("--run-log", run_log_path,
                 "JSON-lines run log (empty string disables)");

  // train
  auto *cmd_train = app.add_subcommand("train", "train a PLM or Multi-PLM");
  std::vector<std::string> train_corpora;
  TrainConfig tcfg;
  std::string train_out;
  std::string optimizer_name = "adam";
  bool alphabet_from_corpora = true;
  cmd_train->add_option("--corpus", train_corpora,
                        "lang:transcript:lexicon (repeat for Multi-PLM)")
      ->required();
  cmd_train->add_flag("--alphabet-from-corpora", alphabet_from_corpora,
                      "derive the alphabet from the corpora lexicons (default)");
  cmd_train->add_option("--hidden", tcfg.hidden_dim, "LSTM hidden units");
  cmd_train->add_option("--embed", tcfg.embed_dim, "embedding dimension");
  cmd_train->add_option("--dropout", tcfg.dropout, "LSTM output dropout");
  cmd_train->add_option("--lr", tcfg.lr, "learning rate");
  cmd_train->add_option("--lr-decay", tcfg.lr_decay, "per-epoch LR multiplier");
  cmd_train->add_option("--optimizer", optimizer_name, "adam|sgd");
  cmd_train->add_option("--epochs", tcfg.max_epochs, "max epochs");
  cmd_train->add_option("--max-steps", tcfg.max_steps, "max optimizer steps");
  cmd_train->add_option("--patience", tcfg.patience, "early-stop patience (epochs)");
  cmd_train->add_option("--bptt", tcfg.bptt_len, "BPTT truncation length");
  cmd_train->add_option("--batch", tcfg.batch_utts, "utterances per step");
  cmd_train->add_option("--holdout", tcfg.holdout_fraction,
                        "held-out fraction for early stopping");
  cmd_train->add_option("--clip", tcfg.clip_norm, "gradient clip norm");
  cmd_train->add_option("--seed", tcfg.seed, "rng seed");
  cmd_train->add_option("--out", train_out, "output checkpoint")->required();

  // adapt
  auto *cmd_adapt = app.add_subcommand("adapt", "adapt a Multi-PLM to a new language");
  std::string adapt_ckpt, adapt_corpus, adapt_out;
  double adapt_fraction = 1.0;
  TrainConfig acfg;
  cmd_adapt->add_option("--ckpt", adapt_ckpt, "base checkpoint")->required();
  cmd_adapt->add_option("--target-corpus", adapt_corpus, "lang:transcript:lexicon")
      ->required();
  cmd_adapt->add_option("--fraction", adapt_fraction, "target data fraction (0,1]");
  cmd_adapt->add_option("--lr", acfg.lr, "learning rate");
  cmd_adapt->add_option("--dropout", acfg.dropout, "LSTM output dropout");
  cmd_adapt->add_option("--epochs", acfg.max_epochs, "max epochs");
  cmd_adapt->add_option("--max-steps", acfg.max_steps, "max optimizer steps");
  cmd_adapt->add_option("--patience", acfg.patience, "early-stop patience");
  cmd_adapt->add_option("--holdout", acfg.holdout_fraction, "held-out fraction");
  cmd_adapt->add_option("--seed", acfg.seed, "rng seed");
  cmd_adapt->add_option("--out", adapt_out, "output checkpoint")->required();

  // ppl
  auto *cmd_ppl = app.add_subcommand("ppl", "phoneme-level perplexity");
  std::string ppl_ckpt, ppl_corpus, ppl_lexicon, ppl_lang;
  cmd_ppl->add_option("--ckpt", ppl_ckpt)->required();
  cmd_ppl->add_option("--corpus", ppl_corpus, "transcript file")->required();
  cmd_ppl->add_option("--lexicon", ppl_lexicon)->required();
  cmd_ppl->add_option("--lang", ppl_lang)->required();

  // decode
  auto *cmd_decode = app.add_subcommand("decode", "decode posteriorgrams");
  std::string dec_ckpt, dec_dir, dec_mode = "lexicon", dec_lexicon, dec_freq,
              dec_lang, dec_out;
  DecodeConfig dcfg;
  int dec_jobs = 1;
  double floor_value = -30.0;
  bool no_floor = false;
  cmd_decode->add_option("--ckpt", dec_ckpt)->required();
  cmd_decode->add_option("--post-dir", dec_dir, ".post/.postb directory")->required();
  cmd_decode->add_option("--mode", dec_mode, "greedy|open|lexicon");
  cmd_decode->add_option("--lexicon", dec_lexicon, "lexicon (lexicon mode)");
  cmd_decode->add_option("--freq-corpus", dec_freq,
                         "transcript supplying homophone tie-break counts");
  cmd_decode->add_option("--lang", dec_lang)->required();
  cmd_decode->add_option("--beam", dcfg.beam, "beam width");
  cmd_decode->add_option("--lm-weight", dcfg.lm_weight, "LM weight alpha");
  cmd_decode->add_option("--ins-penalty", dcfg.ins_penalty, "per-word bonus beta");
  cmd_decode->add_option("--label-floor", floor_value, "per-frame label floor");
  cmd_decode->add_flag("--no-label-floor", no_floor, "disable the label floor");
  cmd_decode->add_option("--jobs", dec_jobs, "parallel decode workers");
  cmd_decode->add_option("--out", dec_out, "hypothesis transcript")->required();

  // wer
  auto *cmd_wer = app.add_subcommand("wer", "word error rate");
  std::string wer_ref, wer_hyp;
  cmd_wer->add_option("--ref", wer_ref)->required();
  cmd_wer->add_option("--hyp", wer_hyp)->required();

  // bootstrap
  auto *cmd_boot = app.add_subcommand("bootstrap",
                                      "probability that system 1 improves on system 2");
  std::string boot_ref, boot_hyp1, boot_hyp2;
  int64_t boot_resamples = 10000;
  uint64_t boot_seed = 0;
  cmd_boot->add_option("--ref", boot_ref)->required();
  cmd_boot->add_option("--hyp1", boot_hyp1)->required();
  cmd_boot->add_option("--hyp2", boot_hyp2)->required();
  cmd_boot->add_option("--resamples", boot_resamples);
  cmd_boot->add_option("--seed", boot_seed);

  // synth
  auto *cmd_synth = app.add_subcommand("synth", "synthesize posteriorgrams");
  std::string synth_ckpt, synth_corpus, synth_out;
  SynthConfig scfg;
  bool synth_binary = false;
  cmd_synth->add_option("--ckpt", synth_ckpt, "checkpoint providing the alphabet")
      ->required();
  cmd_synth->add_option("--corpus", synth_corpus, "lang:transcript:lexicon")->required();
  cmd_synth->add_option("--noise", scfg.noise, "noise mass in [0,1)");
  cmd_synth->add_option("--blank-mass", scfg.blank_mass, "blank share of the noise");
  cmd_synth->add_option("--frames-per-symbol", scfg.frames_per_symbol);
  cmd_synth->add_option("--seed", scfg.seed);
  cmd_synth->add_flag("--binary", synth_binary, "write .postb instead of .post");
  cmd_synth->add_option("--out-dir", synth_out)->required();

  // oov
  auto *cmd_oov = app.add_subcommand("oov", "OOV token rate");
  std::string oov_train, oov_eval;
  cmd_oov->add_option("--train-corpus", oov_train, "transcript")->required();
  cmd_oov->add_option("--eval-corpus", oov_eval, "transcript")->required();

  // params
  auto *cmd_params = app.add_subcommand("params", "trainable parameter count");
  std::string params_ckpt;
  cmd_params->add_option("--ckpt", params_ckpt)->required();

  // sample
  auto *cmd_sample = app.add_subcommand("sample", "sample a sentence from the LM");
  std::string sample_ckpt, sample_lang;
  uint64_t sample_seed = 0;
  int sample_max_len = 200;
  double sample_temperature = 1.0;
  cmd_sample->add_option("--ckpt", sample_ckpt)->required();
  cmd_sample->add_option("--lang", sample_lang)->required();
  cmd_sample->add_option("--seed", sample_seed);
  cmd_sample->add_option("--max-len", sample_max_len);
  cmd_sample->add_option("--temperature", sample_temperature);

  // alphabet dump
  auto *cmd_alphabet = app.add_subcommand("alphabet", "alphabet utilities");
  auto *cmd_dump = cmd_alphabet->add_subcommand("dump", "dump the alphabet as TSV");
  std::string dump_ckpt, dump_out;
  cmd_dump->add_option("--ckpt", dump_ckpt)->required();
  cmd_dump->add_option("--out", dump_out, "output file (default stdout)");

  // validate
  auto *cmd_validate = app.add_subcommand("validate", "validate file formats");
  std::string val_post, val_ckpt, val_lexicon, val_against, val_transcript;
  cmd_validate->add_option("--post", val_post, "posteriorgram file");
  cmd_validate->add_option("--ckpt", val_ckpt, "checkpoint file");
  cmd_validate->add_option("--lexicon", val_lexicon, "lexicon file");
  cmd_validate->add_option("--against-ckpt", val_against,
                           "checkpoint giving the alphabet for --lexicon");
  cmd_validate->add_option("--transcript", val_transcript, "transcript file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    // stable exit codes for scripting: 1 covers every usage error
    return app.exit(e) == 0 ? 0 : 1;
  }

  RunLog log;
  log.path = run_log_path;
  {
    json cfg_echo;
    std::vector<std::string> args(argv + 1, argv + argc);
    cfg_echo["argv"] = args;
    log.entry["config"] = cfg_echo;
  }

  try {
    int rc = 0;
    if (*cmd_train) {
      if (optimizer_name == "sgd")
        tcfg.optimizer = TrainConfig::Optimizer::kSgdMomentum;
      else if (optimizer_name != "adam")
        throw DataError("unknown optimizer '" + optimizer_name + "'");
      log.entry["cmd"] = "train";
      log.entry["seed"] = tcfg.seed;
      log.entry["config"]["train"] = train_config_json(tcfg);
      rc = run_train(train_corpora, tcfg, train_out, log);
    } else if (*cmd_adapt) {
      log.entry["cmd"] = "adapt";
      log.entry["seed"] = acfg.seed;
      log.entry["config"]["train"] = train_config_json(acfg);
      rc = run_adapt(adapt_ckpt, adapt_corpus, adapt_fraction, acfg, adapt_out, log);
    } else if (*cmd_ppl) {
      log.entry["cmd"] = "ppl";
      rc = run_ppl(ppl_ckpt, ppl_corpus, ppl_lexicon, ppl_lang);
    } else if (*cmd_decode) {
      dcfg.label_floor = floor_value;
      if (no_floor) dcfg.floor_enabled = false;
      log.entry["cmd"] = "decode";
      log.entry["config"]["decode"] = {{"mode", dec_mode},
                                       {"beam", dcfg.beam},
                                       {"lm_weight", dcfg.lm_weight},
                                       {"ins_penalty", dcfg.ins_penalty},
                                       {"jobs", dec_jobs}};
      rc = run_decode(dec_ckpt, dec_dir, dec_mode, dec_lexicon, dec_freq, dec_lang,
                      dcfg, dec_jobs, dec_out, log);
    } else if (*cmd_wer) {
      log.entry["cmd"] = "wer";
      std::printf("%.1f\n", wer(paired_errors(wer_ref, wer_hyp)));
    } else if (*cmd_boot) {
      log.entry["cmd"] = "bootstrap";
      log.entry["seed"] = boot_seed;
      const Real p = bootstrap_compare(paired_errors(boot_ref, boot_hyp1),
                                       paired_errors(boot_ref, boot_hyp2),
                                       boot_resamples, boot_seed);
      std::printf("%.4f\n", p);
    } else if (*cmd_synth) {
      log.entry["cmd"] = "synth";
      log.entry["seed"] = scfg.seed;
      rc = run_synth(synth_ckpt, synth_corpus, scfg, synth_binary, synth_out, log);
    } else if (*cmd_oov) {
      log.entry["cmd"] = "oov";
      std::set<std::string> vocab;
      for (const auto &[id, words] : read_transcript_file(oov_train))
        vocab.insert(words.begin(), words.end());
      std::vector<std::vector<std::string>> eval_utts;
      for (auto &[id, words] : read_transcript_file(oov_eval))
        eval_utts.push_back(std::move(words));
      std::printf("%.1f\n", oov_rate(vocab, eval_utts));
    } else if (*cmd_params) {
      log.entry["cmd"] = "params";
      Checkpoint c = load_checkpoint(params_ckpt);
      std::cout << count_params(c.params) << "\n";
    } else if (*cmd_sample) {
      log.entry["cmd"] = "sample";
      log.entry["seed"] = sample_seed;
      Checkpoint c = load_checkpoint(sample_ckpt);
      const int l = lang_index_or_throw(c.alphabet, sample_lang);
      std::vector<int> seq = sample(c.params, c.alphabet, l, sample_max_len,
                                    sample_temperature, sample_seed);
      for (size_t i = 0; i < seq.size(); ++i)
        std::cout << (i ? " " : "") << c.alphabet.symbol(seq[i]).text;
      std::cout << "\n";
    } else if (*cmd_alphabet) {
      if (!*cmd_dump) throw DataError("alphabet: expected the `dump` subcommand");
      log.entry["cmd"] = "alphabet dump";
      Checkpoint c = load_checkpoint(dump_ckpt);
      if (dump_out.empty()) {
        c.alphabet.dump_tsv(std::cout);
      } else {
        std::ofstream os(dump_out);
        if (!os) throw DataError("cannot write " + dump_out);
        c.alphabet.dump_tsv(os);
        log.add_output(dump_out);
      }
    } else if (*cmd_validate) {
      log.entry["cmd"] = "validate";
      rc = run_validate(val_post, val_ckpt, val_lexicon, val_against, val_transcript);
    }
    log.flush();
    return rc;
  } catch (const NumericError &e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const DataError &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
