// phonelm/io.cc

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

#include "phonelm/io.h"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace phonelm {

namespace {

// All binary formats are little-endian; raw field writes are fine on the
// platforms this tool targets.

void put_bytes(std::ostream &os, const void *p, size_t n) {
  os.write(static_cast<const char *>(p), static_cast<std::streamsize>(n));
}

void get_bytes(std::istream &is, void *p, size_t n, const char *what) {
  is.read(static_cast<char *>(p), static_cast<std::streamsize>(n));
  if (static_cast<size_t>(is.gcount()) != n)
    throw DataError(std::string("truncated file while reading ") + what);
}

void put_u32(std::ostream &os, uint32_t v) { put_bytes(os, &v, 4); }
void put_i32(std::ostream &os, int32_t v) { put_bytes(os, &v, 4); }
void put_u64(std::ostream &os, uint64_t v) { put_bytes(os, &v, 8); }

uint32_t get_u32(std::istream &is, const char *what) {
  uint32_t v;
  get_bytes(is, &v, 4, what);
  return v;
}
int32_t get_i32(std::istream &is, const char *what) {
  int32_t v;
  get_bytes(is, &v, 4, what);
  return v;
}
uint64_t get_u64(std::istream &is, const char *what) {
  uint64_t v;
  get_bytes(is, &v, 8, what);
  return v;
}

void put_string(std::ostream &os, const std::string &s) {
  put_u32(os, static_cast<uint32_t>(s.size()));
  put_bytes(os, s.data(), s.size());
}

std::string get_string(std::istream &is, const char *what) {
  const uint32_t n = get_u32(is, what);
  if (n > (1u << 24)) throw DataError(std::string("implausible string length in ") + what);
  std::string s(n, '\0');
  if (n) get_bytes(is, s.data(), n, what);
  return s;
}

// Matrices are stored row-major regardless of Eigen's in-memory layout.
void put_matrix(std::ostream &os, const char *name, const Real *data,
                Eigen::Index rows, Eigen::Index cols) {
  put_string(os, name);
  put_u32(os, static_cast<uint32_t>(rows));
  put_u32(os, static_cast<uint32_t>(cols));
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      put_bytes(os, &data[c * rows + r], 8);
}

}  // namespace

struct AlphabetSerde {
  static void write(std::ostream &os, const Alphabet &a) {
    put_u32(os, static_cast<uint32_t>(a.num_languages()));
    for (int l = 0; l < a.num_languages(); ++l) {
      put_string(os, a.languages_[l]);
      put_u32(os, static_cast<uint32_t>(a.lang_has_phoneme_[l].size()));
      for (const std::string &p : a.lang_has_phoneme_[l]) put_string(os, p);
    }
    put_u32(os, static_cast<uint32_t>(a.size()));
    for (const Symbol &s : a.symbols()) {
      put_string(os, s.text);
      const uint8_t kind = static_cast<uint8_t>(s.kind);
      put_bytes(os, &kind, 1);
      put_i32(os, s.lang);
    }
  }

  static Alphabet read(std::istream &is) {
    Alphabet a;
    const uint32_t n_langs = get_u32(is, "alphabet languages");
    a.languages_.resize(n_langs);
    a.lang_has_phoneme_.resize(n_langs);
    for (uint32_t l = 0; l < n_langs; ++l) {
      a.languages_[l] = get_string(is, "language name");
      const uint32_t n_ph = get_u32(is, "language phonemes");
      for (uint32_t k = 0; k < n_ph; ++k)
        a.lang_has_phoneme_[l].insert(get_string(is, "phoneme"));
    }
    const uint32_t n_symbols = get_u32(is, "alphabet symbols");
    a.space_ids_.assign(n_langs, -1);
    a.sos_ids_.assign(n_langs, -1);
    for (uint32_t i = 0; i < n_symbols; ++i) {
      Symbol s;
      s.id = static_cast<int>(i);
      s.text = get_string(is, "symbol text");
      uint8_t kind;
      get_bytes(is, &kind, 1, "symbol kind");
      if (kind > 2) throw DataError("checkpoint: bad symbol kind");
      s.kind = static_cast<SymbolKind>(kind);
      s.lang = get_i32(is, "symbol owner");
      if ((s.kind == SymbolKind::kPhoneme) != (s.lang < 0) ||
          s.lang >= static_cast<int>(n_langs))
        throw DataError("checkpoint: inconsistent symbol owner");
      if (s.kind == SymbolKind::kSpace) a.space_ids_[s.lang] = s.id;
      if (s.kind == SymbolKind::kSos) a.sos_ids_[s.lang] = s.id;
      a.symbols_.push_back(std::move(s));
    }
    for (uint32_t l = 0; l < n_langs; ++l)
      if (a.space_ids_[l] < 0 || a.sos_ids_[l] < 0)
        throw DataError("checkpoint: language missing boundary symbols");
    a.rebuild_masks();
    return a;
  }
};

void save_checkpoint(const Checkpoint &ckpt, const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write checkpoint: " + path);
  put_bytes(os, kCheckpointMagic, 4);
  put_u32(os, kCheckpointVersion);
  AlphabetSerde::write(os, ckpt.alphabet);

  const LMParams &p = ckpt.params;
  put_i32(os, p.embed_dim);
  put_i32(os, p.hidden_dim);
  put_i32(os, p.vocab_size);
  put_u64(os, p.alphabet_hash);
  LMParams &mp = const_cast<LMParams &>(p);
  auto blocks = param_blocks(mp);
  put_u32(os, static_cast<uint32_t>(blocks.size()));
  for (const BlockView &b : blocks) put_matrix(os, b.name, b.data, b.rows, b.cols);

  put_string(os, ckpt.config_echo);
  put_u64(os, ckpt.seed);
  if (!os) throw DataError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string &path, const Alphabet *expect) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint: " + path);
  char magic[4];
  get_bytes(is, magic, 4, "magic");
  if (std::memcmp(magic, kCheckpointMagic, 4) != 0)
    throw DataError("not a checkpoint file (bad magic): " + path);
  const uint32_t version = get_u32(is, "version");
  if (version != kCheckpointVersion)
    throw DataError("unsupported checkpoint version " + std::to_string(version));

  Checkpoint ckpt;
  ckpt.alphabet = AlphabetSerde::read(is);

  const int d = get_i32(is, "embed_dim");
  const int h = get_i32(is, "hidden_dim");
  const int v = get_i32(is, "vocab_size");
  const uint64_t ahash = get_u64(is, "alphabet hash");
  if (d < 1 || h < 1 || v < 1) throw DataError("checkpoint: bad model dimensions");
  if (v != ckpt.alphabet.size())
    throw DataError("checkpoint: vocab size does not match the stored alphabet");
  if (ahash != ckpt.alphabet.hash())
    throw DataError("checkpoint: alphabet hash does not match the stored alphabet");
  ckpt.params = LMParams::zeros(d, h, v, ahash);

  auto blocks = param_blocks(ckpt.params);
  const uint32_t n_blocks = get_u32(is, "block count");
  if (n_blocks != blocks.size()) throw DataError("checkpoint: unexpected block count");
  for (BlockView &b : blocks) {
    const std::string name = get_string(is, "block name");
    if (name != b.name)
      throw DataError("checkpoint: expected block '" + std::string(b.name) +
                      "', found '" + name + "'");
    const uint32_t rows = get_u32(is, "block rows");
    const uint32_t cols = get_u32(is, "block cols");
    if (rows != static_cast<uint32_t>(b.rows) || cols != static_cast<uint32_t>(b.cols))
      throw DataError("checkpoint: block '" + name + "' has unexpected shape");
    for (uint32_t r = 0; r < rows; ++r)
      for (uint32_t c = 0; c < cols; ++c)
        get_bytes(is, &b.data[static_cast<size_t>(c) * rows + r], 8, "block data");
  }

  ckpt.config_echo = get_string(is, "config echo");
  ckpt.seed = get_u64(is, "seed");
  char trailing;
  is.read(&trailing, 1);
  if (is.gcount() != 0) throw DataError("checkpoint: trailing bytes after payload");

  if (expect && expect->hash() != ckpt.alphabet.hash())
    throw DataError("checkpoint alphabet does not match the supplied alphabet");
  return ckpt;
}

void write_posteriorgram_text(const Posteriorgram &post, const std::string &path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write posteriorgram: " + path);
  os << "CTCPOST v1 T=" << post.num_frames() << " L=" << post.num_labels()
     << " blank=" << post.blank_col << " labels=";
  for (int c = 0; c < post.num_labels(); ++c) {
    if (c) os << ',';
    os << post.labels[c];
  }
  os << '\n';
  char buf[64];
  for (int t = 0; t < post.num_frames(); ++t) {
    for (int c = 0; c < post.num_labels(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", post.frames(t, c));
      os << (c ? " " : "") << buf;
    }
    os << '\n';
  }
  if (!os) throw DataError("failed writing posteriorgram: " + path);
}

Posteriorgram read_posteriorgram_text(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open posteriorgram: " + path);
  std::string header;
  if (!std::getline(is, header))
    throw DataError("posteriorgram " + path + ": missing header");
  int T = -1, L = -1, blank = -1;
  char labels_buf[1 << 16];
  if (std::sscanf(header.c_str(), "CTCPOST v1 T=%d L=%d blank=%d labels=%65535s",
                  &T, &L, &blank, labels_buf) != 4)
    throw DataError("posteriorgram " + path + ": malformed header");
  if (T < 1 || L < 1 || blank < 0 || blank >= L)
    throw DataError("posteriorgram " + path + ": bad dimensions");

  Posteriorgram post;
  post.blank_col = blank;
  std::stringstream labels_ss(labels_buf);
  std::string item;
  while (std::getline(labels_ss, item, ',')) {
    try {
      post.labels.push_back(std::stoi(item));
    } catch (const std::exception &) {
      throw DataError("posteriorgram " + path + ": bad label '" + item + "'");
    }
  }
  if (static_cast<int>(post.labels.size()) != L)
    throw DataError("posteriorgram " + path + ": label list does not match L");

  post.frames.resize(T, L);
  for (int t = 0; t < T; ++t) {
    for (int c = 0; c < L; ++c) {
      std::string tok;
      if (!(is >> tok))
        throw DataError("posteriorgram " + path + ": truncated at row " +
                        std::to_string(t));
      if (tok == "-inf" || tok == "-INF") {
        post.frames(t, c) = kLogZero;
      } else {
        try {
          post.frames(t, c) = std::stod(tok);
        } catch (const std::exception &) {
          throw DataError("posteriorgram " + path + ": bad value '" + tok + "'");
        }
      }
    }
  }
  post.validate();
  return post;
}

void write_posteriorgram_binary(const Posteriorgram &post, const std::string &path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write posteriorgram: " + path);
  put_bytes(os, "CTCP", 4);
  put_i32(os, post.num_frames());
  put_i32(os, post.num_labels());
  put_i32(os, post.blank_col);
  for (int l : post.labels) put_i32(os, l);
  for (int t = 0; t < post.num_frames(); ++t)
    for (int c = 0; c < post.num_labels(); ++c) {
      const Real v = post.frames(t, c);
      put_bytes(os, &v, 8);
    }
  if (!os) throw DataError("failed writing posteriorgram: " + path);
}

Posteriorgram read_posteriorgram_binary(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open posteriorgram: " + path);
  char magic[4];
  get_bytes(is, magic, 4, "magic");
  if (std::memcmp(magic, "CTCP", 4) != 0)
    throw DataError("not a binary posteriorgram (bad magic): " + path);
  const int T = get_i32(is, "T");
  const int L = get_i32(is, "L");
  const int blank = get_i32(is, "blank column");
  if (T < 1 || L < 1 || blank < 0 || blank >= L)
    throw DataError("posteriorgram " + path + ": bad dimensions");
  Posteriorgram post;
  post.blank_col = blank;
  for (int c = 0; c < L; ++c) post.labels.push_back(get_i32(is, "label"));
  post.frames.resize(T, L);
  for (int t = 0; t < T; ++t)
    for (int c = 0; c < L; ++c) get_bytes(is, &post.frames(t, c), 8, "frame data");
  post.validate();
  return post;
}

void write_posteriorgram(const Posteriorgram &post, const std::string &path) {
  if (path.size() >= 6 && path.compare(path.size() - 6, 6, ".postb") == 0)
    write_posteriorgram_binary(post, path);
  else
    write_posteriorgram_text(post, path);
}

Posteriorgram read_posteriorgram(const std::string &path) {
  if (path.size() >= 6 && path.compare(path.size() - 6, 6, ".postb") == 0)
    return read_posteriorgram_binary(path);
  return read_posteriorgram_text(path);
}

}  // namespace phonelm
