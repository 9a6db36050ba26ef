// phonelm/io.h

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

#ifndef PHONELM_IO_H_
#define PHONELM_IO_H_

#include <string>

#include "phonelm/alphabet.h"
#include "phonelm/ctc.h"
#include "phonelm/lm.h"
#include "phonelm/types.h"

namespace phonelm {

// Versioned binary container: magic "PLMC", format version, the alphabet,
// every parameter matrix as row-major 64-bit floats, the training-config
// echo and the rng seed. save/load round-trips are bit-identical.
struct Checkpoint {
  Alphabet alphabet;
  LMParams params;
  std::string config_echo;  // JSON text of the resolved training config
  uint64_t seed = 0;
};

inline constexpr char kCheckpointMagic[4] = {'P', 'L', 'M', 'C'};
inline constexpr uint32_t kCheckpointVersion = 1;

void save_checkpoint(const Checkpoint &ckpt, const std::string &path);

// Throws DataError on bad magic, unsupported version, truncation, or (when
// `expect` is given) an alphabet-hash mismatch.
Checkpoint load_checkpoint(const std::string &path,
                           const Alphabet *expect = nullptr);

// Text posteriorgram: header `CTCPOST v1 T=<int> L=<int> blank=<int>
// labels=<comma-list>` then T lines of L log-probs. Canonical for fixtures.
void write_posteriorgram_text(const Posteriorgram &post, const std::string &path);
Posteriorgram read_posteriorgram_text(const std::string &path);

// Binary posteriorgram: magic "CTCP", little-endian int32 T, L, blank
// column and labels, then T*L float64 row-major.
void write_posteriorgram_binary(const Posteriorgram &post, const std::string &path);
Posteriorgram read_posteriorgram_binary(const std::string &path);

// Dispatch on extension: ".post" text, ".postb" binary.
void write_posteriorgram(const Posteriorgram &post, const std::string &path);
Posteriorgram read_posteriorgram(const std::string &path);

}  // namespace phonelm

#endif  // PHONELM_IO_H_
