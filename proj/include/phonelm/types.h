// phonelm/types.h

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

#ifndef PHONELM_TYPES_H_
#define PHONELM_TYPES_H_

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>

namespace phonelm {

using Real = double;
using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using BoolVec = std::vector<uint8_t>;

constexpr Real kLogZero = -std::numeric_limits<Real>::infinity();

// Malformed inputs, bad configuration, format violations. CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string &msg) : std::runtime_error(msg) {}
};

// Non-finite values, divergence. CLI exit code 3.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string &msg) : std::runtime_error(msg) {}
};

// log(exp(a) + exp(b)) without overflow; handles -inf operands.
inline Real log_add(Real a, Real b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

using Rng = std::mt19937_64;

// Uniform draw in [0, 1). std::uniform_real_distribution is
// implementation-defined, so checkpoints would not be portable with it.
inline Real uniform_real(Rng &rng) {
  return static_cast<Real>(rng() >> 11) * 0x1.0p-53;
}

// Uniform index in [0, n). Modulo bias is ~n/2^64, irrelevant here.
inline uint64_t uniform_index(Rng &rng, uint64_t n) { return rng() % n; }

// Unit-mean exponential draw.
inline Real exponential_real(Rng &rng) {
  return -std::log1p(-uniform_real(rng));
}

inline uint64_t fnv1a64(std::string_view bytes, uint64_t h = 0xcbf29ce484222325ull) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

inline uint64_t fnv1a64_u64(uint64_t v, uint64_t h) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xff;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace phonelm

#endif  // PHONELM_TYPES_H_
