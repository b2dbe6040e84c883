// Copyright 2026 The qfc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QFC_RNG_HPP_
#define QFC_RNG_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace qfc {

// 64-bit finalizer used for all seed derivations (splitmix64 output mix).
std::uint64_t mix64(std::uint64_t x);

// FNV-1a over bytes; stable across platforms.
std::uint64_t fnv1a64(std::string_view bytes);

// A reproducible random stream identified by (seed, stream_id). Two streams
// with different ids are statistically independent; the same pair always
// yields the same draw sequence.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  // A new stream keyed by this stream's identity and `child_id`.
  RngStream substream(std::uint64_t child_id) const;

  std::uint64_t next_u64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform();
  double normal();
  // Index drawn from unnormalised nonnegative weights. Throws
  // ContractViolation when every weight is below `zero_threshold`.
  int categorical(std::span<const double> weights, double zero_threshold = 1e-12);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace qfc

#endif  // QFC_RNG_HPP_
