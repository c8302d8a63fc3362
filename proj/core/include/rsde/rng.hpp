// Copyright 2026 The rsde Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>

namespace rsde {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Stateless:
// the output is a pure function of (counter, key).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter counter, Key key) {
    counter = round(counter, key);
    for (int r = 1; r < 10; ++r) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
      counter = round(counter, key);
    }
    return counter;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static Counter round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0], static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1], static_cast<std::uint32_t>(p0)};
  }
};

// Standard normal quantile (Wichura's AS241, ~1e-16 relative accuracy).
double inverse_normal_cdf(double p);

// Purpose tags occupy the high counter word so that streams drawn for
// different purposes never overlap.
enum class StreamTag : std::uint32_t {
  kIncrement = 1,
  kInitial = 2,
  kBootstrap = 3,
  kCertify = 4,
  kCoupling = 5,
  kTest = 6,
};

// Sequential draws from the stream keyed by (seed, tag, particle, step).
// Two generators built from the same key produce identical sequences no
// matter which thread owns them.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, StreamTag tag, std::uint64_t particle, std::uint64_t step);

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  // Uniform on (0, 1].
  double uniform_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }
  // Inverse-CDF transform of one 64-bit draw.
  double normal() {
    return inverse_normal_cdf((static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53);
  }
  std::uint64_t next_u64() {
    if (used_ > 2) refill();
    const std::uint64_t hi = block_[used_];
    const std::uint64_t lo = block_[used_ + 1];
    used_ += 2;
    return (hi << 32) | lo;
  }
  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  void refill();

  Philox4x32::Key key_;
  Philox4x32::Counter counter_;
  std::array<std::uint32_t, 4> block_{};
  int used_ = 4;
};

}  // namespace rsde
