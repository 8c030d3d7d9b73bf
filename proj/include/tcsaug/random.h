// Copyright 2026 The tcsaug Authors.
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

#ifndef TCSAUG_RANDOM_H_
#define TCSAUG_RANDOM_H_

#include <cstdint>

namespace tcsaug {

// SplitMix64 finalizer.
constexpr uint64_t Mix64(uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based generator ("SplitMix64-CTR"): the value of a draw is a pure
// function of (seed, stream, counter), so any stream can be replayed or
// computed on any thread without shared state.
constexpr uint64_t CounterDraw(uint64_t seed, uint64_t stream,
                               uint64_t counter) {
  return Mix64(Mix64(Mix64(seed) ^ stream) ^ counter);
}

// Sequential view over one (seed, stream) pair.
class CounterStream {
 public:
  constexpr CounterStream(uint64_t seed, uint64_t stream)
      : seed_(seed), stream_(stream) {}

  constexpr uint64_t Next() { return CounterDraw(seed_, stream_, counter_++); }

  // Unbiased integer in [0, bound) by rejection. bound must be > 0.
  constexpr uint64_t Uniform(uint64_t bound) {
    const uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const uint64_t r = Next();
      if (r >= threshold) return r % bound;
    }
  }

  constexpr uint64_t draws() const { return counter_; }

 private:
  uint64_t seed_;
  uint64_t stream_;
  uint64_t counter_ = 0;
};

}  // namespace tcsaug

#endif  // TCSAUG_RANDOM_H_
