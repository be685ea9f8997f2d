// Copyright 2026 The apamoeba Authors
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

#ifndef APAMOEBA_RANDOM_HPP
#define APAMOEBA_RANDOM_HPP

#include <cstdint>
#include <initializer_list>

namespace apamoeba {

/// splitmix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based random stream.
///
/// The key is derived from (seed, task coordinates); the i-th draw is
/// mix64(key + i * golden). A stream therefore depends only on its key and
/// position, never on which thread consumes it or in what order tasks run.
class Stream {
 public:
  Stream(std::uint64_t seed, std::initializer_list<std::uint64_t> coordinates) : key_(mix64(seed)) {
    for (std::uint64_t c : coordinates) key_ = mix64(key_ ^ mix64(c + 0x632be59bd9b4e019ULL));
  }

  std::uint64_t next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// Tags separating the streams of different subsystems.
enum class StreamTag : std::uint64_t {
  kJessen = 1,
  kArgument = 2,
  kFiber = 3,
  kWinding = 4,
  kComponent = 5,
  kTest = 99,
};

inline Stream make_stream(std::uint64_t seed, StreamTag tag, std::uint64_t a = 0, std::uint64_t b = 0,
                          std::uint64_t c = 0) {
  return Stream(seed, {static_cast<std::uint64_t>(tag), a, b, c});
}

}  // namespace apamoeba

#endif  // APAMOEBA_RANDOM_HPP
