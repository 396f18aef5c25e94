// Copyright 2026 The seqpt Authors
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

#ifndef SEQPT_RNG_H
#define SEQPT_RNG_H

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>

namespace seqpt {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// FNV-1a over the role string.
constexpr std::uint64_t hash_role(std::string_view role) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : role) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed of the stream named (role, indices...) under `root`. Streams depend
/// only on their name, never on evaluation order.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view role,
                                 std::initializer_list<std::uint64_t> indices = {}) {
  std::uint64_t s = mix64(root ^ hash_role(role));
  for (std::uint64_t i : indices) s = mix64(s ^ mix64(i + 0x632be59bd9b4e019ULL));
  return s;
}

using Rng = std::mt19937_64;

inline Rng make_stream(std::uint64_t root, std::string_view role, std::initializer_list<std::uint64_t> indices = {}) {
  return Rng(derive_seed(root, role, indices));
}

}  // namespace seqpt

#endif  // SEQPT_RNG_H
