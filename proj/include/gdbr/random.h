// Copyright 2026 The GDBR Authors
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

#ifndef GDBR_RANDOM_H_
#define GDBR_RANDOM_H_

#include <cstdint>
#include <random>

namespace gdbr {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
std::uint64_t Mix64(std::uint64_t x);

// Stable seed derivation: hash64(base, a, b). Changing this function changes
// every reported number, so it is frozen by a regression test.
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t a,
                         std::uint64_t b = 0);

}  // namespace gdbr

#endif  // GDBR_RANDOM_H_
