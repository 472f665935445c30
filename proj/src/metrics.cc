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

#include "gdbr/metrics.h"

#include <algorithm>
#include <numeric>
#include <string>

#include "gdbr/error.h"

namespace gdbr {
namespace {

void CheckLengths(std::span<const std::size_t> predicted,
                  std::span<const std::size_t> truth) {
  if (predicted.size() != truth.size()) {
    throw ContractError("predicted has " + std::to_string(predicted.size()) +
                        " classes, truth has " + std::to_string(truth.size()));
  }
}

}  // namespace

double InsAcc(std::span<const std::size_t> predicted,
              std::span<const std::size_t> truth) {
  CheckLengths(predicted, truth);
  const std::size_t b = std::accumulate(truth.begin(), truth.end(), std::size_t{0});
  const std::size_t bp =
      std::accumulate(predicted.begin(), predicted.end(), std::size_t{0});
  if (b != bp) {
    throw ContractError("count totals differ: predicted " + std::to_string(bp) +
                        ", truth " + std::to_string(b));
  }
  if (b == 0) throw ContractError("empty batch");
  std::size_t overlap = 0;
  for (std::size_t c = 0; c < truth.size(); ++c) overlap += std::min(predicted[c], truth[c]);
  return static_cast<double>(overlap) / static_cast<double>(b);
}

double ClsAcc(std::span<const std::size_t> predicted,
              std::span<const std::size_t> truth) {
  CheckLengths(predicted, truth);
  std::size_t present = 0;
  std::size_t hit = 0;
  for (std::size_t c = 0; c < truth.size(); ++c) {
    if (truth[c] == 0) continue;
    ++present;
    if (predicted[c] > 0) ++hit;
  }
  if (present == 0) throw ContractError("truth has no present class");
  return static_cast<double>(hit) / static_cast<double>(present);
}

RecoveryScore Score(std::span<const std::size_t> predicted,
                    std::span<const std::size_t> truth) {
  RecoveryScore s;
  s.ins_acc = InsAcc(predicted, truth);
  s.cls_acc = ClsAcc(predicted, truth);
  s.batch_size = std::accumulate(truth.begin(), truth.end(), std::size_t{0});
  return s;
}

}  // namespace gdbr
