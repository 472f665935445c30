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

#ifndef GDBR_METRICS_H_
#define GDBR_METRICS_H_

#include <cstddef>
#include <span>

namespace gdbr {

// sum_c min(predicted[c], truth[c]) / B. Throws ContractError unless both
// vectors have the same length and the same positive total.
double InsAcc(std::span<const std::size_t> predicted,
              std::span<const std::size_t> truth);

// Fraction of the classes present in `truth` that `predicted` also marks
// present. Throws ContractError on an all-zero truth.
double ClsAcc(std::span<const std::size_t> predicted,
              std::span<const std::size_t> truth);

struct RecoveryScore {
  double ins_acc = 0.0;
  double cls_acc = 0.0;
  std::size_t batch_size = 0;
};

RecoveryScore Score(std::span<const std::size_t> predicted,
                    std::span<const std::size_t> truth);

}  // namespace gdbr

#endif  // GDBR_METRICS_H_
