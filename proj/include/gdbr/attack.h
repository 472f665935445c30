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

#ifndef GDBR_ATTACK_H_
#define GDBR_ATTACK_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gdbr/dataset.h"
#include "gdbr/flsim.h"
#include "gdbr/model.h"
#include "gdbr/tensor.h"

namespace gdbr {

enum class EstimatorSource { kAuxiliary, kDummy };

std::string EstimatorSourceName(EstimatorSource source);
EstimatorSource ParseEstimatorSource(const std::string& name);

struct AuxEstimates {
  Tensor a_tilde;  // mean activation of the shared stack
  Tensor p_tilde;  // mean softmax output
  EstimatorSource source = EstimatorSource::kAuxiliary;
  std::size_t sample_count = 0;
  std::size_t replaced_zeros = 0;
};

// `count` samples spread evenly over the classes (remainder to the lowest
// classes), drawn without replacement while each class pool allows.
std::vector<Tensor> SelectAuxiliary(const Dataset& data, std::size_t count,
                                    std::uint64_t seed);

// Standard normal values, shape [count, ...input_shape].
Tensor MakeDummyData(const Shape& input_shape, std::size_t count,
                     std::uint64_t seed);

// Mean activation of bottom stack `stack`. Exact zeros are replaced by the
// mean of the non-zero entries; all-zero estimates throw EstimationError.
Tensor EstimateFeatures(const Model& model, std::span<const Tensor> samples,
                        std::size_t stack);
Tensor EstimateProbs(const Model& model, std::span<const Tensor> samples);
// Both estimates from one forward pass.
AuxEstimates Estimate(const Model& model, std::span<const Tensor> samples,
                      std::size_t stack, EstimatorSource source);

// Replaces exact zeros in place and returns how many were replaced.
std::size_t ReplaceZeros(Tensor& estimate);

// Batch-averaged gradient of the shared stack's activation:
//   FC:   diag(grad_W W^T)_k / a_k
//   Conv: <grad_K_k, K_k>_F / a_k   (1x1 outputs)
// Throws DivisionGuardError on a zero entry of `a_tilde`.
Tensor BridgeFirstStack(const GradientShare& share, const Tensor& weight,
                        const Tensor& a_tilde);

inline constexpr double kIllConditioned = 1e12;
inline constexpr double kSingularCutoff = 1e-10;

struct BridgeStep {
  Tensor grad;  // [N]
  double condition_number = 0.0;  // of W W^T
  bool ill_conditioned = false;
};

// u = (W W^T)^-1 W g for W of shape [N, M], N <= M, computed as the
// minimum-norm least-squares solution of W^T u = g via SVD with singular
// values below kSingularCutoff * sigma_max discarded.
BridgeStep BridgeFcStep(const Tensor& weight, const Tensor& grad_x);

struct BridgeResult {
  Tensor logit_grad;  // [C]
  double max_condition_number = 0.0;
  bool ill_conditioned = false;
};

// Applies BridgeFcStep through `weights` in order.
BridgeResult BridgeToLogits(std::span<const Tensor> weights, const Tensor& grad);
// Full bridge from a share of `model` to the batch-mean logit gradient.
BridgeResult GradientBridge(const Model& model, const GradientShare& share,
                            const Tensor& a_tilde);

struct LabelCounts {
  Tensor raw;  // lambda before rounding
  std::vector<std::size_t> counts;
  std::size_t batch_size = 0;
};

// Clamp at 0, floor, then hand out the remaining units one per class in
// order of decreasing residual (lower index first on ties), cycling if units
// remain. An overshoot is removed one unit at a time from classes with a
// positive count, in order of increasing residual.
std::vector<std::size_t> RoundCounts(std::span<const double> raw,
                                     std::size_t batch_size);

// lambda = B (p_tilde - grad_z).
LabelCounts RecoverLabels(const Tensor& p_tilde, const Tensor& logit_grad,
                          std::size_t batch_size);

struct AttackResult {
  LabelCounts labels;
  BridgeResult bridge;
};

AttackResult RunGdbr(const Model& model, const GradientShare& share,
                     const AuxEstimates& estimates);

}  // namespace gdbr

#endif  // GDBR_ATTACK_H_
