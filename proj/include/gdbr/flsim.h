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

#ifndef GDBR_FLSIM_H_
#define GDBR_FLSIM_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gdbr/dataset.h"
#include "gdbr/model.h"
#include "gdbr/tensor.h"

namespace gdbr {

// Class subset of uniformly random size in [2, C], labels i.i.d. over it.
struct RandomDist {
  bool operator==(const RandomDist&) const = default;
};
// Counts as equal as possible; the remainder goes to the lowest classes.
struct UniformDist {
  bool operator==(const UniformDist&) const = default;
};
// Every sample from one class; a random class when unset.
struct SingleDist {
  std::optional<std::size_t> class_index;
  bool operator==(const SingleDist&) const = default;
};
// Equal counts over a random subset of `subset_size` classes.
struct SubclassedDist {
  std::size_t subset_size = 2;
  bool operator==(const SubclassedDist&) const = default;
};
// ceil(fraction * B) from the major class (random when unset), the rest
// i.i.d. over the other classes.
struct ImbalancedDist {
  std::optional<std::size_t> major_class;
  double major_fraction = 0.5;
  bool operator==(const ImbalancedDist&) const = default;
};

using BatchDistribution =
    std::variant<RandomDist, UniformDist, SingleDist, SubclassedDist,
                 ImbalancedDist>;

// Text form: "random", "uniform", "single[:c]", "subclassed:k",
// "imbalanced[:major[:fraction]]" ("imbalanced::0.75" leaves major unset).
std::string DistributionName(const BatchDistribution& dist);
BatchDistribution ParseDistribution(const std::string& text);
// Throws SamplingError when the parameters are invalid for `class_count`.
void ValidateDistribution(const BatchDistribution& dist, std::size_t class_count);

struct Batch {
  std::vector<Tensor> inputs;
  std::vector<std::size_t> labels;
  std::vector<std::size_t> true_counts;  // per class, sums to batch size
};

// Within each class, draws without replacement while the pool allows and
// with replacement beyond that. The batch order is shuffled.
Batch SampleBatch(const Dataset& data, const BatchDistribution& dist,
                  std::size_t batch_size, std::uint64_t seed);

struct NoDefense {
  bool operator==(const NoDefense&) const = default;
};
// Zeroes the floor(ratio * n) entries of smallest magnitude.
struct PruneDefense {
  double ratio = 0.0;
  bool operator==(const PruneDefense&) const = default;
};
// Adds i.i.d. N(0, sigma^2) to every entry.
struct NoiseDefense {
  double sigma = 0.0;
  bool operator==(const NoiseDefense&) const = default;
};

using DefenseSpec = std::variant<NoDefense, PruneDefense, NoiseDefense>;

std::string DefenseName(const DefenseSpec& defense);
// Throws ConfigError for a ratio outside [0, 1) or a negative sigma.
void ValidateDefense(const DefenseSpec& defense);

// What a client uploads: one bottom-stack layer's batch-averaged weight
// gradient. `layer_index` is the 0-based bottom-stack index.
struct GradientShare {
  std::size_t layer_index = 0;
  Tensor grad;
  std::size_t batch_size = 0;
  std::optional<DefenseSpec> defense_applied;
};

// One FedSGD client step. Throws PolicyError when `shared_stack` is the
// final classifier, IndexError when it is past it.
GradientShare ClientStep(const Model& model, const Batch& batch,
                         std::size_t shared_stack);

GradientShare ApplyDefense(GradientShare share, const DefenseSpec& defense,
                           std::uint64_t seed);

}  // namespace gdbr

#endif  // GDBR_FLSIM_H_
