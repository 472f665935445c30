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

#ifndef GDBR_CONFIG_H_
#define GDBR_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gdbr/attack.h"
#include "gdbr/dataset.h"
#include "gdbr/flsim.h"
#include "gdbr/model.h"

namespace gdbr {

// Layer chain before the bottom stack plus the bottom-stack widths. The
// input shape and the class count come from the dataset; the C-wide
// classifier is appended to `widths`.
struct ModelConfig {
  std::vector<LayerSpec> feature_extractor;  // `in` fields are inferred
  LayerKind first_stack = LayerKind::kFc;
  // widths[0] is the first stack (units, or kernels for a conv first stack),
  // the rest are hidden FC-ReLU stacks.
  std::vector<std::size_t> widths{48, 24, 12};

  bool operator==(const ModelConfig&) const = default;
};

struct IdxSource {
  std::string images;
  std::string labels;
  // Optional separate pool for auxiliary estimates.
  std::string aux_images;
  std::string aux_labels;

  bool operator==(const IdxSource&) const = default;
};

struct SyntheticSource {
  SyntheticSpec spec;

  bool operator==(const SyntheticSource& o) const {
    return spec.classes == o.spec.classes && spec.per_class == o.spec.per_class &&
           spec.input_shape == o.spec.input_shape &&
           spec.separation == o.spec.separation && spec.seed == o.spec.seed;
  }
};

using DatasetSource = std::variant<SyntheticSource, IdxSource>;

struct ExperimentConfig {
  ModelConfig model;
  DatasetSource dataset = SyntheticSource{};
  std::size_t batch_size = 64;
  BatchDistribution distribution = RandomDist{};
  std::optional<std::size_t> shared_layer;  // default: penultimate stack
  EstimatorSource estimator = EstimatorSource::kAuxiliary;
  std::size_t aux_samples = 1000;
  InitScheme init = InitScheme::kPositiveUniform;
  DefenseSpec defense = NoDefense{};
  std::size_t repetitions = 20;
  std::uint64_t seed = 1;

  bool operator==(const ExperimentConfig&) const = default;
};

// Strict parse: unknown keys, wrong types and invalid values throw
// ConfigError. Relative IDX paths are resolved against `base_dir`.
ExperimentConfig ParseConfig(const std::string& json_text,
                             const std::filesystem::path& base_dir = {});
ExperimentConfig LoadConfig(const std::filesystem::path& path);
std::string SerializeConfig(const ExperimentConfig& config);

// Strict parse of a bare synthetic spec (the body of dataset.synthetic).
SyntheticSpec ParseSyntheticSpec(const std::string& json_text);

// Resolves the extractor chain and bottom stack for the given input.
ModelSpec BuildModelSpec(const ModelConfig& config, const Shape& input_shape,
                         std::size_t classes);

// Index of the shared stack for a model with `stack_count` stacks.
std::size_t SharedStack(const ExperimentConfig& config, std::size_t stack_count);

}  // namespace gdbr

#endif  // GDBR_CONFIG_H_
