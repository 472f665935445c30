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

#ifndef GDBR_MODEL_H_
#define GDBR_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "gdbr/tensor.h"

namespace gdbr {

enum class LayerKind { kFc, kConv, kRelu };

std::string LayerKindName(LayerKind kind);

// A layer without bias. FC weights are [out, in]; Conv kernels are
// [out_channels, in_channels, kernel_h, kernel_w]; ReLU has no weight.
struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  std::size_t out = 0;
  std::size_t in = 0;
  std::size_t kernel_h = 0;
  std::size_t kernel_w = 0;

  static LayerSpec Fc(std::size_t out_features, std::size_t in_features);
  static LayerSpec Conv(std::size_t out_channels, std::size_t in_channels,
                        std::size_t kernel_h, std::size_t kernel_w);
  static LayerSpec Relu();

  bool has_weight() const { return kind != LayerKind::kRelu; }
  Shape weight_shape() const;
  std::size_t fan_in() const;

  bool operator==(const LayerSpec&) const = default;
};

// The attacked cascade: one FC-ReLU or Conv-ReLU stack, zero or more FC-ReLU
// stacks, then a final FC classifier without activation. `layers` lists every
// layer including the ReLUs, so it always has 2 * stack_count() - 1 entries.
struct BottomStackSpec {
  std::vector<LayerSpec> layers;
  std::size_t class_count = 0;
  LayerKind first_stack_kind = LayerKind::kFc;

  std::size_t stack_count() const { return (layers.size() + 1) / 2; }
};

struct ModelSpec {
  Shape input_shape;
  // Layers preceding the bottom stack; always Kaiming-uniform initialized.
  std::vector<LayerSpec> feature_extractor;
  BottomStackSpec bottom;
};

// Bottom stack of FC layers: widths[0] is the first stack, the rest are
// hidden FC-ReLU stacks, followed by a `classes`-wide classifier.
BottomStackSpec FcBottom(std::size_t input_features,
                         std::span<const std::size_t> widths,
                         std::size_t classes);
// Bottom stack whose first stack is a Conv-ReLU with 1x1 output over an
// input of `input_shape` ([C, H, W]).
BottomStackSpec ConvBottom(const Shape& input_shape, std::size_t kernels,
                           std::span<const std::size_t> fc_widths,
                           std::size_t classes);
ModelSpec MlpSpec(std::size_t input_dims, std::span<const std::size_t> widths,
                  std::size_t classes);

// Throws SpecError on any structural violation.
void ValidateSpec(const ModelSpec& spec);

enum class InitScheme {
  kPositiveUniform,  // U[0.01, 0.2]
  kKaimingUniform,   // U[-1/sqrt(fan_in), 1/sqrt(fan_in)]
};

inline constexpr double kPositiveUniformLow = 0.01;
inline constexpr double kPositiveUniformHigh = 0.2;

std::string InitSchemeName(InitScheme scheme);
InitScheme ParseInitScheme(const std::string& name);

// Immutable network: feature extractor followed by the bottom stack, stored as
// one flat layer list.
class Model {
 public:
  static Model Build(ModelSpec spec, InitScheme init, std::uint64_t seed);

  const ModelSpec& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }
  InitScheme init() const { return init_; }

  std::size_t layer_count() const { return layers_.size(); }
  const LayerSpec& layer(std::size_t i) const { return layers_.at(i); }
  const Tensor& weight(std::size_t i) const { return weights_.at(i); }
  const Shape& output_shape(std::size_t i) const { return output_shapes_.at(i); }
  std::size_t class_count() const { return spec_.bottom.class_count; }

  // Bottom-stack addressing. Stack l (0-based) owns flat layer stack_layer(l)
  // and, unless it is the final classifier, the ReLU right after it.
  std::size_t stack_count() const { return spec_.bottom.stack_count(); }
  std::size_t bottom_offset() const { return spec_.feature_extractor.size(); }
  std::size_t stack_layer(std::size_t stack) const;
  const Tensor& stack_weight(std::size_t stack) const {
    return weights_.at(stack_layer(stack));
  }

  // Copy with one weight replaced; used by gradient checks.
  Model WithWeight(std::size_t layer, Tensor weight) const;

 private:
  Model() = default;

  ModelSpec spec_;
  InitScheme init_ = InitScheme::kPositiveUniform;
  std::uint64_t seed_ = 0;
  std::vector<LayerSpec> layers_;
  std::vector<Tensor> weights_;  // empty for ReLU layers
  std::vector<Shape> output_shapes_;
};

struct SampleTrace {
  Tensor input;
  std::vector<Tensor> outputs;  // one per flat layer
  Tensor probs;

  const Tensor& logits() const { return outputs.back(); }
};

struct ForwardTrace {
  std::vector<SampleTrace> samples;
};

SampleTrace ForwardSample(const Model& model, const Tensor& input);
ForwardTrace Forward(const Model& model, std::span<const Tensor> batch);

// Pre-activation z and activation a of a bottom stack in a trace. For the
// final stack both are the logits.
const Tensor& StackPreActivation(const Model& model, const SampleTrace& trace,
                                 std::size_t stack);
const Tensor& StackActivation(const Model& model, const SampleTrace& trace,
                              std::size_t stack);

struct SampleGradients {
  double loss = 0.0;
  std::vector<Tensor> weights;  // empty tensor for ReLU layers
  std::vector<Tensor> outputs;  // dL/d(output of layer i)
  Tensor input;
};

SampleGradients BackwardSample(const Model& model, const SampleTrace& trace,
                               std::size_t label);

struct BatchGradients {
  double mean_loss = 0.0;
  std::vector<Tensor> weights;      // batch means, per flat layer
  std::vector<Tensor> logit_grads;  // per sample
};

BatchGradients Backward(const Model& model, const ForwardTrace& trace,
                        std::span<const std::size_t> labels);

}  // namespace gdbr

#endif  // GDBR_MODEL_H_
