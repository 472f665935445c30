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

#include "gdbr/model.h"

#include <cmath>
#include <random>
#include <utility>

#include "gdbr/error.h"
#include "gdbr/nn.h"
#include "gdbr/random.h"

namespace gdbr {

std::string LayerKindName(LayerKind kind) {
  switch (kind) {
    case LayerKind::kFc:
      return "fc";
    case LayerKind::kConv:
      return "conv";
    case LayerKind::kRelu:
      return "relu";
  }
  return "?";
}

LayerSpec LayerSpec::Fc(std::size_t out_features, std::size_t in_features) {
  return {LayerKind::kFc, out_features, in_features, 0, 0};
}

LayerSpec LayerSpec::Conv(std::size_t out_channels, std::size_t in_channels,
                          std::size_t kernel_h, std::size_t kernel_w) {
  return {LayerKind::kConv, out_channels, in_channels, kernel_h, kernel_w};
}

LayerSpec LayerSpec::Relu() { return {}; }

Shape LayerSpec::weight_shape() const {
  switch (kind) {
    case LayerKind::kFc:
      return {out, in};
    case LayerKind::kConv:
      return {out, in, kernel_h, kernel_w};
    case LayerKind::kRelu:
      return {};
  }
  return {};
}

std::size_t LayerSpec::fan_in() const {
  return kind == LayerKind::kConv ? in * kernel_h * kernel_w : in;
}

BottomStackSpec FcBottom(std::size_t input_features,
                         std::span<const std::size_t> widths,
                         std::size_t classes) {
  BottomStackSpec bottom;
  bottom.class_count = classes;
  bottom.first_stack_kind = LayerKind::kFc;
  std::size_t in = input_features;
  for (std::size_t width : widths) {
    bottom.layers.push_back(LayerSpec::Fc(width, in));
    bottom.layers.push_back(LayerSpec::Relu());
    in = width;
  }
  bottom.layers.push_back(LayerSpec::Fc(classes, in));
  return bottom;
}

BottomStackSpec ConvBottom(const Shape& input_shape, std::size_t kernels,
                           std::span<const std::size_t> fc_widths,
                           std::size_t classes) {
  if (input_shape.size() != 3) {
    throw SpecError("conv bottom stack needs a [C, H, W] input, got " +
                    ShapeString(input_shape));
  }
  BottomStackSpec bottom;
  bottom.class_count = classes;
  bottom.first_stack_kind = LayerKind::kConv;
  bottom.layers.push_back(LayerSpec::Conv(kernels, input_shape[0],
                                          input_shape[1], input_shape[2]));
  bottom.layers.push_back(LayerSpec::Relu());
  std::size_t in = kernels;
  for (std::size_t width : fc_widths) {
    bottom.layers.push_back(LayerSpec::Fc(width, in));
    bottom.layers.push_back(LayerSpec::Relu());
    in = width;
  }
  bottom.layers.push_back(LayerSpec::Fc(classes, in));
  return bottom;
}

ModelSpec MlpSpec(std::size_t input_dims, std::span<const std::size_t> widths,
                  std::size_t classes) {
  if (widths.empty()) throw SpecError("an MLP needs at least one hidden width");
  return {{input_dims}, {}, FcBottom(input_dims, widths, classes)};
}

namespace {

// Output shape of `layer` for an input of `in_shape`, or SpecError.
Shape PropagateShape(const LayerSpec& layer, const Shape& in_shape,
                     const std::string& where) {
  switch (layer.kind) {
    case LayerKind::kRelu:
      return in_shape;
    case LayerKind::kFc:
      if (layer.out == 0 || layer.in != ShapeSize(in_shape)) {
        throw SpecError(where + ": FC layer " + std::to_string(layer.out) + "x" +
                        std::to_string(layer.in) + " does not accept input " +
                        ShapeString(in_shape));
      }
      return {layer.out};
    case LayerKind::kConv:
      if (layer.out == 0 || in_shape.size() != 3 || layer.in != in_shape[0] ||
          layer.kernel_h == 0 || layer.kernel_w == 0 ||
          layer.kernel_h > in_shape[1] || layer.kernel_w > in_shape[2]) {
        throw SpecError(where + ": conv layer " +
                        ShapeString(layer.weight_shape()) +
                        " does not accept input " + ShapeString(in_shape));
      }
      return nn::ConvOutputShape(layer.weight_shape(), in_shape);
  }
  return in_shape;
}

}  // namespace

void ValidateSpec(const ModelSpec& spec) {
  if (spec.input_shape.empty() || ShapeSize(spec.input_shape) == 0) {
    throw SpecError("model input shape " + ShapeString(spec.input_shape) +
                    " is empty");
  }
  Shape shape = spec.input_shape;
  for (std::size_t i = 0; i < spec.feature_extractor.size(); ++i) {
    shape = PropagateShape(spec.feature_extractor[i], shape,
                           "feature extractor layer " + std::to_string(i));
  }

  const BottomStackSpec& bottom = spec.bottom;
  const auto& layers = bottom.layers;
  if (bottom.class_count == 0) throw SpecError("class count must be positive");
  if (layers.size() < 3 || layers.size() % 2 == 0) {
    throw SpecError("bottom stack needs a first stack, optional FC-ReLU stacks "
                    "and a final FC layer; got " +
                    std::to_string(layers.size()) + " layers");
  }
  if (bottom.first_stack_kind == LayerKind::kRelu) {
    throw SpecError("first stack must be FC or Conv");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const std::size_t stack = i / 2;
    const std::string where = "bottom stack " + std::to_string(stack);
    const bool relu_slot = i % 2 == 1;
    if (relu_slot) {
      if (layers[i].kind != LayerKind::kRelu) {
        throw SpecError(where + ": expected a ReLU after the weight layer");
      }
    } else if (stack == 0) {
      if (layers[i].kind != bottom.first_stack_kind) {
        throw SpecError(where + ": first layer is " +
                        LayerKindName(layers[i].kind) + " but spec declares " +
                        LayerKindName(bottom.first_stack_kind));
      }
    } else if (layers[i].kind != LayerKind::kFc) {
      throw SpecError(where + ": only FC layers may follow the first stack");
    }
    const Shape in_shape = shape;
    shape = PropagateShape(layers[i], in_shape, where);
    if (relu_slot) continue;
    if (layers[i].kind == LayerKind::kConv &&
        (shape[1] != 1 || shape[2] != 1)) {
      throw SpecError(where + ": conv first stack must produce 1x1 outputs, got " +
                      ShapeString(shape));
    }
    if (stack > 0 && layers[i].out > layers[i].in) {
      throw SpecError(where + ": FC layer widens from " +
                      std::to_string(layers[i].in) + " to " +
                      std::to_string(layers[i].out) +
                      "; bridged layers must not widen");
    }
  }
  if (layers.back().out != bottom.class_count) {
    throw SpecError("final FC layer has " + std::to_string(layers.back().out) +
                    " outputs for " + std::to_string(bottom.class_count) +
                    " classes");
  }
}

std::string InitSchemeName(InitScheme scheme) {
  return scheme == InitScheme::kPositiveUniform ? "positive_uniform"
                                                : "kaiming_uniform";
}

InitScheme ParseInitScheme(const std::string& name) {
  if (name == "positive_uniform") return InitScheme::kPositiveUniform;
  if (name == "kaiming_uniform") return InitScheme::kKaimingUniform;
  throw ConfigError("unknown init scheme '" + name +
                    "' (expected positive_uniform or kaiming_uniform)");
}

namespace {

Tensor InitWeight(const LayerSpec& layer, InitScheme scheme, Rng& rng) {
  Tensor w(layer.weight_shape());
  double low = kPositiveUniformLow;
  double high = kPositiveUniformHigh;
  if (scheme == InitScheme::kKaimingUniform) {
    // Kaiming uniform with a = sqrt(5): bound = sqrt(6 / (6 * fan_in)).
    high = 1.0 / std::sqrt(static_cast<double>(layer.fan_in()));
    low = -high;
  }
  std::uniform_real_distribution<double> dist(low, high);
  for (double& v : w.data()) v = dist(rng);
  return w;
}

}  // namespace

Model Model::Build(ModelSpec spec, InitScheme init, std::uint64_t seed) {
  ValidateSpec(spec);
  Model model;
  model.spec_ = std::move(spec);
  model.init_ = init;
  model.seed_ = seed;
  Rng rng(seed);
  Shape shape = model.spec_.input_shape;
  auto add = [&](const LayerSpec& layer, InitScheme scheme) {
    model.layers_.push_back(layer);
    model.weights_.push_back(layer.has_weight() ? InitWeight(layer, scheme, rng)
                                                : Tensor());
    shape = PropagateShape(layer, shape, "layer");
    model.output_shapes_.push_back(shape);
  };
  for (const LayerSpec& layer : model.spec_.feature_extractor) {
    add(layer, InitScheme::kKaimingUniform);
  }
  for (const LayerSpec& layer : model.spec_.bottom.layers) add(layer, init);
  return model;
}

std::size_t Model::stack_layer(std::size_t stack) const {
  if (stack >= stack_count()) {
    throw IndexError("bottom stack " + std::to_string(stack) +
                     " out of range for " + std::to_string(stack_count()) +
                     " stacks");
  }
  return bottom_offset() + 2 * stack;
}

Model Model::WithWeight(std::size_t layer, Tensor weight) const {
  if (weight.shape() != weights_.at(layer).shape()) {
    throw DimensionError("replacement weight " + ShapeString(weight.shape()) +
                         " for layer of shape " +
                         ShapeString(weights_.at(layer).shape()));
  }
  Model copy = *this;
  copy.weights_[layer] = std::move(weight);
  return copy;
}

SampleTrace ForwardSample(const Model& model, const Tensor& input) {
  if (input.shape() != model.spec().input_shape) {
    throw DimensionError("model expects input " +
                         ShapeString(model.spec().input_shape) + ", got " +
                         ShapeString(input.shape()));
  }
  SampleTrace trace;
  trace.input = input;
  trace.outputs.reserve(model.layer_count());
  const Tensor* x = &trace.input;
  for (std::size_t i = 0; i < model.layer_count(); ++i) {
    switch (model.layer(i).kind) {
      case LayerKind::kFc:
        trace.outputs.push_back(nn::FcForward(model.weight(i), *x));
        break;
      case LayerKind::kConv:
        trace.outputs.push_back(nn::ConvForward(model.weight(i), *x));
        break;
      case LayerKind::kRelu:
        trace.outputs.push_back(nn::ReluForward(*x));
        break;
    }
    x = &trace.outputs.back();
  }
  // Label 0 is a placeholder; only the probabilities are kept.
  trace.probs = nn::SoftmaxCrossEntropy(trace.logits(), 0).probs;
  return trace;
}

ForwardTrace Forward(const Model& model, std::span<const Tensor> batch) {
  ForwardTrace trace;
  trace.samples.reserve(batch.size());
  for (const Tensor& x : batch) trace.samples.push_back(ForwardSample(model, x));
  return trace;
}

const Tensor& StackPreActivation(const Model& model, const SampleTrace& trace,
                                 std::size_t stack) {
  return trace.outputs.at(model.stack_layer(stack));
}

const Tensor& StackActivation(const Model& model, const SampleTrace& trace,
                              std::size_t stack) {
  const std::size_t layer = model.stack_layer(stack);
  if (stack + 1 == model.stack_count()) return trace.outputs.at(layer);
  return trace.outputs.at(layer + 1);
}

SampleGradients BackwardSample(const Model& model, const SampleTrace& trace,
                               std::size_t label) {
  const std::size_t n = model.layer_count();
  if (trace.outputs.size() != n) {
    throw DimensionError("trace has " + std::to_string(trace.outputs.size()) +
                         " layer outputs for a model with " +
                         std::to_string(n) + " layers");
  }
  SampleGradients grads;
  grads.loss = nn::SoftmaxCrossEntropy(trace.logits(), label).loss;
  grads.weights.resize(n);
  grads.outputs.resize(n);
  Tensor grad = nn::CeLogitGradient(trace.probs, label);
  for (std::size_t i = n; i-- > 0;) {
    const Tensor& input = i == 0 ? trace.input : trace.outputs[i - 1];
    grads.outputs[i] = grad;
    switch (model.layer(i).kind) {
      case LayerKind::kFc: {
        nn::FcGradients fc = nn::FcBackward(model.weight(i), input, grad);
        grads.weights[i] = std::move(fc.weight);
        grad = std::move(fc.input);
        break;
      }
      case LayerKind::kConv:
        grads.weights[i] = nn::ConvBackwardWeights(model.weight(i), input, grad);
        grad = nn::ConvBackwardInput(model.weight(i), input, grad);
        break;
      case LayerKind::kRelu:
        grad = nn::ReluBackward(input, grad);
        break;
    }
  }
  grads.input = std::move(grad);
  return grads;
}

BatchGradients Backward(const Model& model, const ForwardTrace& trace,
                        std::span<const std::size_t> labels) {
  if (labels.size() != trace.samples.size() || labels.empty()) {
    throw DimensionError(std::to_string(labels.size()) + " labels for " +
                         std::to_string(trace.samples.size()) + " samples");
  }
  BatchGradients out;
  out.weights.resize(model.layer_count());
  for (std::size_t i = 0; i < model.layer_count(); ++i) {
    if (model.layer(i).has_weight()) out.weights[i] = Tensor(model.weight(i).shape());
  }
  for (std::size_t s = 0; s < labels.size(); ++s) {
    SampleGradients g = BackwardSample(model, trace.samples[s], labels[s]);
    out.mean_loss += g.loss;
    for (std::size_t i = 0; i < model.layer_count(); ++i) {
      if (model.layer(i).has_weight()) out.weights[i] += g.weights[i];
    }
    out.logit_grads.push_back(std::move(g.outputs.back()));
  }
  const double inv = 1.0 / static_cast<double>(labels.size());
  out.mean_loss *= inv;
  for (Tensor& w : out.weights) w *= inv;
  return out;
}

}  // namespace gdbr
