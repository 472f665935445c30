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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "gdbr/error.h"
#include "gdbr/nn.h"
#include "oracle.h"

namespace gdbr {
namespace {

TEST(ModelSpecTest, SixLayerMlp) {
  const std::vector<std::size_t> widths{2048, 1024, 512, 256, 128, 64};
  const Model m = Model::Build(MlpSpec(784, widths, 10), InitScheme::kPositiveUniform, 1);
  EXPECT_EQ(m.stack_count(), 7u);
  std::size_t fc = 0;
  for (std::size_t i = 0; i < m.layer_count(); ++i) fc += m.layer(i).kind == LayerKind::kFc;
  EXPECT_EQ(fc, 7u);  // six hidden FC layers plus the C-wide classifier
  EXPECT_EQ(m.stack_weight(6).shape(), (Shape{10, 64}));
}

TEST(ModelSpecTest, RejectsBrokenStructure) {
  const std::vector<std::size_t> widths{8, 4};
  ModelSpec spec = MlpSpec(16, widths, 3);
  EXPECT_NO_THROW(ValidateSpec(spec));

  ModelSpec widening = MlpSpec(16, std::vector<std::size_t>{4, 8}, 3);
  EXPECT_THROW(ValidateSpec(widening), SpecError);

  ModelSpec no_relu = spec;
  no_relu.bottom.layers[1] = LayerSpec::Fc(8, 8);
  EXPECT_THROW(ValidateSpec(no_relu), SpecError);

  ModelSpec wrong_classes = spec;
  wrong_classes.bottom.class_count = 4;
  EXPECT_THROW(ValidateSpec(wrong_classes), SpecError);

  ModelSpec trailing_relu = spec;
  trailing_relu.bottom.layers.push_back(LayerSpec::Relu());
  EXPECT_THROW(ValidateSpec(trailing_relu), SpecError);

  ModelSpec bad_chain = spec;
  bad_chain.input_shape = {15};
  EXPECT_THROW(ValidateSpec(bad_chain), SpecError);

  EXPECT_THROW(Model::Build(widening, InitScheme::kPositiveUniform, 1), SpecError);
}

TEST(ModelSpecTest, ConvFirstStackNeedsUnitOutput) {
  const std::vector<std::size_t> fc{4};
  ModelSpec ok{{2, 3, 3}, {}, ConvBottom({2, 3, 3}, 6, fc, 3)};
  EXPECT_NO_THROW(ValidateSpec(ok));
  ModelSpec bad = ok;
  bad.bottom.layers[0] = LayerSpec::Conv(6, 2, 2, 2);
  EXPECT_THROW(ValidateSpec(bad), SpecError);
  ModelSpec kind = ok;
  kind.bottom.first_stack_kind = LayerKind::kFc;
  EXPECT_THROW(ValidateSpec(kind), SpecError);
}

TEST(ModelInitTest, PositiveUniformBounds) {
  const Model m = Model::Build(MlpSpec(50, std::vector<std::size_t>{40, 20}, 10),
                               InitScheme::kPositiveUniform, 3);
  for (std::size_t l = 0; l < m.stack_count(); ++l) {
    for (double v : m.stack_weight(l).data()) {
      EXPECT_GE(v, kPositiveUniformLow);
      EXPECT_LE(v, kPositiveUniformHigh);
    }
  }
}

TEST(ModelInitTest, KaimingBoundsAndExtractor) {
  const ModelSpec spec{{2, 5, 5},
                       {LayerSpec::Conv(3, 2, 3, 3), LayerSpec::Relu()},
                       FcBottom(27, std::vector<std::size_t>{8}, 4)};
  const Model m = Model::Build(spec, InitScheme::kPositiveUniform, 4);
  // The extractor stays Kaiming even under the positive scheme.
  const double bound = 1.0 / std::sqrt(18.0);
  bool negative = false;
  for (double v : m.weight(0).data()) {
    EXPECT_LE(std::abs(v), bound);
    negative = negative || v < 0;
  }
  EXPECT_TRUE(negative);
  EXPECT_GE(m.stack_weight(0).data()[0], kPositiveUniformLow);

  const Model k = Model::Build(spec, InitScheme::kKaimingUniform, 4);
  const double b0 = 1.0 / std::sqrt(27.0);
  for (double v : k.stack_weight(0).data()) EXPECT_LE(std::abs(v), b0);
}

TEST(ModelInitTest, SeedDeterminism) {
  const ModelSpec spec = MlpSpec(6, std::vector<std::size_t>{5}, 3);
  const Model a = Model::Build(spec, InitScheme::kPositiveUniform, 9);
  const Model b = Model::Build(spec, InitScheme::kPositiveUniform, 9);
  const Model c = Model::Build(spec, InitScheme::kPositiveUniform, 10);
  for (std::size_t i = 0; i < a.layer_count(); ++i) EXPECT_EQ(a.weight(i), b.weight(i));
  EXPECT_NE(a.weight(0), c.weight(0));
}

TEST(ModelInitTest, ParseScheme) {
  EXPECT_EQ(ParseInitScheme("kaiming_uniform"), InitScheme::kKaimingUniform);
  EXPECT_EQ(InitSchemeName(InitScheme::kPositiveUniform), "positive_uniform");
  EXPECT_THROW(ParseInitScheme("xavier"), ConfigError);
}

TEST(ForwardTest, ZeroInputGivesUniformProbs) {
  const Model m = Model::Build(MlpSpec(5, std::vector<std::size_t>{4, 3}, 3),
                               InitScheme::kPositiveUniform, 2);
  const SampleTrace t = ForwardSample(m, Tensor({5}));
  for (const Tensor& out : t.outputs) EXPECT_EQ(MaxAbs(out), 0.0);
  for (double p : t.probs.data()) EXPECT_NEAR(p, 1.0 / 3.0, 1e-15);
}

TEST(ForwardTest, MatchesHandComputation) {
  const Model base = Model::Build(MlpSpec(2, std::vector<std::size_t>{2}, 2),
                                  InitScheme::kPositiveUniform, 1);
  const Model m = base.WithWeight(0, Tensor::Matrix(2, 2, {1, -1, 2, 0.5}))
                      .WithWeight(2, Tensor::Matrix(2, 2, {1, 2, 3, 4}));
  const SampleTrace t = ForwardSample(m, Tensor::Vector({1, 3}));
  // z1 = [-2, 3.5], a1 = [0, 3.5], logits = [7, 14]
  EXPECT_EQ(t.outputs[0].values(), (std::vector<double>{-2, 3.5}));
  EXPECT_EQ(t.outputs[1].values(), (std::vector<double>{0, 3.5}));
  EXPECT_EQ(t.logits().values(), (std::vector<double>{7, 14}));
  const auto p = oracle::Softmax({7, 14});
  EXPECT_NEAR(t.probs[1], p[1], 1e-15);
  EXPECT_THROW(ForwardSample(m, Tensor({3})), DimensionError);
}

TEST(ForwardTest, IdenticalSamplesGiveIdenticalRows) {
  const Model m = Model::Build(MlpSpec(4, std::vector<std::size_t>{3}, 2),
                               InitScheme::kKaimingUniform, 5);
  const Tensor x = Tensor::Vector({0.1, -0.2, 0.3, 0.4});
  const std::vector<Tensor> batch(3, x);
  const ForwardTrace t = Forward(m, batch);
  for (const SampleTrace& s : t.samples) EXPECT_EQ(s.outputs, t.samples[0].outputs);
}

TEST(ForwardTest, StackAccessors) {
  const Model m = Model::Build(MlpSpec(4, std::vector<std::size_t>{3}, 2),
                               InitScheme::kPositiveUniform, 5);
  const SampleTrace t = ForwardSample(m, Tensor::Vector({1, 1, 1, 1}));
  EXPECT_EQ(&StackPreActivation(m, t, 0), &t.outputs[0]);
  EXPECT_EQ(&StackActivation(m, t, 0), &t.outputs[1]);
  EXPECT_EQ(&StackActivation(m, t, 1), &t.logits());
  EXPECT_THROW(m.stack_layer(2), IndexError);
}

TEST(BackwardTest, BatchMeanEqualsMeanOfSamples) {
  std::mt19937_64 rng(21);
  const Model m = Model::Build(MlpSpec(6, std::vector<std::size_t>{5, 4}, 3),
                               InitScheme::kKaimingUniform, 6);
  std::vector<Tensor> batch;
  const std::vector<std::size_t> labels{0, 2, 1, 2};
  for (std::size_t i = 0; i < labels.size(); ++i) batch.push_back(oracle::Uniform({6}, -1, 1, rng));
  const ForwardTrace trace = Forward(m, batch);
  const BatchGradients g = Backward(m, trace, labels);
  for (std::size_t layer : {0u, 2u, 4u}) {
    Tensor mean(m.weight(layer).shape());
    for (std::size_t s = 0; s < labels.size(); ++s) {
      mean += BackwardSample(m, trace.samples[s], labels[s]).weights[layer];
    }
    mean *= 0.25;
    EXPECT_LT(MaxAbsDiff(mean, g.weights[layer]), 1e-12);
  }
  ASSERT_EQ(g.logit_grads.size(), 4u);
  EXPECT_EQ(g.logit_grads[1], nn::CeLogitGradient(trace.samples[1].probs, 2));
}

TEST(BackwardTest, SingleSampleEqualsPerSample) {
  const Model m = Model::Build(MlpSpec(3, std::vector<std::size_t>{3}, 2),
                               InitScheme::kPositiveUniform, 7);
  const std::vector<Tensor> batch{Tensor::Vector({0.2, 0.4, 0.6})};
  const std::vector<std::size_t> labels{1};
  const ForwardTrace trace = Forward(m, batch);
  const BatchGradients g = Backward(m, trace, labels);
  const SampleGradients s = BackwardSample(m, trace.samples[0], 1);
  EXPECT_EQ(g.weights[0], s.weights[0]);
  EXPECT_EQ(g.weights[2], s.weights[2]);
}

TEST(BackwardTest, LabelOutOfRange) {
  const Model m = Model::Build(MlpSpec(3, std::vector<std::size_t>{3}, 2),
                               InitScheme::kPositiveUniform, 7);
  const std::vector<Tensor> batch{Tensor::Vector({0.2, 0.4, 0.6})};
  const std::vector<std::size_t> labels{2};
  EXPECT_THROW(Backward(m, Forward(m, batch), labels), IndexError);
}

TEST(BackwardTest, PerfectPredictionGivesZeroGradients) {
  // Huge logits for class 0 make p = onehot(0) to machine precision.
  const Model base = Model::Build(MlpSpec(2, std::vector<std::size_t>{2}, 2),
                                  InitScheme::kPositiveUniform, 1);
  const Model m = base.WithWeight(2, Tensor::Matrix(2, 2, {1000, 1000, 0, 0}));
  const std::vector<Tensor> batch{Tensor::Vector({1, 1})};
  const std::vector<std::size_t> labels{0};
  const BatchGradients g = Backward(m, Forward(m, batch), labels);
  EXPECT_LT(MaxAbs(g.weights[0]), 1e-60);
  EXPECT_LT(MaxAbs(g.weights[2]), 1e-60);
}

TEST(BackwardTest, MatchesFiniteDifferencesOfMeanLoss) {
  std::mt19937_64 rng(22);
  const ModelSpec spec{{1, 4, 4},
                       {LayerSpec::Conv(2, 1, 2, 2), LayerSpec::Relu()},
                       ConvBottom({2, 3, 3}, 5, std::vector<std::size_t>{4}, 3)};
  int checked = 0;
  for (std::uint64_t seed = 0; checked < 5 && seed < 50; ++seed) {
    const Model m = Model::Build(spec, InitScheme::kKaimingUniform, seed);
    std::vector<Tensor> batch;
    for (int i = 0; i < 3; ++i) batch.push_back(oracle::Uniform({1, 4, 4}, -1, 1, rng));
    const std::vector<std::size_t> labels{0, 1, 2};
    const ForwardTrace trace = Forward(m, batch);
    bool kink = false;
    for (const SampleTrace& s : trace.samples) {
      for (std::size_t i = 0; i < m.layer_count(); ++i) {
        if (m.layer(i).kind != LayerKind::kRelu) continue;
        for (double v : s.outputs[i - 1].data()) kink = kink || std::abs(v) < 1e-3;
      }
    }
    if (kink) continue;
    ++checked;
    const BatchGradients g = Backward(m, trace, labels);
    for (std::size_t i = 0; i < m.layer_count(); ++i) {
      if (!m.layer(i).has_weight()) continue;
      Tensor w = m.weight(i);
      const auto loss = [&] {
        const Model p = m.WithWeight(i, w);
        return Backward(p, Forward(p, batch), labels).mean_loss;
      };
      EXPECT_LT(oracle::FdError(g.weights[i], oracle::FiniteDifference(w, loss)), 1e-5)
          << "layer " << i;
    }
  }
  EXPECT_EQ(checked, 5);
}

}  // namespace
}  // namespace gdbr
