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

#include "gdbr/verify.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>

#include "gdbr/attack.h"
#include "gdbr/flsim.h"
#include "gdbr/metrics.h"
#include "gdbr/model.h"
#include "gdbr/nn.h"
#include "gdbr/random.h"

namespace gdbr {
namespace {

constexpr double kIdentityTol = 1e-9;
constexpr double kInversionTol = 1e-6;
constexpr double kFdTol = 1e-5;
constexpr double kFdStep = 1e-4;
constexpr double kKink = 1e-3;

Tensor RandomTensor(Shape shape, double lo, double hi, Rng& rng) {
  Tensor t(std::move(shape));
  std::uniform_real_distribution<double> u(lo, hi);
  for (double& v : t.data()) v = u(rng);
  return t;
}

std::size_t RandomSize(std::size_t lo, std::size_t hi, Rng& rng) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

Tensor MatMul(const Tensor& a, const Tensor& b) {
  const std::size_t n = a.dim(0), k = a.dim(1), m = b.dim(1);
  Tensor out({n, m});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t t = 0; t < k; ++t) s += a[i * k + t] * b[t * m + j];
      out[i * m + j] = s;
    }
  return out;
}

Tensor Transpose(const Tensor& a) {
  const std::size_t n = a.dim(0), m = a.dim(1);
  Tensor out({m, n});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out[j * n + i] = a[i * m + j];
  return out;
}

Tensor Outer(const Tensor& u, const Tensor& v) {
  Tensor out({u.size(), v.size()});
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) out[i * v.size() + j] = u[i] * v[j];
  return out;
}

Tensor Hadamard(const Tensor& a, const Tensor& b) {
  Tensor out = a.Flattened();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

double RelErr(const Tensor& got, const Tensor& want) {
  return MaxAbsDiff(got.Flattened(), want.Flattened()) / std::max(MaxAbs(want), 1e-12);
}

std::string Worst(const char* label, double worst, double tol, std::size_t n) {
  std::ostringstream out;
  out << n << " instances, worst " << label << " " << worst << " (tol " << tol << ")";
  return out.str();
}

// Each earlier stack is 1.25x to 1.5x wider than the next.
std::size_t Widen(std::size_t w, Rng& rng) {
  return w + RandomSize(std::max<std::size_t>(1, w / 4), std::max<std::size_t>(1, w / 2), rng);
}

// A random tapering PositiveUniform MLP with a positive input, so every
// hidden activation is strictly positive.
struct PositiveInstance {
  Model model;
  Tensor input;
  std::size_t label;
  SampleTrace trace;
  SampleGradients grads;
};

PositiveInstance MakePositiveMlp(Rng& rng, std::size_t depth, std::size_t classes) {
  std::vector<std::size_t> widths(depth - 1);
  std::size_t w = Widen(classes, rng);
  for (std::size_t i = widths.size(); i-- > 0;) {
    widths[i] = w;
    w = Widen(w, rng);
  }
  const std::size_t input_dims = w;
  const ModelSpec spec = MlpSpec(input_dims, widths, classes);
  Model model = Model::Build(spec, InitScheme::kPositiveUniform, rng());
  Tensor x = RandomTensor({input_dims}, 0.05, 1.0, rng);
  const std::size_t label = RandomSize(0, classes - 1, rng);
  SampleTrace trace = ForwardSample(model, x);
  SampleGradients grads = BackwardSample(model, trace, label);
  return {std::move(model), std::move(x), label, std::move(trace), std::move(grads)};
}

PositiveInstance MakePositiveConv(Rng& rng, std::size_t classes, std::size_t fc_layers) {
  const Shape input{RandomSize(1, 3, rng), RandomSize(1, 4, rng), RandomSize(1, 4, rng)};
  std::vector<std::size_t> widths(fc_layers);
  std::size_t w = Widen(classes, rng);
  for (std::size_t i = widths.size(); i-- > 0;) {
    widths[i] = w;
    w = Widen(w, rng);
  }
  const ModelSpec spec{input, {}, ConvBottom(input, w, widths, classes)};
  Model model = Model::Build(spec, InitScheme::kPositiveUniform, rng());
  Tensor x = RandomTensor(input, 0.05, 1.0, rng);
  const std::size_t label = RandomSize(0, classes - 1, rng);
  SampleTrace trace = ForwardSample(model, x);
  SampleGradients grads = BackwardSample(model, trace, label);
  return {std::move(model), std::move(x), label, std::move(trace), std::move(grads)};
}

// Gradient with respect to the input of bottom stack `stack`.
const Tensor& StackInputGrad(const PositiveInstance& p, std::size_t stack) {
  const std::size_t layer = p.model.stack_layer(stack);
  return layer == 0 ? p.grads.input : p.grads.outputs[layer - 1];
}

// Gradient with respect to the activation of hidden stack `stack`.
const Tensor& StackActivationGrad(const PositiveInstance& p, std::size_t stack) {
  return p.grads.outputs[p.model.stack_layer(stack) + 1];
}

double FdRelError(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max({std::abs(analytic), std::abs(numeric), kKink});
}

// Worst relative error of `analytic` against central differences of `loss`
// with respect to every entry of `param`.
double FdWorst(Tensor& param, const Tensor& analytic,
               const std::function<double()>& loss) {
  double worst = 0.0;
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double keep = param[i];
    param[i] = keep + kFdStep;
    const double up = loss();
    param[i] = keep - kFdStep;
    const double down = loss();
    param[i] = keep;
    worst = std::max(worst, FdRelError(analytic[i], (up - down) / (2.0 * kFdStep)));
  }
  return worst;
}

bool HasKink(const Model& model, const SampleTrace& trace) {
  for (std::size_t i = 0; i < model.layer_count(); ++i) {
    if (model.layer(i).kind != LayerKind::kRelu) continue;
    const Tensor& z = i == 0 ? trace.input : trace.outputs[i - 1];
    for (double v : z.data()) {
      if (std::abs(v) < kKink) return true;
    }
  }
  return false;
}

}  // namespace

CheckResult CheckFcIdentities(const VerifyOptions& options) {
  Rng rng(DeriveSeed(options.seed, 1));
  double worst = 0.0;
  for (std::size_t n = 0; n < options.instances; ++n) {
    const std::size_t rows = RandomSize(1, 8, rng), cols = RandomSize(1, 8, rng);
    const Tensor w = RandomTensor({rows, cols}, -1.0, 1.0, rng);
    const Tensor x = RandomTensor({cols}, -1.0, 1.0, rng);
    const Tensor gz = RandomTensor({rows}, -1.0, 1.0, rng);
    const Tensor z = nn::FcForward(w, x);
    const nn::FcGradients g = nn::FcBackward(w, x, gz);
    const Tensor gw_wt = MatMul(g.weight, Transpose(w));
    Tensor diag({rows});
    for (std::size_t k = 0; k < rows; ++k) diag[k] = gw_wt[k * rows + k];
    worst = std::max({worst, MaxAbsDiff(Outer(g.input, x), MatMul(Transpose(w), g.weight)),
                      MaxAbsDiff(Outer(gz, z), gw_wt), MaxAbsDiff(Hadamard(gz, z), diag)});
  }
  return {"fc_identities", worst <= kIdentityTol, Worst("abs error", worst, kIdentityTol, options.instances)};
}

CheckResult CheckClassifierInversion(const VerifyOptions& options) {
  Rng rng(DeriveSeed(options.seed, 2));
  double worst = 0.0;
  std::size_t used = 0, skipped = 0;
  while (used < options.instances) {
    const PositiveInstance p = MakePositiveMlp(rng, RandomSize(2, 5, rng), RandomSize(2, 10, rng));
    const std::size_t last = p.model.stack_count() - 1;
    const BridgeStep step = BridgeFcStep(p.model.stack_weight(last), StackInputGrad(p, last));
    if (step.condition_number >= 1e8) {
      ++skipped;
      continue;
    }
    worst = std::max(worst, RelErr(step.grad, p.grads.outputs.back()));
    ++used;
  }
  CheckResult r{"classifier_inversion", worst <= kInversionTol, Worst("rel error", worst, kInversionTol, used)};
  if (skipped > 0) r.detail += ", " + std::to_string(skipped) + " ill-conditioned skipped";
  return r;
}

CheckResult CheckConvInnerProduct(const VerifyOptions& options) {
  Rng rng(DeriveSeed(options.seed, 3));
  double worst = 0.0;
  for (std::size_t n = 0; n < options.instances; ++n) {
    const std::size_t cout = RandomSize(1, 4, rng), cin = RandomSize(1, 3, rng);
    const std::size_t kh = RandomSize(1, 3, rng), kw = RandomSize(1, 3, rng);
    const Tensor k = RandomTensor({cout, cin, kh, kw}, -1.0, 1.0, rng);
    const Tensor x = RandomTensor({cin, kh + RandomSize(0, 3, rng), kw + RandomSize(0, 3, rng)},
                                  -1.0, 1.0, rng);
    const Tensor z = nn::ConvForward(k, x);
    const Tensor gz = RandomTensor(z.shape(), -1.0, 1.0, rng);
    const Tensor gk = nn::ConvBackwardWeights(k, x, gz);
    const std::size_t kn = k.size() / cout, zn = z.size() / cout;
    for (std::size_t c = 0; c < cout; ++c) {
      double lhs = 0.0, rhs = 0.0;
      for (std::size_t i = 0; i < kn; ++i) lhs += gk[c * kn + i] * k[c * kn + i];
      for (std::size_t i = 0; i < zn; ++i) rhs += gz[c * zn + i] * z[c * zn + i];
      worst = std::max(worst, std::abs(lhs - rhs));
    }
  }
  return {"conv_inner_product", worst <= kIdentityTol, Worst("abs error", worst, kIdentityTol, options.instances)};
}

CheckResult CheckReluIdentity(const VerifyOptions& options) {
  Rng rng(DeriveSeed(options.seed, 4));
  double worst = 0.0;
  for (std::size_t n = 0; n < options.instances; ++n) {
    const Tensor z = RandomTensor({RandomSize(1, 16, rng)}, -1.0, 1.0, rng);
    const Tensor ga = RandomTensor(z.shape(), -1.0, 1.0, rng);
    const Tensor a = nn::ReluForward(z);
    const Tensor gz = nn::ReluBackward(z, ga);
    worst = std::max(worst, MaxAbsDiff(Hadamard(gz, z), Hadamard(ga, a)));
  }
  return {"relu_identity", worst <= kIdentityTol, Worst("abs error", worst, kIdentityTol, options.instances)};
}

CheckResult CheckFcInversionFromInputGrad(const VerifyOptions& options) {
  Rng rng(DeriveSeed(options.seed, 5));
  double worst = 0.0;
  for (std::size_t n = 0; n < options.instances; ++n) {
    const PositiveInstance p = MakePositiveMlp(rng, RandomSize(2, 5, rng), RandomSize(2, 10, rng));
    for (std::size_t l = 0; l + 1 < p.model.stack_count(); ++l) {
      const BridgeStep step = BridgeFcStep(p.model.stack_weight(l), StackInputGrad(p, l));
      worst = std::max(worst, RelErr(step.grad, StackActivationGrad(p, l)));
    }
  }
  return {"fc_inversion_input_grad", worst <= kInversionTol,
          Worst("rel error", worst, kInversionTol, options.instances)};
}

CheckResult CheckFcInversionFromWeightGrad(const VerifyOptions& options) {
  Rng rng(DeriveSeed(options.seed, 6));
  double worst = 0.0;
  for (std::size_t n = 0; n < options.instances; ++n) {
    const PositiveInstance p = MakePositiveMlp(rng, RandomSize(2, 5, rng), RandomSize(2, 10, rng));
    for (std::size_t l = 0; l + 1 < p.model.stack_count(); ++l) {
      GradientShare share;
      share.layer_index = l;
      share.grad = p.grads.weights[p.model.stack_layer(l)];
      share.batch_size = 1;
      const Tensor got = BridgeFirstStack(share, p.model.stack_weight(l),
                                          StackActivation(p.model, p.trace, l));
      worst = std::max(worst, RelErr(got, StackActivationGrad(p, l)));
    }
  }
  return {"fc_inversion_weight_grad", worst <= kInversionTol,
          Worst("rel error", worst, kInversionTol, options.instances)};
}

CheckResult CheckConvInversion(const VerifyOptions& options) {
  Rng rng(DeriveSeed(options.seed, 7));
  double worst = 0.0;
  for (std::size_t n = 0; n < options.instances; ++n) {
    const PositiveInstance p = MakePositiveConv(rng, RandomSize(2, 6, rng), RandomSize(0, 2, rng));
    GradientShare share;
    share.grad = p.grads.weights[p.model.stack_layer(0)];
    share.batch_size = 1;
    const Tensor got = BridgeFirstStack(share, p.model.stack_weight(0),
                                        StackActivation(p.model, p.trace, 0));
    worst = std::max(worst, RelErr(got, StackActivationGrad(p, 0)));
  }
  return {"conv_inversion", worst <= kInversionTol, Worst("rel error", worst, kInversionTol, options.instances)};
}

CheckResult CheckFiniteDifferences(const VerifyOptions& options) {
  Rng rng(DeriveSeed(options.seed, 8));
  double worst = 0.0;
  std::size_t skipped = 0;
  for (std::size_t n = 0; n < options.instances; ++n) {
    {
      Tensor w = RandomTensor({RandomSize(1, 4, rng), RandomSize(1, 4, rng)}, -1.0, 1.0, rng);
      Tensor x = RandomTensor({w.dim(1)}, -1.0, 1.0, rng);
      const Tensor c = RandomTensor({w.dim(0)}, -1.0, 1.0, rng);
      const auto loss = [&] { return FrobeniusInner(c, nn::FcForward(w, x)); };
      const nn::FcGradients g = nn::FcBackward(w, x, c);
      worst = std::max({worst, FdWorst(w, g.weight, loss), FdWorst(x, g.input, loss)});
    }
    {
      const std::size_t kh = RandomSize(1, 3, rng), kw = RandomSize(1, 3, rng);
      Tensor k = RandomTensor({RandomSize(1, 3, rng), RandomSize(1, 2, rng), kh, kw}, -1.0, 1.0, rng);
      Tensor x = RandomTensor({k.dim(1), kh + RandomSize(0, 2, rng), kw + RandomSize(0, 2, rng)},
                              -1.0, 1.0, rng);
      const Tensor c = RandomTensor(nn::ConvOutputShape(k.shape(), x.shape()), -1.0, 1.0, rng);
      const auto loss = [&] { return FrobeniusInner(c, nn::ConvForward(k, x)); };
      worst = std::max({worst, FdWorst(k, nn::ConvBackwardWeights(k, x, c), loss),
                        FdWorst(x, nn::ConvBackwardInput(k, x, c), loss)});
    }
    {
      Tensor z = RandomTensor({RandomSize(1, 8, rng)}, -1.0, 1.0, rng);
      for (double& v : z.data()) {
        if (std::abs(v) < kKink) v = v < 0 ? -0.5 : 0.5;
      }
      const Tensor c = RandomTensor(z.shape(), -1.0, 1.0, rng);
      const auto loss = [&] { return FrobeniusInner(c, nn::ReluForward(z)); };
      worst = std::max(worst, FdWorst(z, nn::ReluBackward(z, c), loss));
    }
    {
      Tensor z = RandomTensor({RandomSize(2, 8, rng)}, -3.0, 3.0, rng);
      const std::size_t y = RandomSize(0, z.size() - 1, rng);
      const auto loss = [&] { return nn::SoftmaxCrossEntropy(z, y).loss; };
      const Tensor g = nn::CeLogitGradient(nn::SoftmaxCrossEntropy(z, y).probs, y);
      worst = std::max(worst, FdWorst(z, g, loss));
    }
    {
      // Whole-model weight gradients of the mean batch loss, mixed-sign regime.
      const std::size_t classes = RandomSize(2, 4, rng);
      const std::vector<std::size_t> widths{classes + RandomSize(0, 3, rng)};
      const ModelSpec spec{{2, 4, 4},
                           {LayerSpec::Conv(2, 2, 2, 2), LayerSpec::Relu()},
                           FcBottom(18, widths, classes)};
      Model model = Model::Build(spec, InitScheme::kKaimingUniform, rng());
      std::vector<Tensor> batch;
      std::vector<std::size_t> labels;
      for (std::size_t b = 0; b < 3; ++b) {
        batch.push_back(RandomTensor({2, 4, 4}, -1.0, 1.0, rng));
        labels.push_back(RandomSize(0, classes - 1, rng));
      }
      const ForwardTrace trace = Forward(model, batch);
      bool kink = false;
      for (const SampleTrace& s : trace.samples) kink = kink || HasKink(model, s);
      if (kink) {
        ++skipped;
        continue;
      }
      const BatchGradients g = Backward(model, trace, labels);
      for (std::size_t i = 0; i < model.layer_count(); ++i) {
        if (!model.layer(i).has_weight()) continue;
        Tensor w = model.weight(i);
        const auto loss = [&] {
          return Backward(model.WithWeight(i, w), Forward(model.WithWeight(i, w), batch), labels)
              .mean_loss;
        };
        worst = std::max(worst, FdWorst(w, g.weights[i], loss));
      }
    }
  }
  CheckResult r{"finite_difference", worst <= kFdTol,
                Worst("rel error", worst, kFdTol, options.instances)};
  if (skipped > 0) r.detail += ", " + std::to_string(skipped) + " model cases near a kink skipped";
  return r;
}

namespace {

struct ExactRun {
  bool exact = true;
  double worst_sum_error = 0.0;
  std::size_t runs = 0;
};

// Attack with estimates taken from the victim sample itself, for B = 1 and
// batches of identical samples, from every shareable stack.
void ExactAttack(const PositiveInstance& p, ExactRun& out) {
  const std::size_t classes = p.model.class_count();
  for (std::size_t b : {std::size_t{1}, std::size_t{8}, std::size_t{64}}) {
    Batch batch;
    batch.inputs.assign(b, p.input);
    batch.labels.assign(b, p.label);
    batch.true_counts.assign(classes, 0);
    batch.true_counts[p.label] = b;
    for (std::size_t l = 0; l + 1 < p.model.stack_count(); ++l) {
      const GradientShare share = ClientStep(p.model, batch, l);
      AuxEstimates est;
      est.a_tilde = StackActivation(p.model, p.trace, l);
      est.p_tilde = p.trace.probs;
      const AttackResult r = RunGdbr(p.model, share, est);
      const RecoveryScore s = Score(r.labels.counts, batch.true_counts);
      out.exact = out.exact && s.ins_acc == 1.0 && s.cls_acc == 1.0;
      const auto& raw = r.labels.raw.values();
      const double sum = std::accumulate(raw.begin(), raw.end(), 0.0);
      out.worst_sum_error = std::max(out.worst_sum_error, std::abs(sum - static_cast<double>(b)));
      ++out.runs;
    }
  }
}

ExactRun SweepExact(const VerifyOptions& options, std::uint64_t stream) {
  Rng rng(DeriveSeed(options.seed, stream));
  ExactRun run;
  const std::size_t reps = std::max<std::size_t>(1, options.instances / 50);
  for (std::size_t classes : {std::size_t{2}, std::size_t{10}, std::size_t{100}}) {
    for (std::size_t rep = 0; rep < reps; ++rep) {
      for (std::size_t depth = 2; depth <= 6; ++depth) {
        ExactAttack(MakePositiveMlp(rng, depth, classes), run);
      }
      ExactAttack(MakePositiveConv(rng, classes, 1), run);
      ExactAttack(MakePositiveConv(rng, classes, 2), run);
    }
  }
  return run;
}

}  // namespace

CheckResult CheckEndToEnd(const VerifyOptions& options) {
  const ExactRun run = SweepExact(options, 9);
  return {"end_to_end_exactness", run.exact,
          std::to_string(run.runs) + " attacks (MLP depth 2-6, conv first stack, C in {2,10,100}), " +
              (run.exact ? "all exact" : "some not exact")};
}

CheckResult CheckConservation(const VerifyOptions& options) {
  const ExactRun run = SweepExact(options, 10);
  std::ostringstream detail;
  detail << run.runs << " attacks, worst |sum(raw) - B| " << run.worst_sum_error << " (tol 1e-6)";
  return {"conservation", run.worst_sum_error <= 1e-6, detail.str()};
}

std::vector<CheckResult> RunVerifySuite(const VerifyOptions& options) {
  return {CheckFcIdentities(options),        CheckClassifierInversion(options),
          CheckConvInnerProduct(options),        CheckReluIdentity(options),
          CheckFcInversionFromInputGrad(options), CheckFcInversionFromWeightGrad(options),
          CheckConvInversion(options),      CheckFiniteDifferences(options),
          CheckEndToEnd(options),      CheckConservation(options)};
}

}  // namespace gdbr
