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

#include "gdbr/attack.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "gdbr/error.h"
#include "gdbr/random.h"

namespace gdbr {

std::string EstimatorSourceName(EstimatorSource source) {
  return source == EstimatorSource::kAuxiliary ? "auxiliary" : "dummy";
}

EstimatorSource ParseEstimatorSource(const std::string& name) {
  if (name == "auxiliary") return EstimatorSource::kAuxiliary;
  if (name == "dummy") return EstimatorSource::kDummy;
  throw ConfigError("unknown estimator '" + name + "' (expected auxiliary or dummy)");
}

std::vector<Tensor> SelectAuxiliary(const Dataset& data, std::size_t count,
                                    std::uint64_t seed) {
  if (data.size() == 0) throw EstimationError("auxiliary data is empty");
  if (count == 0) throw EstimationError("auxiliary sample count must be >= 1");
  auto pools = data.ClassPools();
  std::erase_if(pools, [](const auto& p) { return p.empty(); });
  Rng rng(seed);
  std::vector<Tensor> out;
  out.reserve(count);
  const std::size_t k = pools.size();
  for (std::size_t j = 0; j < k; ++j) {
    auto& pool = pools[j];
    const std::size_t want = count / k + (j < count % k ? 1 : 0);
    for (std::size_t i = 0; i < want; ++i) {
      std::size_t pick;
      if (i < pool.size()) {
        std::uniform_int_distribution<std::size_t> u(i, pool.size() - 1);
        std::swap(pool[i], pool[u(rng)]);
        pick = pool[i];
      } else {
        std::uniform_int_distribution<std::size_t> u(0, pool.size() - 1);
        pick = pool[u(rng)];
      }
      out.push_back(data.sample(pick));
    }
  }
  return out;
}

Tensor MakeDummyData(const Shape& input_shape, std::size_t count,
                     std::uint64_t seed) {
  if (count == 0) throw EstimationError("dummy sample count must be >= 1");
  Shape shape{count};
  shape.insert(shape.end(), input_shape.begin(), input_shape.end());
  Tensor out(shape);
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& v : out.data()) v = normal(rng);
  return out;
}

std::size_t ReplaceZeros(Tensor& estimate) {
  double sum = 0.0;
  std::size_t nonzero = 0;
  for (double v : estimate.data()) {
    if (v != 0.0) {
      sum += v;
      ++nonzero;
    }
  }
  if (nonzero == 0) throw EstimationError("activation estimate is entirely zero");
  const double fill = sum / static_cast<double>(nonzero);
  std::size_t replaced = 0;
  for (double& v : estimate.data()) {
    if (v == 0.0) {
      v = fill;
      ++replaced;
    }
  }
  return replaced;
}

AuxEstimates Estimate(const Model& model, std::span<const Tensor> samples,
                      std::size_t stack, EstimatorSource source) {
  if (samples.empty()) throw EstimationError("no samples to estimate from");
  AuxEstimates est;
  est.source = source;
  est.sample_count = samples.size();
  for (const Tensor& x : samples) {
    const SampleTrace trace = ForwardSample(model, x);
    const Tensor& a = StackActivation(model, trace, stack);
    if (est.a_tilde.empty()) {
      est.a_tilde = a;
      est.p_tilde = trace.probs;
    } else {
      est.a_tilde += a;
      est.p_tilde += trace.probs;
    }
  }
  const double inv = 1.0 / static_cast<double>(samples.size());
  est.a_tilde *= inv;
  est.p_tilde *= inv;
  est.replaced_zeros = ReplaceZeros(est.a_tilde);
  return est;
}

Tensor EstimateFeatures(const Model& model, std::span<const Tensor> samples,
                        std::size_t stack) {
  return Estimate(model, samples, stack, EstimatorSource::kAuxiliary).a_tilde;
}

Tensor EstimateProbs(const Model& model, std::span<const Tensor> samples) {
  if (samples.empty()) throw EstimationError("no samples to estimate from");
  Tensor mean;
  for (const Tensor& x : samples) {
    const SampleTrace trace = ForwardSample(model, x);
    if (mean.empty()) {
      mean = trace.probs;
    } else {
      mean += trace.probs;
    }
  }
  mean *= 1.0 / static_cast<double>(samples.size());
  return mean;
}

Tensor BridgeFirstStack(const GradientShare& share, const Tensor& weight,
                        const Tensor& a_tilde) {
  if (share.grad.shape() != weight.shape()) {
    throw DimensionError("share gradient " + ShapeString(share.grad.shape()) +
                         " does not match weight " + ShapeString(weight.shape()));
  }
  if (weight.rank() != 2 && weight.rank() != 4) {
    throw DimensionError("first-stack weight must be FC or Conv, got " +
                         ShapeString(weight.shape()));
  }
  const std::size_t units = weight.dim(0);
  if (a_tilde.size() != units) {
    throw DimensionError("activation estimate has " + std::to_string(a_tilde.size()) +
                         " entries for " + std::to_string(units) + " units");
  }
  const std::size_t row = weight.size() / units;
  Tensor out({units});
  for (std::size_t k = 0; k < units; ++k) {
    if (a_tilde[k] == 0.0) {
      throw DivisionGuardError("activation estimate is zero at unit " +
                               std::to_string(k));
    }
    double dot = 0.0;
    for (std::size_t j = k * row; j < (k + 1) * row; ++j) {
      dot += share.grad[j] * weight[j];
    }
    out[k] = dot / a_tilde[k];
  }
  return out;
}

BridgeStep BridgeFcStep(const Tensor& weight, const Tensor& grad_x) {
  if (weight.rank() != 2) {
    throw DimensionError("bridge step needs an FC weight, got " +
                         ShapeString(weight.shape()));
  }
  const std::size_t n = weight.dim(0);
  const std::size_t m = weight.dim(1);
  if (grad_x.size() != m) {
    throw DimensionError("bridge step: gradient has " + std::to_string(grad_x.size()) +
                         " entries, weight expects " + std::to_string(m));
  }
  if (n > m) {
    throw DimensionError("bridge step: weight " + ShapeString(weight.shape()) +
                         " widens, W W^T is singular");
  }
  using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMajor> w(weight.data().data(),
                                     static_cast<Eigen::Index>(n),
                                     static_cast<Eigen::Index>(m));
  const Eigen::Map<const Eigen::VectorXd> g(grad_x.data().data(),
                                            static_cast<Eigen::Index>(m));
  Eigen::BDCSVD<Eigen::MatrixXd> svd(w.transpose(),
                                     Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(kSingularCutoff);
  const Eigen::VectorXd u = svd.solve(g);

  BridgeStep step;
  step.grad = Tensor({n}, std::vector<double>(u.data(), u.data() + u.size()));
  const auto& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double smin = s.size() > 0 ? s(s.size() - 1) : 0.0;
  step.condition_number = smin > 0.0 ? (smax / smin) * (smax / smin)
                                      : std::numeric_limits<double>::infinity();
  step.ill_conditioned = !(step.condition_number <= kIllConditioned);
  return step;
}

BridgeResult BridgeToLogits(std::span<const Tensor> weights, const Tensor& grad) {
  BridgeResult out;
  out.logit_grad = grad.Flattened();
  for (const Tensor& w : weights) {
    BridgeStep step = BridgeFcStep(w, out.logit_grad);
    out.logit_grad = std::move(step.grad);
    out.max_condition_number = std::max(out.max_condition_number, step.condition_number);
    out.ill_conditioned = out.ill_conditioned || step.ill_conditioned;
  }
  return out;
}

BridgeResult GradientBridge(const Model& model, const GradientShare& share,
                            const Tensor& a_tilde) {
  if (share.layer_index + 1 >= model.stack_count()) {
    throw PolicyError("share must come from a stack before the final classifier");
  }
  const Tensor first =
      BridgeFirstStack(share, model.stack_weight(share.layer_index), a_tilde);
  std::vector<Tensor> rest;
  for (std::size_t l = share.layer_index + 1; l < model.stack_count(); ++l) {
    rest.push_back(model.stack_weight(l));
  }
  return BridgeToLogits(rest, first);
}

std::vector<std::size_t> RoundCounts(std::span<const double> raw,
                                     std::size_t batch_size) {
  const std::size_t c = raw.size();
  std::vector<std::size_t> counts(c, 0);
  if (c == 0) throw DimensionError("cannot round an empty count vector");
  std::vector<double> residual(c);
  std::size_t total = 0;
  for (std::size_t i = 0; i < c; ++i) {
    const double v = std::isfinite(raw[i]) ? std::max(raw[i], 0.0) : 0.0;
    const double f = std::floor(v);
    counts[i] = f >= static_cast<double>(batch_size) ? batch_size
                                                     : static_cast<std::size_t>(f);
    residual[i] = v - f;
    total += counts[i];
  }
  std::vector<std::size_t> order(c);
  std::iota(order.begin(), order.end(), 0);
  if (total < batch_size) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return residual[a] > residual[b];
    });
    for (std::size_t i = 0; total < batch_size; ++i, ++total) ++counts[order[i % c]];
  } else if (total > batch_size) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return residual[a] < residual[b];
    });
    for (std::size_t i = 0; total > batch_size; ++i) {
      std::size_t& n = counts[order[i % c]];
      if (n > 0) {
        --n;
        --total;
      }
    }
  }
  return counts;
}

LabelCounts RecoverLabels(const Tensor& p_tilde, const Tensor& logit_grad,
                          std::size_t batch_size) {
  if (p_tilde.size() != logit_grad.size()) {
    throw DimensionError("p_tilde has " + std::to_string(p_tilde.size()) +
                         " classes, logit gradient has " +
                         std::to_string(logit_grad.size()));
  }
  if (batch_size == 0) throw DimensionError("batch size must be at least 1");
  LabelCounts out;
  out.batch_size = batch_size;
  out.raw = (p_tilde.Flattened() - logit_grad.Flattened()) *
            static_cast<double>(batch_size);
  out.counts = RoundCounts(out.raw.data(), batch_size);
  return out;
}

AttackResult RunGdbr(const Model& model, const GradientShare& share,
                     const AuxEstimates& estimates) {
  AttackResult out;
  out.bridge = GradientBridge(model, share, estimates.a_tilde);
  out.labels = RecoverLabels(estimates.p_tilde, out.bridge.logit_grad, share.batch_size);
  return out;
}

}  // namespace gdbr
