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

#include "gdbr/nn.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "gdbr/error.h"

namespace gdbr::nn {
namespace {

void RequireMatrix(const Tensor& w, const char* op) {
  if (w.rank() != 2) {
    throw DimensionError(std::string(op) + ": weight must be rank 2, got " +
                         ShapeString(w.shape()));
  }
}

void RequireConvShapes(const Tensor& kernels, const Tensor& x, const char* op) {
  if (kernels.rank() != 4 || x.rank() != 3) {
    throw DimensionError(std::string(op) + ": expected 4-d kernels and 3-d input, got " +
                         ShapeString(kernels.shape()) + " and " +
                         ShapeString(x.shape()));
  }
  if (kernels.dim(1) != x.dim(0)) {
    throw DimensionError(std::string(op) + ": kernel input channels " +
                         std::to_string(kernels.dim(1)) + " vs input channels " +
                         std::to_string(x.dim(0)));
  }
}

void RequireLabel(std::size_t label, std::size_t classes) {
  if (label >= classes) {
    throw IndexError("class index " + std::to_string(label) +
                     " out of range for " + std::to_string(classes) +
                     " classes");
  }
}

}  // namespace

Tensor FcForward(const Tensor& weight, const Tensor& x) {
  RequireMatrix(weight, "fc_forward");
  const std::size_t rows = weight.dim(0);
  const std::size_t cols = weight.dim(1);
  if (x.size() != cols) {
    throw DimensionError("fc_forward: weight " + ShapeString(weight.shape()) +
                         " cannot multiply input " + ShapeString(x.shape()));
  }
  Tensor z({rows});
  auto w = weight.data();
  auto xv = x.data();
  for (std::size_t i = 0; i < rows; ++i) {
    double sum = 0.0;
    const double* row = w.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) sum += row[j] * xv[j];
    z[i] = sum;
  }
  return z;
}

FcGradients FcBackward(const Tensor& weight, const Tensor& x,
                       const Tensor& grad_out) {
  RequireMatrix(weight, "fc_backward");
  const std::size_t rows = weight.dim(0);
  const std::size_t cols = weight.dim(1);
  if (x.size() != cols || grad_out.size() != rows) {
    throw DimensionError("fc_backward: weight " + ShapeString(weight.shape()) +
                         ", input " + ShapeString(x.shape()) +
                         ", output gradient " + ShapeString(grad_out.shape()));
  }
  FcGradients grads{Tensor({rows, cols}), Tensor(x.shape())};
  auto w = weight.data();
  auto gw = grads.weight.data();
  auto gx = grads.input.data();
  auto xv = x.data();
  for (std::size_t i = 0; i < rows; ++i) {
    const double g = grad_out[i];
    if (g == 0.0) continue;
    const double* row = w.data() + i * cols;
    double* grow = gw.data() + i * cols;
    for (std::size_t j = 0; j < cols; ++j) {
      grow[j] = g * xv[j];
      gx[j] += row[j] * g;
    }
  }
  return grads;
}

Shape ConvOutputShape(const Shape& kernel_shape, const Shape& input_shape) {
  if (kernel_shape.size() != 4 || input_shape.size() != 3) {
    throw DimensionError("conv: expected 4-d kernels and 3-d input, got " +
                         ShapeString(kernel_shape) + " and " +
                         ShapeString(input_shape));
  }
  if (kernel_shape[2] > input_shape[1] || kernel_shape[3] > input_shape[2] ||
      kernel_shape[2] == 0 || kernel_shape[3] == 0) {
    throw DimensionError("conv: kernel " + ShapeString(kernel_shape) +
                         " leaves no output positions on input " +
                         ShapeString(input_shape));
  }
  return {kernel_shape[0], input_shape[1] - kernel_shape[2] + 1,
          input_shape[2] - kernel_shape[3] + 1};
}

Tensor ConvForward(const Tensor& kernels, const Tensor& x) {
  RequireConvShapes(kernels, x, "conv_forward");
  const Shape out_shape = ConvOutputShape(kernels.shape(), x.shape());
  const std::size_t cout = kernels.dim(0), cin = kernels.dim(1);
  const std::size_t hk = kernels.dim(2), wk = kernels.dim(3);
  const std::size_t hin = x.dim(1), win = x.dim(2);
  const std::size_t hout = out_shape[1], wout = out_shape[2];
  Tensor z(out_shape);
  auto kv = kernels.data();
  auto xv = x.data();
  for (std::size_t k = 0; k < cout; ++k) {
    for (std::size_t i = 0; i < hout; ++i) {
      for (std::size_t j = 0; j < wout; ++j) {
        double sum = 0.0;
        for (std::size_t c = 0; c < cin; ++c) {
          for (std::size_t h = 0; h < hk; ++h) {
            const double* krow = kv.data() + ((k * cin + c) * hk + h) * wk;
            const double* xrow = xv.data() + (c * hin + i + h) * win + j;
            for (std::size_t w = 0; w < wk; ++w) sum += krow[w] * xrow[w];
          }
        }
        z[(k * hout + i) * wout + j] = sum;
      }
    }
  }
  return z;
}

Tensor ConvBackwardWeights(const Tensor& kernels, const Tensor& x,
                           const Tensor& grad_out) {
  RequireConvShapes(kernels, x, "conv_backward_weights");
  const Shape out_shape = ConvOutputShape(kernels.shape(), x.shape());
  if (grad_out.shape() != out_shape) {
    throw DimensionError("conv_backward_weights: output gradient " +
                         ShapeString(grad_out.shape()) + ", expected " +
                         ShapeString(out_shape));
  }
  const std::size_t cout = kernels.dim(0), cin = kernels.dim(1);
  const std::size_t hk = kernels.dim(2), wk = kernels.dim(3);
  const std::size_t hin = x.dim(1), win = x.dim(2);
  const std::size_t hout = out_shape[1], wout = out_shape[2];
  Tensor grad(kernels.shape());
  auto gv = grad.data();
  auto xv = x.data();
  auto dz = grad_out.data();
  for (std::size_t k = 0; k < cout; ++k) {
    for (std::size_t c = 0; c < cin; ++c) {
      for (std::size_t h = 0; h < hk; ++h) {
        for (std::size_t w = 0; w < wk; ++w) {
          double sum = 0.0;
          for (std::size_t i = 0; i < hout; ++i) {
            const double* drow = dz.data() + (k * hout + i) * wout;
            const double* xrow = xv.data() + (c * hin + i + h) * win + w;
            for (std::size_t j = 0; j < wout; ++j) sum += drow[j] * xrow[j];
          }
          gv[((k * cin + c) * hk + h) * wk + w] = sum;
        }
      }
    }
  }
  return grad;
}

Tensor ConvBackwardInput(const Tensor& kernels, const Tensor& x,
                         const Tensor& grad_out) {
  RequireConvShapes(kernels, x, "conv_backward_input");
  const Shape out_shape = ConvOutputShape(kernels.shape(), x.shape());
  if (grad_out.shape() != out_shape) {
    throw DimensionError("conv_backward_input: output gradient " +
                         ShapeString(grad_out.shape()) + ", expected " +
                         ShapeString(out_shape));
  }
  const std::size_t cout = kernels.dim(0), cin = kernels.dim(1);
  const std::size_t hk = kernels.dim(2), wk = kernels.dim(3);
  const std::size_t hin = x.dim(1), win = x.dim(2);
  const std::size_t hout = out_shape[1], wout = out_shape[2];
  Tensor grad(x.shape());
  auto gv = grad.data();
  auto kv = kernels.data();
  auto dz = grad_out.data();
  for (std::size_t k = 0; k < cout; ++k) {
    for (std::size_t i = 0; i < hout; ++i) {
      for (std::size_t j = 0; j < wout; ++j) {
        const double g = dz[(k * hout + i) * wout + j];
        if (g == 0.0) continue;
        for (std::size_t c = 0; c < cin; ++c) {
          for (std::size_t h = 0; h < hk; ++h) {
            const double* krow = kv.data() + ((k * cin + c) * hk + h) * wk;
            double* grow = gv.data() + (c * hin + i + h) * win + j;
            for (std::size_t w = 0; w < wk; ++w) grow[w] += g * krow[w];
          }
        }
      }
    }
  }
  return grad;
}

Tensor ReluForward(const Tensor& z) {
  Tensor a = z;
  for (double& v : a.data()) v = std::max(0.0, v);
  return a;
}

Tensor ReluBackward(const Tensor& z, const Tensor& grad_a) {
  if (z.shape() != grad_a.shape()) {
    throw DimensionError("relu_backward: input " + ShapeString(z.shape()) +
                         " vs gradient " + ShapeString(grad_a.shape()));
  }
  Tensor grad(z.shape());
  for (std::size_t i = 0; i < z.size(); ++i) {
    grad[i] = z[i] > 0.0 ? grad_a[i] : 0.0;
  }
  return grad;
}

CrossEntropy SoftmaxCrossEntropy(const Tensor& logits, std::size_t label) {
  if (logits.empty()) throw DimensionError("softmax over an empty tensor");
  RequireLabel(label, logits.size());
  const double shift = *std::max_element(logits.data().begin(), logits.data().end());
  Tensor probs({logits.size()});
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - shift);
    total += probs[i];
  }
  for (double& p : probs.data()) p /= total;
  // log p[label] from the shifted logits keeps the loss finite when p[label]
  // underflows to zero.
  const double loss = std::log(total) - (logits[label] - shift);
  return {loss, std::move(probs)};
}

Tensor CeLogitGradient(const Tensor& probs, std::size_t label) {
  RequireLabel(label, probs.size());
  Tensor grad = probs.Flattened();
  grad[label] -= 1.0;
  return grad;
}

}  // namespace gdbr::nn
