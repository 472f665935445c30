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

#ifndef GDBR_NN_H_
#define GDBR_NN_H_

#include <cstddef>

#include "gdbr/tensor.h"

// Bias-free forward/backward arithmetic for fully connected, convolutional
// and ReLU layers plus softmax cross-entropy. All functions are pure.
namespace gdbr::nn {

// z = W x for W of shape [N, M]. `x` may have any shape with M elements.
Tensor FcForward(const Tensor& weight, const Tensor& x);

struct FcGradients {
  Tensor weight;  // grad_z x^T, shape [N, M]
  Tensor input;   // W^T grad_z, shape of x
};

FcGradients FcBackward(const Tensor& weight, const Tensor& x,
                       const Tensor& grad_out);

// Valid (no padding), stride-1 cross-correlation.
// kernels: [Cout, Cin, Hk, Wk], x: [Cin, Hin, Win] -> [Cout, Hout, Wout].
Tensor ConvForward(const Tensor& kernels, const Tensor& x);
Shape ConvOutputShape(const Shape& kernel_shape, const Shape& input_shape);

// grad_K[k,c,h,w] = sum_{i,j} grad_Z[k,i,j] * X[c, i+h, j+w]
Tensor ConvBackwardWeights(const Tensor& kernels, const Tensor& x,
                           const Tensor& grad_out);
Tensor ConvBackwardInput(const Tensor& kernels, const Tensor& x,
                         const Tensor& grad_out);

Tensor ReluForward(const Tensor& z);
// The derivative at exactly zero is taken as 0.
Tensor ReluBackward(const Tensor& z, const Tensor& grad_a);

struct CrossEntropy {
  double loss = 0.0;
  Tensor probs;
};

// Max-shifted softmax followed by -log p[label]. Throws IndexError.
CrossEntropy SoftmaxCrossEntropy(const Tensor& logits, std::size_t label);

// p - onehot(label).
Tensor CeLogitGradient(const Tensor& probs, std::size_t label);

}  // namespace gdbr::nn

#endif  // GDBR_NN_H_
