// Copyright 2026 The tfnfraud Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <span>

#include "tfn/rng.hpp"
#include "tfn/tensor.hpp"

namespace tfn::numkit {

inline constexpr double kBceEpsilon = 1e-7;

Vector matmul(const Matrix& a, const Vector& x);

// W x + b.
Vector dense_forward(const Matrix& w, const Vector& b, const Vector& x);

struct DenseGrads {
  Matrix grad_w;
  Vector grad_b;
  Vector grad_x;
};

DenseGrads dense_backward(const Matrix& w, const Vector& x,
                          const Vector& grad_out);

struct ReluResult {
  Vector y;
  Vector mask;  // 1 where x > 0, else 0 (including x == 0)
};

ReluResult relu(const Vector& x);

// grad_out masked elementwise.
Vector relu_backward(const Vector& grad_out, const Vector& mask);

double sigmoid(double s) noexcept;

struct DropoutResult {
  Vector y;
  Vector mask;  // 0 for dropped entries, 1/(1-p) for survivors
};

// Inverted dropout. In inference mode y == x and the mask is all ones.
DropoutResult dropout(const Vector& x, double p, bool train_mode, Rng& rng);

Matrix outer(const Vector& u, const Vector& v);

// Binary cross-entropy on a probability clamped to [eps, 1 - eps].
double bce_loss(double p, int y) noexcept;

// Gradient of bce_loss(sigmoid(s), y) with respect to the logit s.
inline double bce_logit_grad(double p, int y) noexcept { return p - y; }

// Batched kernels. Each row of `x` is one sample; `y` gets one row per
// sample. For every sample the arithmetic order matches dense_forward and
// dense_backward exactly, so batched and single-sample results agree
// bit-for-bit.
void dense_forward_batch(const Matrix& w, const Vector& b, const Matrix& x,
                         Matrix& y);

// Accumulates into grad_w and grad_b; overwrites *grad_x when non-null.
void dense_backward_batch(const Matrix& w, const Matrix& x,
                          const Matrix& grad_out, Matrix& grad_w,
                          Vector& grad_b, Matrix* grad_x);

}  // namespace tfn::numkit
