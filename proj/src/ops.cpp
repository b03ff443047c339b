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

#include "tfn/ops.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <string>

#include "tfn/error.hpp"

namespace tfn::numkit {

namespace {

std::string vec_shape(std::size_t n) { return "(" + std::to_string(n) + ")"; }

template <typename T>
const T& require_finite(const T& value, const char* op) {
  if (!value.all_finite()) {
    throw NumericError(std::string(op) + ": result has non-finite entries");
  }
  return value;
}

// Batch rows are processed in tiles of this many samples; the inner loop over
// a tile has a fixed trip count so it vectorizes.
constexpr std::size_t kTile = 8;
// Output rows computed together to keep several independent accumulators.
constexpr std::size_t kRowBlock = 4;

// kTile doubles handled as one value; element-wise arithmetic only, so the
// per-lane operation order is the scalar order.
typedef double Lanes __attribute__((vector_size(kTile * sizeof(double))));

Lanes load_lanes(const double* p) {
  Lanes v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

void store_lanes(double* p, const Lanes& v) { std::memcpy(p, &v, sizeof v); }

}  // namespace

Vector matmul(const Matrix& a, const Vector& x) {
  if (a.cols() != x.len()) {
    throw DimensionError("matmul: matrix " + a.shape() +
                         " incompatible with vector " + vec_shape(x.len()));
  }
  Vector out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const auto r = a.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * x[j];
    out[i] = acc;
  }
  return require_finite(out, "matmul");
}

Vector dense_forward(const Matrix& w, const Vector& b, const Vector& x) {
  if (w.cols() != x.len() || w.rows() != b.len()) {
    throw DimensionError("dense_forward: W " + w.shape() + ", b " +
                         vec_shape(b.len()) + ", x " + vec_shape(x.len()));
  }
  Vector out = matmul(w, x);
  for (std::size_t i = 0; i < out.len(); ++i) out[i] = out[i] + b[i];
  return require_finite(out, "dense_forward");
}

DenseGrads dense_backward(const Matrix& w, const Vector& x,
                          const Vector& grad_out) {
  if (w.cols() != x.len() || w.rows() != grad_out.len()) {
    throw DimensionError("dense_backward: W " + w.shape() + ", x " +
                         vec_shape(x.len()) + ", grad_out " +
                         vec_shape(grad_out.len()));
  }
  DenseGrads g{outer(grad_out, x), grad_out, Vector(x.len())};
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const double go = grad_out[i];
    const auto r = w.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) g.grad_x[j] += r[j] * go;
  }
  require_finite(g.grad_w, "dense_backward");
  require_finite(g.grad_x, "dense_backward");
  return g;
}

ReluResult relu(const Vector& x) {
  ReluResult r{Vector(x.len()), Vector(x.len())};
  for (std::size_t i = 0; i < x.len(); ++i) {
    if (x[i] > 0.0) {
      r.y[i] = x[i];
      r.mask[i] = 1.0;
    }
  }
  return r;
}

Vector relu_backward(const Vector& grad_out, const Vector& mask) {
  if (grad_out.len() != mask.len()) {
    throw DimensionError("relu_backward: grad " + vec_shape(grad_out.len()) +
                         " vs mask " + vec_shape(mask.len()));
  }
  Vector g(grad_out.len());
  for (std::size_t i = 0; i < g.len(); ++i) g[i] = grad_out[i] * mask[i];
  return g;
}

double sigmoid(double s) noexcept {
  if (s >= 0.0) {
    return 1.0 / (1.0 + std::exp(-s));
  }
  const double e = std::exp(s);
  return e / (1.0 + e);
}

DropoutResult dropout(const Vector& x, double p, bool train_mode, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw ParameterError("dropout: probability must lie in [0, 1), got " +
                         std::to_string(p));
  }
  DropoutResult r{x, Vector(x.len(), 1.0)};
  if (!train_mode || p == 0.0) return r;
  const double scale = 1.0 / (1.0 - p);
  for (std::size_t i = 0; i < x.len(); ++i) {
    if (rng.bernoulli(p)) {
      r.mask[i] = 0.0;
      r.y[i] = 0.0;
    } else {
      r.mask[i] = scale;
      r.y[i] = x[i] * scale;
    }
  }
  return r;
}

Matrix outer(const Vector& u, const Vector& v) {
  Matrix m(u.len(), v.len());
  for (std::size_t i = 0; i < u.len(); ++i) {
    auto r = m.row(i);
    for (std::size_t j = 0; j < v.len(); ++j) r[j] = u[i] * v[j];
  }
  return require_finite(m, "outer");
}

double bce_loss(double p, int y) noexcept {
  const double pc = std::clamp(p, kBceEpsilon, 1.0 - kBceEpsilon);
  return -(y * std::log(pc) + (1 - y) * std::log(1.0 - pc));
}

void dense_forward_batch(const Matrix& w, const Vector& b, const Matrix& x,
                         Matrix& y) {
  const std::size_t in = w.cols();
  const std::size_t out = w.rows();
  const std::size_t batch = x.rows();
  if (x.cols() != in || b.len() != out) {
    throw DimensionError("dense_forward_batch: W " + w.shape() + ", b " +
                         vec_shape(b.len()) + ", x " + x.shape());
  }
  if (y.rows() != batch || y.cols() != out) y = Matrix(batch, out);

  const std::size_t tiles = (batch + kTile - 1) / kTile;
  // Transposed, zero-padded input, one kTile-wide block per tile:
  // xt[(t * in + i) * kTile + l] = x(t * kTile + l, i).
  std::vector<double> xt(tiles * in * kTile, 0.0);
  for (std::size_t s = 0; s < batch; ++s) {
    const auto r = x.row(s);
    double* dst = xt.data() + (s / kTile) * in * kTile + s % kTile;
    for (std::size_t i = 0; i < in; ++i) dst[i * kTile] = r[i];
  }

  const double* wd = w.values().data();
  for (std::size_t t = 0; t < tiles; ++t) {
    const double* xtile = xt.data() + t * in * kTile;
    const std::size_t s0 = t * kTile;
    const std::size_t s_end = std::min(batch, s0 + kTile);
    std::size_t o = 0;
    for (; o + kRowBlock <= out; o += kRowBlock) {
      const double* w0 = wd + (o + 0) * in;
      const double* w1 = wd + (o + 1) * in;
      const double* w2 = wd + (o + 2) * in;
      const double* w3 = wd + (o + 3) * in;
      Lanes a0{}, a1{}, a2{}, a3{};
      for (std::size_t i = 0; i < in; ++i) {
        const Lanes xi = load_lanes(xtile + i * kTile);
        a0 += w0[i] * xi;
        a1 += w1[i] * xi;
        a2 += w2[i] * xi;
        a3 += w3[i] * xi;
      }
      for (std::size_t s = s0; s < s_end; ++s) {
        y(s, o + 0) = a0[s - s0] + b[o + 0];
        y(s, o + 1) = a1[s - s0] + b[o + 1];
        y(s, o + 2) = a2[s - s0] + b[o + 2];
        y(s, o + 3) = a3[s - s0] + b[o + 3];
      }
    }
    for (; o < out; ++o) {
      const double* wr = wd + o * in;
      Lanes acc{};
      for (std::size_t i = 0; i < in; ++i) {
        acc += wr[i] * load_lanes(xtile + i * kTile);
      }
      for (std::size_t s = s0; s < s_end; ++s) y(s, o) = acc[s - s0] + b[o];
    }
  }
}

void dense_backward_batch(const Matrix& w, const Matrix& x,
                          const Matrix& grad_out, Matrix& grad_w,
                          Vector& grad_b, Matrix* grad_x) {
  const std::size_t in = w.cols();
  const std::size_t out = w.rows();
  const std::size_t batch = x.rows();
  if (x.cols() != in || grad_out.rows() != batch || grad_out.cols() != out ||
      grad_w.rows() != out || grad_w.cols() != in || grad_b.len() != out) {
    throw DimensionError("dense_backward_batch: W " + w.shape() + ", x " +
                         x.shape() + ", grad_out " + grad_out.shape() +
                         ", grad_w " + grad_w.shape());
  }
  const std::size_t vec_end = in - in % kTile;

  // grad_w(o, :) += sum_s grad_out(s, o) * x(s, :), samples in order. Zero
  // terms are skipped; adding them would not change any value.
  std::vector<std::size_t> live;
  live.reserve(batch);
  for (std::size_t o = 0; o < out; ++o) {
    live.clear();
    for (std::size_t s = 0; s < batch; ++s) {
      const double g = grad_out(s, o);
      if (g != 0.0) {
        live.push_back(s);
        grad_b[o] += g;
      }
    }
    if (live.empty()) continue;
    double* gw = grad_w.row(o).data();
    for (std::size_t i = 0; i < vec_end; i += kTile) {
      Lanes acc = load_lanes(gw + i);
      for (std::size_t s : live) {
        acc += grad_out(s, o) * load_lanes(x.row(s).data() + i);
      }
      store_lanes(gw + i, acc);
    }
    for (std::size_t i = vec_end; i < in; ++i) {
      double acc = gw[i];
      for (std::size_t s : live) acc += grad_out(s, o) * x(s, i);
      gw[i] = acc;
    }
  }
  if (!grad_x) return;

  // grad_x(s, :) = sum_o W(o, :) * grad_out(s, o), rows in order.
  if (grad_x->rows() != batch || grad_x->cols() != in) {
    *grad_x = Matrix(batch, in);
  } else {
    grad_x->fill(0.0);
  }
  const double* wd = w.values().data();
  for (std::size_t o0 = 0; o0 < out; o0 += kRowBlock) {
    const std::size_t o_end = std::min(out, o0 + kRowBlock);
    for (std::size_t s = 0; s < batch; ++s) {
      std::array<double, kRowBlock> g{};
      bool any = false;
      for (std::size_t o = o0; o < o_end; ++o) {
        g[o - o0] = grad_out(s, o);
        any = any || g[o - o0] != 0.0;
      }
      if (!any) continue;
      double* gx = grad_x->row(s).data();
      const std::size_t rows = o_end - o0;
      for (std::size_t i = 0; i < vec_end; i += kTile) {
        Lanes acc = load_lanes(gx + i);
        for (std::size_t k = 0; k < rows; ++k) {
          acc += load_lanes(wd + (o0 + k) * in + i) * g[k];
        }
        store_lanes(gx + i, acc);
      }
      for (std::size_t i = vec_end; i < in; ++i) {
        double acc = gx[i];
        for (std::size_t k = 0; k < rows; ++k) {
          acc += wd[(o0 + k) * in + i] * g[k];
        }
        gx[i] = acc;
      }
    }
  }
}

}  // namespace tfn::numkit
