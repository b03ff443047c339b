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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tfn/rng.hpp"
#include "tfn/tensor.hpp"

namespace tfn::model {

using numkit::Matrix;
using numkit::Rng;
using numkit::Vector;

// Row order of the comparison tables. The numeric value is the checkpoint
// tag byte.
enum class Variant : std::uint8_t {
  kVideoOnly = 0,
  kAudioOnly = 1,
  kEarlyFusionNoEmbed = 2,
  kEarlyFusion = 3,
  kLateFusion = 4,
  kTFUnimodalOnly = 5,
  kTFBimodalOnly = 6,
  kTFComplete = 7,
};

inline constexpr std::array<Variant, 8> kAllVariants = {
    Variant::kVideoOnly,      Variant::kAudioOnly,
    Variant::kEarlyFusionNoEmbed, Variant::kEarlyFusion,
    Variant::kLateFusion,     Variant::kTFUnimodalOnly,
    Variant::kTFBimodalOnly,  Variant::kTFComplete,
};

// Command-line name, e.g. "tf-complete".
std::string_view variant_name(Variant v);
// Table label, e.g. "Complete TF".
std::string_view variant_label(Variant v);
// Throws ConfigurationError listing the valid names.
Variant parse_variant(std::string_view name);
std::optional<Variant> variant_from_tag(std::uint8_t tag);

bool uses_video_embed(Variant v);
bool uses_audio_embed(Variant v);

struct Dims {
  std::size_t input = 768;
  std::size_t hidden = 128;
  std::size_t video_out = 64;
  std::size_t audio_out = 32;
  std::size_t head_hidden = 128;

  static constexpr Dims full() { return {}; }
  // Every size divided by 8; used by the gradient self-check.
  static constexpr Dims scaled() { return {96, 16, 8, 4, 16}; }

  friend bool operator==(const Dims&, const Dims&) = default;
};

// Input width of the detection head(s). LateFusion has two heads; index 0 is
// the video head and index 1 the audio head.
std::size_t head_input_dim(Variant v, const Dims& dims, std::size_t head = 0);
std::size_t head_count(Variant v);

struct Dense {
  Matrix w;
  Vector b;
};

struct EmbedNet {
  Dense l1;  // input -> hidden, ReLU
  Dense l2;  // hidden -> out, ReLU
  std::size_t out() const { return l2.w.rows(); }
};

struct HeadNet {
  Dense l1;  // in -> head_hidden, ReLU, dropout
  Dense l2;  // head_hidden -> head_hidden, ReLU, dropout
  Dense l3;  // head_hidden -> 1, sigmoid
  double dropout_p = 0.2;
  std::size_t in_dim() const { return l1.w.cols(); }
};

struct ModelParams {
  Variant variant = Variant::kTFComplete;
  Dims dims;
  std::optional<EmbedNet> video_embed;
  std::optional<EmbedNet> audio_embed;
  std::vector<HeadNet> heads;
  std::uint64_t init_seed = 0;
};

// Gradients share the parameter layout.
using Gradients = ModelParams;

// One learnable tensor, in the fixed order used by checkpoints and the
// optimizer: video embed (W1 b1 W2 b2), audio embed (same), then each head
// (W1 b1 W2 b2 W3 b3).
template <typename T>
struct TensorRefT {
  std::string name;
  std::span<T> values;
  std::vector<std::uint32_t> dims;
  bool is_weight;  // weights decay, biases do not
};
using TensorRef = TensorRefT<double>;
using ConstTensorRef = TensorRefT<const double>;

std::vector<TensorRef> tensors(ModelParams& params);
std::vector<ConstTensorRef> tensors(const ModelParams& params);
std::size_t parameter_count(const ModelParams& params);

// Copies all parameters into one flat vector (tensor order) and back.
std::vector<double> flatten(const ModelParams& params);
void unflatten(std::span<const double> flat, ModelParams& params);

// Same structure, every entry zero.
ModelParams zeros_like(const ModelParams& params);

// Throws ConfigurationError if the present sub-networks or their shapes do
// not match the variant table for params.variant and params.dims.
void validate(const ModelParams& params);

// He-normal for layers that feed a ReLU, Xavier-uniform for the logit layer,
// zero biases.
ModelParams init_params(Variant variant, std::uint64_t seed,
                        const Dims& dims = Dims::full(),
                        double dropout_p = 0.2);

// Two-layer ReLU embedding of one input vector.
Vector embed_forward(const EmbedNet& net, const Vector& x);

// [z_v;1] (x) [z_a;1]. Row i < len(z_v) holds z_v[i], the last row is the
// video bias slot; likewise the last column is the audio bias slot.
class FusionTensor {
 public:
  FusionTensor(const Vector& z_v, const Vector& z_a);

  const Matrix& data() const { return data_; }
  std::size_t rows() const { return data_.rows(); }
  std::size_t cols() const { return data_.cols(); }
  std::size_t video_bias_row() const { return data_.rows() - 1; }
  std::size_t audio_bias_col() const { return data_.cols() - 1; }
  std::span<const double> flattened() const { return data_.values(); }

 private:
  Matrix data_;
};

FusionTensor tensor_fuse(const Vector& z_v, const Vector& z_a);

struct FusionGrads {
  Vector d_zv;
  Vector d_za;
};

// Back-propagates an upstream gradient shaped like the fusion tensor.
FusionGrads tensor_fuse_backward(const Vector& z_v, const Vector& z_a,
                                 const Matrix& upstream);

struct EmbedTrace {
  Matrix pre1;  // W1 x + b1
  Matrix act1;  // ReLU(pre1)
  Matrix pre2;
  Matrix z;     // ReLU(pre2)
};

struct HeadTrace {
  Matrix input;  // flattened fusion representation
  Matrix pre1;
  Matrix drop1;  // dropout multipliers (0 or 1/(1-p)); ones in inference
  Matrix act1;   // ReLU(pre1) * drop1
  Matrix pre2;
  Matrix drop2;
  Matrix act2;
  Matrix logit;  // batch x 1
  Vector prob;
};

// Activations of one forward pass over a batch (one row per sample).
struct ForwardTrace {
  Variant variant = Variant::kTFComplete;
  Matrix video_in;
  Matrix audio_in;
  std::optional<EmbedTrace> video;
  std::optional<EmbedTrace> audio;
  std::vector<HeadTrace> heads;
  Vector prob;  // final probability per sample

  std::size_t batch() const { return prob.len(); }
};

ForwardTrace forward_batch(const ModelParams& params, const Matrix& video,
                           const Matrix& audio, bool train_mode, Rng& rng);

struct ForwardResult {
  double p;
  ForwardTrace trace;
};

ForwardResult model_forward(const ModelParams& params, const Vector& video,
                            const Vector& audio, bool train_mode, Rng& rng);

// Probability only, inference mode.
double predict(const ModelParams& params, const Vector& video,
               const Vector& audio);

// Mean binary cross-entropy of the traced batch.
double batch_loss(const ForwardTrace& trace, std::span<const int> labels);

// Accumulates scale * d(sum of per-sample BCE)/d(theta) into grads.
void backward_batch(const ModelParams& params, const ForwardTrace& trace,
                    std::span<const int> labels, double scale,
                    Gradients& grads);

// d(BCE)/d(theta) for a single traced record.
Gradients model_backward(const ModelParams& params, const ForwardTrace& trace,
                         int label);

namespace testing {
// When set, backward_batch scales the first head's W1 gradient by 1.5. Used
// to prove the gradient self-check notices a broken backward pass.
void set_backward_fault(bool enabled);
bool backward_fault();
}  // namespace testing

}  // namespace tfn::model
