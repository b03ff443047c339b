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

#include "tfn/model.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "tfn/error.hpp"
#include "tfn/ops.hpp"

namespace tfn::model {

namespace {

using numkit::dense_backward_batch;
using numkit::dense_forward_batch;

std::atomic<bool> g_backward_fault{false};

struct VariantInfo {
  Variant variant;
  std::string_view name;
  std::string_view label;
};

constexpr std::array<VariantInfo, 8> kVariantInfo = {{
    {Variant::kVideoOnly, "video-only", "Video Only"},
    {Variant::kAudioOnly, "audio-only", "Audio Only"},
    {Variant::kEarlyFusionNoEmbed, "early-fusion-no-embed",
     "Early Fusion without Embed."},
    {Variant::kEarlyFusion, "early-fusion", "Early Fusion"},
    {Variant::kLateFusion, "late-fusion", "Late Fusion"},
    {Variant::kTFUnimodalOnly, "tf-unimodal-only", "TF - Unimodal Only"},
    {Variant::kTFBimodalOnly, "tf-bimodal-only", "TF - Bimodal Only"},
    {Variant::kTFComplete, "tf-complete", "Complete TF"},
}};

const VariantInfo& info(Variant v) {
  return kVariantInfo.at(static_cast<std::size_t>(v));
}

std::string shape_str(const Matrix& m) { return m.shape(); }

void relu_inplace(const Matrix& pre, Matrix& act) {
  act = pre;
  for (double& v : act.values()) v = v > 0.0 ? v : 0.0;
}

// g <- g * [pre > 0] (* mult when given).
void mask_grad(Matrix& g, const Matrix& pre, const Matrix* mult) {
  auto gv = g.values();
  const auto pv = pre.values();
  for (std::size_t i = 0; i < gv.size(); ++i) {
    if (pv[i] > 0.0) {
      if (mult) gv[i] *= mult->values()[i];
    } else {
      gv[i] = 0.0;
    }
  }
}

Matrix dropout_multipliers(std::size_t batch, std::size_t width, double p,
                           bool train_mode, Rng& rng) {
  Matrix m(batch, width, 1.0);
  if (!train_mode || p == 0.0) return m;
  const double scale = 1.0 / (1.0 - p);
  for (double& v : m.values()) v = rng.bernoulli(p) ? 0.0 : scale;
  return m;
}

EmbedNet make_embed(std::size_t in, std::size_t hidden, std::size_t out) {
  return {{Matrix(hidden, in), Vector(hidden)}, {Matrix(out, hidden), Vector(out)}};
}

HeadNet make_head(std::size_t in, std::size_t hidden, double p) {
  return {{Matrix(hidden, in), Vector(hidden)},
          {Matrix(hidden, hidden), Vector(hidden)},
          {Matrix(1, hidden), Vector(1)},
          p};
}

ModelParams skeleton(Variant variant, const Dims& dims, double dropout_p) {
  ModelParams p;
  p.variant = variant;
  p.dims = dims;
  if (uses_video_embed(variant)) {
    p.video_embed = make_embed(dims.input, dims.hidden, dims.video_out);
  }
  if (uses_audio_embed(variant)) {
    p.audio_embed = make_embed(dims.input, dims.hidden, dims.audio_out);
  }
  for (std::size_t h = 0; h < head_count(variant); ++h) {
    p.heads.push_back(make_head(head_input_dim(variant, dims, h),
                                dims.head_hidden, dropout_p));
  }
  return p;
}

template <typename Params, typename Ref>
std::vector<Ref> collect(Params& params) {
  std::vector<Ref> out;
  auto add_dense = [&](const std::string& prefix, auto& d) {
    out.push_back({prefix + ".w", d.w.values(),
                   {static_cast<std::uint32_t>(d.w.rows()),
                    static_cast<std::uint32_t>(d.w.cols())},
                   true});
    out.push_back({prefix + ".b", d.b.values(),
                   {static_cast<std::uint32_t>(d.b.len())},
                   false});
  };
  if (params.video_embed) {
    add_dense("video.l1", params.video_embed->l1);
    add_dense("video.l2", params.video_embed->l2);
  }
  if (params.audio_embed) {
    add_dense("audio.l1", params.audio_embed->l1);
    add_dense("audio.l2", params.audio_embed->l2);
  }
  for (std::size_t h = 0; h < params.heads.size(); ++h) {
    const std::string prefix = "head" + std::to_string(h);
    add_dense(prefix + ".l1", params.heads[h].l1);
    add_dense(prefix + ".l2", params.heads[h].l2);
    add_dense(prefix + ".l3", params.heads[h].l3);
  }
  return out;
}

void he_normal(Matrix& w, Rng& rng) {
  const double std = std::sqrt(2.0 / static_cast<double>(w.cols()));
  for (double& v : w.values()) v = std * rng.normal();
}

void xavier_uniform(Matrix& w, Rng& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(w.cols() + w.rows()));
  for (double& v : w.values()) v = limit * (2.0 * rng.uniform() - 1.0);
}

EmbedTrace embed_batch(const EmbedNet& net, const Matrix& x) {
  EmbedTrace t;
  dense_forward_batch(net.l1.w, net.l1.b, x, t.pre1);
  relu_inplace(t.pre1, t.act1);
  dense_forward_batch(net.l2.w, net.l2.b, t.act1, t.pre2);
  relu_inplace(t.pre2, t.z);
  return t;
}

void embed_backward(const EmbedNet& net, const EmbedTrace& t, const Matrix& x,
                    Matrix g_z, EmbedNet& g) {
  mask_grad(g_z, t.pre2, nullptr);
  Matrix g_act1;
  dense_backward_batch(net.l2.w, t.act1, g_z, g.l2.w, g.l2.b, &g_act1);
  mask_grad(g_act1, t.pre1, nullptr);
  dense_backward_batch(net.l1.w, x, g_act1, g.l1.w, g.l1.b, nullptr);
}

HeadTrace head_batch(const HeadNet& head, Matrix input, bool train_mode,
                     Rng& rng) {
  HeadTrace t;
  t.input = std::move(input);
  const std::size_t batch = t.input.rows();
  const std::size_t hidden = head.l1.w.rows();

  dense_forward_batch(head.l1.w, head.l1.b, t.input, t.pre1);
  t.drop1 = dropout_multipliers(batch, hidden, head.dropout_p, train_mode, rng);
  relu_inplace(t.pre1, t.act1);
  for (std::size_t i = 0; i < t.act1.size(); ++i) {
    t.act1.values()[i] *= t.drop1.values()[i];
  }

  dense_forward_batch(head.l2.w, head.l2.b, t.act1, t.pre2);
  t.drop2 = dropout_multipliers(batch, hidden, head.dropout_p, train_mode, rng);
  relu_inplace(t.pre2, t.act2);
  for (std::size_t i = 0; i < t.act2.size(); ++i) {
    t.act2.values()[i] *= t.drop2.values()[i];
  }

  dense_forward_batch(head.l3.w, head.l3.b, t.act2, t.logit);
  t.prob = Vector(batch);
  for (std::size_t s = 0; s < batch; ++s) {
    t.prob[s] = numkit::sigmoid(t.logit(s, 0));
  }
  return t;
}

// Returns the gradient with respect to the head input when requested.
Matrix head_backward(const HeadNet& head, const HeadTrace& t,
                     const Matrix& g_logit, HeadNet& g, bool want_input_grad,
                     bool fault) {
  Matrix g_act2;
  dense_backward_batch(head.l3.w, t.act2, g_logit, g.l3.w, g.l3.b, &g_act2);
  mask_grad(g_act2, t.pre2, &t.drop2);
  Matrix g_act1;
  dense_backward_batch(head.l2.w, t.act1, g_act2, g.l2.w, g.l2.b, &g_act1);
  mask_grad(g_act1, t.pre1, &t.drop1);
  if (fault) {
    for (double& v : g_act1.values()) v *= 1.5;
  }
  Matrix g_in;
  dense_backward_batch(head.l1.w, t.input, g_act1, g.l1.w, g.l1.b,
                       want_input_grad ? &g_in : nullptr);
  return g_in;
}

Matrix concat_cols(const Matrix& a, const Matrix& b, bool append_one) {
  const std::size_t cols = a.cols() + b.cols() + (append_one ? 1 : 0);
  Matrix out(a.rows(), cols);
  for (std::size_t s = 0; s < a.rows(); ++s) {
    auto r = out.row(s);
    std::copy(a.row(s).begin(), a.row(s).end(), r.begin());
    std::copy(b.row(s).begin(), b.row(s).end(), r.begin() + a.cols());
    if (append_one) r[cols - 1] = 1.0;
  }
  return out;
}

// Row-wise flattened outer product; with `extend` each operand gets a
// trailing 1 first.
Matrix outer_rows(const Matrix& zv, const Matrix& za, bool extend) {
  const std::size_t nv = zv.cols() + (extend ? 1 : 0);
  const std::size_t na = za.cols() + (extend ? 1 : 0);
  Matrix out(zv.rows(), nv * na);
  for (std::size_t s = 0; s < zv.rows(); ++s) {
    auto r = out.row(s);
    const auto v = zv.row(s);
    const auto a = za.row(s);
    for (std::size_t i = 0; i < nv; ++i) {
      const double vi = i < v.size() ? v[i] : 1.0;
      double* dst = r.data() + i * na;
      for (std::size_t j = 0; j < a.size(); ++j) dst[j] = vi * a[j];
      if (extend) dst[na - 1] = vi;
    }
  }
  return out;
}

// Inverse routing of outer_rows: d/dz_v[i] = sum_j g[i][j] a_ext[j] and
// d/dz_a[j] = sum_i g[i][j] v_ext[i], bias slots dropped.
void outer_rows_backward(const Matrix& zv, const Matrix& za, bool extend,
                         const Matrix& g, Matrix& g_zv, Matrix& g_za) {
  const std::size_t nv = zv.cols() + (extend ? 1 : 0);
  const std::size_t na = za.cols() + (extend ? 1 : 0);
  g_zv = Matrix(zv.rows(), zv.cols());
  g_za = Matrix(za.rows(), za.cols());
  for (std::size_t s = 0; s < zv.rows(); ++s) {
    const auto v = zv.row(s);
    const auto a = za.row(s);
    const auto gr = g.row(s);
    auto dv = g_zv.row(s);
    auto da = g_za.row(s);
    for (std::size_t i = 0; i < nv; ++i) {
      const double vi = i < v.size() ? v[i] : 1.0;
      const double* gi = gr.data() + i * na;
      double acc = 0.0;
      for (std::size_t j = 0; j < na; ++j) {
        const double aj = j < a.size() ? a[j] : 1.0;
        acc += gi[j] * aj;
        if (j < a.size()) da[j] += gi[j] * vi;
      }
      if (i < v.size()) dv[i] = acc;
    }
  }
}

void split_cols(const Matrix& g, std::size_t first, std::size_t second,
                Matrix& a, Matrix& b) {
  a = Matrix(g.rows(), first);
  b = Matrix(g.rows(), second);
  for (std::size_t s = 0; s < g.rows(); ++s) {
    const auto r = g.row(s);
    std::copy(r.begin(), r.begin() + first, a.row(s).begin());
    std::copy(r.begin() + first, r.begin() + first + second,
              b.row(s).begin());
  }
}

Matrix row_matrix(const Vector& v) {
  Matrix m(1, v.len());
  std::copy(v.values().begin(), v.values().end(), m.values().begin());
  return m;
}

}  // namespace

std::string_view variant_name(Variant v) { return info(v).name; }
std::string_view variant_label(Variant v) { return info(v).label; }

Variant parse_variant(std::string_view name) {
  for (const auto& i : kVariantInfo) {
    if (i.name == name) return i.variant;
  }
  std::string valid;
  for (const auto& i : kVariantInfo) {
    if (!valid.empty()) valid += ", ";
    valid += i.name;
  }
  throw ConfigurationError("unknown variant '" + std::string(name) +
                           "'; valid variants: " + valid);
}

std::optional<Variant> variant_from_tag(std::uint8_t tag) {
  if (tag < kVariantInfo.size()) return static_cast<Variant>(tag);
  return std::nullopt;
}

bool uses_video_embed(Variant v) {
  return v != Variant::kAudioOnly && v != Variant::kEarlyFusionNoEmbed;
}

bool uses_audio_embed(Variant v) {
  return v != Variant::kVideoOnly && v != Variant::kEarlyFusionNoEmbed;
}

std::size_t head_count(Variant v) {
  return v == Variant::kLateFusion ? 2 : 1;
}

std::size_t head_input_dim(Variant v, const Dims& d, std::size_t head) {
  switch (v) {
    case Variant::kVideoOnly:
      return d.video_out;
    case Variant::kAudioOnly:
      return d.audio_out;
    case Variant::kEarlyFusionNoEmbed:
      return 2 * d.input;
    case Variant::kEarlyFusion:
      return d.video_out + d.audio_out;
    case Variant::kLateFusion:
      return head == 0 ? d.video_out : d.audio_out;
    case Variant::kTFUnimodalOnly:
      return d.video_out + d.audio_out + 1;
    case Variant::kTFBimodalOnly:
      return d.video_out * d.audio_out;
    case Variant::kTFComplete:
      return (d.video_out + 1) * (d.audio_out + 1);
  }
  throw ConfigurationError("unknown variant tag");
}

std::vector<TensorRef> tensors(ModelParams& params) {
  return collect<ModelParams, TensorRef>(params);
}

std::vector<ConstTensorRef> tensors(const ModelParams& params) {
  return collect<const ModelParams, ConstTensorRef>(params);
}

std::size_t parameter_count(const ModelParams& params) {
  std::size_t n = 0;
  for (const auto& t : tensors(params)) n += t.values.size();
  return n;
}

std::vector<double> flatten(const ModelParams& params) {
  std::vector<double> flat;
  flat.reserve(parameter_count(params));
  for (const auto& t : tensors(params)) {
    flat.insert(flat.end(), t.values.begin(), t.values.end());
  }
  return flat;
}

void unflatten(std::span<const double> flat, ModelParams& params) {
  if (flat.size() != parameter_count(params)) {
    throw DimensionError("unflatten: " + std::to_string(flat.size()) +
                         " values for " +
                         std::to_string(parameter_count(params)) +
                         " parameters");
  }
  std::size_t offset = 0;
  for (auto& t : tensors(params)) {
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset),
                t.values.size(), t.values.begin());
    offset += t.values.size();
  }
}

ModelParams zeros_like(const ModelParams& params) {
  ModelParams z = params;
  for (auto& t : tensors(z)) std::fill(t.values.begin(), t.values.end(), 0.0);
  return z;
}

void validate(const ModelParams& params) {
  const Variant v = params.variant;
  const ModelParams expected = skeleton(v, params.dims, 0.0);
  if (params.video_embed.has_value() != expected.video_embed.has_value() ||
      params.audio_embed.has_value() != expected.audio_embed.has_value() ||
      params.heads.size() != expected.heads.size()) {
    throw ConfigurationError("parameters do not match the sub-network layout "
                             "of variant " +
                             std::string(variant_name(v)));
  }
  const auto have = tensors(params);
  const auto want = tensors(expected);
  for (std::size_t i = 0; i < have.size(); ++i) {
    if (have[i].dims != want[i].dims) {
      throw ConfigurationError("tensor " + have[i].name +
                               " has the wrong shape for variant " +
                               std::string(variant_name(v)));
    }
  }
}

ModelParams init_params(Variant variant, std::uint64_t seed, const Dims& dims,
                        double dropout_p) {
  ModelParams p = skeleton(variant, dims, dropout_p);
  p.init_seed = seed;
  Rng rng(seed);
  auto init_embed = [&](EmbedNet& e) {
    he_normal(e.l1.w, rng);
    he_normal(e.l2.w, rng);
  };
  if (p.video_embed) init_embed(*p.video_embed);
  if (p.audio_embed) init_embed(*p.audio_embed);
  for (auto& h : p.heads) {
    he_normal(h.l1.w, rng);
    he_normal(h.l2.w, rng);
    xavier_uniform(h.l3.w, rng);
  }
  return p;
}

Vector embed_forward(const EmbedNet& net, const Vector& x) {
  if (x.len() != net.l1.w.cols()) {
    throw DimensionError("embed_forward: expected input of length " +
                         std::to_string(net.l1.w.cols()) + ", got " +
                         std::to_string(x.len()));
  }
  const auto h = numkit::relu(numkit::dense_forward(net.l1.w, net.l1.b, x));
  return numkit::relu(numkit::dense_forward(net.l2.w, net.l2.b, h.y)).y;
}

FusionTensor::FusionTensor(const Vector& z_v, const Vector& z_a)
    : data_(z_v.len() + 1, z_a.len() + 1) {
  const Matrix flat = outer_rows(row_matrix(z_v), row_matrix(z_a), true);
  std::copy(flat.values().begin(), flat.values().end(),
            data_.values().begin());
}

FusionTensor tensor_fuse(const Vector& z_v, const Vector& z_a) {
  return FusionTensor(z_v, z_a);
}

FusionGrads tensor_fuse_backward(const Vector& z_v, const Vector& z_a,
                                 const Matrix& upstream) {
  if (upstream.rows() != z_v.len() + 1 || upstream.cols() != z_a.len() + 1) {
    throw DimensionError("tensor_fuse_backward: upstream " +
                         shape_str(upstream) + " for embeddings of length " +
                         std::to_string(z_v.len()) + " and " +
                         std::to_string(z_a.len()));
  }
  Matrix g(1, upstream.size());
  std::copy(upstream.values().begin(), upstream.values().end(),
            g.values().begin());
  Matrix gv, ga;
  outer_rows_backward(row_matrix(z_v), row_matrix(z_a), true, g, gv, ga);
  return {Vector(std::vector<double>(gv.values().begin(), gv.values().end())),
          Vector(std::vector<double>(ga.values().begin(), ga.values().end()))};
}

ForwardTrace forward_batch(const ModelParams& params, const Matrix& video,
                           const Matrix& audio, bool train_mode, Rng& rng) {
  validate(params);
  const Dims& d = params.dims;
  if (video.rows() != audio.rows() || video.cols() != d.input ||
      audio.cols() != d.input) {
    throw DimensionError("model_forward: expected feature vectors of length " +
                         std::to_string(d.input) + ", got video " +
                         video.shape() + " and audio " + audio.shape());
  }
  ForwardTrace t;
  t.variant = params.variant;
  t.video_in = video;
  t.audio_in = audio;
  if (params.video_embed) t.video = embed_batch(*params.video_embed, video);
  if (params.audio_embed) t.audio = embed_batch(*params.audio_embed, audio);

  std::vector<Matrix> inputs;
  switch (params.variant) {
    case Variant::kVideoOnly:
      inputs.push_back(t.video->z);
      break;
    case Variant::kAudioOnly:
      inputs.push_back(t.audio->z);
      break;
    case Variant::kEarlyFusionNoEmbed:
      inputs.push_back(concat_cols(video, audio, false));
      break;
    case Variant::kEarlyFusion:
      inputs.push_back(concat_cols(t.video->z, t.audio->z, false));
      break;
    case Variant::kLateFusion:
      inputs.push_back(t.video->z);
      inputs.push_back(t.audio->z);
      break;
    case Variant::kTFUnimodalOnly:
      inputs.push_back(concat_cols(t.video->z, t.audio->z, true));
      break;
    case Variant::kTFBimodalOnly:
      inputs.push_back(outer_rows(t.video->z, t.audio->z, false));
      break;
    case Variant::kTFComplete:
      inputs.push_back(outer_rows(t.video->z, t.audio->z, true));
      break;
  }
  for (std::size_t h = 0; h < inputs.size(); ++h) {
    t.heads.push_back(
        head_batch(params.heads[h], std::move(inputs[h]), train_mode, rng));
  }
  if (params.variant == Variant::kLateFusion) {
    t.prob = Vector(video.rows());
    for (std::size_t s = 0; s < video.rows(); ++s) {
      t.prob[s] = 0.5 * (t.heads[0].prob[s] + t.heads[1].prob[s]);
    }
  } else {
    t.prob = t.heads[0].prob;
  }
  if (!t.prob.all_finite()) {
    throw NumericError("model_forward: non-finite probability");
  }
  return t;
}

ForwardResult model_forward(const ModelParams& params, const Vector& video,
                            const Vector& audio, bool train_mode, Rng& rng) {
  if (video.len() != params.dims.input || audio.len() != params.dims.input) {
    throw DimensionError("model_forward: expected feature vectors of length " +
                         std::to_string(params.dims.input) + ", got " +
                         std::to_string(video.len()) + " (video) and " +
                         std::to_string(audio.len()) + " (audio)");
  }
  ForwardTrace t =
      forward_batch(params, row_matrix(video), row_matrix(audio), train_mode, rng);
  const double p = t.prob[0];
  return {p, std::move(t)};
}

double predict(const ModelParams& params, const Vector& video,
               const Vector& audio) {
  Rng unused(0);
  return model_forward(params, video, audio, false, unused).p;
}

double batch_loss(const ForwardTrace& trace, std::span<const int> labels) {
  if (labels.size() != trace.batch()) {
    throw DimensionError("batch_loss: " + std::to_string(labels.size()) +
                         " labels for a batch of " +
                         std::to_string(trace.batch()));
  }
  double total = 0.0;
  for (std::size_t s = 0; s < labels.size(); ++s) {
    total += numkit::bce_loss(trace.prob[s], labels[s]);
  }
  return total / static_cast<double>(labels.size());
}

void backward_batch(const ModelParams& params, const ForwardTrace& trace,
                    std::span<const int> labels, double scale,
                    Gradients& grads) {
  if (trace.variant != params.variant ||
      trace.heads.size() != params.heads.size() ||
      trace.heads[0].input.cols() != params.heads[0].in_dim()) {
    throw ConfigurationError(
        "model_backward: trace was not produced by these parameters");
  }
  if (labels.size() != trace.batch()) {
    throw DimensionError("model_backward: " + std::to_string(labels.size()) +
                         " labels for a batch of " +
                         std::to_string(trace.batch()));
  }
  const std::size_t batch = trace.batch();
  const Variant v = params.variant;
  const bool late = v == Variant::kLateFusion;

  std::vector<Matrix> g_logits(trace.heads.size(), Matrix(batch, 1));
  for (std::size_t s = 0; s < batch; ++s) {
    const int y = labels[s];
    if (!late) {
      g_logits[0](s, 0) = scale * numkit::bce_logit_grad(trace.prob[s], y);
      continue;
    }
    // Loss on the averaged probability; zero slope inside the clamp region.
    const double p = trace.prob[s];
    double dl_dp = 0.0;
    if (p > numkit::kBceEpsilon && p < 1.0 - numkit::kBceEpsilon) {
      dl_dp = -y / p + (1 - y) / (1.0 - p);
    }
    for (std::size_t h = 0; h < 2; ++h) {
      const double ph = trace.heads[h].prob[s];
      g_logits[h](s, 0) = scale * dl_dp * 0.5 * ph * (1.0 - ph);
    }
  }

  const bool want_input = v != Variant::kEarlyFusionNoEmbed;
  const bool fault = testing::backward_fault();
  std::vector<Matrix> g_in;
  for (std::size_t h = 0; h < trace.heads.size(); ++h) {
    g_in.push_back(head_backward(params.heads[h], trace.heads[h], g_logits[h],
                                 grads.heads[h], want_input,
                                 fault && h == 0));
  }

  Matrix g_zv, g_za;
  const Dims& d = params.dims;
  switch (v) {
    case Variant::kVideoOnly:
      g_zv = std::move(g_in[0]);
      break;
    case Variant::kAudioOnly:
      g_za = std::move(g_in[0]);
      break;
    case Variant::kEarlyFusionNoEmbed:
      return;
    case Variant::kEarlyFusion:
    case Variant::kTFUnimodalOnly:
      split_cols(g_in[0], d.video_out, d.audio_out, g_zv, g_za);
      break;
    case Variant::kLateFusion:
      g_zv = std::move(g_in[0]);
      g_za = std::move(g_in[1]);
      break;
    case Variant::kTFBimodalOnly:
      outer_rows_backward(trace.video->z, trace.audio->z, false, g_in[0], g_zv,
                          g_za);
      break;
    case Variant::kTFComplete:
      outer_rows_backward(trace.video->z, trace.audio->z, true, g_in[0], g_zv,
                          g_za);
      break;
  }
  if (params.video_embed) {
    embed_backward(*params.video_embed, *trace.video, trace.video_in,
                   std::move(g_zv), *grads.video_embed);
  }
  if (params.audio_embed) {
    embed_backward(*params.audio_embed, *trace.audio, trace.audio_in,
                   std::move(g_za), *grads.audio_embed);
  }
}

Gradients model_backward(const ModelParams& params, const ForwardTrace& trace,
                         int label) {
  Gradients g = zeros_like(params);
  const int labels[1] = {label};
  backward_batch(params, trace, labels, 1.0, g);
  return g;
}

namespace testing {
void set_backward_fault(bool enabled) { g_backward_fault = enabled; }
bool backward_fault() { return g_backward_fault; }
}  // namespace testing

}  // namespace tfn::model
