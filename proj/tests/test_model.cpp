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

#include <algorithm>
#include <cmath>
#include <numeric>

#include "doctest.h"
#include "test_util.hpp"
#include "tfn/binary_io.hpp"
#include "tfn/checkpoint.hpp"
#include "tfn/error.hpp"
#include "tfn/model.hpp"
#include "tfn/ops.hpp"
#include "tfn/selfcheck.hpp"

using namespace tfn;
using namespace tfn::model;

namespace {

bool same_params(const ModelParams& a, const ModelParams& b) {
  if (a.variant != b.variant) return false;
  const auto ta = tensors(a), tb = tensors(b);
  if (ta.size() != tb.size()) return false;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i].dims != tb[i].dims) return false;
    if (!std::equal(ta[i].values.begin(), ta[i].values.end(), tb[i].values.begin())) {
      return false;
    }
  }
  return true;
}

ModelParams zero_params(Variant v, const Dims& dims = Dims::full()) {
  ModelParams p = init_params(v, 1, dims);
  for (auto& t : tensors(p)) std::fill(t.values.begin(), t.values.end(), 0.0);
  return p;
}

constexpr Dims kTiny{8, 4, 2, 2, 4};

}  // namespace

TEST_CASE("variant names round trip") {
  for (Variant v : kAllVariants) {
    CHECK(parse_variant(variant_name(v)) == v);
    CHECK(variant_from_tag(static_cast<std::uint8_t>(v)) == v);
  }
  CHECK_FALSE(variant_from_tag(8).has_value());
  CHECK_THROWS_AS(parse_variant("unknown-name"), ConfigurationError);
}

TEST_CASE("head input widths per variant") {
  const Dims d = Dims::full();
  CHECK(head_input_dim(Variant::kVideoOnly, d) == 64);
  CHECK(head_input_dim(Variant::kAudioOnly, d) == 32);
  CHECK(head_input_dim(Variant::kEarlyFusionNoEmbed, d) == 1536);
  CHECK(head_input_dim(Variant::kEarlyFusion, d) == 96);
  CHECK(head_input_dim(Variant::kLateFusion, d, 0) == 64);
  CHECK(head_input_dim(Variant::kLateFusion, d, 1) == 32);
  CHECK(head_input_dim(Variant::kTFUnimodalOnly, d) == 97);
  CHECK(head_input_dim(Variant::kTFBimodalOnly, d) == 2048);
  CHECK(head_input_dim(Variant::kTFComplete, d) == 2145);
  CHECK(head_count(Variant::kLateFusion) == 2);

  for (Variant v : kAllVariants) {
    const ModelParams p = init_params(v, 3);
    CHECK_NOTHROW(validate(p));
    CHECK(p.video_embed.has_value() == uses_video_embed(v));
    CHECK(p.audio_embed.has_value() == uses_audio_embed(v));
    for (std::size_t h = 0; h < p.heads.size(); ++h) {
      CHECK(p.heads[h].in_dim() == head_input_dim(v, d, h));
    }
  }
  CHECK(init_params(Variant::kTFComplete, 0).heads[0].in_dim() == 2145);
}

TEST_CASE("init_params is deterministic and follows the stated distributions") {
  const ModelParams a = init_params(Variant::kTFComplete, 99);
  const ModelParams b = init_params(Variant::kTFComplete, 99);
  CHECK(same_params(a, b));
  CHECK_FALSE(same_params(a, init_params(Variant::kTFComplete, 100)));

  const auto& w1 = a.video_embed->l1.w;
  REQUIRE(w1.rows() == 128);
  REQUIRE(w1.cols() == 768);
  double sum = 0.0, sq = 0.0;
  for (double v : w1.values()) sum += v;
  const double mean = sum / static_cast<double>(w1.size());
  for (double v : w1.values()) sq += (v - mean) * (v - mean);
  const double sd = std::sqrt(sq / static_cast<double>(w1.size() - 1));
  CHECK(std::abs(sd - std::sqrt(2.0 / 768.0)) < 0.1 * std::sqrt(2.0 / 768.0));

  // Xavier-uniform logit layer: |w| <= sqrt(6 / (fan_in + fan_out))
  const double limit = std::sqrt(6.0 / (128.0 + 1.0));
  for (double v : a.heads[0].l3.w.values()) CHECK(std::abs(v) <= limit);
  for (const auto& t : tensors(a)) {
    if (!t.is_weight) {
      CHECK(std::all_of(t.values.begin(), t.values.end(), [](double v) { return v == 0.0; }));
    }
  }
}

TEST_CASE("embed_forward") {
  const ModelParams z = zero_params(Variant::kTFComplete);
  numkit::Rng rng(1);
  const auto x = testutil::random_vector(rng, 768);
  CHECK(embed_forward(*z.video_embed, x) == numkit::Vector(64));
  const ModelParams p = init_params(Variant::kTFComplete, 4);
  CHECK(embed_forward(*p.video_embed, x).len() == 64);
  CHECK(embed_forward(*p.audio_embed, x).len() == 32);
  CHECK_THROWS_AS(embed_forward(*p.video_embed, numkit::Vector(767)), DimensionError);

  // 4 -> 3 -> 2 by hand.
  EmbedNet net;
  net.l1 = {numkit::Matrix{{1, 0, -1, 2}, {0.5, 1, 0, 0}, {-1, -1, -1, -1}},
            numkit::Vector{0, -1, 0.5}};
  net.l2 = {numkit::Matrix{{1, 2, 3}, {-1, 1, 0}}, numkit::Vector{0.25, 0}};
  const numkit::Vector in{1, 2, 3, 4};
  // layer 1: [1 - 3 + 8, 0.5 + 2 - 1, -10 + 0.5] = [6, 1.5, -9.5] -> [6, 1.5, 0]
  // layer 2: [6 + 3 + 0 + 0.25, -6 + 1.5] = [9.25, -4.5] -> [9.25, 0]
  CHECK(embed_forward(net, in) == numkit::Vector{9.25, 0});
}

TEST_CASE("fusion tensor examples") {
  numkit::Rng rng(2);
  const auto t = tensor_fuse(testutil::random_vector(rng, 64), testutil::random_vector(rng, 32));
  CHECK(t.rows() == 65);
  CHECK(t.cols() == 33);
  CHECK(t.flattened().size() == 2145);

  const auto zero = tensor_fuse(numkit::Vector(64), numkit::Vector(32));
  for (std::size_t i = 0; i < 65; ++i)
    for (std::size_t j = 0; j < 33; ++j)
      REQUIRE(zero.data()(i, j) == (i == 64 && j == 32 ? 1.0 : 0.0));

  const auto small = tensor_fuse(numkit::Vector{1, 2}, numkit::Vector{3});
  CHECK(small.data() == numkit::Matrix{{3, 1}, {6, 2}, {3, 1}});
  CHECK(std::vector<double>(small.flattened().begin(), small.flattened().end()) ==
        std::vector<double>{3, 1, 6, 2, 3, 1});
}

TEST_CASE("fusion tensor backward") {
  const auto g = tensor_fuse_backward(numkit::Vector{1, 2}, numkit::Vector{3},
                                      numkit::Matrix(3, 2, 1.0));
  CHECK(g.d_zv == numkit::Vector{4, 4});
  CHECK(g.d_za == numkit::Vector{4});
  CHECK_THROWS_AS(tensor_fuse_backward(numkit::Vector{1, 2}, numkit::Vector{3},
                                       numkit::Matrix(2, 2)),
                  DimensionError);
}

TEST_CASE("all-zero parameters give probability one half") {
  numkit::Rng rng(3);
  const auto v = testutil::random_vector(rng, 768), a = testutil::random_vector(rng, 768);
  for (Variant var : kAllVariants) {
    CHECK(predict(zero_params(var), v, a) == 0.5);
  }
}

TEST_CASE("forward pass determinism") {
  const ModelParams p = init_params(Variant::kTFComplete, 5);
  numkit::Rng rng(6);
  const auto v = testutil::random_vector(rng, 768), a = testutil::random_vector(rng, 768);
  numkit::Rng r1 = numkit::Rng(17).fork(2), r2 = numkit::Rng(17).fork(2);
  const auto f1 = model_forward(p, v, a, true, r1);
  const auto f2 = model_forward(p, v, a, true, r2);
  CHECK(f1.p == f2.p);
  CHECK(f1.p > 0.0);
  CHECK(f1.p < 1.0);
  CHECK(predict(p, v, a) == predict(p, v, a));
  CHECK_THROWS_AS(predict(p, numkit::Vector(767), a), DimensionError);
}

TEST_CASE("batched forward matches single-record forward exactly") {
  const ModelParams p = init_params(Variant::kTFComplete, 8, Dims::scaled());
  numkit::Rng rng(9);
  const auto video = testutil::random_matrix(rng, 5, 96);
  const auto audio = testutil::random_matrix(rng, 5, 96);
  numkit::Rng unused(0);
  const auto trace = forward_batch(p, video, audio, false, unused);
  for (std::size_t i = 0; i < 5; ++i) {
    const numkit::Vector v(std::vector<double>(video.row(i).begin(), video.row(i).end()));
    const numkit::Vector a(std::vector<double>(audio.row(i).begin(), audio.row(i).end()));
    CHECK(trace.prob[i] == predict(p, v, a));
  }
}

TEST_CASE("late fusion averages two independent unimodal heads") {
  const ModelParams late = init_params(Variant::kLateFusion, 21);
  numkit::Rng rng(10);
  const auto v = testutil::random_vector(rng, 768), a = testutil::random_vector(rng, 768);

  // Oracle: run each head as a standalone unimodal model.
  ModelParams video_only = init_params(Variant::kVideoOnly, 0);
  video_only.video_embed = late.video_embed;
  video_only.heads = {late.heads[0]};
  ModelParams audio_only = init_params(Variant::kAudioOnly, 0);
  audio_only.audio_embed = late.audio_embed;
  audio_only.heads = {late.heads[1]};
  const double expected = (predict(video_only, v, a) + predict(audio_only, v, a)) / 2.0;
  CHECK(predict(late, v, a) == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("permuting video coordinates and W1 columns leaves the output unchanged") {
  ModelParams p = init_params(Variant::kTFComplete, 12);
  numkit::Rng rng(13);
  const auto v = testutil::random_vector(rng, 768), a = testutil::random_vector(rng, 768);
  std::vector<std::size_t> perm(768);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(std::span<std::size_t>(perm));

  numkit::Vector pv(768);
  ModelParams q = p;
  auto& w = q.video_embed->l1.w;
  const auto& w0 = p.video_embed->l1.w;
  for (std::size_t j = 0; j < 768; ++j) {
    pv[j] = v[perm[j]];
    for (std::size_t r = 0; r < w.rows(); ++r) w(r, j) = w0(r, perm[j]);
  }
  CHECK(std::abs(predict(p, v, a) - predict(q, pv, a)) < 1e-12);
}

TEST_CASE("gradients vanish when the prediction matches the label") {
  ModelParams p = zero_params(Variant::kTFComplete);
  p.heads[0].l3.b[0] = 40.0;
  numkit::Rng rng(14);
  const auto v = testutil::random_vector(rng, 768), a = testutil::random_vector(rng, 768);
  numkit::Rng unused(0);
  const auto fwd = model_forward(p, v, a, false, unused);
  const Gradients g = model_backward(p, fwd.trace, 1);
  for (double x : flatten(g)) REQUIRE(std::abs(x) <= 1e-6);
}

TEST_CASE("backward rejects a trace from another variant") {
  const ModelParams p = init_params(Variant::kTFComplete, 1, kTiny);
  const ModelParams q = init_params(Variant::kEarlyFusion, 1, kTiny);
  numkit::Rng rng(15);
  const auto v = testutil::random_vector(rng, 8), a = testutil::random_vector(rng, 8);
  const auto fwd = model_forward(q, v, a, false, rng);
  CHECK_THROWS_AS(model_backward(p, fwd.trace, 1), ConfigurationError);
}

TEST_CASE("finite-difference gradient check on a tiny tensor fusion model") {
  const auto r = check_variant_gradients(Variant::kTFComplete, kTiny, 31);
  CHECK(r.result.max_rel_error < 1e-5);
}

TEST_CASE("finite-difference gradient check on every scaled-down variant") {
  for (const auto& r : check_all_gradients(Dims::scaled(), 2024)) {
    INFO(variant_name(r.variant));
    CHECK(r.result.max_rel_error < 1e-5);
  }
}

TEST_CASE("gradient check notices a corrupted backward pass") {
  testing::set_backward_fault(true);
  const auto r = check_variant_gradients(Variant::kTFComplete, Dims::scaled(), 1);
  testing::set_backward_fault(false);
  CHECK(r.result.max_rel_error > 1e-3);
}

TEST_CASE("flatten and unflatten are inverse") {
  ModelParams p = init_params(Variant::kLateFusion, 4, kTiny);
  const auto flat = flatten(p);
  CHECK(flat.size() == parameter_count(p));
  ModelParams q = zeros_like(p);
  unflatten(flat, q);
  CHECK(same_params(p, q));
}

TEST_CASE("checkpoint round trip is bit exact") {
  testutil::TempDir dir("ckpt");
  for (Variant v : kAllVariants) {
    const ModelParams p = init_params(v, 77, Dims::scaled());
    const auto path = dir / (std::string(variant_name(v)) + ".tfnm");
    save_params(p, path);
    const ModelParams q = load_params(path);
    CHECK(same_params(p, q));
    CHECK(q.variant == v);
  }
  const ModelParams full = init_params(Variant::kTFComplete, 5);
  CHECK(same_params(full, decode_params(encode_params(full))));
}

TEST_CASE("checkpoint layout") {
  const ModelParams p = init_params(Variant::kAudioOnly, 1, kTiny);
  const auto bytes = encode_params(p);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "TFNM");
  CHECK(bytes[4] == 0x01);
  CHECK(bytes[5] == static_cast<std::uint8_t>(Variant::kAudioOnly));
  std::size_t expected = 6 + 8;
  for (const auto& t : tensors(p)) expected += 4 + 4 * t.dims.size() + 8 * t.values.size();
  CHECK(bytes.size() == expected);
  // first tensor: audio.l1.w, rank 2, dims 4 x 8
  io::ByteReader r(bytes);
  r.bytes(6, "header");
  CHECK(r.u32("rank") == 2);
  CHECK(r.u32("rows") == 4);
  CHECK(r.u32("cols") == 8);
}

TEST_CASE("corrupt checkpoints are rejected") {
  const ModelParams p = init_params(Variant::kTFComplete, 1, kTiny);
  const auto good = encode_params(p);

  auto bad_magic = good;
  bad_magic[0] = 'X';
  CHECK_THROWS_WITH_AS(decode_params(bad_magic), doctest::Contains("magic"), FormatError);

  auto bad_version = good;
  bad_version[4] = 99;
  CHECK_THROWS_AS(decode_params(bad_version), UnsupportedVersionError);

  auto flipped = good;
  flipped[40] ^= 0x01;
  CHECK_THROWS_WITH_AS(decode_params(flipped), doctest::Contains("checksum"), FormatError);

  const std::vector<std::uint8_t> truncated(good.begin(), good.begin() + good.size() / 2);
  CHECK_THROWS_AS(decode_params(truncated), FormatError);

  // A consistent checksum over an impossible shape still fails, naming the tensor.
  io::ByteWriter w;
  w.bytes("TFNM");
  w.u8(1);
  w.u8(static_cast<std::uint8_t>(Variant::kAudioOnly));
  w.u32(3);
  w.checksum();
  CHECK_THROWS_WITH_AS(decode_params(w.buffer()), doctest::Contains("tensor 0 rank"), FormatError);

  auto bad_tag = good;
  bad_tag[5] = 42;
  const std::vector<std::uint8_t> body(bad_tag.begin(), bad_tag.end() - 8);
  io::ByteWriter w2;
  w2.bytes(std::string(body.begin(), body.end()));
  w2.checksum();
  CHECK_THROWS_WITH_AS(decode_params(w2.buffer()), doctest::Contains("variant tag"), FormatError);

  testutil::TempDir dir("ckpt-missing");
  CHECK_THROWS_AS(load_params(dir / "nope.tfnm"), IoError);
}
