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

#include "tfn/selfcheck.hpp"

namespace tfn::model {

VariantGradCheck check_variant_gradients(Variant variant, const Dims& dims,
                                         std::uint64_t seed,
                                         std::size_t batch) {
  Rng rng(seed);
  ModelParams params = init_params(variant, rng.fork(0).next_u64(), dims);

  Rng data_rng = rng.fork(1);
  Matrix video(batch, dims.input);
  Matrix audio(batch, dims.input);
  for (double& v : video.values()) v = data_rng.normal();
  for (double& v : audio.values()) v = data_rng.normal();
  std::vector<int> labels(batch);
  for (std::size_t i = 0; i < batch; ++i) labels[i] = static_cast<int>(i % 2);

  Rng unused(0);
  const auto loss = [&](std::span<const double> theta) {
    ModelParams p = params;
    unflatten(theta, p);
    return batch_loss(forward_batch(p, video, audio, false, unused), labels);
  };
  const auto grad = [&](std::span<const double> theta) {
    ModelParams p = params;
    unflatten(theta, p);
    const auto trace = forward_batch(p, video, audio, false, unused);
    Gradients g = zeros_like(p);
    backward_batch(p, trace, labels, 1.0 / static_cast<double>(batch), g);
    return flatten(g);
  };

  VariantGradCheck out;
  out.variant = variant;
  out.parameters = parameter_count(params);
  out.result = numkit::grad_check_detailed(loss, grad, flatten(params));
  return out;
}

std::vector<VariantGradCheck> check_all_gradients(const Dims& dims,
                                                  std::uint64_t seed) {
  std::vector<VariantGradCheck> out;
  for (Variant v : kAllVariants) {
    out.push_back(check_variant_gradients(v, dims, seed));
  }
  return out;
}

}  // namespace tfn::model
