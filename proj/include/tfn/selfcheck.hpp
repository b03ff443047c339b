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

#include <cstdint>
#include <vector>

#include "tfn/gradcheck.hpp"
#include "tfn/model.hpp"

namespace tfn::model {

struct VariantGradCheck {
  Variant variant = Variant::kTFComplete;
  std::size_t parameters = 0;
  numkit::GradCheckResult result;
};

// Central-difference check of backward_batch against the mean BCE of a small
// random batch, dropout disabled, over every parameter of the variant.
VariantGradCheck check_variant_gradients(Variant variant, const Dims& dims,
                                         std::uint64_t seed,
                                         std::size_t batch = 4);

std::vector<VariantGradCheck> check_all_gradients(const Dims& dims,
                                                  std::uint64_t seed);

}  // namespace tfn::model
