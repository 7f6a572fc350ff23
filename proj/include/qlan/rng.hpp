// Copyright 2026 The qlan Authors
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
#include <initializer_list>
#include <random>

namespace qlan {

// Explicitly seeded stream. Independent streams are derived from a master seed and a
// path of indices, so results do not depend on thread count or scheduling.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    static Rng derive(std::uint64_t master, std::initializer_list<std::uint64_t> path);

    double uniform();  // [0, 1)
    double normal(double mean = 0.0, double sd = 1.0);
    std::int64_t binomial(std::int64_t trials, double p);

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

}  // namespace qlan
