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

#include "qlan/rng.hpp"

#include <vector>

namespace qlan {

namespace {

void push_words(std::vector<std::uint32_t>& words, std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::vector<std::uint32_t> words;
    push_words(words, seed);
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
}

Rng Rng::derive(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::vector<std::uint32_t> words;
    push_words(words, master);
    // Length tag keeps (1, 2) and (1, 2, 0) apart.
    push_words(words, 0x9e3779b97f4a7c15ull ^ path.size());
    for (auto p : path) {
        push_words(words, p);
    }
    std::seed_seq seq(words.begin(), words.end());
    Rng r(0);
    r.engine_.seed(seq);
    return r;
}

double Rng::uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

double Rng::normal(double mean, double sd) {
    return std::normal_distribution<double>(mean, sd)(engine_);
}

std::int64_t Rng::binomial(std::int64_t trials, double p) {
    return std::binomial_distribution<std::int64_t>(trials, p)(engine_);
}

}  // namespace qlan
