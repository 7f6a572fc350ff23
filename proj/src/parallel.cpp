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

#include "qlan/parallel.hpp"

#include <omp.h>

namespace qlan {

void set_thread_count(int threads) {
    if (threads > 0) {
        omp_set_num_threads(threads);
    }
}

int thread_count() { return omp_get_max_threads(); }

}  // namespace qlan
