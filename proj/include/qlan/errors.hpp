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

#include <stdexcept>
#include <string>

namespace qlan {

// Raised when an input violates a documented precondition. The CLI maps it to exit code 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Raised when a computation cannot be completed with the requested resources.
class ComputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The estimated state left the model (for example mu_u outside (1/2, 1)).
class OutsideModelError : public ComputationError {
public:
    using ComputationError::ComputationError;
};

}  // namespace qlan
