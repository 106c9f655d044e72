// Copyright 2026 The cvqkd Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace cvqkd {

/// Input violates the precondition of an operation (bad shape, unphysical
/// state, PPT state where entanglement is required, ...).
class DomainError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

/// The state is NPPT but fails the extra condition needed for security
/// against finite coherent attacks.
class NotCoherentSecurable : public DomainError {
   public:
    using DomainError::DomainError;
};

/// A numerical integration did not reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

}  // namespace cvqkd
