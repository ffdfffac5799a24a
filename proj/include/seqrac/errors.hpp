// Copyright 2026 The seqrac Authors
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

namespace seqrac {

/// An argument lies outside the range where a formula is physically meaningful.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// Malformed or incomplete input data (count tables, settings tables).
struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A numerical cross-check between two independent routes disagreed.
struct VerificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace seqrac
