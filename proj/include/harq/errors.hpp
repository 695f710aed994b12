// SPDX-License-Identifier: Apache-2.0
//
// harq-outage: outage analysis for Type I HARQ over time-correlated
// Rayleigh fading channels
// Copyright (C) 2026 the harq-outage authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace harq {

/// Thrown when an evaluation would exceed its configured work budget
/// (e.g. the series term cap). Maps to exit code 3 in the CLI.
class resource_limit_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

} // namespace harq
