// SPDX-License-Identifier: Apache-2.0
//
// beamlab: two-user millimeter-wave beam-alignment simulator and optimizer
// Copyright (C) 2026 The beamlab authors
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

#ifndef BEAMLAB_ERRORS_HPP
#define BEAMLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace beamlab {

/// Invalid scenario, grid or command-line configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The requested rates cannot be delivered in the available air time.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Belief state became inconsistent with error-free feedback (harness bug).
class InconsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace beamlab

#endif  // BEAMLAB_ERRORS_HPP
