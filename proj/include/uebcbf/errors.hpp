// Copyright 2026 The uebcbf Authors
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

#ifndef UEBCBF_ERRORS_HPP_
#define UEBCBF_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace uebcbf {

// State or time outside the region where a model or bound is defined.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Non-finite input or intermediate value.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A backup flow left the inflated state domain; usually a horizon that is
// too long for the backup controller.
class FlowEscapeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Active-set iteration cap reached without convergence.
class SolverStalled : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnsupportedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace uebcbf

#endif  // UEBCBF_ERRORS_HPP_
