// Copyright 2026 The qtopo Authors
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

namespace qtopo {

/// Bad user input: malformed configs, out-of-range parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A size guard was exceeded (qubit count, enumeration size, degree cap).
class GuardViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative search ran out of budget. Carries whatever was found so far.
class BudgetExhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal precondition broken by the caller.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

#define QTOPO_REQUIRE(cond, kind, msg) \
  do {                                 \
    if (!(cond)) throw kind(msg);      \
  } while (0)

}  // namespace qtopo
