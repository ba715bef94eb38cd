/*
   Copyright 2026 The sparsecert Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace sparsecert {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed or inconsistent input (bad JSON, dimension mismatch in a
// problem file, unknown block index). Maps to CLI exit code 2.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(what) {}
};

// A mathematically honest failure: certification inconclusive, schedule
// exhausted, infeasible SOS system. Maps to CLI exit code 1.
class CertificationFailure : public Error {
 public:
  explicit CertificationFailure(const std::string& what) : Error(what) {}
};

}  // namespace sparsecert
