// Copyright 2026 The D2P-Fed Authors.
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

#ifndef D2PFED_ERRORS_H_
#define D2PFED_ERRORS_H_

#include <stdexcept>
#include <string>

namespace d2pfed {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A real value handed to the lattice codec is not a multiple of the step.
class OffLattice : public Error {
 public:
  using Error::Error;
};

// The discrete Gaussian rejection loop exceeded its iteration cap.
class SamplerStall : public Error {
 public:
  using Error::Error;
};

// A bound was requested outside the parameter range where it holds.
class HypothesisViolated : public Error {
 public:
  using Error::Error;
};

// A recovered aggregate coordinate exceeds the plaintext bound, which means
// the modular sum wrapped.
class OverflowSuspected : public Error {
 public:
  using Error::Error;
};

// Bad or missing experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace d2pfed

#endif  // D2PFED_ERRORS_H_
