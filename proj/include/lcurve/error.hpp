/**
 * Copyright 2026 The lcurve Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef LCURVE_ERROR_HPP
#define LCURVE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace lcurve {

enum class ErrorKind {
  kParameterDomain,     // model or argument outside its valid domain
  kInsufficientData,    // too few distinct sample sizes
  kLogDomain,           // non-positive value where a logarithm is needed
  kNonConvergence,      // iterative solver gave up
  kUndefinedReference,  // relative difference against a zero reference
  kNoRegion,            // no power-law region meets the threshold
  kResamplingImpossible,
  kNonDecreasingCurve,
  kParallelCurves,
  kCapacity,            // a class has too few images
  kBalance,             // subset size not divisible by class count
  kNoWrongLabel,
  kUnknownSubset,
  kParse,               // malformed input file
  kIo,
  kUsage,
};

std::string_view to_string(ErrorKind kind);

/// Base exception of the toolkit. The kind decides the CLI exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Raised by the nonlinear solver; carries the last iterate.
class NonConvergenceError : public Error {
 public:
  NonConvergenceError(const std::string& what, double alpha, double c, int iterations)
      : Error(ErrorKind::kNonConvergence, what),
        alpha_(alpha),
        c_(c),
        iterations_(iterations) {}

  double alpha() const noexcept { return alpha_; }
  double c() const noexcept { return c_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double alpha_;
  double c_;
  int iterations_;
};

}  // namespace lcurve

#endif  // LCURVE_ERROR_HPP
