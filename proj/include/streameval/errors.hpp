/*
 * Copyright 2026 The StreamEval Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef STREAMEVAL_ERRORS_HPP_
#define STREAMEVAL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace streameval {

// Root of every error the library throws. The CLI maps UsageError to exit
// code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value lies outside the domain of an operation (non-finite score, label
// outside {0,1}, fpr_limit outside (0,1], metric outside [0,1]).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Two histograms built over different threshold grids were combined.
class IncompatibleSpecError : public Error {
 public:
  using Error::Error;
};

// A metric is not defined for the accumulated data, e.g. no positives.
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

// Arrays that must share a shape do not.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Dataset content violates the expected layout or labeling rules.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A file could not be opened, read, parsed or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Bad command line or unknown option value.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace streameval

#endif  // STREAMEVAL_ERRORS_HPP_
