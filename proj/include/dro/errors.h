/*
 * Copyright 2026 The hwsdro Authors.
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

#ifndef DRO_ERRORS_H_
#define DRO_ERRORS_H_

#include <stdexcept>
#include <string>

namespace dro {

// Base of every error raised by the library. The CLI maps the subclasses
// onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid input: wrong length, out of range index, bad label, bad config.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A value outside the mathematical domain of an operation, e.g. a KL
// divergence whose support condition fails.
class DomainError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

// Non-finite intermediate values or training divergence.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Root finding or bracketing failed to terminate within its budget.
class ConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Checkpoint load failures. Each has its own type so callers can tell a
// stale file from a damaged one.
class CheckpointError : public IoError {
 public:
  using IoError::IoError;
};

class CheckpointFormatError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class CheckpointVersionError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class CheckpointTruncatedError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class CheckpointChecksumError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

}  // namespace dro

#endif  // DRO_ERRORS_H_
