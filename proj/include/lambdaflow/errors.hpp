/*
   Copyright 2026 The lambdaflow Authors

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

namespace lambdaflow {

/// Base of every error raised by the library. The CLI maps the concrete
/// subclasses onto process exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A physical or configuration invariant was violated.
class ValidationError : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Base for failures inside a numerical integration.
class IntegrationError : public Error {
public:
    using Error::Error;
};

class NonFiniteError : public IntegrationError {
public:
    using IntegrationError::IntegrationError;
};

class StepFailure : public IntegrationError {
public:
    using IntegrationError::IntegrationError;
};

class GridTooLarge : public Error {
public:
    using Error::Error;
};

/// Two trajectories that must share a time grid do not.
class GridMismatch : public Error {
public:
    using Error::Error;
};

class BadGrid : public Error {
public:
    using Error::Error;
};

} // namespace lambdaflow
