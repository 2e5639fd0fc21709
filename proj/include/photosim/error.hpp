/*
 * Copyright 2026 The photosim Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace photosim {

/// Root of every error thrown by the library. `code()` is the process exit
/// status the CLI maps the error to.
class Error : public std::runtime_error {
public:
    Error(const std::string& what, int code) : std::runtime_error(what), code_(code) {}
    int code() const noexcept { return code_; }

private:
    int code_;
};

// Exit codes are part of the CLI contract (see README).
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfigMissing = 3;
inline constexpr int kExitConfigSyntax = 4;
inline constexpr int kExitConfigInvalid = 5;
inline constexpr int kExitModel = 6;
inline constexpr int kExitCapacity = 7;
inline constexpr int kExitInfeasible = 8;
inline constexpr int kExitIo = 9;
inline constexpr int kExitNumerical = 10;
inline constexpr int kExitContract = 11;

/// A caller broke an operation's precondition (negative distance, zero chunk size, ...).
class ContractViolation : public Error {
public:
    explicit ContractViolation(const std::string& what) : Error("contract violation: " + what, kExitContract) {}
};

class EmptyBankError : public Error {
public:
    explicit EmptyBankError(const std::string& what) : Error("empty MR bank: " + what, kExitContract) {}
};

class ConditioningError : public Error {
public:
    explicit ConditioningError(const std::string& what) : Error("ill-conditioned crosstalk matrix: " + what, kExitNumerical) {}
};

class DivergenceError : public Error {
public:
    explicit DivergenceError(const std::string& what) : Error("naive tuning diverged: " + what, kExitNumerical) {}
};

class KindMismatchError : public Error {
public:
    explicit KindMismatchError(const std::string& what) : Error("layer kind mismatch: " + what, kExitModel) {}
};

/// Shape or lowering problem in a model description.
class LoweringError : public Error {
public:
    explicit LoweringError(const std::string& what) : Error("lowering error: " + what, kExitModel) {}
};

class CapacityError : public Error {
public:
    explicit CapacityError(const std::string& what) : Error("capacity error: " + what, kExitCapacity) {}
};

class InfeasibleError : public Error {
public:
    explicit InfeasibleError(const std::string& what) : Error("infeasible: " + what, kExitInfeasible) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("I/O error: " + what, kExitIo) {}
};

class ConfigMissingError : public Error {
public:
    explicit ConfigMissingError(const std::string& what) : Error("missing file: " + what, kExitConfigMissing) {}
};

class ConfigSyntaxError : public Error {
public:
    explicit ConfigSyntaxError(const std::string& what) : Error("malformed config: " + what, kExitConfigSyntax) {}
};

/// Parameter invariant violated; the message names the offending field path.
class ValidationError : public Error {
public:
    explicit ValidationError(const std::string& what) : Error("invalid parameter: " + what, kExitConfigInvalid) {}
};

}  // namespace photosim
