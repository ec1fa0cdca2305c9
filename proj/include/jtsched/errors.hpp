/*
 * SPDX-FileCopyrightText: Copyright (c) 2026 The jtsched Authors. All rights reserved.
 * SPDX-License-Identifier: Apache-2.0
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

namespace jtsched {

/// Base class for every error raised by the library. `kind()` is a stable
/// machine-readable tag used by the CLI error JSON.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config_error", what) {}
};

/// A channel matrix with zero Frobenius norm; carries the offending (UE, c, r).
class DegenerateChannelError : public Error {
public:
    DegenerateChannelError(int ue, int cc, int rbg, const std::string& what)
        : Error("degenerate_channel", what), ue(ue), cc(cc), rbg(rbg) {}
    int ue;
    int cc;
    int rbg;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error("domain_error", what) {}
};

class IllConditionedError : public Error {
public:
    explicit IllConditionedError(const std::string& what) : Error("ill_conditioned", what) {}
};

class InconsistentScheduleError : public Error {
public:
    explicit InconsistentScheduleError(const std::string& what)
        : Error("inconsistent_schedule", what) {}
};

class ProtocolError : public Error {
public:
    explicit ProtocolError(const std::string& what) : Error("protocol_error", what) {}
};

class GuardError : public Error {
public:
    explicit GuardError(const std::string& what) : Error("guard_refused", what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io_error", what) {}
};

}  // namespace jtsched
