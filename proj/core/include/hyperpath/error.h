// Copyright 2026-present the hyperpath project
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

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hyperpath {

enum class ErrorCode {
    kEmptyField,
    kDuplicatePassageId,
    kEmptyHyperNode,
    kEmptyGraph,
    kDimensionMismatch,
    kZeroVector,
    kEncoderFailure,
    kMissingPassageEmbeddings,
    kParseError,
    kDuplicateId,
    kMissingTriples,
    kServiceUnreachable,
    kVersionMismatch,
    kCorruptFile,
    kIoError,
    kInvalidParams,
    kConfigError,
};

std::string_view
error_code_name(ErrorCode code);

/// Every failure raised by the library. `code()` identifies the failure kind;
/// `line()` is set for parse errors that can point at an input line.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line = std::nullopt);

    ErrorCode
    code() const noexcept {
        return code_;
    }

    std::optional<std::size_t>
    line() const noexcept {
        return line_;
    }

private:
    ErrorCode code_;
    std::optional<std::size_t> line_;
};

}  // namespace hyperpath
