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

#include "hyperpath/error.h"

namespace hyperpath {

std::string_view
error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::kEmptyField:
            return "EmptyField";
        case ErrorCode::kDuplicatePassageId:
            return "DuplicatePassageId";
        case ErrorCode::kEmptyHyperNode:
            return "EmptyHyperNode";
        case ErrorCode::kEmptyGraph:
            return "EmptyGraph";
        case ErrorCode::kDimensionMismatch:
            return "DimensionMismatch";
        case ErrorCode::kZeroVector:
            return "ZeroVector";
        case ErrorCode::kEncoderFailure:
            return "EncoderFailure";
        case ErrorCode::kMissingPassageEmbeddings:
            return "MissingPassageEmbeddings";
        case ErrorCode::kParseError:
            return "ParseError";
        case ErrorCode::kDuplicateId:
            return "DuplicateId";
        case ErrorCode::kMissingTriples:
            return "MissingTriples";
        case ErrorCode::kServiceUnreachable:
            return "ServiceUnreachable";
        case ErrorCode::kVersionMismatch:
            return "VersionMismatch";
        case ErrorCode::kCorruptFile:
            return "CorruptFile";
        case ErrorCode::kIoError:
            return "IoError";
        case ErrorCode::kInvalidParams:
            return "InvalidParams";
        case ErrorCode::kConfigError:
            return "ConfigError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code), line_(line) {
}

}  // namespace hyperpath
