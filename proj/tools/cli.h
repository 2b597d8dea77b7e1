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

#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>

#include "hyperpath/encoding.h"

namespace hyperpath::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitService = 3;

/// Builds an encoder from "hash", "hash:<dim>", "oracle:<table.json>" or
/// "remote" (configured through HELP_EMBED_URL / _MODEL / _KEY).
std::unique_ptr<Encoder>
make_encoder(std::string_view spec, std::size_t remote_dimension = 0);

/// Entry point shared by the executable and the tests. Returns the process
/// exit code: 0 success, 2 configuration or input error, 3 external service
/// error.
int
run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hyperpath::cli
