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

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace hyperpath {

/// A canonical (head, relation, tail) fact. Ordering is byte-lexicographic on
/// head, then relation, then tail.
struct Triplet {
    std::string head;
    std::string relation;
    std::string tail;

    auto
    operator<=>(const Triplet&) const = default;
    bool
    operator==(const Triplet&) const = default;
};

/// Trims, collapses internal whitespace runs to one space and lowercases
/// ASCII letters. Bytes >= 0x80 pass through unchanged.
std::string
canonicalize_text(std::string_view raw);

/// Throws Error(kEmptyField) if any field is empty after canonicalization.
Triplet
canonicalize_triplet(std::string_view raw_head, std::string_view raw_relation, std::string_view raw_tail);

/// "head relation tail"
std::string
render_triplet(const Triplet& triplet);

struct Passage {
    std::string id;
    std::string text;
    std::vector<Triplet> triplets;

    bool
    operator==(const Passage&) const = default;
};

struct TripletHash {
    std::size_t
    operator()(const Triplet& triplet) const noexcept;
};

}  // namespace hyperpath
