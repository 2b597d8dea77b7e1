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

#include "hyperpath/triplet.h"

#include <fmt/format.h>

#include "hyperpath/error.h"

namespace hyperpath {

namespace {

bool
is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace

std::string
canonicalize_text(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (char ch : raw) {
        auto c = static_cast<unsigned char>(ch);
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<unsigned char>(c - 'A' + 'a');
        }
        out.push_back(static_cast<char>(c));
    }
    return out;
}

Triplet
canonicalize_triplet(std::string_view raw_head, std::string_view raw_relation, std::string_view raw_tail) {
    Triplet t{canonicalize_text(raw_head), canonicalize_text(raw_relation), canonicalize_text(raw_tail)};
    if (t.head.empty() || t.relation.empty() || t.tail.empty()) {
        throw Error(ErrorCode::kEmptyField,
                    fmt::format("triplet (\"{}\", \"{}\", \"{}\") has an empty field", raw_head, raw_relation, raw_tail));
    }
    return t;
}

std::string
render_triplet(const Triplet& triplet) {
    std::string out;
    out.reserve(triplet.head.size() + triplet.relation.size() + triplet.tail.size() + 2);
    out.append(triplet.head).append(" ").append(triplet.relation).append(" ").append(triplet.tail);
    return out;
}

std::size_t
TripletHash::operator()(const Triplet& triplet) const noexcept {
    std::hash<std::string> h;
    std::size_t seed = h(triplet.head);
    seed ^= h(triplet.relation) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    seed ^= h(triplet.tail) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
    return seed;
}

}  // namespace hyperpath
