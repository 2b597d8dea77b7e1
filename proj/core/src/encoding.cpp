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

#include "hyperpath/encoding.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hyperpath/error.h"
#include "json.hpp"

namespace hyperpath {

namespace {

void
check_dimensions(const UnitVector& a, const UnitVector& b) {
    if (a.dimension() != b.dimension()) {
        throw Error(ErrorCode::kDimensionMismatch,
                    fmt::format("vector dimensions differ: {} vs {}", a.dimension(), b.dimension()));
    }
}

constexpr std::string_view kSegmentDelimiter = "; ";

std::vector<std::string_view>
split_segments(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = text.find(kSegmentDelimiter, start);
        if (pos == std::string_view::npos) {
            out.push_back(text.substr(start));
            return out;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + kSegmentDelimiter.size();
    }
}

}  // namespace

UnitVector
UnitVector::from_raw(std::span<const double> raw) {
    double sum = 0.0;
    for (double x : raw) {
        sum += x * x;
    }
    double norm = std::sqrt(sum);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw Error(ErrorCode::kZeroVector, "embedding has zero or non-finite norm");
    }
    std::vector<float> stored(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        stored[i] = static_cast<float>(raw[i] / norm);
    }
    return from_stored(stored);
}

UnitVector
UnitVector::from_stored(std::span<const float> stored) {
    double sum = 0.0;
    for (float x : stored) {
        sum += static_cast<double>(x) * static_cast<double>(x);
    }
    double norm = std::sqrt(sum);
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw Error(ErrorCode::kZeroVector, "stored embedding has zero or non-finite norm");
    }
    UnitVector v;
    v.stored_.assign(stored.begin(), stored.end());
    v.values_.resize(stored.size());
    for (std::size_t i = 0; i < stored.size(); ++i) {
        v.values_[i] = static_cast<double>(stored[i]) / norm;
    }
    return v;
}

double
distance(const UnitVector& a, const UnitVector& b) {
    check_dimensions(a, b);
    auto x = a.values();
    auto y = b.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double d = x[i] - y[i];
        sum += d * d;
    }
    return std::sqrt(sum);
}

double
cosine(const UnitVector& a, const UnitVector& b) {
    check_dimensions(a, b);
    auto x = a.values();
    auto y = b.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum += x[i] * y[i];
    }
    return sum;
}

std::string
serialize_hypernode(std::span<const Triplet> triplets) {
    if (triplets.empty()) {
        throw Error(ErrorCode::kEmptyHyperNode, "cannot serialize an empty hypernode");
    }
    std::vector<const Triplet*> sorted;
    sorted.reserve(triplets.size());
    for (const auto& t : triplets) {
        sorted.push_back(&t);
    }
    std::sort(sorted.begin(), sorted.end(), [](const Triplet* a, const Triplet* b) { return *a < *b; });
    sorted.erase(std::unique(sorted.begin(), sorted.end(), [](const Triplet* a, const Triplet* b) { return *a == *b; }),
                 sorted.end());
    std::string out;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0) {
            out.append(kSegmentDelimiter);
        }
        out.append(render_triplet(*sorted[i]));
    }
    return out;
}

std::vector<UnitVector>
Encoder::encode(std::span<const std::string> texts) const {
    for (const auto& text : texts) {
        if (text.empty()) {
            throw Error(ErrorCode::kInvalidParams, "cannot encode an empty text");
        }
    }
    if (texts.empty()) {
        return {};
    }
    auto raw = embed(texts);
    if (raw.size() != texts.size()) {
        throw Error(ErrorCode::kEncoderFailure,
                    fmt::format("encoder returned {} vectors for {} texts", raw.size(), texts.size()));
    }
    std::vector<UnitVector> out;
    out.reserve(raw.size());
    for (const auto& row : raw) {
        if (row.size() != dimension()) {
            throw Error(ErrorCode::kEncoderFailure,
                        fmt::format("encoder returned dimension {}, expected {}", row.size(), dimension()));
        }
        out.push_back(UnitVector::from_raw(row));
    }
    return out;
}

UnitVector
Encoder::encode_one(std::string_view text) const {
    std::string owned(text);
    return std::move(encode(std::span<const std::string>(&owned, 1)).front());
}

std::uint64_t
fnv1a64(std::string_view bytes) noexcept {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (char c : bytes) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

HashEncoder::HashEncoder(std::size_t dimension) : dimension_(dimension) {
    if (dimension_ == 0) {
        throw Error(ErrorCode::kInvalidParams, "hash encoder dimension must be positive");
    }
}

std::string
HashEncoder::id() const {
    return fmt::format("hash-3gram-fnv1a64-d{}", dimension_);
}

std::vector<std::vector<double>>
HashEncoder::embed(std::span<const std::string> texts) const {
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        std::string padded = " " + canonicalize_text(text) + " ";
        std::vector<double> v(dimension_, 0.0);
        std::string_view view(padded);
        for (std::size_t i = 0; i + 3 <= view.size(); ++i) {
            std::uint64_t h = fnv1a64(view.substr(i, 3));
            v[h % dimension_] += (h >> 63) ? -1.0 : 1.0;
        }
        out.push_back(std::move(v));
    }
    return out;
}

OracleEncoder::OracleEncoder(std::size_t dimension, EmbeddingTable table)
    : dimension_(dimension), table_(std::move(table)) {
    if (dimension_ == 0) {
        throw Error(ErrorCode::kInvalidParams, "oracle encoder dimension must be positive");
    }
    std::string digest_input;
    for (const auto& [text, values] : table_) {
        if (values.size() != dimension_) {
            throw Error(ErrorCode::kDimensionMismatch,
                        fmt::format("oracle vector for \"{}\" has dimension {}, expected {}", text,
                                    values.size(), dimension_));
        }
        digest_input.append(text).push_back('\0');
        for (double x : values) {
            digest_input.append(fmt::format("{}", x)).push_back(',');
        }
    }
    id_ = fmt::format("oracle-d{}-{:016x}", dimension_, fnv1a64(digest_input));
}

OracleEncoder
OracleEncoder::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::kIoError, fmt::format("cannot open oracle table {}", path.string()));
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
        auto dimension = doc.at("dimension").get<std::size_t>();
        EmbeddingTable table;
        for (const auto& [text, values] : doc.at("vectors").items()) {
            table.emplace(text, values.get<std::vector<double>>());
        }
        return OracleEncoder(dimension, std::move(table));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::kParseError, fmt::format("oracle table {}: {}", path.string(), e.what()));
    }
}

std::string
OracleEncoder::id() const {
    return id_;
}

std::vector<std::vector<double>>
OracleEncoder::embed(std::span<const std::string> texts) const {
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());
    for (const auto& text : texts) {
        if (auto it = table_.find(text); it != table_.end()) {
            out.push_back(it->second);
            continue;
        }
        std::vector<double> sum(dimension_, 0.0);
        auto segments = split_segments(text);
        for (auto segment : segments) {
            auto it = table_.find(segment);
            if (segments.size() == 1 || it == table_.end()) {
                throw Error(ErrorCode::kEncoderFailure, fmt::format("oracle table has no entry for \"{}\"", text));
            }
            auto unit = UnitVector::from_raw(it->second);
            for (std::size_t i = 0; i < dimension_; ++i) {
                sum[i] += unit.values()[i];
            }
        }
        out.push_back(std::move(sum));
    }
    return out;
}

void
save_embedding_table(const std::filesystem::path& path, std::size_t dimension, const EmbeddingTable& table) {
    nlohmann::ordered_json doc;
    doc["dimension"] = dimension;
    auto& vectors = doc["vectors"];
    vectors = nlohmann::ordered_json::object();
    for (const auto& [text, values] : table) {
        vectors[text] = values;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::kIoError, fmt::format("cannot write oracle table {}", path.string()));
    }
    out << doc.dump() << '\n';
}

}  // namespace hyperpath
