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
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyperpath/triplet.h"

namespace hyperpath {

/// An L2-normalized embedding.
///
/// Every vector has a float32 stored form (what index files persist) and a
/// double working form obtained by renormalizing the stored form. Building a
/// vector from raw values and building it from its own stored form yield
/// bit-identical objects, so freshly encoded vectors and vectors loaded from
/// disk compare equal.
class UnitVector {
public:
    UnitVector() = default;

    /// Throws Error(kZeroVector) when the input has zero norm.
    static UnitVector
    from_raw(std::span<const double> raw);

    static UnitVector
    from_stored(std::span<const float> stored);

    std::size_t
    dimension() const noexcept {
        return values_.size();
    }

    std::span<const double>
    values() const noexcept {
        return values_;
    }

    std::span<const float>
    stored() const noexcept {
        return stored_;
    }

    bool
    operator==(const UnitVector&) const = default;

private:
    std::vector<float> stored_;
    std::vector<double> values_;
};

/// Euclidean distance. Throws Error(kDimensionMismatch).
double
distance(const UnitVector& a, const UnitVector& b);

/// Dot product of two unit vectors. Throws Error(kDimensionMismatch).
double
cosine(const UnitVector& a, const UnitVector& b);

/// Canonical text form of a triplet set: triplets sorted by (head, relation,
/// tail), each rendered as "head relation tail", joined by "; ". Duplicate
/// triplets collapse. Throws Error(kEmptyHyperNode) on an empty set.
std::string
serialize_hypernode(std::span<const Triplet> triplets);

class Encoder {
public:
    virtual ~Encoder() = default;

    virtual std::size_t
    dimension() const = 0;

    /// Stable identifier recorded in index manifests.
    virtual std::string
    id() const = 0;

    /// One unit vector per text, order-preserving. Empty texts are rejected
    /// with kInvalidParams, zero raw embeddings with kZeroVector and backend
    /// problems with kEncoderFailure.
    std::vector<UnitVector>
    encode(std::span<const std::string> texts) const;

    UnitVector
    encode_one(std::string_view text) const;

protected:
    virtual std::vector<std::vector<double>>
    embed(std::span<const std::string> texts) const = 0;
};

/// Character 3-gram feature hashing (FNV-1a 64) into a fixed number of
/// signed buckets. Text is canonicalized first and padded with one space on
/// each side.
class HashEncoder final : public Encoder {
public:
    static constexpr std::size_t kDefaultDimension = 256;

    explicit HashEncoder(std::size_t dimension = kDefaultDimension);

    std::size_t
    dimension() const override {
        return dimension_;
    }

    std::string
    id() const override;

protected:
    std::vector<std::vector<double>>
    embed(std::span<const std::string> texts) const override;

private:
    std::size_t dimension_;
};

std::uint64_t
fnv1a64(std::string_view bytes) noexcept;

using EmbeddingTable = std::map<std::string, std::vector<double>, std::less<>>;

/// Fixture-driven encoder backed by an explicit text -> vector table.
///
/// A text missing from the table is split on "; " and, if every segment is
/// present, embedded as the sum of the segments' unit vectors. Anything else
/// fails with kEncoderFailure.
class OracleEncoder final : public Encoder {
public:
    OracleEncoder(std::size_t dimension, EmbeddingTable table);

    /// JSON document {"dimension": D, "vectors": {"text": [..], ...}}.
    static OracleEncoder
    from_file(const std::filesystem::path& path);

    std::size_t
    dimension() const override {
        return dimension_;
    }

    std::string
    id() const override;

    const EmbeddingTable&
    table() const noexcept {
        return table_;
    }

protected:
    std::vector<std::vector<double>>
    embed(std::span<const std::string> texts) const override;

private:
    std::size_t dimension_;
    EmbeddingTable table_;
    std::string id_;
};

void
save_embedding_table(const std::filesystem::path& path, std::size_t dimension, const EmbeddingTable& table);

}  // namespace hyperpath
