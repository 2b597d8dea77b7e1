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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyperpath/encoding.h"
#include "hyperpath/kg_index.h"

namespace hyperpath {

struct ExpansionConfig {
    std::size_t hops = 2;    // expansion hops N
    std::size_t seeds = 3;   // seed triplets n
    std::size_t beam = 50;   // beam width k

    /// Throws Error(kInvalidParams) if any field is zero.
    void
    validate() const;

    bool
    operator==(const ExpansionConfig&) const = default;
};

/// A connected set of triplets treated as one retrieval unit.
class HyperNode {
public:
    /// Sorts and deduplicates the ids, caches the entity set and the
    /// canonical serialization.
    HyperNode(const KnowledgeGraph& graph, std::vector<TripletId> triplet_ids);

    std::span<const TripletId>
    triplet_ids() const noexcept {
        return triplet_ids_;
    }

    std::size_t
    size() const noexcept {
        return triplet_ids_.size();
    }

    std::vector<Triplet>
    triplets(const KnowledgeGraph& graph) const;

    /// Sorted entity ids covering every head and tail.
    std::span<const EntityId>
    entities() const noexcept {
        return entities_;
    }

    bool
    contains(TripletId id) const;

    const std::string&
    serialization() const noexcept {
        return serialization_;
    }

    bool
    has_embedding() const noexcept {
        return embedding_.has_value();
    }

    const UnitVector&
    embedding() const;

    /// Euclidean distance to the query the embedding was scored against.
    double
    query_distance() const noexcept {
        return query_distance_;
    }

    void
    set_embedding(UnitVector embedding, const UnitVector& query);

private:
    std::vector<TripletId> triplet_ids_;
    std::vector<EntityId> entities_;
    std::string serialization_;
    std::optional<UnitVector> embedding_;
    double query_distance_ = 0.0;
};

/// Ascending distance, then serialization, then triplet ids.
bool
closer_to_query(const HyperNode& a, const HyperNode& b);

/// Singleton hypernodes for the n catalog triplets most cosine-similar to the
/// query; ties go to the smaller serialization. Uses the graph's triplet
/// embeddings when attached, otherwise encodes the catalog. Throws
/// Error(kEmptyGraph) when the catalog is empty.
std::vector<HyperNode>
select_seeds(const KnowledgeGraph& graph, const Encoder& encoder, const UnitVector& query, std::size_t n);

/// One-triplet extensions of every beam member through entity adjacency,
/// deduplicated by triplet set in generation order. A member with no new
/// adjacent triplet is carried forward as is. Candidates have no embedding
/// unless carried forward.
std::vector<HyperNode>
expand_candidates(const KnowledgeGraph& graph, std::span<const HyperNode> beam);

/// Embeds candidates lacking an embedding (one batch) and keeps the k closest.
std::vector<HyperNode>
prune(std::vector<HyperNode> candidates, const Encoder& encoder, const UnitVector& query, std::size_t k);

/// Seeds, then hops-1 rounds of expand + prune. Returns the empty list for a
/// graph without triplets.
std::vector<HyperNode>
run_expansion(const KnowledgeGraph& graph,
              const Encoder& encoder,
              const UnitVector& query,
              const ExpansionConfig& config);

std::vector<HyperNode>
run_expansion(const KnowledgeGraph& graph,
              const Encoder& encoder,
              std::string_view query,
              const ExpansionConfig& config);

}  // namespace hyperpath
