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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hyperpath/encoding.h"
#include "hyperpath/triplet.h"

namespace hyperpath {

using TripletId = std::uint32_t;
using EntityId = std::uint32_t;
using PassageIndex = std::uint32_t;

/// One provenance link. The weight is 1 / triplet_count, where triplet_count
/// is the number of unique triplets of the passage; keeping the denominator
/// makes the weight law checkable exactly.
struct ProvenanceEntry {
    PassageIndex passage;
    std::uint32_t triplet_count;

    double
    weight() const noexcept {
        return 1.0 / static_cast<double>(triplet_count);
    }

    bool
    operator==(const ProvenanceEntry&) const = default;
};

struct PassageWeight {
    std::string passage_id;
    double weight;

    bool
    operator==(const PassageWeight&) const = default;
};

/// Passages plus the triplet-to-passage provenance index and undirected
/// entity adjacency. Immutable after construction apart from attaching
/// embeddings; safe to share across threads for reads.
///
/// Passages are kept sorted by id and the triplet catalog sorted
/// lexicographically, so the same passage set always yields the same graph
/// regardless of input order.
class KnowledgeGraph {
public:
    KnowledgeGraph() = default;

    /// Throws Error(kDuplicatePassageId).
    static KnowledgeGraph
    build(std::vector<Passage> passages);

    const std::vector<Passage>&
    passages() const noexcept {
        return passages_;
    }

    std::optional<PassageIndex>
    find_passage(std::string_view id) const;

    std::span<const Triplet>
    triplets() const noexcept {
        return catalog_;
    }

    std::optional<TripletId>
    find_triplet(const Triplet& triplet) const;

    std::span<const ProvenanceEntry>
    provenance(TripletId id) const {
        return provenance_.at(id);
    }

    /// Empty when the triplet is unknown.
    std::vector<PassageWeight>
    provenance_of(const Triplet& triplet) const;

    std::size_t
    entity_count() const noexcept {
        return entity_names_.size();
    }

    std::optional<EntityId>
    find_entity(std::string_view name) const;

    const std::string&
    entity_name(EntityId id) const {
        return entity_names_.at(id);
    }

    /// Head and tail entity of a triplet (equal for self loops).
    const std::array<EntityId, 2>&
    triplet_entities(TripletId id) const {
        return triplet_entities_.at(id);
    }

    /// Sorted ids of triplets whose head or tail is the entity.
    std::span<const TripletId>
    adjacency(EntityId id) const {
        return adjacency_.at(id);
    }

    /// Sorted, duplicate-free union of adjacency over the entities.
    std::vector<TripletId>
    adjacent_ids(std::span<const EntityId> entities) const;

    std::vector<Triplet>
    adjacent_triplets(const std::set<std::string, std::less<>>& entities) const;

    /// Passage vectors follow passages() order, triplet vectors follow the
    /// catalog order. Throws kInvalidParams on count mismatch and
    /// kDimensionMismatch on mixed dimensions.
    void
    attach_embeddings(std::string encoder_id,
                      std::vector<UnitVector> passage_vectors,
                      std::vector<UnitVector> triplet_vectors);

    bool
    has_embeddings() const noexcept {
        return !encoder_id_.empty();
    }

    const std::string&
    encoder_id() const noexcept {
        return encoder_id_;
    }

    std::size_t
    embedding_dimension() const noexcept;

    std::span<const UnitVector>
    passage_embeddings() const noexcept {
        return passage_vectors_;
    }

    std::span<const UnitVector>
    triplet_embeddings() const noexcept {
        return triplet_vectors_;
    }

    bool
    operator==(const KnowledgeGraph& other) const;

private:
    std::vector<Passage> passages_;
    std::unordered_map<std::string, PassageIndex> passage_lookup_;
    std::vector<Triplet> catalog_;
    std::vector<std::vector<ProvenanceEntry>> provenance_;
    std::vector<std::string> entity_names_;
    std::unordered_map<std::string, EntityId> entity_lookup_;
    std::vector<std::array<EntityId, 2>> triplet_entities_;
    std::vector<std::vector<TripletId>> adjacency_;

    std::string encoder_id_;
    std::vector<UnitVector> passage_vectors_;
    std::vector<UnitVector> triplet_vectors_;
};

/// Free-function spelling of KnowledgeGraph::build.
inline KnowledgeGraph
build_index(std::vector<Passage> passages) {
    return KnowledgeGraph::build(std::move(passages));
}

}  // namespace hyperpath
