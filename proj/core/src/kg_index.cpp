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

#include "hyperpath/kg_index.h"

#include <fmt/format.h>

#include <algorithm>

#include "hyperpath/error.h"

namespace hyperpath {

KnowledgeGraph
KnowledgeGraph::build(std::vector<Passage> passages) {
    KnowledgeGraph g;
    std::sort(passages.begin(), passages.end(), [](const Passage& a, const Passage& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < passages.size(); ++i) {
        if (passages[i].id == passages[i - 1].id) {
            throw Error(ErrorCode::kDuplicatePassageId, fmt::format("passage id \"{}\" appears twice", passages[i].id));
        }
    }
    g.passages_ = std::move(passages);
    g.passage_lookup_.reserve(g.passages_.size());
    for (PassageIndex i = 0; i < g.passages_.size(); ++i) {
        g.passage_lookup_.emplace(g.passages_[i].id, i);
    }

    // |T_p| counts unique triplets of p.
    std::vector<std::vector<Triplet>> unique_per_passage(g.passages_.size());
    for (std::size_t i = 0; i < g.passages_.size(); ++i) {
        auto& unique = unique_per_passage[i];
        unique = g.passages_[i].triplets;
        std::sort(unique.begin(), unique.end());
        unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
        g.catalog_.insert(g.catalog_.end(), unique.begin(), unique.end());
    }
    std::sort(g.catalog_.begin(), g.catalog_.end());
    g.catalog_.erase(std::unique(g.catalog_.begin(), g.catalog_.end()), g.catalog_.end());

    g.provenance_.resize(g.catalog_.size());
    for (PassageIndex i = 0; i < unique_per_passage.size(); ++i) {
        const auto& unique = unique_per_passage[i];
        auto count = static_cast<std::uint32_t>(unique.size());
        for (const auto& t : unique) {
            auto id = *g.find_triplet(t);
            g.provenance_[id].push_back(ProvenanceEntry{i, count});
        }
    }

    for (const auto& t : g.catalog_) {
        g.entity_names_.push_back(t.head);
        g.entity_names_.push_back(t.tail);
    }
    std::sort(g.entity_names_.begin(), g.entity_names_.end());
    g.entity_names_.erase(std::unique(g.entity_names_.begin(), g.entity_names_.end()), g.entity_names_.end());
    g.entity_lookup_.reserve(g.entity_names_.size());
    for (EntityId e = 0; e < g.entity_names_.size(); ++e) {
        g.entity_lookup_.emplace(g.entity_names_[e], e);
    }

    g.adjacency_.resize(g.entity_names_.size());
    g.triplet_entities_.reserve(g.catalog_.size());
    for (TripletId id = 0; id < g.catalog_.size(); ++id) {
        EntityId head = g.entity_lookup_.at(g.catalog_[id].head);
        EntityId tail = g.entity_lookup_.at(g.catalog_[id].tail);
        g.triplet_entities_.push_back({head, tail});
        g.adjacency_[head].push_back(id);
        if (tail != head) {
            g.adjacency_[tail].push_back(id);
        }
    }
    return g;
}

std::optional<PassageIndex>
KnowledgeGraph::find_passage(std::string_view id) const {
    auto it = passage_lookup_.find(std::string(id));
    if (it == passage_lookup_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::optional<TripletId>
KnowledgeGraph::find_triplet(const Triplet& triplet) const {
    auto it = std::lower_bound(catalog_.begin(), catalog_.end(), triplet);
    if (it == catalog_.end() || *it != triplet) {
        return std::nullopt;
    }
    return static_cast<TripletId>(it - catalog_.begin());
}

std::vector<PassageWeight>
KnowledgeGraph::provenance_of(const Triplet& triplet) const {
    std::vector<PassageWeight> out;
    if (auto id = find_triplet(triplet)) {
        for (const auto& entry : provenance_[*id]) {
            out.push_back(PassageWeight{passages_[entry.passage].id, entry.weight()});
        }
    }
    return out;
}

std::optional<EntityId>
KnowledgeGraph::find_entity(std::string_view name) const {
    auto it = entity_lookup_.find(std::string(name));
    if (it == entity_lookup_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::vector<TripletId>
KnowledgeGraph::adjacent_ids(std::span<const EntityId> entities) const {
    std::vector<TripletId> out;
    for (EntityId e : entities) {
        const auto& adj = adjacency_.at(e);
        out.insert(out.end(), adj.begin(), adj.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<Triplet>
KnowledgeGraph::adjacent_triplets(const std::set<std::string, std::less<>>& entities) const {
    std::vector<EntityId> ids;
    for (const auto& name : entities) {
        if (auto id = find_entity(name)) {
            ids.push_back(*id);
        }
    }
    std::vector<Triplet> out;
    for (TripletId id : adjacent_ids(ids)) {
        out.push_back(catalog_[id]);
    }
    return out;
}

void
KnowledgeGraph::attach_embeddings(std::string encoder_id,
                                  std::vector<UnitVector> passage_vectors,
                                  std::vector<UnitVector> triplet_vectors) {
    if (encoder_id.empty()) {
        throw Error(ErrorCode::kInvalidParams, "encoder id must not be empty");
    }
    if (passage_vectors.size() != passages_.size() || triplet_vectors.size() != catalog_.size()) {
        throw Error(ErrorCode::kInvalidParams,
                    fmt::format("expected {} passage and {} triplet vectors, got {} and {}", passages_.size(),
                                catalog_.size(), passage_vectors.size(), triplet_vectors.size()));
    }
    std::optional<std::size_t> dim;
    for (const auto* rows : {&passage_vectors, &triplet_vectors}) {
        for (const auto& v : *rows) {
            if (!dim) {
                dim = v.dimension();
            } else if (*dim != v.dimension()) {
                throw Error(ErrorCode::kDimensionMismatch, "embeddings have mixed dimensions");
            }
        }
    }
    encoder_id_ = std::move(encoder_id);
    passage_vectors_ = std::move(passage_vectors);
    triplet_vectors_ = std::move(triplet_vectors);
}

std::size_t
KnowledgeGraph::embedding_dimension() const noexcept {
    if (!passage_vectors_.empty()) {
        return passage_vectors_.front().dimension();
    }
    if (!triplet_vectors_.empty()) {
        return triplet_vectors_.front().dimension();
    }
    return 0;
}

bool
KnowledgeGraph::operator==(const KnowledgeGraph& other) const {
    return passages_ == other.passages_ && catalog_ == other.catalog_ && provenance_ == other.provenance_ &&
           entity_names_ == other.entity_names_ && triplet_entities_ == other.triplet_entities_ &&
           adjacency_ == other.adjacency_ && encoder_id_ == other.encoder_id_ &&
           passage_vectors_ == other.passage_vectors_ && triplet_vectors_ == other.triplet_vectors_;
}

}  // namespace hyperpath
