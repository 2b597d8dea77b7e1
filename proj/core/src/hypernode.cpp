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

#include "hyperpath/hypernode.h"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>
#include <unordered_set>

#include "hyperpath/error.h"

namespace hyperpath {

namespace {

struct IdSetHash {
    std::size_t
    operator()(const std::vector<TripletId>& ids) const noexcept {
        std::size_t seed = ids.size();
        for (TripletId id : ids) {
            seed ^= id + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
        }
        return seed;
    }
};

std::span<const UnitVector>
catalog_vectors(const KnowledgeGraph& graph, const Encoder& encoder, std::vector<UnitVector>& scratch) {
    if (graph.has_embeddings()) {
        if (graph.encoder_id() != encoder.id()) {
            throw Error(ErrorCode::kConfigError,
                        fmt::format("index was embedded with \"{}\" but the session encoder is \"{}\"",
                                    graph.encoder_id(), encoder.id()));
        }
        return graph.triplet_embeddings();
    }
    std::vector<std::string> texts;
    texts.reserve(graph.triplets().size());
    for (const auto& t : graph.triplets()) {
        texts.push_back(render_triplet(t));
    }
    scratch = encoder.encode(texts);
    return scratch;
}

}  // namespace

void
ExpansionConfig::validate() const {
    if (hops == 0 || seeds == 0 || beam == 0) {
        throw Error(ErrorCode::kInvalidParams,
                    fmt::format("expansion hops, seeds and beam must be >= 1 (got {}, {}, {})", hops, seeds, beam));
    }
}

HyperNode::HyperNode(const KnowledgeGraph& graph, std::vector<TripletId> triplet_ids)
    : triplet_ids_(std::move(triplet_ids)) {
    if (triplet_ids_.empty()) {
        throw Error(ErrorCode::kEmptyHyperNode, "a hypernode needs at least one triplet");
    }
    std::sort(triplet_ids_.begin(), triplet_ids_.end());
    triplet_ids_.erase(std::unique(triplet_ids_.begin(), triplet_ids_.end()), triplet_ids_.end());
    auto catalog = graph.triplets();
    for (std::size_t i = 0; i < triplet_ids_.size(); ++i) {
        TripletId id = triplet_ids_[i];
        const auto& ends = graph.triplet_entities(id);
        entities_.push_back(ends[0]);
        entities_.push_back(ends[1]);
        // Catalog order is lexicographic, so sorted ids already give the
        // canonical serialization order.
        if (i > 0) {
            serialization_.append("; ");
        }
        serialization_.append(render_triplet(catalog[id]));
    }
    std::sort(entities_.begin(), entities_.end());
    entities_.erase(std::unique(entities_.begin(), entities_.end()), entities_.end());
}

std::vector<Triplet>
HyperNode::triplets(const KnowledgeGraph& graph) const {
    std::vector<Triplet> out;
    out.reserve(triplet_ids_.size());
    for (TripletId id : triplet_ids_) {
        out.push_back(graph.triplets()[id]);
    }
    return out;
}

bool
HyperNode::contains(TripletId id) const {
    return std::binary_search(triplet_ids_.begin(), triplet_ids_.end(), id);
}

const UnitVector&
HyperNode::embedding() const {
    if (!embedding_) {
        throw Error(ErrorCode::kInvalidParams, fmt::format("hypernode \"{}\" has no embedding yet", serialization_));
    }
    return *embedding_;
}

void
HyperNode::set_embedding(UnitVector embedding, const UnitVector& query) {
    query_distance_ = distance(embedding, query);
    embedding_ = std::move(embedding);
}

bool
closer_to_query(const HyperNode& a, const HyperNode& b) {
    if (a.query_distance() != b.query_distance()) {
        return a.query_distance() < b.query_distance();
    }
    if (int c = a.serialization().compare(b.serialization()); c != 0) {
        return c < 0;
    }
    return std::lexicographical_compare(a.triplet_ids().begin(), a.triplet_ids().end(), b.triplet_ids().begin(),
                                        b.triplet_ids().end());
}

std::vector<HyperNode>
select_seeds(const KnowledgeGraph& graph, const Encoder& encoder, const UnitVector& query, std::size_t n) {
    if (graph.triplets().empty()) {
        throw Error(ErrorCode::kEmptyGraph, "the graph has no triplets to seed from");
    }
    if (n == 0) {
        throw Error(ErrorCode::kInvalidParams, "seed count must be >= 1");
    }
    std::vector<UnitVector> scratch;
    auto vectors = catalog_vectors(graph, encoder, scratch);
    auto catalog = graph.triplets();

    std::vector<double> scores(vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        scores[i] = cosine(query, vectors[i]);
    }
    std::vector<TripletId> order(vectors.size());
    std::iota(order.begin(), order.end(), TripletId{0});
    auto better = [&](TripletId a, TripletId b) {
        if (scores[a] != scores[b]) {
            return scores[a] > scores[b];
        }
        if (int c = render_triplet(catalog[a]).compare(render_triplet(catalog[b])); c != 0) {
            return c < 0;
        }
        return a < b;
    };
    std::size_t take = std::min(n, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), better);

    std::vector<HyperNode> seeds;
    seeds.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        HyperNode node(graph, {order[i]});
        node.set_embedding(vectors[order[i]], query);
        seeds.push_back(std::move(node));
    }
    return seeds;
}

std::vector<HyperNode>
expand_candidates(const KnowledgeGraph& graph, std::span<const HyperNode> beam) {
    std::vector<HyperNode> candidates;
    std::unordered_set<std::vector<TripletId>, IdSetHash> seen;
    auto emit = [&](HyperNode node) {
        std::vector<TripletId> key(node.triplet_ids().begin(), node.triplet_ids().end());
        if (seen.insert(std::move(key)).second) {
            candidates.push_back(std::move(node));
        }
    };
    for (const auto& node : beam) {
        bool grew = false;
        for (TripletId next : graph.adjacent_ids(node.entities())) {
            if (node.contains(next)) {
                continue;
            }
            std::vector<TripletId> ids(node.triplet_ids().begin(), node.triplet_ids().end());
            ids.push_back(next);
            emit(HyperNode(graph, std::move(ids)));
            grew = true;
        }
        if (!grew) {
            emit(node);
        }
    }
    return candidates;
}

std::vector<HyperNode>
prune(std::vector<HyperNode> candidates, const Encoder& encoder, const UnitVector& query, std::size_t k) {
    std::vector<std::size_t> pending;
    std::vector<std::string> texts;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!candidates[i].has_embedding()) {
            pending.push_back(i);
            texts.push_back(candidates[i].serialization());
        }
    }
    auto vectors = encoder.encode(texts);
    for (std::size_t j = 0; j < pending.size(); ++j) {
        candidates[pending[j]].set_embedding(std::move(vectors[j]), query);
    }
    std::size_t take = std::min(k, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(),
                      closer_to_query);
    candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end());
    return candidates;
}

std::vector<HyperNode>
run_expansion(const KnowledgeGraph& graph,
              const Encoder& encoder,
              const UnitVector& query,
              const ExpansionConfig& config) {
    config.validate();
    if (graph.triplets().empty()) {
        return {};
    }
    auto beam = select_seeds(graph, encoder, query, config.seeds);
    for (std::size_t hop = 2; hop <= config.hops; ++hop) {
        auto candidates = expand_candidates(graph, beam);
        if (candidates.empty()) {
            break;
        }
        beam = prune(std::move(candidates), encoder, query, config.beam);
    }
    return beam;
}

std::vector<HyperNode>
run_expansion(const KnowledgeGraph& graph,
              const Encoder& encoder,
              std::string_view query,
              const ExpansionConfig& config) {
    config.validate();
    if (graph.triplets().empty()) {
        return {};
    }
    return run_expansion(graph, encoder, encoder.encode_one(query), config);
}

}  // namespace hyperpath
