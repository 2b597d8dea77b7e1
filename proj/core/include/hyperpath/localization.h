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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyperpath/encoding.h"
#include "hyperpath/hypernode.h"
#include "hyperpath/kg_index.h"

namespace hyperpath {

enum class Channel { kPath, kDense };

std::string_view
channel_name(Channel channel);

/// Path-channel score is the accumulated provenance evidence; dense-channel
/// score is (1 + cosine) / 2 so both channels report values in [0, ...).
struct ScoredPassage {
    std::string passage_id;
    double score = 0.0;
    Channel channel = Channel::kPath;
    std::vector<Triplet> supporting_triplets;

    bool
    operator==(const ScoredPassage&) const = default;
};

struct HybridConfig {
    std::size_t quota = 4;  // path-channel slots M
    std::size_t total = 5;  // context size K

    /// Throws Error(kInvalidParams) unless 1 <= total and quota <= total.
    void
    validate() const;

    bool
    operator==(const HybridConfig&) const = default;
};

/// Score(p) = sum over hypernodes H and triplets t in H with p in prov(t) of
/// exp(-dist(H, q)) * w(p, t). Triplets repeated across hypernodes count once
/// per hypernode. Only positive scores are returned, descending, ties by id.
std::vector<ScoredPassage>
score_passages(const KnowledgeGraph& graph, std::span<const HyperNode> final_nodes);

/// Exhaustive cosine scan over passage embeddings, best first, ties by id.
/// Throws kMissingPassageEmbeddings when the graph carries none.
std::vector<ScoredPassage>
dense_rank(const KnowledgeGraph& graph, const Encoder& encoder, const UnitVector& query, std::size_t limit);

/// Up to quota path passages, then dense passages not already taken, until
/// total is reached or both lists run out.
std::vector<ScoredPassage>
hybrid_merge(std::span<const ScoredPassage> path_ranked,
             std::span<const ScoredPassage> dense_ranked,
             const HybridConfig& config);

struct RetrievalTimings {
    double expansion_ms = 0.0;
    double scoring_ms = 0.0;
    double dense_ms = 0.0;
    double total_ms = 0.0;
};

struct RetrievalResult {
    std::string query;
    std::vector<HyperNode> hypernodes;
    std::vector<ScoredPassage> passages;
    RetrievalTimings timings;
};

/// Full pipeline: expansion, path scoring, dense ranking and quota merge.
/// With no triplets the result is the dense top-K. Without passage
/// embeddings the dense channel is skipped.
RetrievalResult
retrieve(const KnowledgeGraph& graph,
         const Encoder& encoder,
         std::string_view query,
         const ExpansionConfig& expansion,
         const HybridConfig& hybrid);

}  // namespace hyperpath
