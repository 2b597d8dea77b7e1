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

#include "hyperpath/localization.h"

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "hyperpath/error.h"

namespace hyperpath {

namespace {

using Clock = std::chrono::steady_clock;

double
elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

bool
ranks_before(const ScoredPassage& a, const ScoredPassage& b) {
    if (a.score != b.score) {
        return a.score > b.score;
    }
    return a.passage_id < b.passage_id;
}

}  // namespace

std::string_view
channel_name(Channel channel) {
    return channel == Channel::kPath ? "path" : "dense";
}

void
HybridConfig::validate() const {
    if (total == 0 || quota > total) {
        throw Error(ErrorCode::kInvalidParams,
                    fmt::format("hybrid config needs 1 <= K and M <= K (got M={}, K={})", quota, total));
    }
}

std::vector<ScoredPassage>
score_passages(const KnowledgeGraph& graph, std::span<const HyperNode> final_nodes) {
    const auto& passages = graph.passages();
    std::vector<double> scores(passages.size(), 0.0);
    std::vector<std::vector<TripletId>> support(passages.size());

    for (const auto& node : final_nodes) {
        double kappa = std::exp(-node.query_distance());
        for (TripletId id : node.triplet_ids()) {
            for (const auto& entry : graph.provenance(id)) {
                scores[entry.passage] += kappa * entry.weight();
                support[entry.passage].push_back(id);
            }
        }
    }

    std::vector<ScoredPassage> out;
    for (PassageIndex p = 0; p < passages.size(); ++p) {
        if (!(scores[p] > 0.0)) {
            continue;
        }
        auto& ids = support[p];
        std::sort(ids.begin(), ids.end());
        ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
        ScoredPassage sp{passages[p].id, scores[p], Channel::kPath, {}};
        sp.supporting_triplets.reserve(ids.size());
        for (TripletId id : ids) {
            sp.supporting_triplets.push_back(graph.triplets()[id]);
        }
        out.push_back(std::move(sp));
    }
    std::sort(out.begin(), out.end(), ranks_before);
    return out;
}

std::vector<ScoredPassage>
dense_rank(const KnowledgeGraph& graph, const Encoder& encoder, const UnitVector& query, std::size_t limit) {
    if (!graph.has_embeddings()) {
        throw Error(ErrorCode::kMissingPassageEmbeddings, "the index was built without passage embeddings");
    }
    if (graph.encoder_id() != encoder.id()) {
        throw Error(ErrorCode::kConfigError,
                    fmt::format("index was embedded with \"{}\" but the session encoder is \"{}\"",
                                graph.encoder_id(), encoder.id()));
    }
    const auto& passages = graph.passages();
    auto vectors = graph.passage_embeddings();
    std::vector<double> sims(vectors.size());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        sims[i] = cosine(query, vectors[i]);
    }
    std::vector<PassageIndex> order(vectors.size());
    std::iota(order.begin(), order.end(), PassageIndex{0});
    std::size_t take = std::min(limit, order.size());
    // Passages are stored sorted by id, so the index doubles as the id tie-break.
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                      [&](PassageIndex a, PassageIndex b) { return sims[a] != sims[b] ? sims[a] > sims[b] : a < b; });
    std::vector<ScoredPassage> out;
    out.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        PassageIndex p = order[i];
        out.push_back(ScoredPassage{passages[p].id, (1.0 + sims[p]) / 2.0, Channel::kDense, {}});
    }
    return out;
}

std::vector<ScoredPassage>
hybrid_merge(std::span<const ScoredPassage> path_ranked,
             std::span<const ScoredPassage> dense_ranked,
             const HybridConfig& config) {
    config.validate();
    std::vector<ScoredPassage> out;
    std::unordered_set<std::string> taken;
    for (const auto& sp : path_ranked) {
        if (out.size() >= config.quota) {
            break;
        }
        if (sp.score > 0.0 && taken.insert(sp.passage_id).second) {
            out.push_back(sp);
        }
    }
    for (const auto& sp : dense_ranked) {
        if (out.size() >= config.total) {
            break;
        }
        if (taken.insert(sp.passage_id).second) {
            out.push_back(sp);
        }
    }
    return out;
}

RetrievalResult
retrieve(const KnowledgeGraph& graph,
         const Encoder& encoder,
         std::string_view query,
         const ExpansionConfig& expansion,
         const HybridConfig& hybrid) {
    expansion.validate();
    hybrid.validate();
    auto start = Clock::now();
    RetrievalResult result;
    result.query = std::string(query);

    auto query_vector = encoder.encode_one(query);

    auto t = Clock::now();
    if (!graph.triplets().empty()) {
        result.hypernodes = run_expansion(graph, encoder, query_vector, expansion);
    }
    result.timings.expansion_ms = elapsed_ms(t);

    t = Clock::now();
    auto path_ranked = score_passages(graph, result.hypernodes);
    result.timings.scoring_ms = elapsed_ms(t);

    t = Clock::now();
    std::vector<ScoredPassage> dense_ranked;
    if (graph.has_embeddings()) {
        dense_ranked = dense_rank(graph, encoder, query_vector, hybrid.total);
    }
    result.timings.dense_ms = elapsed_ms(t);

    result.passages = hybrid_merge(path_ranked, dense_ranked, hybrid);
    result.timings.total_ms = elapsed_ms(start);
    return result;
}

}  // namespace hyperpath
