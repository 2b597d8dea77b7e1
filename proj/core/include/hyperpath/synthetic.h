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
#include <vector>

#include "hyperpath/encoding.h"
#include "hyperpath/evaluation.h"
#include "hyperpath/ingestion.h"

namespace hyperpath {

struct SyntheticParams {
    std::size_t chains = 100;
    std::size_t hops = 2;
    std::size_t distractors = 10;  // per chain
    std::uint64_t seed = 7;
    std::size_t dimension = 128;
    std::size_t context_size = 5;  // K used by the dense-rank self-check
};

/// A multi-hop corpus with an oracle embedding table.
///
/// Chain c holds passages c-hop0 .. c-hop{h-1}; passage j states the single
/// fact (e_j, r_j, e_{j+1}). The question names only e_0 and its gold passage
/// is the terminal hop. Under the table the question points at the chain's
/// first fact and at its full serialized path, while the terminal passage text
/// is orthogonal to the question, so dense retrieval alone ranks it below K.
struct SyntheticFixture {
    SyntheticParams params;
    std::vector<CorpusRecord> corpus;
    std::vector<QARecord> questions;
    std::size_t dimension = 0;
    EmbeddingTable table;
};

/// Deterministic in params. Throws kInvalidParams for hops < 2, zero chains
/// or a dimension below 8.
SyntheticFixture
gen_synthetic(const SyntheticParams& params);

/// Brute-force check that every terminal gold passage has at least
/// context_size passages with strictly higher cosine to its question.
bool
verify_dense_hiding(const SyntheticFixture& fixture);

/// Writes corpus.jsonl, qa.jsonl and oracle.json. Unless require_hidden is
/// false, refuses with kInvalidParams when verify_dense_hiding fails.
void
write_fixture(const std::filesystem::path& dir, const SyntheticFixture& fixture, bool require_hidden = true);

}  // namespace hyperpath
