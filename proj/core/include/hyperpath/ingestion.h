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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyperpath/encoding.h"
#include "hyperpath/kg_index.h"
#include "hyperpath/services.h"

namespace hyperpath {

using RawTriple = std::array<std::string, 3>;

/// One JSONL corpus line: {"id": .., "text": .., "triples": [[h, r, t], ..]}.
/// A record without "triples" must go through extract_triples first.
struct CorpusRecord {
    std::string id;
    std::string text;
    std::optional<std::vector<RawTriple>> triples;

    bool
    operator==(const CorpusRecord&) const = default;
};

/// Throws kParseError (with 1-based line), kDuplicateId, kIoError.
std::vector<CorpusRecord>
load_corpus(const std::filesystem::path& path);

std::vector<CorpusRecord>
parse_corpus(std::istream& in);

void
write_corpus(const std::filesystem::path& path, std::span<const CorpusRecord> records);

struct ExtractionOptions {
    std::size_t max_in_flight = 4;
    std::size_t attempts = 2;  // first try plus one retry on an unusable reply
};

struct ExtractionStats {
    std::size_t passed_through = 0;
    std::size_t extracted = 0;
    std::size_t failed = 0;
};

/// Version tag and text of the OpenIE prompt.
std::string_view
openie_prompt_version();

std::string_view
openie_prompt_template();

/// Hex SHA-256 of version tag and template, recorded in index manifests.
std::string
openie_prompt_hash();

/// Parses an OpenIE reply into triples. Accepts a bare JSON array or one
/// embedded in surrounding prose or a code fence; rows that are not three
/// non-empty strings are dropped. Returns nullopt when no array parses.
std::optional<std::vector<RawTriple>>
parse_triples_reply(std::string_view reply);

/// Fills in triples for records that lack them. Records that already have
/// triples are untouched; ids and texts are never modified. An unusable reply
/// after all attempts leaves the record with empty triples and logs a
/// warning. kServiceUnreachable propagates.
std::vector<CorpusRecord>
extract_triples(std::vector<CorpusRecord> records,
                const ChatClient& client,
                const ExtractionOptions& options = {},
                ExtractionStats* stats = nullptr);

/// Canonicalizes triples, builds the graph and attaches passage and triplet
/// embeddings. Throws kMissingTriples for records without triples.
KnowledgeGraph
build_and_embed(std::span<const CorpusRecord> records, const Encoder& encoder, std::size_t batch_size = 64);

inline constexpr std::uint32_t kIndexFormatVersion = 1;
inline constexpr std::string_view kEmbeddingMagic = "HELPIDX1";

struct Manifest {
    std::uint32_t format_version = kIndexFormatVersion;
    std::string encoder_id;
    std::string encoder_spec;  // how the CLI recreates the encoder
    std::size_t dimension = 0;
    std::size_t passage_count = 0;
    std::size_t triplet_count = 0;
    std::string content_hash;
    std::string prompt_hash;

    bool
    operator==(const Manifest&) const = default;
};

/// Writes passages.jsonl, triplets.jsonl, passage_embeddings.bin,
/// triplet_embeddings.bin and manifest.json into the directory. Every file is
/// written to a temporary name and renamed; the manifest goes last.
Manifest
save_index(const std::filesystem::path& dir, const KnowledgeGraph& graph, std::string_view encoder_spec);

struct LoadedIndex {
    KnowledgeGraph graph;
    Manifest manifest;
};

/// Throws kVersionMismatch, kCorruptFile or kIoError.
LoadedIndex
load_index(const std::filesystem::path& dir);

Manifest
read_manifest(const std::filesystem::path& dir);

/// Embedding file: magic "HELPIDX1", u32 dimension, u64 rows, then row-major
/// little-endian float32.
void
write_embedding_file(const std::filesystem::path& path, std::size_t dimension, std::span<const UnitVector> rows);

std::vector<UnitVector>
read_embedding_file(const std::filesystem::path& path, std::size_t expected_dimension, std::size_t expected_rows);

}  // namespace hyperpath
