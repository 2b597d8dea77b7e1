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

#include "hyperpath/ingestion.h"

#include <fmt/format.h>
#include <openssl/evp.h>
#include <spdlog/spdlog.h>

#include <bit>
#include <fstream>
#include <iterator>
#include <mutex>
#include <sstream>
#include <unordered_set>

#include "hyperpath/error.h"
#include "json.hpp"
#include "parallel.h"

namespace hyperpath {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr std::string_view kPromptVersion = "openie-v1";

constexpr std::string_view kPromptTemplate =
    R"(Extract the factual relations stated in the passage below as a JSON array of
[subject, relation, object] triples. Use short noun phrases for subject and
object, name people and places in full, and keep each relation to a few words.
Reply with the JSON array only, for example:
[["marie curie", "born in", "warsaw"], ["marie curie", "field", "physics"]]

Passage:
{passage})";

constexpr std::string_view kPassagesFile = "passages.jsonl";
constexpr std::string_view kTripletsFile = "triplets.jsonl";
constexpr std::string_view kPassageVectorsFile = "passage_embeddings.bin";
constexpr std::string_view kTripletVectorsFile = "triplet_embeddings.bin";
constexpr std::string_view kManifestFile = "manifest.json";

std::string
sha256_hex(std::string_view data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::kIoError, "SHA-256 computation failed");
    }
    std::string hex;
    hex.reserve(length * 2);
    for (unsigned int i = 0; i < length; ++i) {
        hex += fmt::format("{:02x}", digest[i]);
    }
    return hex;
}

std::string
read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::kIoError, fmt::format("cannot open {}", path.string()));
    }
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void
write_atomic(const fs::path& path, std::string_view bytes) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::kIoError, fmt::format("cannot write {}", tmp.string()));
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            throw Error(ErrorCode::kIoError, fmt::format("short write to {}", tmp.string()));
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        throw Error(ErrorCode::kIoError, fmt::format("cannot rename {}: {}", tmp.string(), ec.message()));
    }
}

template <typename T>
void
put_le(std::string& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
    }
}

template <typename T>
T
get_le(std::string_view bytes, std::size_t offset) {
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
        value |= static_cast<T>(static_cast<unsigned char>(bytes[offset + i])) << (8 * i);
    }
    return value;
}

std::string
encode_embeddings(std::size_t dimension, std::span<const UnitVector> rows) {
    std::string out(kEmbeddingMagic);
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(dimension));
    put_le<std::uint64_t>(out, rows.size());
    out.reserve(out.size() + rows.size() * dimension * 4);
    for (const auto& row : rows) {
        if (row.dimension() != dimension) {
            throw Error(ErrorCode::kDimensionMismatch,
                        fmt::format("row of dimension {} in a {}-dimensional file", row.dimension(), dimension));
        }
        for (float x : row.stored()) {
            put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(x));
        }
    }
    return out;
}

std::vector<UnitVector>
decode_embeddings(std::string_view bytes,
                  std::size_t expected_dimension,
                  std::size_t expected_rows,
                  const std::string& label) {
    constexpr std::size_t kHeader = 8 + 4 + 8;
    if (bytes.size() < kHeader || bytes.substr(0, 8) != kEmbeddingMagic) {
        throw Error(ErrorCode::kCorruptFile, fmt::format("{}: bad embedding header", label));
    }
    auto dimension = get_le<std::uint32_t>(bytes, 8);
    auto rows = get_le<std::uint64_t>(bytes, 12);
    if (dimension != expected_dimension || rows != expected_rows) {
        throw Error(ErrorCode::kCorruptFile, fmt::format("{}: header says {} x {}, expected {} x {}", label, rows,
                                                         dimension, expected_rows, expected_dimension));
    }
    if (bytes.size() != kHeader + rows * dimension * 4) {
        throw Error(ErrorCode::kCorruptFile, fmt::format("{}: payload size {} does not match header", label,
                                                         bytes.size() - kHeader));
    }
    std::vector<UnitVector> out;
    out.reserve(rows);
    std::vector<float> row(dimension);
    std::size_t offset = kHeader;
    for (std::uint64_t r = 0; r < rows; ++r) {
        for (std::uint32_t d = 0; d < dimension; ++d, offset += 4) {
            row[d] = std::bit_cast<float>(get_le<std::uint32_t>(bytes, offset));
        }
        try {
            out.push_back(UnitVector::from_stored(row));
        } catch (const Error&) {
            throw Error(ErrorCode::kCorruptFile, fmt::format("{}: row {} is not a valid unit vector", label, r));
        }
    }
    return out;
}

std::string
content_hash(const std::vector<std::pair<std::string_view, std::string>>& files) {
    std::string material;
    for (const auto& [name, bytes] : files) {
        material.append(name).push_back('\0');
        put_le<std::uint64_t>(material, bytes.size());
        material.append(bytes);
    }
    return sha256_hex(material);
}

std::string
passages_jsonl(const KnowledgeGraph& graph) {
    std::string out;
    for (const auto& p : graph.passages()) {
        ordered_json line;
        line["id"] = p.id;
        line["text"] = p.text;
        line["triples"] = json::array();
        for (const auto& t : p.triplets) {
            line["triples"].push_back({t.head, t.relation, t.tail});
        }
        out.append(line.dump()).push_back('\n');
    }
    return out;
}

std::string
triplets_jsonl(const KnowledgeGraph& graph) {
    std::string out;
    for (const auto& t : graph.triplets()) {
        out.append(json::array({t.head, t.relation, t.tail}).dump()).push_back('\n');
    }
    return out;
}

Manifest
parse_manifest(const std::string& text, const fs::path& path) {
    try {
        auto doc = json::parse(text);
        Manifest m;
        m.format_version = doc.at("format_version").get<std::uint32_t>();
        if (m.format_version != kIndexFormatVersion) {
            throw Error(ErrorCode::kVersionMismatch,
                        fmt::format("{} has format version {}, this reader supports {}", path.string(),
                                    m.format_version, kIndexFormatVersion));
        }
        m.encoder_id = doc.at("encoder_id").get<std::string>();
        m.encoder_spec = doc.at("encoder_spec").get<std::string>();
        m.dimension = doc.at("dimension").get<std::size_t>();
        m.passage_count = doc.at("passage_count").get<std::size_t>();
        m.triplet_count = doc.at("triplet_count").get<std::size_t>();
        m.content_hash = doc.at("content_hash").get<std::string>();
        m.prompt_hash = doc.at("prompt_hash").get<std::string>();
        return m;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::kCorruptFile, fmt::format("{}: {}", path.string(), e.what()));
    }
}

std::vector<ChatMessage>
openie_messages(std::string_view passage) {
    std::string prompt(kPromptTemplate);
    auto pos = prompt.find("{passage}");
    prompt.replace(pos, std::string_view("{passage}").size(), passage);
    return {ChatMessage{"system", "You extract knowledge-graph triples from text."},
            ChatMessage{"user", std::move(prompt)}};
}

std::optional<std::vector<RawTriple>>
triples_from_json(const json& doc) {
    if (!doc.is_array()) {
        return std::nullopt;
    }
    std::vector<RawTriple> out;
    for (const auto& row : doc) {
        if (!row.is_array() || row.size() != 3) {
            continue;
        }
        RawTriple triple;
        bool ok = true;
        for (std::size_t i = 0; i < 3 && ok; ++i) {
            ok = row[i].is_string() && !canonicalize_text(row[i].get<std::string>()).empty();
            if (ok) {
                triple[i] = row[i].get<std::string>();
            }
        }
        if (ok) {
            out.push_back(std::move(triple));
        }
    }
    return out;
}

}  // namespace

std::vector<CorpusRecord>
parse_corpus(std::istream& in) {
    std::vector<CorpusRecord> records;
    std::unordered_set<std::string> ids;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (canonicalize_text(line).empty()) {
            continue;
        }
        CorpusRecord record;
        try {
            auto doc = json::parse(line);
            record.id = doc.at("id").get<std::string>();
            record.text = doc.at("text").get<std::string>();
            if (auto it = doc.find("triples"); it != doc.end() && !it->is_null()) {
                record.triples = it->get<std::vector<RawTriple>>();
            }
        } catch (const json::exception& e) {
            throw Error(ErrorCode::kParseError, fmt::format("corpus line {}: {}", line_number, e.what()), line_number);
        }
        if (record.id.empty()) {
            throw Error(ErrorCode::kParseError, fmt::format("corpus line {}: empty id", line_number), line_number);
        }
        if (!ids.insert(record.id).second) {
            throw Error(ErrorCode::kDuplicateId, fmt::format("corpus line {}: id \"{}\" already used", line_number,
                                                             record.id),
                        line_number);
        }
        records.push_back(std::move(record));
    }
    return records;
}

std::vector<CorpusRecord>
load_corpus(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::kIoError, fmt::format("cannot open corpus {}", path.string()));
    }
    return parse_corpus(in);
}

void
write_corpus(const fs::path& path, std::span<const CorpusRecord> records) {
    std::string out;
    for (const auto& r : records) {
        ordered_json line;
        line["id"] = r.id;
        line["text"] = r.text;
        if (r.triples) {
            line["triples"] = *r.triples;
        }
        out.append(line.dump()).push_back('\n');
    }
    write_atomic(path, out);
}

std::string_view
openie_prompt_version() {
    return kPromptVersion;
}

std::string_view
openie_prompt_template() {
    return kPromptTemplate;
}

std::string
openie_prompt_hash() {
    std::string material(kPromptVersion);
    material.push_back('\n');
    material.append(kPromptTemplate);
    return sha256_hex(material);
}

std::optional<std::vector<RawTriple>>
parse_triples_reply(std::string_view reply) {
    auto whole = json::parse(reply, nullptr, false);
    if (!whole.is_discarded()) {
        if (auto triples = triples_from_json(whole)) {
            return triples;
        }
    }
    auto open = reply.find('[');
    auto close = reply.rfind(']');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
        return std::nullopt;
    }
    auto inner = json::parse(reply.substr(open, close - open + 1), nullptr, false);
    if (inner.is_discarded()) {
        return std::nullopt;
    }
    return triples_from_json(inner);
}

std::vector<CorpusRecord>
extract_triples(std::vector<CorpusRecord> records,
                const ChatClient& client,
                const ExtractionOptions& options,
                ExtractionStats* stats) {
    std::vector<std::size_t> pending;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (!records[i].triples) {
            pending.push_back(i);
        }
    }
    ExtractionStats local;
    local.passed_through = records.size() - pending.size();
    std::mutex stats_mutex;

    detail::run_bounded(pending.size(), options.max_in_flight, [&](std::size_t j) {
        auto& record = records[pending[j]];
        auto messages = openie_messages(record.text);
        std::optional<std::vector<RawTriple>> triples;
        for (std::size_t attempt = 0; attempt < std::max<std::size_t>(1, options.attempts) && !triples; ++attempt) {
            try {
                triples = parse_triples_reply(client.complete(messages));
            } catch (const Error& e) {
                if (e.code() != ErrorCode::kParseError) {
                    throw;
                }
            }
        }
        std::lock_guard lock(stats_mutex);
        if (triples) {
            record.triples = std::move(*triples);
            ++local.extracted;
        } else {
            spdlog::warn("no usable triples extracted for passage \"{}\"; keeping it without triples", record.id);
            record.triples.emplace();
            ++local.failed;
        }
    });
    if (stats) {
        *stats = local;
    }
    return records;
}

KnowledgeGraph
build_and_embed(std::span<const CorpusRecord> records, const Encoder& encoder, std::size_t batch_size) {
    if (records.empty()) {
        throw Error(ErrorCode::kEmptyGraph, "the corpus has no passages");
    }
    std::vector<Passage> passages;
    passages.reserve(records.size());
    for (const auto& r : records) {
        if (!r.triples) {
            throw Error(ErrorCode::kMissingTriples,
                        fmt::format("record \"{}\" has no triples; run extraction first", r.id));
        }
        Passage p{r.id, r.text, {}};
        p.triplets.reserve(r.triples->size());
        for (const auto& raw : *r.triples) {
            try {
                p.triplets.push_back(canonicalize_triplet(raw[0], raw[1], raw[2]));
            } catch (const Error& e) {
                throw Error(e.code(), fmt::format("record \"{}\": {}", r.id, e.what()));
            }
        }
        passages.push_back(std::move(p));
    }
    auto graph = KnowledgeGraph::build(std::move(passages));

    batch_size = std::max<std::size_t>(1, batch_size);
    auto encode_all = [&](const std::vector<std::string>& texts) {
        std::vector<UnitVector> out;
        out.reserve(texts.size());
        for (std::size_t begin = 0; begin < texts.size(); begin += batch_size) {
            auto count = std::min(batch_size, texts.size() - begin);
            auto part = encoder.encode(std::span<const std::string>(texts).subspan(begin, count));
            std::move(part.begin(), part.end(), std::back_inserter(out));
        }
        return out;
    };

    std::vector<std::string> passage_texts;
    passage_texts.reserve(graph.passages().size());
    for (const auto& p : graph.passages()) {
        passage_texts.push_back(p.text);
    }
    std::vector<std::string> triplet_texts;
    triplet_texts.reserve(graph.triplets().size());
    for (const auto& t : graph.triplets()) {
        triplet_texts.push_back(render_triplet(t));
    }
    auto passage_vectors = encode_all(passage_texts);
    auto triplet_vectors = encode_all(triplet_texts);
    graph.attach_embeddings(encoder.id(), std::move(passage_vectors), std::move(triplet_vectors));
    return graph;
}

void
write_embedding_file(const fs::path& path, std::size_t dimension, std::span<const UnitVector> rows) {
    write_atomic(path, encode_embeddings(dimension, rows));
}

std::vector<UnitVector>
read_embedding_file(const fs::path& path, std::size_t expected_dimension, std::size_t expected_rows) {
    return decode_embeddings(read_file(path), expected_dimension, expected_rows, path.string());
}

Manifest
save_index(const fs::path& dir, const KnowledgeGraph& graph, std::string_view encoder_spec) {
    if (!graph.has_embeddings()) {
        throw Error(ErrorCode::kMissingPassageEmbeddings, "only embedded graphs can be saved");
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(ErrorCode::kIoError, fmt::format("cannot create {}: {}", dir.string(), ec.message()));
    }
    std::size_t dimension = graph.embedding_dimension();
    std::vector<std::pair<std::string_view, std::string>> files;
    files.emplace_back(kPassagesFile, passages_jsonl(graph));
    files.emplace_back(kTripletsFile, triplets_jsonl(graph));
    files.emplace_back(kPassageVectorsFile, encode_embeddings(dimension, graph.passage_embeddings()));
    files.emplace_back(kTripletVectorsFile, encode_embeddings(dimension, graph.triplet_embeddings()));

    Manifest m;
    m.encoder_id = graph.encoder_id();
    m.encoder_spec = std::string(encoder_spec);
    m.dimension = dimension;
    m.passage_count = graph.passages().size();
    m.triplet_count = graph.triplets().size();
    m.content_hash = content_hash(files);
    m.prompt_hash = openie_prompt_hash();

    for (const auto& [name, bytes] : files) {
        write_atomic(dir / name, bytes);
    }
    ordered_json doc;
    doc["format_version"] = m.format_version;
    doc["encoder_id"] = m.encoder_id;
    doc["encoder_spec"] = m.encoder_spec;
    doc["dimension"] = m.dimension;
    doc["passage_count"] = m.passage_count;
    doc["triplet_count"] = m.triplet_count;
    doc["content_hash"] = m.content_hash;
    doc["prompt_version"] = kPromptVersion;
    doc["prompt_hash"] = m.prompt_hash;
    write_atomic(dir / kManifestFile, doc.dump(2) + "\n");
    return m;
}

Manifest
read_manifest(const fs::path& dir) {
    auto path = dir / kManifestFile;
    return parse_manifest(read_file(path), path);
}

LoadedIndex
load_index(const fs::path& dir) {
    auto manifest = read_manifest(dir);
    std::vector<std::pair<std::string_view, std::string>> files;
    for (auto name : {kPassagesFile, kTripletsFile, kPassageVectorsFile, kTripletVectorsFile}) {
        files.emplace_back(name, read_file(dir / name));
    }
    if (content_hash(files) != manifest.content_hash) {
        throw Error(ErrorCode::kCorruptFile, fmt::format("{}: content hash mismatch", dir.string()));
    }

    std::istringstream passages_in(files[0].second);
    std::vector<Passage> passages;
    try {
        for (const auto& record : parse_corpus(passages_in)) {
            Passage p{record.id, record.text, {}};
            for (const auto& raw : record.triples.value_or(std::vector<RawTriple>{})) {
                p.triplets.push_back(Triplet{raw[0], raw[1], raw[2]});
            }
            passages.push_back(std::move(p));
        }
    } catch (const Error& e) {
        throw Error(ErrorCode::kCorruptFile, fmt::format("{}: {}", dir.string(), e.what()));
    }
    auto graph = KnowledgeGraph::build(std::move(passages));
    if (triplets_jsonl(graph) != files[1].second || graph.passages().size() != manifest.passage_count ||
        graph.triplets().size() != manifest.triplet_count) {
        throw Error(ErrorCode::kCorruptFile, fmt::format("{}: triplet catalog does not match passages",
                                                         dir.string()));
    }
    auto passage_vectors = decode_embeddings(files[2].second, manifest.dimension, manifest.passage_count,
                                             (dir / kPassageVectorsFile).string());
    auto triplet_vectors = decode_embeddings(files[3].second, manifest.dimension, manifest.triplet_count,
                                             (dir / kTripletVectorsFile).string());
    graph.attach_embeddings(manifest.encoder_id, std::move(passage_vectors), std::move(triplet_vectors));
    return LoadedIndex{std::move(graph), std::move(manifest)};
}

}  // namespace hyperpath
