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
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hyperpath/encoding.h"
#include "hyperpath/hypernode.h"
#include "hyperpath/ingestion.h"
#include "hyperpath/localization.h"
#include "hyperpath/services.h"

namespace hyperpath {

/// Lowercase, drop ASCII punctuation, drop the articles a/an/the, collapse
/// whitespace.
std::string
normalize_answer(std::string_view text);

/// Best token-level F1 over the gold answers.
double
token_f1(std::string_view prediction, std::span<const std::string> golds);

int
exact_match(std::string_view prediction, std::span<const std::string> golds);

int
recall_at_k(std::span<const std::string> retrieved_ids, std::span<const std::string> gold_ids, std::size_t k);

struct QARecord {
    std::string id;
    std::string question;
    std::vector<std::string> answers;
    std::vector<std::string> gold_passage_ids;

    bool
    operator==(const QARecord&) const = default;
};

/// JSONL {id, question, answers, gold_passage_ids}. Throws kParseError.
std::vector<QARecord>
load_qa(const std::filesystem::path& path);

void
write_qa(const std::filesystem::path& path, std::span<const QARecord> records);

struct BenchRow {
    std::string id;
    double latency_seconds = 0.0;
    std::vector<std::string> retrieved_ids;
    int recall_hit = 0;
    std::optional<std::string> prediction;
    std::optional<double> f1;
    std::optional<int> em;
};

struct BenchReport {
    static constexpr int kSchemaVersion = 1;

    ExpansionConfig expansion;
    HybridConfig hybrid;
    std::string encoder_id;
    std::map<std::string, std::string> labels;  // sweep coordinates
    std::vector<BenchRow> rows;                 // sorted by id

    double mean_latency = 0.0;
    double median_latency = 0.0;
    double recall_at_k = 0.0;
    std::optional<double> mean_f1;
    std::optional<double> em_rate;

    /// Recomputes the aggregates from rows.
    void
    finalize();
};

/// Fixed answer prompt: numbered passages followed by the question.
std::vector<ChatMessage>
answer_prompt(std::string_view question, std::span<const std::string> passages);

/// Retrieval latency covers retrieve() only. With a generator the top-K
/// texts are sent through answer_prompt and scored with F1/EM.
BenchReport
run_benchmark(const KnowledgeGraph& graph,
              const Encoder& encoder,
              std::span<const QARecord> questions,
              const ExpansionConfig& expansion,
              const HybridConfig& hybrid,
              const ChatClient* generator = nullptr);

std::string
report_to_json(const BenchReport& report);

/// A point of a parameter sweep with the coordinates that produced it.
struct SweepPoint {
    ExpansionConfig expansion;
    HybridConfig hybrid;
    std::map<std::string, std::string> labels;
};

/// Parses "hops=1..4", "quota=0..5" or "seed=1..5,beam=30,50,70,100" into the
/// cartesian product of values applied to the base configs. Keys: hops, seed,
/// beam, quota, topk. Throws kInvalidParams on a malformed spec.
std::vector<SweepPoint>
expand_sweep(std::string_view spec, const ExpansionConfig& base_expansion, const HybridConfig& base_hybrid);

/// Plain-text table with one line per report.
std::string
summary_table(std::span<const BenchReport> reports);

}  // namespace hyperpath
