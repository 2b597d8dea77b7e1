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

#include "hyperpath/evaluation.h"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "hyperpath/error.h"
#include "json.hpp"

namespace hyperpath {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::vector<std::string>
answer_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty() && current != "a" && current != "an" && current != "the") {
            tokens.push_back(current);
        }
        current.clear();
    };
    for (char ch : text) {
        auto c = static_cast<unsigned char>(ch);
        if (std::isspace(c)) {
            flush();
        } else if (c < 0x80 && std::ispunct(c)) {
            continue;
        } else {
            current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
        }
    }
    flush();
    return tokens;
}

double
f1_pair(const std::vector<std::string>& prediction, const std::vector<std::string>& gold) {
    if (prediction.empty() && gold.empty()) {
        return 1.0;
    }
    if (prediction.empty() || gold.empty()) {
        return 0.0;
    }
    std::unordered_map<std::string, int> counts;
    for (const auto& t : gold) {
        ++counts[t];
    }
    int common = 0;
    for (const auto& t : prediction) {
        if (auto it = counts.find(t); it != counts.end() && it->second > 0) {
            --it->second;
            ++common;
        }
    }
    if (common == 0) {
        return 0.0;
    }
    double precision = static_cast<double>(common) / static_cast<double>(prediction.size());
    double recall = static_cast<double>(common) / static_cast<double>(gold.size());
    return 2.0 * precision * recall / (precision + recall);
}

std::vector<std::size_t>
parse_values(std::string_view key, std::string_view piece) {
    auto to_number = [&](std::string_view s) {
        if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            throw Error(ErrorCode::kInvalidParams, fmt::format("sweep value \"{}\" for {} is not a number", s, key));
        }
        return static_cast<std::size_t>(std::stoull(std::string(s)));
    };
    std::vector<std::size_t> out;
    if (auto dots = piece.find(".."); dots != std::string_view::npos) {
        auto lo = to_number(piece.substr(0, dots));
        auto hi = to_number(piece.substr(dots + 2));
        if (lo > hi || hi - lo > 10000) {
            throw Error(ErrorCode::kInvalidParams, fmt::format("bad sweep range \"{}\" for {}", piece, key));
        }
        for (auto v = lo; v <= hi; ++v) {
            out.push_back(v);
        }
    } else {
        out.push_back(to_number(piece));
    }
    return out;
}

void
apply_value(SweepPoint& point, const std::string& key, std::size_t value) {
    if (key == "hops") {
        point.expansion.hops = value;
    } else if (key == "seed" || key == "seeds") {
        point.expansion.seeds = value;
    } else if (key == "beam") {
        point.expansion.beam = value;
    } else if (key == "quota") {
        point.hybrid.quota = value;
    } else if (key == "topk") {
        point.hybrid.total = value;
    } else {
        throw Error(ErrorCode::kInvalidParams, fmt::format("unknown sweep key \"{}\"", key));
    }
    point.labels[key] = std::to_string(value);
}

std::string
percent_or_dash(const std::optional<double>& value) {
    return value ? fmt::format("{:.2f}", *value * 100.0) : std::string("-");
}

}  // namespace

std::string
normalize_answer(std::string_view text) {
    auto tokens = answer_tokens(text);
    std::string out;
    for (const auto& t : tokens) {
        if (!out.empty()) {
            out.push_back(' ');
        }
        out.append(t);
    }
    return out;
}

double
token_f1(std::string_view prediction, std::span<const std::string> golds) {
    auto predicted = answer_tokens(prediction);
    double best = 0.0;
    for (const auto& gold : golds) {
        best = std::max(best, f1_pair(predicted, answer_tokens(gold)));
    }
    return best;
}

int
exact_match(std::string_view prediction, std::span<const std::string> golds) {
    auto normalized = normalize_answer(prediction);
    for (const auto& gold : golds) {
        if (normalize_answer(gold) == normalized) {
            return 1;
        }
    }
    return 0;
}

int
recall_at_k(std::span<const std::string> retrieved_ids, std::span<const std::string> gold_ids, std::size_t k) {
    std::size_t limit = std::min(k, retrieved_ids.size());
    for (std::size_t i = 0; i < limit; ++i) {
        if (std::find(gold_ids.begin(), gold_ids.end(), retrieved_ids[i]) != gold_ids.end()) {
            return 1;
        }
    }
    return 0;
}

std::vector<QARecord>
load_qa(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::kIoError, fmt::format("cannot open QA set {}", path.string()));
    }
    std::vector<QARecord> out;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        QARecord r;
        try {
            auto doc = json::parse(line);
            r.id = doc.at("id").get<std::string>();
            r.question = doc.at("question").get<std::string>();
            r.answers = doc.at("answers").get<std::vector<std::string>>();
            r.gold_passage_ids = doc.value("gold_passage_ids", std::vector<std::string>{});
        } catch (const json::exception& e) {
            throw Error(ErrorCode::kParseError, fmt::format("QA line {}: {}", line_number, e.what()), line_number);
        }
        if (r.answers.empty()) {
            throw Error(ErrorCode::kParseError, fmt::format("QA line {}: no gold answers", line_number), line_number);
        }
        out.push_back(std::move(r));
    }
    return out;
}

void
write_qa(const std::filesystem::path& path, std::span<const QARecord> records) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::kIoError, fmt::format("cannot write {}", path.string()));
    }
    for (const auto& r : records) {
        ordered_json line;
        line["id"] = r.id;
        line["question"] = r.question;
        line["answers"] = r.answers;
        line["gold_passage_ids"] = r.gold_passage_ids;
        out << line.dump() << '\n';
    }
}

void
BenchReport::finalize() {
    std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) { return a.id < b.id; });
    mean_latency = median_latency = recall_at_k = 0.0;
    mean_f1.reset();
    em_rate.reset();
    if (rows.empty()) {
        return;
    }
    std::vector<double> latencies;
    double recall_sum = 0.0;
    double f1_sum = 0.0;
    double em_sum = 0.0;
    bool scored = true;
    for (const auto& r : rows) {
        latencies.push_back(r.latency_seconds);
        recall_sum += r.recall_hit;
        scored = scored && r.f1 && r.em;
        if (r.f1 && r.em) {
            f1_sum += *r.f1;
            em_sum += *r.em;
        }
    }
    auto n = static_cast<double>(rows.size());
    mean_latency = std::accumulate(latencies.begin(), latencies.end(), 0.0) / n;
    std::sort(latencies.begin(), latencies.end());
    auto mid = latencies.size() / 2;
    median_latency = latencies.size() % 2 ? latencies[mid] : (latencies[mid - 1] + latencies[mid]) / 2.0;
    recall_at_k = recall_sum / n;
    if (scored) {
        mean_f1 = f1_sum / n;
        em_rate = em_sum / n;
    }
}

std::vector<ChatMessage>
answer_prompt(std::string_view question, std::span<const std::string> passages) {
    std::string user;
    for (std::size_t i = 0; i < passages.size(); ++i) {
        user += fmt::format("Passage {}:\n{}\n\n", i + 1, passages[i]);
    }
    user += fmt::format("Question: {}\nAnswer:", question);
    return {ChatMessage{"system",
                        "Answer the question using the passages. Reply with the answer phrase only, no explanation."},
            ChatMessage{"user", std::move(user)}};
}

BenchReport
run_benchmark(const KnowledgeGraph& graph,
              const Encoder& encoder,
              std::span<const QARecord> questions,
              const ExpansionConfig& expansion,
              const HybridConfig& hybrid,
              const ChatClient* generator) {
    BenchReport report;
    report.expansion = expansion;
    report.hybrid = hybrid;
    report.encoder_id = encoder.id();
    report.rows.reserve(questions.size());
    for (const auto& q : questions) {
        auto start = std::chrono::steady_clock::now();
        auto result = retrieve(graph, encoder, q.question, expansion, hybrid);
        auto stop = std::chrono::steady_clock::now();

        BenchRow row;
        row.id = q.id;
        row.latency_seconds = std::chrono::duration<double>(stop - start).count();
        for (const auto& p : result.passages) {
            row.retrieved_ids.push_back(p.passage_id);
        }
        row.recall_hit = recall_at_k(row.retrieved_ids, q.gold_passage_ids, hybrid.total);
        if (generator) {
            std::vector<std::string> texts;
            for (const auto& id : row.retrieved_ids) {
                texts.push_back(graph.passages()[*graph.find_passage(id)].text);
            }
            row.prediction = generator->complete(answer_prompt(q.question, texts));
            row.f1 = token_f1(*row.prediction, q.answers);
            row.em = exact_match(*row.prediction, q.answers);
        }
        report.rows.push_back(std::move(row));
    }
    report.finalize();
    return report;
}

std::string
report_to_json(const BenchReport& report) {
    ordered_json doc;
    doc["schema_version"] = BenchReport::kSchemaVersion;
    doc["config"] = {{"hops", report.expansion.hops},     {"seeds", report.expansion.seeds},
                     {"beam", report.expansion.beam},     {"quota", report.hybrid.quota},
                     {"topk", report.hybrid.total},       {"encoder", report.encoder_id}};
    doc["labels"] = report.labels;
    ordered_json aggregates;
    aggregates["queries"] = report.rows.size();
    aggregates["mean_latency_s"] = report.mean_latency;
    aggregates["median_latency_s"] = report.median_latency;
    aggregates["recall_at_k"] = report.recall_at_k;
    aggregates["k"] = report.hybrid.total;
    if (report.mean_f1) {
        aggregates["mean_f1"] = *report.mean_f1;
    }
    if (report.em_rate) {
        aggregates["em_rate"] = *report.em_rate;
    }
    doc["aggregates"] = aggregates;
    doc["rows"] = ordered_json::array();
    for (const auto& r : report.rows) {
        ordered_json row;
        row["id"] = r.id;
        row["latency_s"] = r.latency_seconds;
        row["retrieved_ids"] = r.retrieved_ids;
        row["recall_hit"] = r.recall_hit;
        if (r.prediction) {
            row["prediction"] = *r.prediction;
        }
        if (r.f1) {
            row["f1"] = *r.f1;
        }
        if (r.em) {
            row["em"] = *r.em;
        }
        doc["rows"].push_back(std::move(row));
    }
    return doc.dump(2);
}

std::vector<SweepPoint>
expand_sweep(std::string_view spec, const ExpansionConfig& base_expansion, const HybridConfig& base_hybrid) {
    std::vector<std::pair<std::string, std::vector<std::size_t>>> axes;
    std::size_t start = 0;
    while (start <= spec.size()) {
        auto comma = spec.find(',', start);
        auto token = spec.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        if (token.empty()) {
            throw Error(ErrorCode::kInvalidParams, fmt::format("empty item in sweep \"{}\"", spec));
        }
        if (auto eq = token.find('='); eq != std::string_view::npos) {
            std::string key(token.substr(0, eq));
            for (const auto& [existing, values] : axes) {
                if (existing == key) {
                    throw Error(ErrorCode::kInvalidParams, fmt::format("sweep key \"{}\" given twice", key));
                }
            }
            axes.emplace_back(key, parse_values(key, token.substr(eq + 1)));
        } else if (axes.empty()) {
            throw Error(ErrorCode::kInvalidParams, fmt::format("sweep \"{}\" must start with key=values", spec));
        } else {
            auto more = parse_values(axes.back().first, token);
            axes.back().second.insert(axes.back().second.end(), more.begin(), more.end());
        }
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }

    std::vector<SweepPoint> points{SweepPoint{base_expansion, base_hybrid, {}}};
    for (const auto& [key, values] : axes) {
        std::vector<SweepPoint> next;
        for (const auto& point : points) {
            for (auto value : values) {
                SweepPoint p = point;
                apply_value(p, key, value);
                next.push_back(std::move(p));
            }
        }
        points = std::move(next);
    }
    for (const auto& p : points) {
        p.expansion.validate();
        p.hybrid.validate();
    }
    return points;
}

std::string
summary_table(std::span<const BenchReport> reports) {
    std::string out = fmt::format("{:>4} {:>4} {:>4} {:>4} {:>5} {:>8} {:>8} {:>11} {:>11} {:>11}\n", "N", "n", "k",
                                  "M", "K", "EM(%)", "F1(%)", "Recall@K(%)", "mean_ms", "median_ms");
    for (const auto& r : reports) {
        out += fmt::format("{:>4} {:>4} {:>4} {:>4} {:>5} {:>8} {:>8} {:>11.2f} {:>11.3f} {:>11.3f}\n",
                           r.expansion.hops, r.expansion.seeds, r.expansion.beam, r.hybrid.quota, r.hybrid.total,
                           percent_or_dash(r.em_rate), percent_or_dash(r.mean_f1), r.recall_at_k * 100.0,
                           r.mean_latency * 1000.0, r.median_latency * 1000.0);
    }
    return out;
}

}  // namespace hyperpath
