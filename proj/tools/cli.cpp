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

#include "cli.h"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "hyperpath/error.h"
#include "hyperpath/evaluation.h"
#include "hyperpath/hypernode.h"
#include "hyperpath/ingestion.h"
#include "hyperpath/localization.h"
#include "hyperpath/services.h"
#include "hyperpath/synthetic.h"
#include "json.hpp"

namespace hyperpath::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct EncoderOptions {
    std::string spec;
    std::size_t remote_dimension = 0;
};

struct RetrievalOptions {
    ExpansionConfig expansion;
    HybridConfig hybrid;
};

void
add_encoder_options(CLI::App* cmd, EncoderOptions& opts, bool required) {
    auto* opt = cmd->add_option("--encoder", opts.spec, "hash | hash:<dim> | oracle:<table.json> | remote");
    if (required) {
        opt->default_val("hash");
    }
    cmd->add_option("--embed-dim", opts.remote_dimension, "Dimension of the remote encoder (0 probes the service)");
}

void
add_retrieval_options(CLI::App* cmd, RetrievalOptions& opts) {
    cmd->add_option("--hops", opts.expansion.hops, "Expansion hops N")->capture_default_str();
    cmd->add_option("--seeds", opts.expansion.seeds, "Seed triplets n")->capture_default_str();
    cmd->add_option("--beam", opts.expansion.beam, "Beam width k")->capture_default_str();
    cmd->add_option("--quota", opts.hybrid.quota, "Path-channel quota M")->capture_default_str();
    cmd->add_option("--topk", opts.hybrid.total, "Context size K")->capture_default_str();
}

std::string
canonical_encoder_spec(const std::string& spec) {
    if (spec.rfind("oracle:", 0) == 0) {
        return "oracle:" + fs::absolute(spec.substr(7)).string();
    }
    return spec;
}

/// Opens an index and the encoder it needs; an explicit spec overrides the
/// one recorded in the manifest but must produce the same encoder id.
std::pair<LoadedIndex, std::unique_ptr<Encoder>>
open_index(const std::string& dir, const EncoderOptions& opts) {
    auto index = load_index(dir);
    auto encoder = make_encoder(opts.spec.empty() ? index.manifest.encoder_spec : opts.spec, opts.remote_dimension);
    if (encoder->id() != index.manifest.encoder_id) {
        throw Error(ErrorCode::kConfigError, fmt::format("index {} was built with encoder \"{}\", not \"{}\"", dir,
                                                         index.manifest.encoder_id, encoder->id()));
    }
    return {std::move(index), std::move(encoder)};
}

ordered_json
triplet_json(const Triplet& t) {
    return ordered_json::array({t.head, t.relation, t.tail});
}

ordered_json
result_json(const KnowledgeGraph& graph, const RetrievalResult& result, bool with_timings) {
    ordered_json doc;
    doc["query"] = result.query;
    doc["hypernodes"] = ordered_json::array();
    for (const auto& node : result.hypernodes) {
        ordered_json h;
        h["triplets"] = ordered_json::array();
        for (const auto& t : node.triplets(graph)) {
            h["triplets"].push_back(triplet_json(t));
        }
        h["distance"] = node.query_distance();
        doc["hypernodes"].push_back(std::move(h));
    }
    doc["passages"] = ordered_json::array();
    for (const auto& p : result.passages) {
        ordered_json j;
        j["id"] = p.passage_id;
        j["score"] = p.score;
        j["channel"] = channel_name(p.channel);
        j["supporting_triplets"] = ordered_json::array();
        for (const auto& t : p.supporting_triplets) {
            j["supporting_triplets"].push_back(triplet_json(t));
        }
        doc["passages"].push_back(std::move(j));
    }
    if (with_timings) {
        doc["timings_ms"] = {{"expansion", result.timings.expansion_ms},
                             {"scoring", result.timings.scoring_ms},
                             {"dense", result.timings.dense_ms},
                             {"total", result.timings.total_ms}};
    }
    return doc;
}

void
print_result_text(std::ostream& out, const KnowledgeGraph& graph, const RetrievalResult& result, bool with_timings) {
    out << "query: " << result.query << "\n\n";
    out << fmt::format("hypernodes ({}):\n", result.hypernodes.size());
    for (std::size_t i = 0; i < result.hypernodes.size(); ++i) {
        const auto& node = result.hypernodes[i];
        out << fmt::format("  {:>3}  dist={:.6f}  {}\n", i + 1, node.query_distance(), node.serialization());
    }
    out << fmt::format("\npassages ({}):\n", result.passages.size());
    out << fmt::format("  {:>3}  {:<24} {:>10}  {:<6} {}\n", "#", "id", "score", "chan", "support");
    for (std::size_t i = 0; i < result.passages.size(); ++i) {
        const auto& p = result.passages[i];
        std::string support;
        for (const auto& t : p.supporting_triplets) {
            if (!support.empty()) {
                support += " | ";
            }
            support += render_triplet(t);
        }
        out << fmt::format("  {:>3}  {:<24} {:>10.6f}  {:<6} {}\n", i + 1, p.passage_id, p.score,
                           channel_name(p.channel), support);
        const auto& text = graph.passages()[*graph.find_passage(p.passage_id)].text;
        out << "       " << (text.size() > 160 ? text.substr(0, 157) + "..." : text) << "\n";
    }
    if (with_timings) {
        out << fmt::format("\ntimings_ms: expansion={:.3f} scoring={:.3f} dense={:.3f} total={:.3f}\n",
                           result.timings.expansion_ms, result.timings.scoring_ms, result.timings.dense_ms,
                           result.timings.total_ms);
    }
}

std::string
report_file_name(const std::map<std::string, std::string>& labels) {
    if (labels.empty()) {
        return "report.json";
    }
    std::string name = "report";
    for (const auto& [k, v] : labels) {
        name += fmt::format("_{}-{}", k, v);
    }
    return name + ".json";
}

int
exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::kServiceUnreachable:
        case ErrorCode::kEncoderFailure:
            return kExitService;
        default:
            return kExitConfig;
    }
}

}  // namespace

std::unique_ptr<Encoder>
make_encoder(std::string_view spec, std::size_t remote_dimension) {
    if (spec == "hash") {
        return std::make_unique<HashEncoder>();
    }
    if (spec.rfind("hash:", 0) == 0) {
        std::size_t dim = 0;
        try {
            dim = std::stoul(std::string(spec.substr(5)));
        } catch (const std::exception&) {
            throw Error(ErrorCode::kConfigError, fmt::format("bad hash encoder spec \"{}\"", spec));
        }
        return std::make_unique<HashEncoder>(dim);
    }
    if (spec.rfind("oracle:", 0) == 0) {
        return std::make_unique<OracleEncoder>(OracleEncoder::from_file(std::string(spec.substr(7))));
    }
    if (spec == "remote") {
        return std::make_unique<RemoteEncoder>(ServiceConfig::from_env("HELP_EMBED"), remote_dimension);
    }
    throw Error(ErrorCode::kConfigError, fmt::format("unknown encoder \"{}\"", spec));
}

int
run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"hyperpath: multi-hop graph retrieval over triple-to-passage indexes"};
    app.require_subcommand(1);
    bool verbose = false;
    app.add_flag("-v,--verbose", verbose, "Verbose logging");

    // index
    auto* index_cmd = app.add_subcommand("index", "Build an index bundle from a JSONL corpus");
    std::string corpus_path;
    std::string out_dir;
    std::size_t batch_size = RemoteEncoder::kDefaultBatchSize;
    EncoderOptions index_encoder;
    index_cmd->add_option("--corpus", corpus_path, "Corpus JSONL")->required();
    index_cmd->add_option("--out", out_dir, "Output bundle directory")->required();
    index_cmd->add_option("--batch", batch_size, "Texts per encoder request")->capture_default_str();
    add_encoder_options(index_cmd, index_encoder, true);

    // query
    auto* query_cmd = app.add_subcommand("query", "Retrieve passages for one question");
    std::string index_dir;
    std::string question;
    std::string format = "json";
    bool omit_timings = false;
    EncoderOptions query_encoder;
    RetrievalOptions query_opts;
    query_cmd->add_option("--index", index_dir, "Index bundle directory")->required();
    query_cmd->add_option("--question", question, "Question text")->required();
    query_cmd->add_option("--format", format, "json | text")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
    query_cmd->add_flag("--omit-timings", omit_timings, "Leave wall-clock timings out of the output");
    add_encoder_options(query_cmd, query_encoder, false);
    add_retrieval_options(query_cmd, query_opts);

    // bench
    auto* bench_cmd = app.add_subcommand("bench", "Run a QA set against an index and report recall and latency");
    std::string bench_index;
    std::string qa_path;
    std::string sweep;
    std::string grid;
    std::string report_dir;
    std::string bench_format = "text";
    bool generate = false;
    EncoderOptions bench_encoder;
    RetrievalOptions bench_opts;
    bench_cmd->add_option("--index", bench_index, "Index bundle directory")->required();
    bench_cmd->add_option("--qa", qa_path, "QA JSONL")->required();
    bench_cmd->add_option("--sweep", sweep, "One-axis sweep, e.g. hops=1..4 or quota=0..5");
    bench_cmd->add_option("--grid", grid, "Multi-axis grid, e.g. seed=1..5,beam=30,50,70,100");
    bench_cmd->add_option("--out", report_dir, "Directory receiving one JSON report per point");
    bench_cmd->add_option("--format", bench_format, "text | json")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
    bench_cmd->add_flag("--generate", generate, "Generate answers through HELP_LLM_* and score F1/EM");
    add_encoder_options(bench_cmd, bench_encoder, false);
    add_retrieval_options(bench_cmd, bench_opts);

    // gen-synthetic
    auto* gen_cmd = app.add_subcommand("gen-synthetic", "Write a synthetic multi-hop fixture with oracle embeddings");
    SyntheticParams gen;
    std::string gen_out;
    gen_cmd->add_option("--chains", gen.chains, "Number of reasoning chains")->capture_default_str();
    gen_cmd->add_option("--hops", gen.hops, "Facts per chain")->capture_default_str();
    gen_cmd->add_option("--distractors", gen.distractors, "Distractor passages per chain")->capture_default_str();
    gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    gen_cmd->add_option("--dim", gen.dimension, "Oracle embedding dimension")->capture_default_str();
    gen_cmd->add_option("--topk", gen.context_size, "K for the dense-hiding self-check")->capture_default_str();
    gen_cmd->add_option("--out", gen_out, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }
    spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);

    try {
        if (*index_cmd) {
            if (!fs::exists(corpus_path)) {
                err << "error: corpus file not found: " << corpus_path << "\n";
                return kExitConfig;
            }
            auto encoder = make_encoder(index_encoder.spec, index_encoder.remote_dimension);
            auto records = load_corpus(corpus_path);
            bool needs_extraction =
                std::any_of(records.begin(), records.end(), [](const CorpusRecord& r) { return !r.triples; });
            if (needs_extraction) {
                HttpChatClient llm(ServiceConfig::from_env("HELP_LLM"));
                ExtractionStats stats;
                records = extract_triples(std::move(records), llm, {}, &stats);
                spdlog::info("extraction: {} extracted, {} passed through, {} failed", stats.extracted,
                             stats.passed_through, stats.failed);
            }
            auto graph = build_and_embed(records, *encoder, batch_size);
            auto manifest = save_index(out_dir, graph, canonical_encoder_spec(index_encoder.spec));
            out << fmt::format("wrote {}\n  encoder    {}\n  dimension  {}\n  passages   {}\n  triplets   {}\n"
                               "  entities   {}\n  hash       {}\n",
                               out_dir, manifest.encoder_id, manifest.dimension, manifest.passage_count,
                               manifest.triplet_count, graph.entity_count(), manifest.content_hash);
            return kExitOk;
        }

        if (*query_cmd) {
            auto [index, encoder] = open_index(index_dir, query_encoder);
            auto result = retrieve(index.graph, *encoder, question, query_opts.expansion, query_opts.hybrid);
            if (format == "text") {
                print_result_text(out, index.graph, result, !omit_timings);
            } else {
                out << result_json(index.graph, result, !omit_timings).dump(2) << "\n";
            }
            return kExitOk;
        }

        if (*bench_cmd) {
            if (!sweep.empty() && !grid.empty()) {
                err << "error: give either --sweep or --grid, not both\n";
                return kExitConfig;
            }
            std::string spec = sweep.empty() ? grid : sweep;
            std::vector<SweepPoint> points;
            if (spec.empty()) {
                bench_opts.expansion.validate();
                bench_opts.hybrid.validate();
                points.push_back(SweepPoint{bench_opts.expansion, bench_opts.hybrid, {}});
            } else {
                points = expand_sweep(spec, bench_opts.expansion, bench_opts.hybrid);
            }
            auto [index, encoder] = open_index(bench_index, bench_encoder);
            auto questions = load_qa(qa_path);
            std::optional<HttpChatClient> llm;
            if (generate) {
                llm.emplace(ServiceConfig::from_env("HELP_LLM"));
            }
            if (!report_dir.empty()) {
                fs::create_directories(report_dir);
            }
            std::vector<BenchReport> reports;
            for (const auto& point : points) {
                auto report = run_benchmark(index.graph, *encoder, questions, point.expansion, point.hybrid,
                                            llm ? &*llm : nullptr);
                report.labels = point.labels;
                if (!report_dir.empty()) {
                    std::ofstream file(fs::path(report_dir) / report_file_name(point.labels));
                    file << report_to_json(report) << "\n";
                }
                reports.push_back(std::move(report));
            }
            if (bench_format == "json") {
                out << "[\n";
                for (std::size_t i = 0; i < reports.size(); ++i) {
                    out << report_to_json(reports[i]) << (i + 1 < reports.size() ? ",\n" : "\n");
                }
                out << "]\n";
            } else {
                out << summary_table(reports);
            }
            return kExitOk;
        }

        if (*gen_cmd) {
            auto fixture = gen_synthetic(gen);
            write_fixture(gen_out, fixture);
            out << fmt::format("wrote {}: {} passages, {} questions, {} oracle vectors (dim {})\n", gen_out,
                               fixture.corpus.size(), fixture.questions.size(), fixture.table.size(),
                               fixture.dimension);
            return kExitOk;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}

}  // namespace hyperpath::cli
