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

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "cli.h"
#include "json.hpp"

namespace hyperpath {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome
run(std::vector<std::string> args) {
    args.insert(args.begin(), "hyperpath");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string
slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

class CliTest : public ::testing::Test {
protected:
    void
    SetUp() override {
        root_ = fs::temp_directory_path() / ("hyperpath_cli_" + std::to_string(::getpid()) + "_" +
                                             ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::remove_all(root_);
        fs::create_directories(root_);
        corpus_ = std::string(HYPERPATH_TEST_DATA_DIR) + "/case_study/corpus.jsonl";
        qa_ = std::string(HYPERPATH_TEST_DATA_DIR) + "/case_study/qa.jsonl";
    }
    void
    TearDown() override {
        std::error_code ec;
        fs::remove_all(root_, ec);
    }

    std::string
    build_index() {
        auto dir = (root_ / "idx").string();
        auto r = run({"index", "--corpus", corpus_, "--out", dir, "--encoder", "hash"});
        EXPECT_EQ(r.code, 0) << r.err;
        return dir;
    }

    fs::path root_;
    std::string corpus_;
    std::string qa_;
};

TEST_F(CliTest, IndexWritesBundle) {
    auto dir = build_index();
    EXPECT_TRUE(fs::exists(fs::path(dir) / "manifest.json"));
    auto manifest = json::parse(slurp(fs::path(dir) / "manifest.json"));
    EXPECT_EQ(manifest.at("encoder_spec"), "hash");
    EXPECT_EQ(manifest.at("passage_count"), 13);
}

TEST_F(CliTest, MissingCorpusIsExit2) {
    auto missing = (root_ / "nope.jsonl").string();
    auto r = run({"index", "--corpus", missing, "--out", (root_ / "x").string()});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find(missing), std::string::npos);
}

TEST_F(CliTest, RemoteWithoutUrlIsExit2) {
    ::unsetenv("HELP_EMBED_URL");
    auto r = run({"index", "--corpus", corpus_, "--out", (root_ / "x").string(), "--encoder", "remote"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("HELP_EMBED_URL"), std::string::npos);
}

TEST_F(CliTest, UnreachableEncoderIsExit3AndWritesNothing) {
    ::setenv("HELP_EMBED_URL", "http://127.0.0.1:9/v1/embeddings", 1);
    auto out = root_ / "x";
    auto r = run({"index", "--corpus", corpus_, "--out", out.string(), "--encoder", "remote", "--embed-dim", "8"});
    ::unsetenv("HELP_EMBED_URL");
    EXPECT_EQ(r.code, 3) << r.err;
    EXPECT_FALSE(fs::exists(out / "manifest.json"));
}

TEST_F(CliTest, QueryJson) {
    auto dir = build_index();
    auto r = run({"query", "--index", dir, "--question", "Who is the husband of Princess Elene Of Georgia?", "--hops",
                  "2", "--quota", "4", "--topk", "5"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto doc = json::parse(r.out);
    EXPECT_EQ(doc.at("query"), "Who is the husband of Princess Elene Of Georgia?");
    ASSERT_EQ(doc.at("passages").size(), 5u);
    EXPECT_EQ(doc.at("passages")[0].at("id"), "princess-elene-of-georgia");
    EXPECT_EQ(doc.at("passages")[0].at("channel"), "path");
    EXPECT_FALSE(doc.at("passages")[0].at("supporting_triplets").empty());
    EXPECT_EQ(doc.at("passages")[4].at("channel"), "dense");
    EXPECT_TRUE(doc.at("timings_ms").contains("total"));
    EXPECT_EQ(doc.at("hypernodes")[0].at("triplets")[0].size(), 3u);
}

TEST_F(CliTest, QueryIsByteStableWithoutTimings) {
    auto dir = build_index();
    std::vector<std::string> args{"query", "--index", dir, "--question", "husband of Elene", "--omit-timings"};
    auto a = run(args);
    auto b = run(args);
    ASSERT_EQ(a.code, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(a.out.find("timings_ms"), std::string::npos);
}

TEST_F(CliTest, OneHopIsSeedsOnly) {
    auto dir = build_index();
    auto r = run({"query", "--index", dir, "--question", "Who is the husband of Princess Elene Of Georgia?", "--hops",
                  "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto doc = json::parse(r.out);
    ASSERT_EQ(doc.at("hypernodes").size(), 3u);
    for (const auto& h : doc.at("hypernodes")) {
        EXPECT_EQ(h.at("triplets").size(), 1u);
    }
}

TEST_F(CliTest, QueryText) {
    auto dir = build_index();
    auto r = run({"query", "--index", dir, "--question", "Who is the husband of Princess Elene Of Georgia?",
                  "--format", "text"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("princess-elene-of-georgia"), std::string::npos);
    EXPECT_NE(r.out.find("hypernodes"), std::string::npos);
}

TEST_F(CliTest, QueryRejectsMismatchedEncoder) {
    auto dir = build_index();
    auto r = run({"query", "--index", dir, "--question", "x", "--encoder", "hash:64"});
    EXPECT_EQ(r.code, 2);
}

TEST_F(CliTest, BadFlagsAreExit2) {
    EXPECT_EQ(run({"query", "--question", "x"}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    auto dir = build_index();
    EXPECT_EQ(run({"query", "--index", dir, "--question", "x", "--quota", "6"}).code, 2);
    EXPECT_EQ(run({"--help"}).code, 0);
}

TEST_F(CliTest, BenchSweepWritesReports) {
    auto dir = build_index();
    auto out = root_ / "reports";
    auto r = run({"bench", "--index", dir, "--qa", qa_, "--sweep", "quota=0..5", "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(out)) {
        auto doc = json::parse(slurp(e.path()));
        EXPECT_TRUE(doc.at("labels").contains("quota"));
        ++files;
    }
    EXPECT_EQ(files, 6u);
    // Header plus one line per point.
    EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 7);
}

TEST_F(CliTest, BenchGrid) {
    auto dir = build_index();
    auto r = run({"bench", "--index", dir, "--qa", qa_, "--grid", "seed=1..5,beam=30,50,70,100", "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(json::parse(r.out).size(), 20u);
    EXPECT_EQ(run({"bench", "--index", dir, "--qa", qa_, "--sweep", "quota=1", "--grid", "hops=1"}).code, 2);
    EXPECT_EQ(run({"bench", "--index", dir, "--qa", qa_, "--sweep", "quota=9"}).code, 2);
}

TEST_F(CliTest, GenSyntheticIsDeterministic) {
    auto a = root_ / "a";
    auto b = root_ / "b";
    for (const auto& dir : {a, b}) {
        auto r = run({"gen-synthetic", "--chains", "20", "--hops", "2", "--seed", "7", "--out", dir.string()});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    for (auto name : {"corpus.jsonl", "qa.jsonl", "oracle.json"}) {
        EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
    }
    auto idx = root_ / "idx";
    auto r = run({"index", "--corpus", (a / "corpus.jsonl").string(), "--out", idx.string(), "--encoder",
                  "oracle:" + (a / "oracle.json").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    // The manifest remembers the oracle table, so query needs no --encoder.
    r = run({"bench", "--index", idx.string(), "--qa", (a / "qa.jsonl").string(), "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_DOUBLE_EQ(json::parse(r.out)[0].at("aggregates").at("recall_at_k").get<double>(), 1.0);
}

TEST_F(CliTest, GenSyntheticRefusesUnhiddenFixture) {
    auto r = run({"gen-synthetic", "--chains", "1", "--distractors", "0", "--out", (root_ / "s").string()});
    EXPECT_EQ(r.code, 2);
}

}  // namespace
}  // namespace hyperpath
